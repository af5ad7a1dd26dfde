"""Construction parameter calculator.

All logarithms are taken to base 1/(1-p) and evaluated in extended precision
(50 significant digits) before flooring, so parameter values never flip on a
float rounding boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

_DPS = 50


class NTooSmallError(ValueError):
    """A construction parameter came out non-positive at this n."""

    def __init__(self, field: str, value, message: str | None = None):
        self.field = field
        self.value = value
        super().__init__(message or f"n too small: parameter '{field}' = {value}")


def _log_base(x, base_inv_q) -> mpmath.mpf:
    return mpmath.log(x) / mpmath.log(base_inv_q)


def compute_s(p: float) -> int:
    """Minimum positive integer s with (2 s^2 + 1) (1-p)^s < 1."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    with mpmath.workdps(_DPS):
        q = mpmath.mpf(1) - mpmath.mpf(repr(p))
        s = 1
        while (2 * s * s + 1) * q ** s >= 1:
            s += 1
            if s > 10_000:
                raise RuntimeError("s search did not terminate")
        return s


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    p: float
    m: int
    a: int            # star size; meaningful only when star_size_ok
    b: int | None     # number of large stars
    ell: int | None   # number of star centers, divisible by m-2
    s: int
    r_flower: int
    r_sr: int
    d_pool: int       # floor(n / ln^2 n): search-pool size
    star_size_ok: bool

    def __post_init__(self):
        if self.ell is not None and self.m > 2:
            assert self.ell % (self.m - 2) == 0


def compute_params(n: int, p: float, m: int, strict: bool = True) -> ConstructionParams:
    """Evaluate every construction parameter at (n, p, m).

    With ``strict`` (the default) a non-positive value raises
    :class:`NTooSmallError` naming the first failing field; builders pass
    ``strict=False`` and consult ``star_size_ok`` instead, because finite-n
    fallbacks exist for the star size but not for the pool size.
    """
    if n < 3:
        raise NTooSmallError("n", n)
    if m < 3:
        raise ValueError(f"m must be at least 3, got {m}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")

    s = compute_s(p)
    with mpmath.workdps(_DPS):
        base = 1 / (mpmath.mpf(1) - mpmath.mpf(repr(p)))
        log_n = _log_base(n, base)
        log_ln_n = _log_base(mpmath.log(n), base)
        a = int(mpmath.floor(2 * log_n - 8 * log_ln_n))
        r_flower = int(mpmath.ceil(mpmath.mpf(5) / 24 * log_n))
        r_sr = int(mpmath.ceil(5 * log_n / (8 * s)))
    d_pool = int(n // (math.log(n) ** 2))

    star_ok = a >= 1
    if strict and not star_ok:
        raise NTooSmallError("a", a)
    if d_pool < 1:
        if strict:
            raise NTooSmallError("d_pool", d_pool)
        return ConstructionParams(n, p, m, a, None, None, s, r_flower, r_sr, d_pool, False)

    b = ell = None
    if star_ok:
        # minimum b with a*b + 3*d_pool + 2m > n
        b = max(0, (n - 3 * d_pool - 2 * m) // a + 1)
        cap = b + 2 * d_pool + 2 * m - 1
        ell = cap - (cap % (m - 2))
        if ell <= 0:
            if strict:
                raise NTooSmallError("ell", ell)
            ell = None
    return ConstructionParams(n, p, m, a, b, ell, s, r_flower, r_sr, d_pool, star_ok)


def effective_star_params(n: int, m: int, a_eff: int, d_pool: int) -> tuple[int, int]:
    """(b, ell) recomputed for an effective star size found by probing."""
    if a_eff < 1:
        raise NTooSmallError("a_eff", a_eff)
    b = max(1, (n - 3 * d_pool - 2 * m) // a_eff + 1)
    cap = b + 2 * d_pool + 2 * m - 1
    ell = cap - (cap % (m - 2))
    if ell <= 0:
        raise NTooSmallError("ell", ell)
    return b, ell
