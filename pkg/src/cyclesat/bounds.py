"""Reference formulas: theorem-level bound coefficients and concentration values.

Asymptotic o(1) terms are evaluated as zero throughout; sweep output reports
ratios against these leading terms so finite-n drift is visible rather than
hidden behind a pass/fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import compute_s


def _log_1_over_q(n: float, p: float) -> float:
    return math.log(n) / math.log(1.0 / (1.0 - p))


def independence_number_typical(n: int, p: float) -> int:
    """Two-point concentration center for the independence number of G(n,p)."""
    base = math.log(1.0 / (1.0 - p))
    log_n = math.log(n) / base
    log_log = math.log(max(math.log(n) / base, 1.000001)) / base
    return int(math.floor(2 * log_n - 2 * log_log + 2 * math.log(math.e / 2) / base + 0.9))


def max_induced_tree_typical(n: int, p: float, C: float = 0.0) -> int:
    """floor(2 log_{1/(1-p)} n + C); the constant C is existential, so this is
    indicative only (default C = 0)."""
    return int(math.floor(2 * _log_1_over_q(n, p) + C))


def cm_lower_coefficient(n: int, p: float, m: int) -> float:
    """Leading edges-per-vertex lower envelope for C_m saturation, m >= 5."""
    return 1.0 + 1.0 / (4 * (m - 1) * _log_1_over_q(n, p))


def cm_upper_coefficient(n: int, p: float) -> float:
    """Leading edges-per-vertex upper envelope for C_m saturation, m >= 5."""
    return 1.0 + 1.0 / (2 * _log_1_over_q(n, p))


def c4_lower_coefficient() -> float:
    """Structural lower coefficient for C_4 saturation."""
    return 1.5


def c4_upper_large_p(p: float) -> float:
    """Edges-per-vertex coefficient of the triangle-hub construction, valid
    (whp regime) for p > 1 - 1/cbrt(7).  Equals 27/14 at p = 1/2."""
    q3 = (1.0 - p) ** 3
    return 3.0 * (1.0 + q3) / (2.0 * (1.0 - q3))


def c4_upper_small_p(p: float, s: int | None = None) -> float:
    """Edges-per-vertex coefficient of the star-hub construction for small p.

    This is the exact leading term of the construction's edge count,
    (s+2)/2 + s q^s / (1 - q^s) with q = 1-p: per level, petal vertices carry
    (s+2)/2 edges each (hub tree + in-petal matching + s-1 cross-petal
    matchings) and each next-level vertex is matched once from each of the s
    petals.
    """
    if s is None:
        s = compute_s(p)
    qs = (1.0 - p) ** s
    return (s + 2) / 2.0 + s * qs / (1.0 - qs)


@dataclass(frozen=True)
class ReferenceFormulas:
    n: int
    p: float
    m: int
    C: float
    independence_typical: int
    induced_tree_typical: int
    cm_lower: float
    cm_upper: float
    c4_lower: float
    c4_upper: float
    s: int

    def as_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p, "m": self.m, "C": self.C,
            "independence_typical": self.independence_typical,
            "induced_tree_typical": self.induced_tree_typical,
            "cm_lower_coefficient": self.cm_lower,
            "cm_upper_coefficient": self.cm_upper,
            "c4_lower_coefficient": self.c4_lower,
            "c4_upper_coefficient": self.c4_upper,
            "s": self.s,
        }


def reference_bounds(n: int, p: float, m: int, C: float = 0.0) -> ReferenceFormulas:
    """Numeric lower/upper envelopes (leading terms, o(1) = 0) plus the
    concentration reference values."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    s = compute_s(p)
    threshold = 1.0 - 1.0 / (7.0 ** (1.0 / 3.0))
    c4_up = c4_upper_large_p(p) if p > threshold else c4_upper_small_p(p, s)
    return ReferenceFormulas(
        n=n, p=p, m=m, C=C,
        independence_typical=independence_number_typical(n, p),
        induced_tree_typical=max_induced_tree_typical(n, p, C),
        cm_lower=cm_lower_coefficient(n, p, m),
        cm_upper=cm_upper_coefficient(n, p),
        c4_lower=c4_lower_coefficient(),
        c4_upper=c4_up,
        s=s,
    )


def saturated_edge_budget(n: int, p: float, m: int, kind: str) -> float:
    """Predicted leading edges-per-vertex coefficient for a construction kind.

    kinds: "star-factor" (C_m upper, m >= 5), "r-flower" (C_4, large p),
    "sr-flower" (C_4, small p), "greedy-baseline" (theorem envelope for the
    same (m, p), used as the comparison column in sweeps).
    """
    if kind == "star-factor":
        return cm_upper_coefficient(n, p)
    if kind == "r-flower":
        return c4_upper_large_p(p)
    if kind == "sr-flower":
        return c4_upper_small_p(p)
    if kind == "greedy-baseline":
        if m >= 5:
            return cm_upper_coefficient(n, p)
        if m == 4:
            threshold = 1.0 - 1.0 / (7.0 ** (1.0 / 3.0))
            return c4_upper_large_p(p) if p > threshold else c4_upper_small_p(p)
        return float("nan")
    raise ValueError(f"unknown construction kind {kind!r}")
