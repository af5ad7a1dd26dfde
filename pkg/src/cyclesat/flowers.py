"""Layered C_4-saturated constructions: shared types, exact edge-count formulas,
and the structural validator.

Both variants are recursive: level i splits off a hub set R_i and petal sets
V_j^i from V^i, wires them with perfect matchings, and recurses on V^{i+1};
the final level is closed with a maximal C_4-free core.  Saturation is a
deterministic consequence of the numbered structural conditions, so the
validator checks each condition literally and the builders only carry whp
risk in whether their matchings exist.

Edge-count formulas (exact, checked against every build):

* triangle-hub variant ("r-flower"):
    |E| = core + (3/2) (n - |V^{r+1}| - r) + 3 (|V^2| + ... + |V^{r+1}|)
* star-hub variant ("sr-flower"):
    |E| = core - r + ((s+2)/2) (n - |V^{r+1}|) - r s (s+1)/2
          + s (|V^2| + ... + |V^{r+1}|)
  Per level: a spanning tree on the shell (|shell|-1 edges), a perfect
  matching inside every petal (|petal|/2 per petal), one perfect matching
  between every pair of petals (|petal| per pair), and s|V^{i+1}| edges into
  the next level; summing gives the (s+2)/2 coefficient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import Graph
from .saturation import is_cm_free, is_saturated

R_FLOWER = "r-flower"
SR_FLOWER = "sr-flower"

#: p threshold separating the two variants: triangle hubs need p > 1 - 1/cbrt(7)
P_THRESHOLD = 1.0 - 1.0 / (7.0 ** (1.0 / 3.0))


def recursion_stop_size(n: int) -> int:
    """Levels end when the next level drops below max(64, ceil(sqrt(n)/4))."""
    return max(64, math.ceil(math.sqrt(n) / 4))


@dataclass
class FlowerLevel:
    hubs: list[int]                      # [v1,v2,v3] or [v0,v1..vs]
    petals: list[dict]                   # per petal: named vertex arrays
    vnext: np.ndarray                    # V^{i+1} (sorted original labels)


@dataclass
class FlowerConstruction:
    variant: str                         # R_FLOWER or SR_FLOWER
    n: int
    p: float
    s: int | None                        # petal count per level (sr variant), else None
    nominal_r: int
    levels: list[FlowerLevel]
    core_vertices: np.ndarray
    core_edge_count: int
    selected_edges: np.ndarray           # canonical (m, 2)
    log: list[str] = field(default_factory=list)

    @property
    def r_effective(self) -> int:
        return len(self.levels)

    @property
    def edge_count(self) -> int:
        return int(self.selected_edges.shape[0])

    @property
    def level_sizes(self) -> list[int]:
        """|V^2|, ..., |V^{r+1}| for the effective r."""
        return [int(lvl.vnext.size) for lvl in self.levels]

    def as_graph(self) -> Graph:
        return Graph.from_edges(self.n, self.selected_edges)

    def predicted_edge_count(self) -> int:
        return flower_edge_count(self.variant, self.core_edge_count, self.n,
                                 self.r_effective, self.s, self.level_sizes)

    def to_json(self) -> bytes:
        return json.dumps({
            "variant": self.variant,
            "n": self.n, "p": self.p, "s": self.s,
            "nominal_r": self.nominal_r, "r_effective": self.r_effective,
            "level_sizes": self.level_sizes,
            "core_size": int(self.core_vertices.size),
            "core_edges": self.core_edge_count,
            "log": self.log,
            "edges": [[int(u), int(v)] for u, v in self.selected_edges],
        }, separators=(",", ":")).encode("utf-8")


def flower_edge_count(variant: str, core_edges: int, n: int, r: int,
                      s: int | None, level_sizes: list[int]) -> int:
    """Exact edge count of a well-formed flower from its level sizes.

    Rejects inputs where the formula is non-integral, which signals an invalid
    decomposition rather than a rounding issue.
    """
    if len(level_sizes) != r:
        raise ValueError(f"level_sizes must have r={r} entries, got {len(level_sizes)}")
    v_last = level_sizes[-1] if r >= 1 else n
    total_next = sum(level_sizes)
    if variant == R_FLOWER:
        val = Fraction(core_edges) + Fraction(3, 2) * (n - v_last - r) + 3 * total_next
    elif variant == SR_FLOWER:
        if s is None or s < 2:
            raise ValueError("sr variant needs s >= 2")
        val = (Fraction(core_edges) - r + Fraction(s + 2, 2) * (n - v_last)
               - Fraction(r * s * (s + 1), 2) + s * total_next)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if val.denominator != 1:
        raise ValueError(f"non-integral edge count {val} signals an invalid decomposition")
    return int(val)


# -- validator ---------------------------------------------------------------------


@dataclass
class FlowerValidation:
    ok: bool
    violations: list[tuple[str, str]]    # (condition, witness description)
    checked_conditions: int

    @property
    def first_violation(self) -> tuple[str, str] | None:
        return self.violations[0] if self.violations else None


class _EdgeIndex:
    """Adjacency over the construction's edge set, with membership helpers."""

    def __init__(self, n: int, edges: np.ndarray):
        self.n = n
        self.adj: dict[int, set[int]] = {}
        for u, v in edges:
            self.adj.setdefault(int(u), set()).add(int(v))
            self.adj.setdefault(int(v), set()).add(int(u))

    def neighbors(self, u: int) -> set[int]:
        return self.adj.get(u, set())

    def edges_between(self, s1: set[int], s2: set[int]) -> list[tuple[int, int]]:
        small, other = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
        out = []
        for u in small:
            for w in self.adj.get(u, ()):
                if w in other:
                    out.append((u, w) if u in s1 else (w, u))
        return out

    def edges_within(self, s: set[int]) -> list[tuple[int, int]]:
        out = []
        for u in s:
            for w in self.adj.get(u, ()):
                if w in s and u < w:
                    out.append((u, w))
        return out


def _is_pm_between(pairs: list[tuple[int, int]], s1: set[int], s2: set[int]) -> bool:
    if len(pairs) != len(s1) or len(s1) != len(s2):
        return False
    left = set()
    right = set()
    for u, v in pairs:
        if u in left or v in right:
            return False
        left.add(u)
        right.add(v)
    return left == s1 and right == s2


def _is_internal_pm(pairs: list[tuple[int, int]], s: set[int]) -> bool:
    if 2 * len(pairs) != len(s):
        return False
    seen: set[int] = set()
    for u, v in pairs:
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return seen == s


def validate_flower(c: FlowerConstruction, host) -> FlowerValidation:
    """Check every numbered condition of the relevant flower definition literally.

    Also checks the global C_4-freeness of the whole construction (the
    stand-in for the figure-only local configurations) and that the core is an
    inclusion-maximal C_4-free subgraph of its induced host graph.  Violations
    are data; the first one carries a witness.
    """
    bad: list[tuple[str, str]] = []
    checked = 0
    n = c.n
    edges = c.selected_edges

    # edges must exist in the host
    checked += 1
    present = host.pair_bool(edges[:, 0], edges[:, 1])
    if not np.all(present):
        i = int(np.nonzero(~present)[0][0])
        bad.append(("edges-subset", f"edge ({int(edges[i,0])}, {int(edges[i,1])}) not in host"))

    idx = _EdgeIndex(n, edges)
    consumed: set[tuple[int, int]] = set()

    def consume(pairs) -> None:
        for u, v in pairs:
            consumed.add((min(u, v), max(u, v)))

    level_sets = [np.arange(n, dtype=np.int64)]
    for lvl in c.levels:
        level_sets.append(lvl.vnext)

    # condition 1: each V^i is the disjoint union of hubs, petals, and V^{i+1}
    for i, lvl in enumerate(c.levels):
        checked += 1
        parts = [np.asarray(lvl.hubs, dtype=np.int64)]
        parts += [np.asarray(p["members"], dtype=np.int64) for p in lvl.petals]
        parts.append(lvl.vnext)
        union = np.concatenate(parts)
        if union.size != len(set(union.tolist())):
            bad.append((f"level{i+1}.partition", "hub/petal/next sets are not disjoint"))
        elif set(union.tolist()) != set(level_sets[i].tolist()):
            bad.append((f"level{i+1}.partition", "union of parts differs from V^i"))
    checked += 1
    if set(c.core_vertices.tolist()) != set(level_sets[-1].tolist()):
        bad.append(("core.vertices", "core vertex set differs from final level"))

    for i, lvl in enumerate(c.levels):
        tag = f"level{i+1}"
        vi = set(level_sets[i].tolist())
        vnext = set(lvl.vnext.tolist())
        hubs = [int(h) for h in lvl.hubs]
        petal_sets = [set(int(x) for x in p["members"]) for p in lvl.petals]

        if c.variant == R_FLOWER:
            v1, v2, v3 = hubs
            # condition 2: A[R_i] is a triangle
            checked += 1
            tri = idx.edges_within(set(hubs))
            if len(tri) != 3:
                bad.append((f"{tag}.cond2", f"hub set induces {len(tri)} edges, want 3"))
            consume(tri)
            hub_list = hubs
        else:
            v0 = hubs[0]
            checked += 1
            hub_edges = idx.edges_within(set(hubs))
            want = {(min(v0, h), max(v0, h)) for h in hubs[1:]}
            if set((min(u, v), max(u, v)) for u, v in hub_edges) != want:
                bad.append((f"{tag}.cond2",
                            "hub set must induce exactly the star at the center hub"))
            consume(hub_edges)
            # condition 3a: neighbors of v0 within V^i are exactly v1..vs
            checked += 1
            nb0 = {w for w in idx.neighbors(v0) if w in vi}
            if nb0 != set(hubs[1:]):
                bad.append((f"{tag}.cond3", f"center hub neighborhood in V^i is {sorted(nb0)[:6]}..."))
            hub_list = hubs[1:]

        # condition 3: N_{A[V^i]}(v_j) minus hubs equals the petal
        for j, vj in enumerate(hub_list):
            checked += 1
            nb = {w for w in idx.neighbors(vj) if w in vi} - set(hubs)
            if nb != petal_sets[j]:
                extra = list(nb - petal_sets[j])[:3]
                missing = list(petal_sets[j] - nb)[:3]
                bad.append((f"{tag}.cond3",
                            f"petal {j}: neighborhood mismatch extra={extra} missing={missing}"))
            consume((vj, w) for w in petal_sets[j])

        if c.variant == R_FLOWER:
            for j, p in enumerate(lvl.petals):
                W = set(int(x) for x in p["W"])
                U = set(int(x) for x in p["U"])
                Y = set(int(x) for x in p["Y"])
                checked += 1
                if not (W | U | Y == petal_sets[j] and not (W & U) and not (W & Y) and not (U & Y)):
                    bad.append((f"{tag}.petal{j}.split", "W/U/Y do not partition the petal"))
                checked += 1
                wn = idx.edges_between(W, vnext)
                if not _is_pm_between(wn, W, vnext):
                    bad.append((f"{tag}.cond4.1", f"petal {j}: W<->V^{i+2} is not a perfect matching"))
                consume(wn)
                checked += 1
                wu = idx.edges_between(W, U)
                if not _is_pm_between(wu, W, U):
                    bad.append((f"{tag}.cond4.2", f"petal {j}: W<->U is not a perfect matching"))
                consume(wu)
                checked += 1
                yy = idx.edges_within(Y)
                if not _is_internal_pm(yy, Y):
                    bad.append((f"{tag}.cond4.3", f"petal {j}: E(A[Y]) is not a perfect matching"))
                consume(yy)
        else:
            s = len(hub_list)
            Us = [set(int(x) for x in p["U"]) for p in lvl.petals]
            Ls = [set(int(x) for x in p["L"]) for p in lvl.petals]
            Ws = [set(int(x) for x in p["W"]) for p in lvl.petals]
            for j, p in enumerate(lvl.petals):
                checked += 1
                if not (Us[j] | Ls[j] == petal_sets[j] and not (Us[j] & Ls[j]) and Ws[j] <= Us[j]):
                    bad.append((f"{tag}.petal{j}.split", "U/L do not partition the petal or W not in U"))
                checked += 1
                if not (len(Us[j]) == len(Ls[j]) and len(Ws[j]) == len(vnext)):
                    bad.append((f"{tag}.cond4.1", f"petal {j}: |U|={len(Us[j])} |L|={len(Ls[j])} "
                                                  f"|W|={len(Ws[j])} |next|={len(vnext)}"))
                checked += 1
                ul = idx.edges_within(petal_sets[j])
                ul_cross = [(u, v) if u in Us[j] else (v, u) for u, v in ul]
                if not _is_pm_between(ul_cross, Us[j], Ls[j]):
                    bad.append((f"{tag}.cond4.2", f"petal {j}: E(A[U u L]) is not a U<->L perfect matching"))
                consume(ul)
                checked += 1
                wn = idx.edges_between(Ws[j], vnext)
                if not _is_pm_between(wn, Ws[j], vnext):
                    bad.append((f"{tag}.cond4.3", f"petal {j}: W<->V^{i+2} is not a perfect matching"))
                consume(wn)
            for j1 in range(s):
                for j2 in range(j1 + 1, s):
                    checked += 1
                    uu = idx.edges_between(Us[j1], Us[j2])
                    if not _is_pm_between(uu, Us[j1], Us[j2]):
                        bad.append((f"{tag}.cond4.4", f"U_{j1+1}<->U_{j2+1} is not a perfect matching"))
                    consume(uu)
                    checked += 1
                    ll = idx.edges_between(Ls[j1], Ls[j2])
                    if not _is_pm_between(ll, Ls[j1], Ls[j2]):
                        bad.append((f"{tag}.cond4.5", f"L_{j1+1}<->L_{j2+1} is not a perfect matching"))
                    consume(ll)
                    checked += 1
                    ww = idx.edges_between(Ws[j1], Ws[j2])
                    if ww:
                        bad.append((f"{tag}.cond4.6", f"W_{j1+1}<->W_{j2+1} has {len(ww)} edges, want 0"))
                    checked += 1
                    lu = [e for e in idx.edges_between(Us[j1], Ls[j2])]
                    lu += [e for e in idx.edges_between(Ls[j1], Us[j2])]
                    if lu:
                        bad.append((f"{tag}.cond6", f"stray U/L cross edges between petals {j1+1},{j2+1}"))

    # core: inclusion-maximal C_4-free subgraph of the induced host graph
    checked += 1
    core = c.core_vertices
    core_set = set(int(v) for v in core)
    core_pairs = idx.edges_within(core_set)
    consume(core_pairs)
    if hasattr(host, "subgraph"):
        gcore, verts = host.subgraph(core)
    else:
        gcore, verts = host.induced_subgraph(core)
    pos = {int(v): i for i, v in enumerate(verts)}
    hcore = Graph.from_edges(core.size, [(pos[u], pos[v]) for u, v in core_pairs])
    if hcore.edge_count != c.core_edge_count:
        bad.append(("core.count", f"core has {hcore.edge_count} edges, recorded {c.core_edge_count}"))
    rep = is_saturated(hcore, gcore, 4)
    if not rep.saturated:
        why = "not C_4-free" if not rep.is_free else f"non-edge {rep.violating_non_edges[0]} closes nothing"
        bad.append(("cond5", f"core is not an inclusion-maximal C_4-free subgraph: {why}"))

    # condition 6: no edges beyond the ones the definition describes
    checked += 1
    all_keys = set((int(u), int(v)) for u, v in edges)
    stray = all_keys - consumed
    if stray:
        bad.append(("cond6", f"{len(stray)} unclassified edges, e.g. {sorted(stray)[:3]}"))

    # global C_4-freeness (stand-in for the figure-only configurations)
    checked += 1
    if not is_cm_free(c.as_graph(), 4):
        bad.append(("global-c4-free", "construction contains a C_4"))

    return FlowerValidation(ok=not bad, violations=bad, checked_conditions=checked)
