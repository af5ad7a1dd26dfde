"""Exact C_m containment, freeness, saturation verification, greedy completion,
and the brute-force minimum-saturation oracle.

Conventions: "creates a copy of C_m" means a cycle of length exactly m (not
<= m); a spanning subgraph H of G is saturated when H is C_m-free and every
edge of E(G) \\ E(H) closes a C_m when added.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import BITSET_LIMIT, Graph, _bits_of
from .rng import RngSeed, as_seed

_HIGH_DEGREE = 1024  # wedge enumeration goes middle-first below this degree


# -- path / cycle queries --------------------------------------------------------


def _path_exists_rows(rows: list[int], u: int, v: int, k: int, blocked: int) -> bool:
    """Simple path of exactly k edges from u to v avoiding `blocked` interior vertices."""
    if k == 1:
        return bool((rows[u] >> v) & 1)
    if k == 2:
        return bool(rows[u] & rows[v] & ~blocked & ~(1 << v) & ~(1 << u))
    # expand from the lower-degree endpoint
    if rows[u].bit_count() > rows[v].bit_count():
        u, v = v, u
    for w in _bits_of(rows[u] & ~blocked & ~(1 << v)):
        if _path_exists_rows(rows, w, v, k - 1, blocked | (1 << w)):
            return True
    return False


def _path_exists_adj(adj: dict[int, set[int]] | list, u: int, v: int, k: int,
                     blocked: set[int]) -> bool:
    nb_u = adj[u]
    if k == 1:
        return v in nb_u
    nb_v = adj[v]
    if k == 2:
        for w in (nb_u if len(nb_u) <= len(nb_v) else nb_v):
            if w not in blocked and w != u and w != v and (w in nb_v if len(nb_u) <= len(nb_v) else w in nb_u):
                return True
        return False
    if len(nb_u) > len(nb_v):
        u, v = v, u
        nb_u = adj[u]
    for w in nb_u:
        if w in blocked or w == v:
            continue
        blocked.add(w)
        if _path_exists_adj(adj, w, v, k - 1, blocked):
            blocked.discard(w)
            return True
        blocked.discard(w)
    return False


def contains_cycle_edge(h: Graph, u: int, v: int, m: int) -> bool:
    """True iff h + {u,v} contains a C_m through {u,v}, i.e. h has a simple
    (m-1)-edge path between u and v."""
    if m < 3:
        raise ValueError("m must be at least 3")
    if u == v:
        raise ValueError("u and v must differ")
    if h.has_edge(u, v):
        raise ValueError(f"edge ({u}, {v}) already present in h")
    if h.n <= BITSET_LIMIT:
        return _path_exists_rows(h.rows(), u, v, m - 1, (1 << u) | (1 << v))
    adjsets = [set(int(x) for x in a) for a in h.adjacency_lists()]
    return _path_exists_adj(adjsets, u, v, m - 1, {u, v})


def _two_core(n: int, edges: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Vertices of the 2-core and its adjacency lists (original labels)."""
    deg = np.zeros(n, dtype=np.int64)
    if edges.shape[0]:
        np.add.at(deg, edges[:, 0], 1)
        np.add.at(deg, edges[:, 1], 1)
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(int(v))
        adj[v].append(int(u))
    alive = deg > 0
    queue = [int(v) for v in np.nonzero(deg == 1)[0]]
    while queue:
        v = queue.pop()
        if not alive[v] or deg[v] > 1:
            continue
        alive[v] = False
        deg[v] = 0
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    queue.append(w)
                elif deg[w] == 0:
                    alive[w] = False
    core = np.nonzero(alive & (deg >= 2))[0]
    core_set = set(int(v) for v in core)
    core_adj = [np.asarray(sorted(w for w in adj[int(v)] if w in core_set), dtype=np.int64)
                for v in core]
    return core, core_adj


def _has_c4_sparse(core: np.ndarray, core_adj: list[np.ndarray], n: int) -> bool:
    """Any pair of vertices with >= 2 common neighbors?  Degree-split wedge scan:
    wedges through low-degree middles are enumerated and deduplicated; the few
    high-degree middles are handled by direct neighborhood intersection."""
    k = core.size
    if k < 4:
        return False
    degs = np.asarray([a.size for a in core_adj], dtype=np.int64)
    high_idx = np.nonzero(degs > _HIGH_DEGREE)[0]
    high_marks = []
    for hi in high_idx:
        mark = np.zeros(n, dtype=bool)
        mark[core_adj[hi]] = True
        high_marks.append(mark)
    # high-high middles
    for i in range(len(high_idx)):
        for j in range(i + 1, len(high_idx)):
            if np.count_nonzero(high_marks[i][core_adj[high_idx[j]]]) >= 2:
                return True
    # wedges through low middles, keyed by endpoint pair
    keys = []
    nn = np.uint64(n)
    for i in range(k):
        if degs[i] > _HIGH_DEGREE or degs[i] < 2:
            continue
        nb = core_adj[i].astype(np.uint64)
        d = nb.size
        iu, iv = np.triu_indices(d, k=1)
        keys.append(nb[iu] * nn + nb[iv])
    if keys:
        allkeys = np.concatenate(keys)
        uniq, counts = np.unique(allkeys, return_counts=True)
        if np.any(counts >= 2):
            return True
        # low middle + high middle
        if high_marks:
            us = (uniq // nn).astype(np.int64)
            vs = (uniq % nn).astype(np.int64)
            for mark in high_marks:
                if np.any(mark[us] & mark[vs]):
                    return True
    return False


def _has_cm_dfs(core: np.ndarray, core_adj: list[np.ndarray], m: int) -> bool:
    """Canonical-start cycle search: the cycle's minimum vertex first, direction
    fixed by second-vertex < last-vertex."""
    pos = {int(v): i for i, v in enumerate(core)}
    adjs = [[pos[int(w)] for w in a] for a in core_adj]
    k = core.size

    for s in range(k):
        # DFS over vertices with index > s
        start_nbrs = [w for w in adjs[s] if w > s]
        path = [s]
        on_path = {s}

        def dfs(u: int, depth: int) -> bool:
            if depth == m - 1:
                # close the cycle: u adjacent to s, and direction canonical
                return s in set(adjs[u]) and path[1] < u
            for w in adjs[u]:
                if w <= s or w in on_path:
                    continue
                # leave room: closing neighbor must exist later
                path.append(w)
                on_path.add(w)
                if dfs(w, depth + 1):
                    return True
                path.pop()
                on_path.discard(w)
            return False

        for w in start_nbrs:
            path.append(w)
            on_path.add(w)
            if dfs(w, 1):
                return True
            path.pop()
            on_path.discard(w)
    return False


def is_cm_free(h: Graph, m: int) -> bool:
    """True iff h has no (not necessarily induced) cycle of length exactly m.

    Cycles survive 2-core peeling, so the search runs on the 2-core; m = 4 has
    a dedicated common-neighbor detector that stays fast on sparse graphs with
    a few huge-degree vertices.
    """
    if m < 3:
        raise ValueError("m must be at least 3")
    core, core_adj = _two_core(h.n, h.edges())
    if core.size < m:
        return True
    if m == 4:
        return not _has_c4_sparse(core, core_adj, h.n)
    return not _has_cm_dfs(core, core_adj, m)


# -- saturation report -----------------------------------------------------------


@dataclass
class SaturationReport:
    is_free: bool
    non_edges_checked: int
    violating_non_edges: list[tuple[int, int]]
    sampled: bool = False

    @property
    def violation_fraction(self) -> float:
        return len(self.violating_non_edges) / max(1, self.non_edges_checked)

    @property
    def saturated(self) -> bool:
        return self.is_free and not self.violating_non_edges

    def to_json(self) -> bytes:
        return json.dumps({
            "is_free": bool(self.is_free),
            "checked": int(self.non_edges_checked),
            "violations": [[int(u), int(v)] for u, v in self.violating_non_edges],
        }, separators=(",", ":")).encode("utf-8")


def _edge_key_set(edges: np.ndarray, n: int) -> set[int]:
    return set((edges[:, 0].astype(np.int64) * n + edges[:, 1]).tolist())


def is_saturated(h: Graph, g, m: int, *, sample: int | None = None,
                 rng: RngSeed | int = 0) -> SaturationReport:
    """Verify C_m-freeness of h and that every host edge missing from h closes a C_m.

    ``g`` may be an explicit Graph (every non-edge of h in E(g) is checked) or a
    lazy host, in which case ``sample`` candidate pairs are drawn uniformly; the
    report records how many non-edges were actually checked.
    """
    n = h.n
    if getattr(g, "n", None) != n:
        raise ValueError(f"h and g must have the same vertex count, got {n} != {getattr(g, 'n', None)}")
    h_edges = h.edges()
    # containment check
    if isinstance(g, Graph):
        gkeys = _edge_key_set(g.edges(), n)
        for u, v in h_edges:
            if int(u) * n + int(v) not in gkeys:
                raise ValueError(f"h is not a subgraph of g: edge ({int(u)}, {int(v)}) missing from g")
    else:
        if h_edges.shape[0]:
            present = g.pair_bool(h_edges[:, 0], h_edges[:, 1])
            if not np.all(present):
                i = int(np.nonzero(~present)[0][0])
                raise ValueError(f"h is not a subgraph of g: edge ({int(h_edges[i,0])}, {int(h_edges[i,1])}) missing from g")

    free = is_cm_free(h, m)
    hkeys = _edge_key_set(h_edges, n)

    use_rows = n <= BITSET_LIMIT
    rows = h.rows() if use_rows else None
    adjsets = None if use_rows else [set(int(x) for x in a) for a in h.adjacency_lists()]

    def closes(u: int, v: int) -> bool:
        if use_rows:
            return _path_exists_rows(rows, u, v, m - 1, (1 << u) | (1 << v))
        return _path_exists_adj(adjsets, u, v, m - 1, {u, v})

    violations: list[tuple[int, int]] = []
    checked = 0
    if sample is None:
        if not isinstance(g, Graph):
            raise ValueError("full saturation check needs an explicit host graph; pass sample= for lazy hosts")
        for u, v in g.edges():
            u, v = int(u), int(v)
            if u * n + v in hkeys:
                continue
            checked += 1
            if not closes(u, v):
                violations.append((u, v))
        return SaturationReport(free, checked, violations, sampled=False)

    gen = as_seed(rng).generator()
    target = int(sample)
    tries = 0
    while checked < target and tries < 50 * target:
        batch = max(64, target - checked)
        us = gen.integers(0, n, size=batch)
        vs = gen.integers(0, n, size=batch)
        mask = us < vs
        us, vs = us[mask], vs[mask]
        if us.size == 0:
            tries += batch
            continue
        present = g.pair_bool(us, vs) if not isinstance(g, Graph) else g.pair_bool(us, vs)
        us, vs = us[present], vs[present]
        for u, v in zip(us, vs):
            u, v = int(u), int(v)
            tries += 1
            if u * n + v in hkeys:
                continue
            checked += 1
            if not closes(u, v):
                violations.append((u, v))
            if checked >= target:
                break
        tries += batch
    return SaturationReport(free, checked, violations, sampled=True)


# -- greedy completion -----------------------------------------------------------


def greedy_saturate(h0: Graph, g: Graph, m: int, order: str | list = "lex") -> Graph:
    """Grow a maximal C_m-free subgraph of g containing h0.

    Scans E(g) \\ E(h0) in ``order`` ("lex", "random:<seed>", or an explicit
    edge sequence), adding each edge that closes no C_m.  Monotonicity of path
    existence makes the result saturated regardless of order.
    """
    n = g.n
    if h0.n != n:
        raise ValueError("h0 and g must have the same vertex count")
    if n > BITSET_LIMIT:
        raise ValueError(f"greedy_saturate uses bitset rows; n={n} > {BITSET_LIMIT}")
    if not is_cm_free(h0, m):
        raise ValueError(f"h0 is not C_{m}-free")
    gkeys = _edge_key_set(g.edges(), n)
    for u, v in h0.edges():
        if int(u) * n + int(v) not in gkeys:
            raise ValueError(f"h0 is not a subgraph of g: edge ({int(u)}, {int(v)})")

    if order == "lex":
        candidates = [(int(u), int(v)) for u, v in g.edges()]
    elif isinstance(order, str) and order.startswith("random:"):
        gen = RngSeed(int(order.split(":", 1)[1])).generator()
        candidates = [(int(u), int(v)) for u, v in g.edges()]
        gen.shuffle(candidates)
    else:
        candidates = [(min(int(u), int(v)), max(int(u), int(v))) for u, v in order]
        if set(u * n + v for u, v in candidates) - gkeys:
            raise ValueError("order contains a pair that is not an edge of g")

    rows = list(h0.rows())
    for u, v in candidates:
        if (rows[u] >> v) & 1:
            continue
        if not _path_exists_rows(rows, u, v, m - 1, (1 << u) | (1 << v)):
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph.from_rows(n, rows)


# -- exact minimum saturation ------------------------------------------------------


class BudgetExhausted(Exception):
    pass


@dataclass
class ExactResult:
    value: int | None
    witness: Graph | None
    nodes_explored: int
    complete: bool = True

    def __repr__(self) -> str:
        tag = "" if self.complete else " (unknown, best incumbent)"
        return f"ExactResult(value={self.value}{tag}, nodes={self.nodes_explored})"


def _dfs_min_sat(n: int, cand: list[tuple[int, int]], base_rows: list[int],
                 base_count: int, m: int, incumbent: list, budget: int,
                 counter: list, min_degree: int, gdeg: list[int],
                 forced_excluded: list[tuple[int, int]] = ()) -> None:
    """Branch over include/exclude for each candidate edge.

    Forced exclusion when inclusion closes a C_m; leaves are checked for
    maximality (including any edges the caller excluded up front); pruning via
    the degree-deficit lower bound.
    """
    M = len(cand)
    rem_inc = [0] * n
    for u, v in cand:
        rem_inc[u] += 1
        rem_inc[v] += 1
    deg = [r.bit_count() for r in base_rows]
    rows = list(base_rows)

    def deficit() -> int:
        need = 0
        for v in range(n):
            if gdeg[v] == 0:
                continue
            want = max(min_degree, 1)
            if deg[v] < want:
                need += want - deg[v]
        return (need + 1) // 2

    def rec(idx: int, count: int) -> None:
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExhausted
        if incumbent[0] is not None and count + deficit() >= incumbent[0]:
            return
        if idx == M:
            # maximality: every missing host edge must close a C_m
            for u, v in cand:
                if (rows[u] >> v) & 1:
                    continue
                if not _path_exists_rows(rows, u, v, m - 1, (1 << u) | (1 << v)):
                    return
            for u, v in forced_excluded:
                if not _path_exists_rows(rows, u, v, m - 1, (1 << u) | (1 << v)):
                    return
            incumbent[0] = count
            incumbent[1] = Graph.from_rows(n, list(rows))
            return
        u, v = cand[idx]
        rem_inc[u] -= 1
        rem_inc[v] -= 1
        closing = _path_exists_rows(rows, u, v, m - 1, (1 << u) | (1 << v))
        if not closing:
            # include branch first: finds saturated solutions early
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            deg[u] += 1
            deg[v] += 1
            rec(idx + 1, count + 1)
            deg[u] -= 1
            deg[v] -= 1
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        # exclude branch: dead if a vertex can no longer reach its degree floor
        want = max(min_degree, 1)
        feasible = True
        for x in (u, v):
            if gdeg[x] > 0 and deg[x] + rem_inc[x] < want:
                feasible = False
        if feasible:
            rec(idx + 1, count)
        rem_inc[u] += 1
        rem_inc[v] += 1

    rec(0, base_count)


def min_sat_exact(g: Graph, m: int, budget: int = 50_000_000,
                  edge_limit: int = 24) -> ExactResult:
    """Minimum edge count over all C_m-saturated spanning subgraphs of g, with witness.

    Depth-first search over include/exclude edge decisions; branches whose
    partial graph contains a C_m or whose degree-based lower bound meets the
    incumbent are pruned.  On complete hosts the search fixes vertex 0 as a
    minimum-degree vertex with neighborhood {1..d}, which is sound up to
    relabeling.  Budget exhaustion returns the best incumbent, flagged
    incomplete, never a silent wrong answer.
    """
    if m < 3:
        raise ValueError("m must be at least 3")
    n = g.n
    if g.edge_count > edge_limit:
        raise ValueError(f"host has {g.edge_count} edges > guard {edge_limit}; "
                         f"raise edge_limit explicitly to override")
    if n > 64:
        raise ValueError("exact search is for small hosts")
    gdeg = [int(d) for d in g.degrees()]

    # seed the incumbent with greedy completions
    incumbent: list = [None, None]
    for order in ("lex", "random:1", "random:2"):
        h = greedy_saturate(Graph.empty(n), g, m, order=order)
        if incumbent[0] is None or h.edge_count < incumbent[0]:
            incumbent[0] = h.edge_count
            incumbent[1] = h
    counter = [0]
    complete = True
    edges = [(int(u), int(v)) for u, v in g.edges()]
    is_complete_host = g.edge_count == n * (n - 1) // 2

    try:
        if is_complete_host and n >= 3:
            # vertex 0 is a minimum-degree vertex, neighbors exactly {1..d}
            for d in range(1, n):
                if (n * d + 1) // 2 >= (incumbent[0] or 10 ** 9):
                    break
                rows = [0] * n
                for j in range(1, d + 1):
                    rows[0] |= 1 << j
                    rows[j] |= 1
                if not is_cm_free(Graph.from_rows(n, rows), m):
                    continue
                cand = [(u, v) for u, v in edges if u != 0]
                hub_excluded = [(0, j) for j in range(d + 1, n)]
                _dfs_min_sat(n, cand, rows, d, m, incumbent, budget, counter, d, gdeg,
                             forced_excluded=hub_excluded)
        else:
            _dfs_min_sat(n, edges, [0] * n, 0, m, incumbent, budget, counter, 0, gdeg)
    except BudgetExhausted:
        complete = False
    return ExactResult(incumbent[0], incumbent[1], counter[0], complete)
