"""The hub-and-stars C_m-saturated construction (m >= 5).

Shape of the output subgraph: one hub vertex adjacent to every star center;
the centers carry an induced C_{m-2}-factor; every remaining vertex is a leaf
of exactly one induced star (possibly a single matched leaf, possibly the
center of a leafless star).  Total edge count is exactly n - 1 + (number of
centers): n - 1 tree edges plus one cycle-factor edge per center.

Every cycle through the hub has length between 3 and m-1 and the factor
cycles have length m-2, so the output is C_m-free deterministically; the whp
content is only whether each assembly stage finds its star / factor /
matching, and stages degrade (smaller stars, extra centers) before failing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .matching import perfect_matching_bipartite
from .params import ConstructionParams, NTooSmallError, compute_params, effective_star_params
from .rng import RngSeed, as_seed


class ConstructionFailure(RuntimeError):
    """A construction stage exhausted its retry budget."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


# -- independent-set search (star leaves are an independent set in a neighborhood) --


def independent_in_pool(host, pool: np.ndarray, gen: np.random.Generator,
                        target: int | None = None, restarts: int = 4,
                        swap_rounds: int = 30) -> np.ndarray:
    """Greedy independent set in host[pool] with (1,2)-swap improvement.

    Filtering greedy: pick a vertex, drop its neighbors from the pool, repeat;
    then repeatedly trade one chosen vertex for two of its exclusive
    blockees.  Early exit once ``target`` is reached.
    """
    pool = np.asarray(pool, dtype=np.int64)
    if pool.size == 0:
        return pool
    best: np.ndarray | None = None
    for attempt in range(max(1, restarts)):
        order = gen.permutation(pool)
        chosen: list[int] = []
        cand = order
        while cand.size:
            v = int(cand[0])
            chosen.append(v)
            rest = cand[1:]
            cand = rest[~host.row_bool(v, rest)]
            if target is not None and len(chosen) >= target:
                break
        if target is None or len(chosen) < target:
            chosen = _swap_improve(host, pool, chosen, gen, target, swap_rounds)
        if best is None or len(chosen) > best.size:
            best = np.asarray(sorted(chosen), dtype=np.int64)
        if target is not None and best.size >= target:
            break
    return best if best is not None else np.empty(0, dtype=np.int64)


def _swap_improve(host, pool: np.ndarray, chosen: list[int],
                  gen: np.random.Generator, target: int | None,
                  rounds: int) -> list[int]:
    # blockers[i] = number of chosen vertices adjacent to pool[i]
    chosen_set = set(int(v) for v in chosen)
    pos = {int(v): i for i, v in enumerate(pool)}
    rows: dict[int, np.ndarray] = {}
    blockers = np.zeros(pool.size, dtype=np.int32)
    in_chosen = np.zeros(pool.size, dtype=bool)
    for v in chosen_set:
        rows[v] = host.row_bool(v, pool)
        blockers += rows[v]
        in_chosen[pos[v]] = True

    def add(v: int) -> None:
        chosen_set.add(v)
        rows[v] = host.row_bool(v, pool)
        blockers.__iadd__(rows[v])
        in_chosen[pos[v]] = True

    def drop(v: int) -> None:
        chosen_set.discard(v)
        blockers.__isub__(rows.pop(v))
        in_chosen[pos[v]] = False

    for _ in range(rounds):
        progressed = False
        for i in np.nonzero((blockers == 0) & ~in_chosen)[0]:
            if blockers[i] == 0 and not in_chosen[i]:
                add(int(pool[i]))
                progressed = True
        if target is not None and len(chosen_set) >= target:
            break
        for s in list(chosen_set):
            # candidates blocked only by s; trade s for a non-adjacent pair of them
            cand_idx = np.nonzero((blockers == 1) & rows[s] & ~in_chosen)[0]
            if cand_idx.size < 2:
                continue
            cand = pool[cand_idx]
            pair = None
            for a_i in range(min(cand.size, 12)):
                a = int(cand[a_i])
                others = cand[a_i + 1:]
                hit = np.nonzero(~host.row_bool(a, others))[0]
                if hit.size:
                    pair = (a, int(others[hit[0]]))
                    break
            if pair is None:
                continue
            drop(s)
            add(pair[0])
            add(pair[1])
            progressed = True
            if target is not None and len(chosen_set) >= target:
                break
        if not progressed or (target is not None and len(chosen_set) >= target):
            break
    return sorted(chosen_set)


def find_induced_star(g, A, B, size: int, rng: RngSeed | int = 0) -> tuple[int, np.ndarray] | None:
    """An induced K_{1,size}: center in A, `size` pairwise non-adjacent leaves in B.

    Centers are tried in ascending degree-into-B order; leaf selection is the
    greedy independent-set search with bounded restarts.  None is data: the
    caller decides whether to retry with other pools.
    """
    A = np.asarray(sorted(set(int(x) for x in A)), dtype=np.int64)
    B = np.asarray(sorted(set(int(x) for x in B)), dtype=np.int64)
    if np.intersect1d(A, B).size:
        raise ValueError("A and B must be disjoint")
    if size < 0:
        raise ValueError("size must be nonnegative")
    gen = as_seed(rng).generator()
    deg = np.array([int(np.count_nonzero(g.row_bool(int(c), B))) for c in A])
    order = A[np.argsort(deg, kind="stable")]
    for c in order:
        c = int(c)
        nbrs = B[g.row_bool(c, B)]
        if nbrs.size < size:
            continue
        leaves = independent_in_pool(g, nbrs, gen, target=size)
        if leaves.size >= size:
            return c, leaves[:size]
    return None


# -- induced cycle factor ---------------------------------------------------------


def _bool_matrix(g: Graph) -> np.ndarray:
    m = np.zeros((g.n, g.n), dtype=bool)
    e = g.edges()
    if e.shape[0]:
        m[e[:, 0], e[:, 1]] = True
        m[e[:, 1], e[:, 0]] = True
    return m


def induced_cycle_factor_ex(g: Graph, N, m: int,
                            labeling: np.ndarray | None = None
                            ) -> tuple[list[list[int]] | None, int | None]:
    """Partition N into induced (m-2)-cycles, or (None, failed_layer).

    Chain of bipartite auxiliary matchings: layer i joins the grown
    path-tuples to next-layer vertices iff the extending edge exists and the
    required non-edges hold; the closing layer demands both closing edges and
    interior non-edges, which makes each assembled cycle induced.
    """
    N = np.asarray(list(N), dtype=np.int64)
    if m < 5:
        raise ValueError("cycle factor needs m >= 5 (factor cycles C_{m-2}, m-2 >= 3)")
    k = m - 2
    if N.size % k != 0:
        raise ValueError(f"|N| = {N.size} not divisible by m-2 = {k}")
    t = N.size // k
    if t == 0:
        return [], None
    M = _bool_matrix(g)
    order = labeling if labeling is not None else np.arange(N.size)
    ids = [order[i * t:(i + 1) * t] for i in range(k)]  # layer -> local ids into N

    # tau[i][j]: which member of layer i sits in cycle j
    tau = [np.arange(t)]
    cur = [ids[0]]  # cur[i][j] = local id of layer-(i+1) member of cycle j
    for layer in range(1, k):
        lefts = cur[-1]
        rights = ids[layer]
        allowed = M[np.ix_(lefts, rights)].copy()
        if layer == k - 1:
            allowed &= M[np.ix_(cur[0], rights)]
            for s in range(1, k - 2):
                allowed &= ~M[np.ix_(cur[s], rights)]
        else:
            for s in range(0, layer - 1):
                allowed &= ~M[np.ix_(cur[s], rights)]
        rows = [int.from_bytes(np.packbits(allowed[j], bitorder="little").tobytes(), "little")
                for j in range(t)]
        from .graphs import BipartiteGraph

        pm = perfect_matching_bipartite(BipartiteGraph(t, t, rows))
        if pm is None:
            return None, layer
        perm = np.empty(t, dtype=np.int64)
        for j, r in pm.pairs:
            perm[j] = r
        tau.append(perm)
        cur.append(rights[perm])

    cycles = []
    for j in range(t):
        cyc = [int(N[cur[i][j]]) for i in range(k)]
        cycles.append(cyc)
    return cycles, None


def induced_cycle_factor(g: Graph, N, m: int, rng: RngSeed | int = 0,
                         retries: int = 40) -> list[list[int]] | None:
    """Partition N into induced C_{m-2}; the arbitrary labeling is reshuffled
    on failure, since the layer assignment must be transversal to the factor."""
    N = np.asarray(list(N), dtype=np.int64)
    gen = as_seed(rng).generator()
    for attempt in range(max(1, retries)):
        labeling = np.arange(N.size) if attempt == 0 else gen.permutation(N.size)
        cycles, _ = induced_cycle_factor_ex(g, N, m, labeling=labeling)
        if cycles is not None:
            return cycles
    return None


# -- the construction -------------------------------------------------------------


@dataclass
class StarFactorConstruction:
    n: int
    p: float
    m: int
    hub: int
    centers: np.ndarray                      # the ell star centers, all adjacent to hub
    stars: list[tuple[int, np.ndarray]]      # carved stars: (center, leaves)
    cycle_factor: list[list[int]]            # induced C_{m-2} factor covering centers
    residual_matching: list[tuple[int, int]] # (center, leaf) pairs from the tail matching
    selected_edges: np.ndarray
    effective_sizes: list[int]
    params: ConstructionParams
    log: list[str] = field(default_factory=list)

    @property
    def edge_count(self) -> int:
        return int(self.selected_edges.shape[0])

    def component_edge_count(self) -> int:
        """Recount from components: hub edges + factor edges + star/matching leaves."""
        ell = self.centers.size
        star_leaves = sum(int(lv.size) for _, lv in self.stars)
        factor_edges = sum(len(c) for c in self.cycle_factor)
        return ell + factor_edges + star_leaves + len(self.residual_matching)

    def as_graph(self) -> Graph:
        return Graph.from_edges(self.n, self.selected_edges)

    def to_json(self) -> bytes:
        return json.dumps({
            "variant": "star-factor",
            "n": self.n, "p": self.p, "m": self.m, "hub": self.hub,
            "centers": [int(c) for c in self.centers],
            "effective_sizes": self.effective_sizes,
            "log": self.log,
            "edges": [[int(u), int(v)] for u, v in self.selected_edges],
        }, separators=(",", ":")).encode("utf-8")


def _left_perfect_matching(host, left: np.ndarray, right: np.ndarray,
                           gen: np.random.Generator) -> list[tuple[int, int]] | None:
    """Match every left vertex to a distinct right vertex (|left| <= |right|)."""
    from .matching import _augment_iterative

    owner: dict[int, int] = {}  # right idx -> left vertex
    match: dict[int, int] = {}

    def neighbors(x: int):
        return (int(ri) for ri in np.nonzero(host.row_bool(x, right))[0])

    for u in left:
        if not _augment_iterative(int(u), neighbors, owner, match):
            return None
    return [(int(right[ri]), u) for u, ri in match.items()]


def build_star_factor(host, p: float, m: int, rng: RngSeed | int,
                      params: ConstructionParams | None = None) -> StarFactorConstruction:
    """Assemble the hub/star/cycle-factor construction on a host graph.

    Pipeline: pick hub 0; choose ell hub-neighbors as centers; find an induced
    C_{m-2}-factor on them; carve induced stars around centers until the
    leftover can be matched leaf-to-center; match it.  Star sizes adapt to
    what neighborhood independent sets actually deliver at this n (probed up
    front, degraded per star), and every degradation is logged.
    """
    if m < 5:
        raise ValueError("star-factor construction needs m >= 5")
    seed = as_seed(rng)
    n = host.n
    if params is None:
        params = compute_params(n, p, m, strict=False)
    d = params.d_pool
    if d < 2 * m or n < 64 * (m - 2):
        raise ConstructionFailure(
            "params", f"n too small: pool size d={d} (need >= 2m={2*m}) at n={n}")

    log: list[str] = []
    gen = seed.child(101).generator()
    all_v = np.arange(n, dtype=np.int64)
    hub_nbrs = host.neighbors_in(0, all_v[1:])
    if hub_nbrs.size < 8:
        raise ConstructionFailure("params", f"hub has only {hub_nbrs.size} neighbors")

    # probe achievable star sizes on representative pools
    probe_pool = all_v[1:]
    probe_sizes = []
    for c in hub_nbrs[:5]:
        nb = host.neighbors_in(int(c), probe_pool)
        nb = nb[nb != int(c)]
        got = independent_in_pool(host, nb, gen, target=None, restarts=3)
        probe_sizes.append(int(got.size) + 1)  # star size = leaves + center
    probe_sizes.sort()
    a_probe = max(2, probe_sizes[len(probe_sizes) // 2] - 1)
    if params.star_size_ok:
        a_eff0 = max(params.a, a_probe)
        if a_probe > params.a:
            log.append(f"formula star size a={params.a} below probed {a_probe}; using probe")
    else:
        a_eff0 = a_probe
        log.append(f"formula star size a={params.a} non-positive at n={n}; probed a_eff={a_probe}")

    last_err: ConstructionFailure | None = None
    for outer in range(3):
        a_eff = max(2, int(round(a_eff0 * (0.85 ** outer))))
        try:
            return _assemble(host, p, m, params, seed, a_eff, d, hub_nbrs, list(log), outer)
        except ConstructionFailure as exc:
            last_err = exc
            log.append(f"attempt {outer} with a_eff={a_eff} failed at {exc.stage}; degrading")
    raise last_err if last_err is not None else ConstructionFailure("stars", "no attempt ran")


def _assemble(host, p, m, params, seed, a_eff, d, hub_nbrs, log, attempt) -> StarFactorConstruction:
    n = host.n
    gen = seed.child(300 + attempt).generator()
    b, ell = effective_star_params(n, m, a_eff, d)
    if hub_nbrs.size < ell:
        raise ConstructionFailure("params", f"hub degree {hub_nbrs.size} < ell={ell}")
    log.append(f"a_eff={a_eff} b={b} ell={ell} d={d}")

    if attempt == 0:
        N = hub_nbrs[:ell]
    else:
        N = gen.permutation(hub_nbrs)[:ell]
    N = np.sort(N)

    # induced C_{m-2}-factor on the centers
    sub, verts = (host.subgraph(N) if hasattr(host, "subgraph") else _induced(host, N))
    cycles_local = None
    for retry in range(5):
        labeling = np.arange(N.size) if retry == 0 else gen.permutation(N.size)
        cycles_local, layer = induced_cycle_factor_ex(sub, np.arange(N.size), m, labeling=labeling)
        if cycles_local is not None:
            if retry:
                log.append(f"cycle factor succeeded after {retry} relabelings")
            break
    if cycles_local is None:
        raise ConstructionFailure("cycle-factor", f"auxiliary matching failed at layer {layer}")
    cycle_factor = [[int(verts[x]) for x in cyc] for cyc in cycles_local]

    # carve stars until the leftover fits a leaf-to-center matching
    uncovered = np.ones(n, dtype=bool)
    uncovered[0] = False
    uncovered[N] = False
    stars: list[tuple[int, np.ndarray]] = []
    sizes: list[int] = []
    unused_centers = list(map(int, N))
    degraded = 0

    while True:
        n_uncovered = int(np.count_nonzero(uncovered))
        if n_uncovered <= len(unused_centers):
            break
        if not unused_centers:
            raise ConstructionFailure(
                "stars", f"centers exhausted with {n_uncovered} vertices uncovered")
        B = np.nonzero(uncovered)[0]
        # candidate centers: a pool of up to d unused centers, ordered by sampled degree into B
        pool = unused_centers[:min(d, len(unused_centers))]
        sample = B if B.size <= 256 else gen.choice(B, size=256, replace=False)
        sdeg = [int(np.count_nonzero(host.row_bool(c, sample))) for c in pool[:8]]
        cand_order = [pool[i] for i in np.argsort(sdeg, kind="stable")] + pool[8:]
        star = None
        for c in cand_order[:3]:
            nbrs = host.neighbors_in(int(c), B)
            if nbrs.size == 0:
                continue
            leaves = independent_in_pool(host, nbrs, gen, target=a_eff - 1)
            if leaves.size:
                star = (int(c), leaves[:a_eff - 1])
                break
        if star is None:
            raise ConstructionFailure("stars", "no candidate center had any usable leaf")
        c, leaves = star
        if leaves.size < a_eff - 1:
            degraded += 1
        uncovered[leaves] = False
        stars.append((c, leaves))
        sizes.append(int(leaves.size) + 1)
        unused_centers.remove(c)

    if degraded:
        log.append(f"{degraded} stars below target size a_eff-1={a_eff-1}")

    # tail: match every uncovered vertex to a distinct uncentered center
    R = np.nonzero(uncovered)[0].astype(np.int64)
    RN = np.asarray(unused_centers, dtype=np.int64)
    residual: list[tuple[int, int]] = []
    if R.size:
        got = _left_perfect_matching(host, R, RN, gen)
        if got is None:
            raise ConstructionFailure("tail-matching",
                                      f"could not match {R.size} leftover vertices into {RN.size} centers")
        residual = sorted((int(cv), int(lv)) for cv, lv in got)

    # assemble edges: hub-center, cycle factor, star leaves, residual matching
    chunks = [np.stack([np.zeros(N.size, dtype=np.int64), N], axis=1)]
    for cyc in cycle_factor:
        arr = np.asarray(cyc, dtype=np.int64)
        chunks.append(np.stack([arr, np.roll(arr, -1)], axis=1))
    for c, leaves in stars:
        if leaves.size:
            chunks.append(np.stack([np.full(leaves.size, c, dtype=np.int64), leaves], axis=1))
    if residual:
        chunks.append(np.asarray(residual, dtype=np.int64))
    raw = np.concatenate(chunks, axis=0)
    u = np.minimum(raw[:, 0], raw[:, 1])
    v = np.maximum(raw[:, 0], raw[:, 1])
    edges = np.stack([u, v], axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]

    construction = StarFactorConstruction(
        n=n, p=p, m=m, hub=0, centers=N, stars=stars, cycle_factor=cycle_factor,
        residual_matching=residual, selected_edges=edges,
        effective_sizes=sizes, params=params, log=log)
    expected = n - 1 + N.size
    if construction.edge_count != expected or construction.component_edge_count() != expected:
        raise ConstructionFailure(
            "assembly", f"edge accounting mismatch: emitted {construction.edge_count}, "
                        f"components {construction.component_edge_count()}, expected {expected}")
    return construction


def _induced(host, verts: np.ndarray) -> tuple[Graph, np.ndarray]:
    verts = np.asarray(sorted(int(v) for v in verts), dtype=np.int64)
    k = verts.size
    iu, iv = np.triu_indices(k, k=1)
    present = host.pair_bool(verts[iu], verts[iv])
    return Graph(k, np.stack([iu[present], iv[present]], axis=1).astype(np.int64)), verts
