"""Builder for the triangle-hub C_4-saturated construction (dense regime).

Per level: pick a triangle (v1, v2, v3); classify the rest of V^i by its
adjacency pattern to the triangle; route each pattern class into the petal(s)
it is adjacent to (thirds for the common-neighbor class, halves for the
two-neighbor classes); the common non-neighbors become V^{i+1}.  Each petal
is split W|U|Y with |W| = |U| = |V^{i+1}| (parity fixed by donating one
vertex to the next level), then three perfect matchings wire it: W to the
next level, W to U, and Y internally.  Recursion ends at the stop size or the
nominal depth, and the remainder is closed with a greedy maximal C_4-free
core.
"""

from __future__ import annotations

import math

import numpy as np

from .flowers import (
    P_THRESHOLD,
    R_FLOWER,
    FlowerConstruction,
    FlowerLevel,
    flower_edge_count,
    recursion_stop_size,
)
from .graphs import Graph
from .matching import host_bipartite_matching, host_general_matching
from .params import compute_params
from .rng import RngSeed, as_seed
from .saturation import greedy_saturate
from .stars import ConstructionFailure


def _pick_triangle(host, V: np.ndarray) -> tuple[int, int, int] | None:
    v1 = int(V[0])
    rest = V[V != v1]
    nb1 = host.neighbors_in(v1, rest)
    for v2 in nb1[:8]:
        v2 = int(v2)
        common = host.neighbors_in(v2, nb1[nb1 != v2])
        if common.size:
            return v1, v2, int(common[0])
    return None


def _build_level(host, V: np.ndarray, gen: np.random.Generator,
                 log: list[str], level_no: int):
    tri = _pick_triangle(host, V)
    if tri is None:
        log.append(f"level {level_no}: no triangle found in V^{level_no} (size {V.size})")
        return None
    v1, v2, v3 = tri
    rest = V[~np.isin(V, [v1, v2, v3])]
    b1 = host.row_bool(v1, rest)
    b2 = host.row_bool(v2, rest)
    b3 = host.row_bool(v3, rest)
    pattern = b1.astype(np.int8) + 2 * b2.astype(np.int8) + 4 * b3.astype(np.int8)
    cls = {k: rest[pattern == k] for k in range(8)}

    # route classes into petals: thirds of the 111 class, halves of the
    # two-neighbor classes, all of each single-neighbor class
    c7 = cls[7]
    s1 = math.ceil(c7.size / 3)
    c5, c3, c6 = cls[5], cls[3], cls[6]
    h5, h3, h6 = math.ceil(c5.size / 2), math.ceil(c3.size / 2), math.ceil(c6.size / 2)
    vjs = [
        np.concatenate([c7[:s1], c5[:h5], c3[:h3], cls[1]]),
        np.concatenate([c7[s1:2 * s1], c3[h3:], c6[:h6], cls[2]]),
        np.concatenate([c7[2 * s1:], c6[h6:], c5[h5:], cls[4]]),
    ]
    vnext_parts = [cls[0]]

    # parity: every petal must be even after removing its W/U blocks
    kept = []
    for j in range(3):
        vj = vjs[j]
        if vj.size % 2 == 1:
            vnext_parts.append(vj[-1:])
            vj = vj[:-1]
        kept.append(vj)
    vnext = np.sort(np.concatenate(vnext_parts))
    b = int(vnext.size)
    for j in range(3):
        if kept[j].size < 2 * b:
            log.append(f"level {level_no}: petal {j} too small ({kept[j].size} < 2*{b})")
            return None

    petals = []
    edge_chunks = [np.asarray([[v1, v2], [v1, v3], [v2, v3]], dtype=np.int64)]
    hubs = [v1, v2, v3]
    for j in range(3):
        vj = gen.permutation(kept[j])
        W, U, Y = vj[:b], vj[b:2 * b], np.sort(vj[2 * b:])
        ok = False
        for retry in range(5):
            m_wv = host_bipartite_matching(host, W, vnext, gen)
            m_wu = host_bipartite_matching(host, W, U, gen)
            m_y = host_general_matching(host, Y, gen)
            if m_wv is not None and m_wu is not None and m_y is not None:
                ok = True
                break
            vj = gen.permutation(vj)
            W, U, Y = vj[:b], vj[b:2 * b], np.sort(vj[2 * b:])
            log.append(f"level {level_no}: petal {j} rematch retry {retry + 1}")
        if not ok:
            log.append(f"level {level_no}: petal {j} matchings failed after retries")
            return None
        edge_chunks.append(np.stack([np.full(vj.size, hubs[j], dtype=np.int64), vj], axis=1))
        if b:
            edge_chunks.append(np.stack([W, m_wv], axis=1))
            edge_chunks.append(np.stack([W, m_wu], axis=1))
        if m_y.shape[0]:
            edge_chunks.append(m_y)
        petals.append({"members": np.sort(vj), "W": np.sort(W), "U": np.sort(U), "Y": Y})

    level = FlowerLevel(hubs=hubs, petals=petals, vnext=vnext)
    return edge_chunks, level, vnext


def build_r_flower(host, p: float, rng: RngSeed | int,
                   stop_size: int | None = None,
                   max_levels: int | None = None) -> FlowerConstruction:
    """Build a spanning triangle-hub flower on the host graph.

    Outside the dense validity range (p <= 1 - 1/cbrt(7)) the builder warns
    and proceeds; petals then shrink and the level loop typically stops early.
    Any level failure degrades to stopping the recursion at the current set,
    never to an invalid structure.
    """
    n = host.n
    seed = as_seed(rng)
    params = compute_params(n, p, 4, strict=False)
    r_nom = params.r_flower if max_levels is None else max_levels
    stop = recursion_stop_size(n) if stop_size is None else stop_size
    log: list[str] = []
    if p <= P_THRESHOLD:
        log.append(f"warning: p={p} at or below the dense-regime threshold {P_THRESHOLD:.4f}")

    V = np.arange(n, dtype=np.int64)
    levels: list[FlowerLevel] = []
    chunks: list[np.ndarray] = []
    while len(levels) < r_nom and V.size >= stop:
        gen = seed.child(1000 + len(levels)).generator()
        built = _build_level(host, V, gen, log, len(levels) + 1)
        if built is None:
            log.append(f"stopping recursion early at level {len(levels) + 1}")
            break
        edge_chunks, level, vnext = built
        chunks.extend(edge_chunks)
        levels.append(level)
        V = vnext

    # close with a maximal C_4-free core
    if hasattr(host, "subgraph"):
        gcore, verts = host.subgraph(V)
    else:
        gcore, verts = host.induced_subgraph(V)
    hcore = greedy_saturate(Graph.empty(gcore.n), gcore, 4)
    core_edges = hcore.edges()
    if core_edges.shape[0]:
        chunks.append(np.stack([verts[core_edges[:, 0]], verts[core_edges[:, 1]]], axis=1))

    raw = np.concatenate(chunks, axis=0) if chunks else np.empty((0, 2), dtype=np.int64)
    u = np.minimum(raw[:, 0], raw[:, 1])
    v = np.maximum(raw[:, 0], raw[:, 1])
    edges = np.stack([u, v], axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]

    c = FlowerConstruction(
        variant=R_FLOWER, n=n, p=p, s=None, nominal_r=r_nom, levels=levels,
        core_vertices=verts, core_edge_count=int(hcore.edge_count),
        selected_edges=edges, log=log)
    expected = c.predicted_edge_count()
    if c.edge_count != expected:
        raise ConstructionFailure(
            "assembly", f"edge count {c.edge_count} != formula {expected}")
    return c
