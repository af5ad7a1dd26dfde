"""Perfect matchings: bipartite, general, and matchings avoiding a forbidden pair set.

The forbidden-pair variant enforces the bounded-degree hypothesis (every left
vertex has at most C forbidden partners, same on the right); it is exercised in
two ways: the production path simply deletes forbidden pairs and matches, while
``block_matching_construct`` replays the 2C-block existence argument (block
partition, block-level matching over fully-connected block pairs, Hall
completion inside each block).

"None" results are data, not failures: whether a perfect matching exists on a
random instance is itself the quantity of interest upstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import BipartiteGraph, Graph, _bits_of
from .rng import RngSeed, as_seed


@dataclass
class Matching:
    """A set of vertex-disjoint pairs; ``perfect`` means the intended set is covered."""

    pairs: list[tuple[int, int]]
    perfect: bool = False

    def __post_init__(self) -> None:
        left = [u for u, _ in self.pairs]
        right = [v for _, v in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise ValueError("matching endpoints must be pairwise distinct")

    def to_json(self) -> bytes:
        return json.dumps({"pairs": [[int(u), int(v)] for u, v in self.pairs],
                           "perfect": bool(self.perfect)},
                          separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_json(cls, data: bytes | str) -> "Matching":
        payload = json.loads(data if isinstance(data, str) else data.decode("utf-8"))
        return cls([(int(u), int(v)) for u, v in payload["pairs"]], bool(payload["perfect"]))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class ForbiddenSet:
    """Ordered (left, right) pairs with a per-vertex degree bound C."""

    pairs: frozenset[tuple[int, int]]
    degree_bound: int

    @classmethod
    def from_pairs(cls, pairs, degree_bound: int) -> "ForbiddenSet":
        fs = cls(frozenset((int(u), int(v)) for u, v in pairs), int(degree_bound))
        fs.validate()
        return fs

    def validate(self) -> None:
        left: dict[int, int] = {}
        right: dict[int, int] = {}
        for u, v in self.pairs:
            left[u] = left.get(u, 0) + 1
            right[v] = right.get(v, 0) + 1
        worst = max(list(left.values()) + list(right.values()) + [0])
        if worst > self.degree_bound:
            raise ValueError(
                f"forbidden set violates its degree bound: some vertex has {worst} "
                f"forbidden partners > C={self.degree_bound}")

    def left_masks(self, n_left: int) -> list[int]:
        masks = [0] * n_left
        for u, v in self.pairs:
            if 0 <= u < n_left:
                masks[u] |= 1 << v
        return masks


# -- explicit bipartite matching ------------------------------------------------


def _augment_iterative(start, neighbors, owner: dict, match: dict) -> bool:
    """One augmenting-path search, explicit stack (no recursion-depth limit).

    ``neighbors(x)`` yields candidate rights for left x; ``owner`` maps right
    -> left, ``match`` maps left -> right.  On success every frame's left is
    reassigned to the right it was exploring.
    """
    visited: set = set()
    frames = [[start, neighbors(start), None]]
    while frames:
        frame = frames[-1]
        pushed = False
        for v in frame[1]:
            if v in visited:
                continue
            visited.add(v)
            frame[2] = v
            w = owner.get(v)
            if w is None:
                for fr in frames:
                    owner[fr[2]] = fr[0]
                    match[fr[0]] = fr[2]
                return True
            frames.append([w, neighbors(w), None])
            pushed = True
            break
        if not pushed:
            frames.pop()
    return False


def _kuhn_maximum_matching(rows: list[int], n_right: int) -> dict[int, int]:
    """Maximum matching on bitmask rows; greedy seed then augmenting paths.

    Deterministic: left vertices are processed in ascending order and right
    neighbors are scanned in ascending index order.
    """
    n_left = len(rows)
    match_right: dict[int, int] = {}
    match_left: dict[int, int] = {}
    for u in range(n_left):
        for v in _bits_of(rows[u]):
            if v not in match_right:
                match_right[v] = u
                match_left[u] = v
                break
    for u in range(n_left):
        if u in match_left:
            continue
        _augment_iterative(u, lambda x: _bits_of(rows[x]), match_right, match_left)
    return match_left


def perfect_matching_bipartite(b: BipartiteGraph) -> Matching | None:
    """Perfect matching of a bipartite graph with equal parts, or None if none exists."""
    if b.left_size != b.right_size:
        raise ValueError(f"parts must have equal size, got {b.left_size} != {b.right_size}")
    ml = _kuhn_maximum_matching(b.rows, b.right_size)
    if len(ml) < b.left_size:
        return None
    return Matching(sorted(ml.items()), perfect=True)


def maximum_matching_bipartite(b: BipartiteGraph) -> Matching:
    ml = _kuhn_maximum_matching(b.rows, b.right_size)
    return Matching(sorted(ml.items()), perfect=(len(ml) == b.left_size == b.right_size))


def has_hall_violator(b: BipartiteGraph) -> tuple[int, ...] | None:
    """Exhaustively search left subsets for |N(S)| < |S| (test oracle, part size <= ~12)."""
    from itertools import combinations

    n = b.left_size
    for k in range(1, n + 1):
        for subset in combinations(range(n), k):
            nb = 0
            for u in subset:
                nb |= b.rows[u]
            if nb.bit_count() < k:
                return subset
    return None


def constrained_matching(b: BipartiteGraph, forbidden: ForbiddenSet) -> Matching | None:
    """Perfect matching using no forbidden pair: delete the pairs, then match."""
    if b.left_size != b.right_size:
        raise ValueError(f"parts must have equal size, got {b.left_size} != {b.right_size}")
    forbidden.validate()
    masks = forbidden.left_masks(b.left_size)
    pruned = BipartiteGraph(b.left_size, b.right_size,
                            [b.rows[u] & ~masks[u] for u in range(b.left_size)])
    return perfect_matching_bipartite(pruned)


def block_matching_construct(b: BipartiteGraph, forbidden: ForbiddenSet) -> Matching | None:
    """The 2C-block existence procedure, run literally.

    Stages: a residual block of size 2C+r (r = n mod 2C) built from common
    neighbors, a block-level perfect matching where blocks are joined iff fully
    connected, then Hall completion inside each complete block avoiding the
    forbidden pairs.  Any stage failing yields None; ``constrained_matching``
    remains the production path.
    """
    if b.left_size != b.right_size:
        raise ValueError(f"parts must have equal size, got {b.left_size} != {b.right_size}")
    forbidden.validate()
    n = b.left_size
    C = max(1, forbidden.degree_bound)
    if n < 4 * C:
        return None  # residue handling undefined below one full block plus residual
    r = n % (2 * C)
    nblocks = n // (2 * C)
    res_size = 2 * C + r

    # residual block: first res_size left vertices and their first res_size common neighbors
    u_res = list(range(res_size))
    common = (1 << b.right_size) - 1
    for u in u_res:
        common &= b.rows[u]
    w_res = []
    for v in _bits_of(common):
        w_res.append(v)
        if len(w_res) == res_size:
            break
    if len(w_res) < res_size:
        return None
    w_res_mask = 0
    for v in w_res:
        w_res_mask |= 1 << v

    # remaining vertices into blocks of size 2C, lowest-index-first
    u_rest = list(range(res_size, n))
    v_rest = [v for v in range(n) if not (w_res_mask >> v) & 1]
    u_blocks = [u_rest[i * 2 * C:(i + 1) * 2 * C] for i in range(nblocks - 1)]
    w_blocks = [v_rest[i * 2 * C:(i + 1) * 2 * C] for i in range(nblocks - 1)]

    # block-level graph: U_i ~ W_j iff fully connected in b
    block_rows = []
    for ub in u_blocks:
        mask = 0
        for j, wb in enumerate(w_blocks):
            wmask = 0
            for v in wb:
                wmask |= 1 << v
            if all((b.rows[u] & wmask) == wmask for u in ub):
                mask |= 1 << j
        block_rows.append(mask)
    block_match = _kuhn_maximum_matching(block_rows, len(w_blocks))
    if len(block_match) < len(u_blocks):
        return None

    pairs: list[tuple[int, int]] = []

    def _complete_block(us: list[int], vs: list[int]) -> list[tuple[int, int]] | None:
        # Hall completion inside a complete block, avoiding forbidden pairs.
        rows = []
        for u in us:
            mask = 0
            for k, v in enumerate(vs):
                if (u, v) not in forbidden.pairs:
                    mask |= 1 << k
            rows.append(mask)
        ml = _kuhn_maximum_matching(rows, len(vs))
        if len(ml) < len(us):
            return None
        return [(us[i], vs[k]) for i, k in ml.items()]

    for i, j in block_match.items():
        got = _complete_block(u_blocks[i], w_blocks[j])
        if got is None:
            return None
        pairs.extend(got)
    got = _complete_block(u_res, w_res)
    if got is None:
        return None
    pairs.extend(got)
    pairs.sort()
    return Matching(pairs, perfect=True)


# -- general matching ------------------------------------------------------------


def perfect_matching_general(g: Graph, vertex_subset, rng: RngSeed | int = 0) -> Matching | None:
    """Perfect matching on an even vertex subset of a general graph.

    Randomized greedy pairing with augmenting repair; dense random inputs make
    greedy near-certain.  Falls back to an exact maximum-matching search
    (blossom, via networkx) so the None answer is trustworthy.
    """
    subset = sorted(set(int(v) for v in vertex_subset))
    if len(subset) % 2 != 0:
        raise ValueError(f"vertex subset must have even size, got {len(subset)}")
    if not subset:
        return Matching([], perfect=True)
    gen = as_seed(rng).generator()
    adj = g.adjacency_lists()
    sset = set(subset)

    def greedy_once() -> list[tuple[int, int]] | None:
        order = list(subset)
        gen.shuffle(order)
        free = set(order)
        pairs = []
        for u in order:
            if u not in free:
                continue
            candidates = [int(w) for w in adj[u] if int(w) in free and int(w) != u]
            if not candidates:
                continue
            partner = candidates[int(gen.integers(len(candidates)))]
            free.discard(u)
            free.discard(partner)
            pairs.append((u, partner))
        if free:
            return None
        return pairs

    for _ in range(5):
        got = greedy_once()
        if got is not None:
            return Matching(sorted((min(a, b), max(a, b)) for a, b in got), perfect=True)

    # exhaustive augmentation: exact maximum matching on the induced subgraph
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(subset)
    for u in subset:
        for w in adj[u]:
            if int(w) in sset and u < int(w):
                h.add_edge(u, int(w))
    mm = nx.max_weight_matching(h, maxcardinality=True)
    if 2 * len(mm) < len(subset):
        return None
    return Matching(sorted((min(a, b), max(a, b)) for a, b in mm), perfect=True)


# -- host-backed matchers (used by the construction builders) --------------------


def host_bipartite_matching(host, left: np.ndarray, right: np.ndarray,
                            gen: np.random.Generator,
                            forbidden: dict[int, set[int]] | None = None,
                            retries: int = 5) -> np.ndarray | None:
    """Perfect matching between two disjoint vertex arrays of a host graph.

    Greedy chunked scan over a shuffled free list, then augmenting-path repair
    for the leftovers.  Returns an array ``m`` with ``m[i]`` = the right vertex
    matched to ``left[i]``, or None.  ``forbidden`` maps a left vertex to the
    set of right vertices it must avoid.
    """
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if left.size != right.size:
        raise ValueError(f"parts must have equal size, got {left.size} != {right.size}")
    k = left.size
    if k == 0:
        return np.empty(0, dtype=np.int64)

    right_index = {int(v): i for i, v in enumerate(right)}

    for _ in range(max(1, retries)):
        match = np.full(k, -1, dtype=np.int64)  # left index -> right index (into `right`)
        owner = np.full(k, -1, dtype=np.int64)  # right index -> left index
        free = list(gen.permutation(k))
        order = gen.permutation(k)
        stuck = []
        for li in order:
            li = int(li)
            u = int(left[li])
            bad = forbidden.get(u) if forbidden else None
            found = -1
            idx = 0
            chunk = 64
            while idx < len(free):
                cand_idx = free[idx:idx + chunk]
                cand = right[cand_idx]
                ok = host.row_bool(u, cand)
                if bad:
                    ok &= np.fromiter((int(c) not in bad for c in cand), dtype=bool, count=len(cand))
                hit = np.nonzero(ok)[0]
                if hit.size:
                    found = idx + int(hit[0])
                    break
                idx += chunk
                chunk = min(4 * chunk, 1 << 16)
            if found < 0:
                stuck.append(li)
                continue
            ri = free[found]
            free[found] = free[-1]
            free.pop()
            match[li] = ri
            owner[ri] = li

        # augmenting repair for the leftovers (few, on dense random inputs)
        def neighbors(x: int):
            ux = int(left[x])
            ok = host.row_bool(ux, right)
            badx = forbidden.get(ux) if forbidden else None
            if badx:
                for c in badx:
                    pos = right_index.get(int(c))
                    if pos is not None:
                        ok[pos] = False
            return (int(ri) for ri in np.nonzero(ok)[0])

        owner_d = {int(ri): int(li) for li, ri in enumerate(match) if ri >= 0}
        match_d = {int(li): int(ri) for li, ri in enumerate(match) if ri >= 0}
        ok_all = True
        for li in stuck:
            if not _augment_iterative(int(li), neighbors, owner_d, match_d):
                ok_all = False
                break
        if ok_all:
            out = np.empty(k, dtype=np.int64)
            for li, ri in match_d.items():
                out[li] = right[ri]
            return out
    return None


def host_general_matching(host, pool: np.ndarray, gen: np.random.Generator,
                          retries: int = 5) -> np.ndarray | None:
    """Perfect matching inside a vertex pool of a host graph (greedy + retry).

    Returns an (k/2, 2) array of matched pairs or None.  Exact fallback kicks
    in only for small pools, which is where greedy can genuinely fail.
    """
    pool = np.asarray(pool, dtype=np.int64)
    k = pool.size
    if k % 2 != 0:
        raise ValueError("pool must have even size")
    if k == 0:
        return np.empty((0, 2), dtype=np.int64)

    for _ in range(max(1, retries)):
        free = list(gen.permutation(k))
        pairs = []
        stuck = []
        while free:
            li = int(free.pop())
            u = int(pool[li])
            found = -1
            idx = 0
            chunk = 64
            while idx < len(free):
                cand_idx = free[idx:idx + chunk]
                cand = pool[cand_idx]
                ok = host.row_bool(u, cand)
                hit = np.nonzero(ok)[0]
                if hit.size:
                    found = idx + int(hit[0])
                    break
                idx += chunk
                chunk = min(4 * chunk, 1 << 16)
            if found < 0:
                stuck.append(li)
                continue
            pj = free[found]
            free[found] = free[-1]
            free.pop()
            pairs.append((u, int(pool[pj])))
        if not stuck:
            return np.asarray(pairs, dtype=np.int64)

    if k <= 4096:
        import networkx as nx

        iu, iv = np.triu_indices(k, k=1)
        present = host.pair_bool(pool[iu], pool[iv])
        h = nx.Graph()
        h.add_nodes_from(int(v) for v in pool)
        for a, b in zip(pool[iu[present]], pool[iv[present]]):
            h.add_edge(int(a), int(b))
        mm = nx.max_weight_matching(h, maxcardinality=True)
        if 2 * len(mm) == k:
            return np.asarray(sorted((min(a, b), max(a, b)) for a, b in mm), dtype=np.int64)
    return None
