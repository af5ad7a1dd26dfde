"""Graph representations, G(n,p) sampling, traversal primitives, JSON round-trip.

Two host flavours are provided for the same undirected-simple-graph semantics:

* :class:`Graph` — explicit, immutable after construction.  Keeps a canonical
  sorted edge array; for n <= BITSET_LIMIT it also materialises word-packed
  bitset rows (python ints), which is what the exhaustive solver and the
  cycle checks run on.
* :class:`GnpHost` — a lazy G(n,p): each unordered pair is decided by a
  counter-based hash of (seed, pair), so adjacency queries are O(1), fully
  deterministic, and graphs with n ~ 10^5..10^6 never need to be stored.

Builders are written against the small host protocol (``has_edge``,
``row_bool``, ``neighbors_in``, ``pair_bool``) satisfied by both flavours.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .rng import RngSeed, as_seed, mix_u64

#: largest n for which bitset rows are materialised
BITSET_LIMIT = 32768
#: largest n for which sample_gnp will materialise a full graph
MATERIALIZE_LIMIT = 20000


class GraphFormatError(ValueError):
    """Raised by the JSON loaders; names the offending element."""


def _pack_rows_from_bool(matrix: np.ndarray) -> list[int]:
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _bits_of(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Undirected simple graph on vertices 0..n-1.

    Invariants: adjacency symmetric, no self-loops, ``edge_count`` equals the
    number of unordered adjacent pairs.  Instances are immutable once built.
    """

    __slots__ = ("n", "_edges", "_rows", "_adj", "_edge_count", "_degrees")

    def __init__(self, n: int, edges: np.ndarray, rows: list[int] | None = None):
        self.n = int(n)
        self._edges = edges  # canonical (m, 2) int64 array, u < v, lexicographically sorted
        self._rows = rows
        self._adj: list[np.ndarray] | None = None
        self._edge_count = int(edges.shape[0])
        self._degrees: np.ndarray | None = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be a sequence of (u, v) pairs")
        u = np.minimum(arr[:, 0], arr[:, 1])
        v = np.maximum(arr[:, 0], arr[:, 1])
        if arr.size and (u.min() < 0 or v.max() >= n):
            bad = int(v.max() if v.max() >= n else u.min())
            raise ValueError(f"vertex index {bad} out of range for n={n}")
        if np.any(u == v):
            i = int(np.nonzero(u == v)[0][0])
            raise ValueError(f"self-loop at vertex {int(u[i])}")
        canon = np.stack([u, v], axis=1)
        if canon.shape[0]:
            order = np.lexsort((canon[:, 1], canon[:, 0]))
            canon = canon[order]
            dup = np.all(canon[1:] == canon[:-1], axis=1)
            if np.any(dup):
                i = int(np.nonzero(dup)[0][0])
                raise ValueError(f"duplicate edge ({int(canon[i,0])}, {int(canon[i,1])})")
        return cls(n, canon)

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[int]) -> "Graph":
        us, vs = [], []
        for u in range(n):
            upper = rows[u] >> (u + 1)
            base = u + 1
            for b in _bits_of(upper):
                us.append(u)
                vs.append(base + b)
        edges = np.stack([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)], axis=1) \
            if us else np.empty((0, 2), dtype=np.int64)
        return cls(n, edges, rows=list(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.empty((0, 2), dtype=np.int64))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        idx = np.triu_indices(n, k=1)
        return cls(n, np.stack([idx[0], idx[1]], axis=1).astype(np.int64))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        e = [(i, (i + 1) % n) for i in range(n)]
        return cls.from_edges(n, e)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    # -- accessors ------------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def edges(self) -> np.ndarray:
        return self._edges

    def rows(self) -> list[int]:
        if self._rows is None:
            if self.n > BITSET_LIMIT:
                raise ValueError(f"bitset rows not available for n={self.n} > {BITSET_LIMIT}")
            rows = [0] * self.n
            for u, v in self._edges:
                rows[u] |= 1 << int(v)
                rows[v] |= 1 << int(u)
            self._rows = rows
        return self._rows

    def adjacency_lists(self) -> list[np.ndarray]:
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self._edges:
                adj[u].append(int(v))
                adj[v].append(int(u))
            self._adj = [np.asarray(sorted(a), dtype=np.int64) for a in adj]
        return self._adj

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            deg = np.zeros(self.n, dtype=np.int64)
            if self._edge_count:
                np.add.at(deg, self._edges[:, 0], 1)
                np.add.at(deg, self._edges[:, 1], 1)
            self._degrees = deg
        return self._degrees

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if self._rows is not None or self.n <= BITSET_LIMIT:
            return bool((self.rows()[u] >> v) & 1)
        a = self.adjacency_lists()[u]
        i = np.searchsorted(a, v)
        return bool(i < a.size and a[i] == v)

    def neighbors(self, u: int) -> np.ndarray:
        return self.adjacency_lists()[u]

    # host protocol (duck-typed with GnpHost) --------------------------------

    def row_bool(self, u: int, vs: np.ndarray) -> np.ndarray:
        if self.n <= BITSET_LIMIT:
            row = self.rows()[u]
            nbytes = (self.n + 7) // 8
            bits = np.unpackbits(
                np.frombuffer(row.to_bytes(nbytes, "little"), dtype=np.uint8),
                bitorder="little",
            )
            return bits[vs].astype(bool)
        mask = np.zeros(self.n, dtype=bool)
        mask[self.adjacency_lists()[u]] = True
        return mask[vs]

    def neighbors_in(self, u: int, pool: np.ndarray) -> np.ndarray:
        pool = np.asarray(pool, dtype=np.int64)
        return pool[self.row_bool(u, pool)]

    def pair_bool(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        out = np.zeros(us.shape, dtype=bool)
        for i in range(us.size):
            out[i] = self.has_edge(int(us[i]), int(vs[i]))
        return out

    def induced_subgraph(self, vertices: Sequence[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph relabeled 0..k-1; returns (subgraph, original-ids array)."""
        verts = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        pos = {int(v): i for i, v in enumerate(verts)}
        sub = []
        vset = set(pos)
        for u, v in self._edges:
            if int(u) in vset and int(v) in vset:
                sub.append((pos[int(u)], pos[int(v)]))
        return Graph.from_edges(len(verts), sub), verts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._edges, other._edges)

    def __hash__(self) -> int:  # pragma: no cover - not used as dict key in hot paths
        return hash((self.n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


class BipartiteGraph:
    """Two labeled parts with cross edges only; rows are bitmasks over the right part."""

    __slots__ = ("left_size", "right_size", "rows")

    def __init__(self, left_size: int, right_size: int, rows: Sequence[int] | None = None):
        self.left_size = int(left_size)
        self.right_size = int(right_size)
        self.rows = list(rows) if rows is not None else [0] * self.left_size

    @classmethod
    def from_pairs(cls, n1: int, n2: int, pairs: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        b = cls(n1, n2)
        seen = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if not (0 <= u < n1):
                raise GraphFormatError(f"left index {u} out of range for n1={n1}")
            if not (0 <= v < n2):
                raise GraphFormatError(f"right index {v} out of range for n2={n2}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            b.rows[u] |= 1 << v
        return b

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def right_neighbors(self, u: int) -> list[int]:
        return list(_bits_of(self.rows[u]))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.left_size) for v in self.right_neighbors(u)]

    def __repr__(self) -> str:
        return f"BipartiteGraph({self.left_size}x{self.right_size}, edges={self.edge_count})"


# -- sampling ------------------------------------------------------------------


def _check_p(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    return p


def sample_gnp(n: int, p: float, rng: RngSeed | int) -> Graph:
    """Sample G(n,p): every unordered pair is an edge independently with probability p.

    Deterministic given (n, p, rng).  Materialises the graph, so n is capped at
    MATERIALIZE_LIMIT; use :class:`GnpHost` beyond that.
    """
    p = _check_p(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > MATERIALIZE_LIMIT:
        raise ValueError(f"sample_gnp materialises the graph; n={n} exceeds {MATERIALIZE_LIMIT}. "
                         f"Use GnpHost for lazy sampling at this scale.")
    gen = as_seed(rng).generator()
    if n == 0:
        return Graph.empty(0)
    m = np.zeros((n, n), dtype=bool)
    if p > 0.0:
        for i in range(n - 1):
            row = gen.random(n - 1 - i) < p
            m[i, i + 1:] = row
    m |= m.T
    np.fill_diagonal(m, False)
    us, vs = np.nonzero(np.triu(m, k=1))
    g = Graph(n, np.stack([us, vs], axis=1).astype(np.int64))
    if n <= BITSET_LIMIT:
        g._rows = _pack_rows_from_bool(m)
    return g


def sample_bipartite(n1: int, n2: int, p: float, rng: RngSeed | int) -> BipartiteGraph:
    """Sample G(n1,n2,p): each cross pair present independently with probability p."""
    p = _check_p(p)
    if n1 < 0 or n2 < 0:
        raise ValueError("part sizes must be nonnegative")
    gen = as_seed(rng).generator()
    b = BipartiteGraph(n1, n2)
    if p == 0.0 or n1 == 0 or n2 == 0:
        return b
    for u in range(n1):
        bits = gen.random(n2) < p
        packed = np.packbits(bits, bitorder="little")
        b.rows[u] = int.from_bytes(packed.tobytes(), "little")
    return b


class GnpHost:
    """Lazy G(n,p) sampled by a pair hash; adjacency queries are O(1), memory is O(1).

    The decision for pair {u,v} (u<v) is ``mix(u*n+v, salt) < p * 2^64``, so the
    same (n, p, seed, stream) always denotes the same graph, at any scale.
    """

    __slots__ = ("n", "p", "_salt", "_threshold", "seed")

    def __init__(self, n: int, p: float, rng: RngSeed | int):
        self.n = int(n)
        self.p = _check_p(p)
        self.seed = as_seed(rng)
        self._salt = self.seed.salt()
        if self.p >= 1.0:
            self._threshold = None  # all edges
        else:
            self._threshold = np.uint64(int(self.p * 2.0 ** 64))

    def pair_bool(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.uint64)
        vs = np.asarray(vs, dtype=np.uint64)
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        if self.p >= 1.0:
            return lo != hi
        if self.p <= 0.0:
            return np.zeros(lo.shape, dtype=bool)
        with np.errstate(over="ignore"):
            keys = lo * np.uint64(self.n) + hi
        return (mix_u64(keys, self._salt) < self._threshold) & (lo != hi)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(self.pair_bool(np.asarray([u]), np.asarray([v]))[0])

    def row_bool(self, u: int, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.uint64)
        return self.pair_bool(np.full(vs.shape, u, dtype=np.uint64), vs)

    def neighbors_in(self, u: int, pool: np.ndarray) -> np.ndarray:
        pool = np.asarray(pool, dtype=np.int64)
        return pool[self.row_bool(u, pool)]

    def subgraph(self, vertices: Sequence[int]) -> tuple[Graph, np.ndarray]:
        """Materialise the induced subgraph on ``vertices`` (relabeled 0..k-1)."""
        verts = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        k = verts.size
        iu, iv = np.triu_indices(k, k=1)
        present = self.pair_bool(verts[iu], verts[iv])
        edges = np.stack([iu[present], iv[present]], axis=1).astype(np.int64)
        return Graph(k, edges), verts

    def __repr__(self) -> str:
        return f"GnpHost(n={self.n}, p={self.p}, seed={self.seed})"


# -- traversal -----------------------------------------------------------------


def diameter(g: Graph) -> int | float:
    """Max over vertex pairs of shortest-path length; math.inf when disconnected, 0 for n<=1."""
    n = g.n
    if n <= 1:
        return 0
    if g.edge_count == 0:
        return math.inf
    if n <= BITSET_LIMIT:
        rows = g.rows()
        full = (1 << n) - 1
        best = 0
        for s in range(n):
            seen = 1 << s
            frontier = 1 << s
            dist = 0
            while frontier:
                nxt = 0
                for v in _bits_of(frontier):
                    nxt |= rows[v]
                frontier = nxt & ~seen
                if frontier:
                    dist += 1
                    seen |= frontier
            if seen != full:
                return math.inf
            best = max(best, dist)
        return best
    adj = g.adjacency_lists()
    best = 0
    dist = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist.fill(-1)
        dist[s] = 0
        frontier = [s]
        d = 0
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if dist[w] < 0:
                        dist[w] = d + 1
                        nxt.append(int(w))
            frontier = nxt
            d += 1 if nxt else 0
        if np.any(dist < 0):
            return math.inf
        best = max(best, d)
    return best


# -- JSON round trip -----------------------------------------------------------


def store_graph(g: Graph) -> bytes:
    """Canonical JSON: {"n": int, "edges": [[u,v],...]} sorted, u < v."""
    payload = {"n": g.n, "edges": [[int(u), int(v)] for u, v in g.edges()]}
    return json.dumps(payload, separators=(",", ":")).encode("utf-8")


def load_graph(data: bytes | str) -> Graph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(payload, dict) or "n" not in payload or "edges" not in payload:
        raise GraphFormatError("graph JSON must be an object with 'n' and 'edges'")
    n = payload["n"]
    if not isinstance(n, int) or n < 0:
        raise GraphFormatError(f"'n' must be a nonnegative integer, got {n!r}")
    edges = payload["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list of pairs")
    seen = set()
    canon = []
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise GraphFormatError(f"edge entry {e!r} is not a pair of integers")
        u, v = e
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge {e!r} has a vertex out of range for n={n}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {list(key)!r}")
        seen.add(key)
        canon.append(key)
    return Graph.from_edges(n, canon)


def store_bipartite(b: BipartiteGraph) -> bytes:
    payload = {"n1": b.left_size, "n2": b.right_size,
               "edges": [[int(u), int(v)] for u, v in b.edges()]}
    return json.dumps(payload, separators=(",", ":")).encode("utf-8")


def load_bipartite(data: bytes | str) -> BipartiteGraph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON: {exc}") from exc
    for key in ("n1", "n2", "edges"):
        if key not in payload:
            raise GraphFormatError(f"bipartite JSON missing '{key}'")
    return BipartiteGraph.from_pairs(payload["n1"], payload["n2"],
                                     [tuple(e) for e in payload["edges"]])
