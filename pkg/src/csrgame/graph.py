"""Undirected graphs with cached hop distances, ball queries and generators.

Nodes are the dense integers ``0..n-1``. A :class:`Graph` is immutable once
built; every query the game needs is answered from the all-pairs distance
matrix computed at construction.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import GraphError

__all__ = [
    "Graph",
    "build_graph",
    "ball",
    "generate",
    "FAMILIES",
    "path",
    "cycle",
    "clique",
    "star",
    "random_tree",
    "gnp_connected",
    "poa_example",
    "prufer_to_edges",
    "iter_labeled_trees",
    "iter_connected_graphs",
    "is_tree",
]


class Graph:
    """Connected simple undirected graph on nodes ``0..n-1``.

    Attributes
    ----------
    n : int
        Number of nodes.
    edges : tuple of (int, int)
        Sorted edge list, each pair ``(u, v)`` with ``u < v``.
    dist : numpy.ndarray
        ``n x n`` int64 hop-distance matrix (read-only).
    diameter : int
        Largest entry of ``dist``.
    degrees : tuple of int
        Vertex degrees.
    """

    __slots__ = ("n", "edges", "dist", "diameter", "degrees", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise GraphError(f"n must be a positive integer, got {n!r}")
        n = int(n)
        seen: set[tuple[int, int]] = set()
        for e in edges:
            u, v = (int(x) for x in e)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.edges = tuple(sorted(seen))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self.degrees = tuple(len(a) for a in adj)
        self.dist = _all_pairs_hops(n, self.edges)
        self.diameter = int(self.dist.max())

    @property
    def D(self) -> int:
        return self.diameter

    @property
    def d_min(self) -> int:
        return min(self.degrees)

    @property
    def d_max(self) -> int:
        return max(self.degrees)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def ball(self, i: int, r: int) -> frozenset[int]:
        return ball(self, i, r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)}, D={self.diameter})"


def _all_pairs_hops(n: int, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    if edges:
        rows, cols = zip(*edges)
    else:
        rows, cols = (), ()
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, method="D", directed=False, unweighted=True)
    if not np.isfinite(d).all():
        raise GraphError("graph is disconnected")
    out = d.astype(np.int64)
    out.setflags(write=False)
    return out


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validate ``edges`` and build a :class:`Graph` with cached distances.

    Raises
    ------
    GraphError
        On self-loops, duplicate edges, out-of-range endpoints or a
        disconnected graph.
    """
    return Graph(n, edges)


def ball(g: Graph, i: int, r: int) -> frozenset[int]:
    """Nodes within hop distance ``r`` of ``i``; empty for ``r < 0``."""
    if not 0 <= i < g.n:
        raise GraphError(f"node {i} outside 0..{g.n - 1}")
    if r < 0:
        return frozenset()
    return frozenset(np.flatnonzero(g.dist[i] <= r).tolist())


# -- generators ---------------------------------------------------------------

def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def clique(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def star(n: int) -> Graph:
    """Node 0 joined to leaves ``1..n-1``."""
    return Graph(n, [(0, i) for i in range(1, n)])


def prufer_to_edges(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Decode a Prüfer sequence of length ``n - 2`` into tree edges."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = degree.index(1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (j for j in range(n) if degree[j] == 1)
    edges.append((u, v))
    return edges


def random_tree(n: int, seed: int) -> Graph:
    """Uniform labeled tree drawn through a random Prüfer sequence."""
    if n < 1:
        raise GraphError("random_tree needs n >= 1")
    rng = np.random.default_rng(seed)
    seq = rng.integers(0, n, size=max(n - 2, 0)).tolist() if n > 2 else []
    return Graph(n, prufer_to_edges(seq, n))


def gnp_connected(n: int, p: float, seed: int, max_retries: int = 100) -> Graph:
    """Erdős-Rényi G(n, p) resampled until connected."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    if max_retries < 1:
        raise GraphError("max_retries must be >= 1")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(max_retries):
        keep = rng.random(len(pairs)) < p
        edges = [e for e, k in zip(pairs, keep) if k]
        try:
            return Graph(n, edges)
        except GraphError:
            continue
    raise GraphError(f"no connected G({n}, {p}) sample in {max_retries} tries")


def poa_example(m: int, k: int) -> Graph:
    """Clique of ``k-1`` bottom nodes fully joined to ``m(k-1)`` independent top nodes.

    Bottom nodes are ``0..k-2``; top nodes are ``k-1..n-1`` with
    ``n = (m+1)(k-1)``.
    """
    if m < 1 or k < 2:
        raise GraphError(f"poa_example needs m >= 1 and k >= 2, got m={m}, k={k}")
    b = k - 1
    n = (m + 1) * b
    edges = list(itertools.combinations(range(b), 2))
    edges += [(u, t) for t in range(b, n) for u in range(b)]
    return Graph(n, edges)


FAMILIES = ("path", "cycle", "clique", "star", "random_tree", "gnp_connected", "poa_example")


def generate(family: str, seed: int = 0, **params) -> Graph:
    """Build a graph from a named family.

    ``seed`` is only consumed by the random families; equal seeds give
    identical graphs.
    """
    try:
        if family == "path":
            return path(int(params["n"]))
        if family == "cycle":
            return cycle(int(params["n"]))
        if family == "clique":
            return clique(int(params["n"]))
        if family == "star":
            return star(int(params["n"]))
        if family == "random_tree":
            return random_tree(int(params["n"]), seed)
        if family == "gnp_connected":
            return gnp_connected(int(params["n"]), float(params["p"]), seed,
                                 int(params.get("max_retries", 100)))
        if family == "poa_example":
            return poa_example(int(params["m"]), int(params["k"]))
    except KeyError as exc:
        raise GraphError(f"family {family!r} is missing parameter {exc.args[0]!r}") from None
    raise GraphError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


# -- exhaustive families ------------------------------------------------------

def iter_labeled_trees(n: int) -> Iterator[Graph]:
    """All ``n**(n-2)`` labeled trees, in lexicographic Prüfer order."""
    if n <= 2:
        yield Graph(n, prufer_to_edges((), n))
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield Graph(n, prufer_to_edges(seq, n))


def iter_connected_graphs(n: int) -> Iterator[Graph]:
    """All connected labeled simple graphs on ``n`` nodes (edge-subset order)."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        if len(edges) < n - 1:
            continue
        try:
            yield Graph(n, edges)
        except GraphError:
            continue


def is_tree(g: Graph) -> bool:
    return len(g.edges) == g.n - 1
