"""Graphs, the normalized adjacency with self-connections, and smoothing operators.

The smoothing operator is the symmetrically normalized adjacency
``D^{-1/2} (A + I) D^{-1/2}`` where ``D`` counts degrees including the added
self-connection. Its powers are never materialized: smoothing at scale J is J
repeated sparse products, which keeps large graphs feasible.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import DataError, ShapeError
from .numerics import spmm


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph: node count plus a deduplicated edge array.

    ``edges`` is an (E, 2) int64 array with each edge stored once as (i, j),
    i < j, sorted lexicographically. No self-loops are stored; the single
    self-connection per node is added at normalization time.
    """

    n: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        e = self.edges
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise DataError(
                f"edge endpoint out of range: graph has {self.n} nodes, "
                f"indices span [{e.min()}, {e.max()}]"
            )

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        """Degree of each node, self-connections not counted."""
        d = np.zeros(self.n, dtype=np.int64)
        if self.edges.size:
            np.add.at(d, self.edges[:, 0], 1)
            np.add.at(d, self.edges[:, 1], 1)
        return d

    def permuted(self, perm: np.ndarray) -> "Graph":
        """Relabel nodes: node i becomes perm[i]."""
        if self.edges.size == 0:
            return Graph(self.n, self.edges.copy())
        return make_graph(self.n, np.asarray(perm)[self.edges])


def make_graph(n: int, edges) -> Graph:
    """Canonicalize an edge list into a Graph.

    Drops self-loops (with a warning), symmetrizes directed input, and
    collapses duplicates.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size:
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            warnings.warn(
                f"dropping {int(loops.sum())} self-loop(s); self-connections are "
                "added at normalization",
                stacklevel=2,
            )
            e = e[~loops]
    if e.size:
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        e = np.unique(np.column_stack([lo, hi]), axis=0)
    else:
        e = np.empty((0, 2), dtype=np.int64)
    return Graph(n, e)


def edgeless_graph(n: int) -> Graph:
    return Graph(n, np.empty((0, 2), dtype=np.int64))


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack(iu).astype(np.int64))


def load_graph(path) -> Graph:
    """Read the plain-text edge-list format.

    First non-comment line is ``n <node_count>``; every following line holds
    two whitespace-separated 0-based node indices. Lines starting with ``#``
    are ignored.
    """
    n = None
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if parts[0] != "n" or len(parts) != 2:
                    raise DataError(
                        f"{path}:{lineno}: expected header 'n <node_count>', got {line!r}"
                    )
                n = int(parts[1])
                continue
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            rows.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise DataError(f"{path}: missing 'n <node_count>' header")
    return make_graph(n, np.asarray(rows, dtype=np.int64) if rows else [])


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"n {g.n}\n")
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")


def normalize_adjacency(g: Graph) -> sparse.csr_array:
    """Symmetrically normalized adjacency with one self-connection per node.

    Entry (i, j) is ``1/sqrt(d_i d_j)`` for every edge and for the diagonal,
    with ``d`` the degree including the self-connection. Diagonal entries are
    therefore strictly positive and isolated nodes get exactly 1. The result
    has spectral radius <= 1; positive semidefiniteness holds for projector
    -like graphs (edgeless, unions of cliques) and for even powers, but not in
    general.
    """
    n = g.n
    if g.edge_count:
        r = np.concatenate([g.edges[:, 0], g.edges[:, 1], np.arange(n)])
        c = np.concatenate([g.edges[:, 1], g.edges[:, 0], np.arange(n)])
    else:
        r = np.arange(n)
        c = np.arange(n)
    a = sparse.csr_array(
        (np.ones(r.size, dtype=np.float64), (r, c)), shape=(n, n)
    )
    deg = np.asarray(a.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(deg)
    d = sparse.dia_array((inv_sqrt[None, :], [0]), shape=(n, n))
    out = (d @ a @ d).tocsr()
    out.sort_indices()
    return out


def apply_smoothing(a: sparse.csr_array, x: np.ndarray, j: int) -> np.ndarray:
    """Apply the scale-``j`` smoothing operator: j repeated sparse products."""
    if j < 0:
        raise ValueError("smoothing scale must be nonnegative")
    if a.shape[0] != x.shape[0]:
        raise ShapeError(
            f"operator is {a.shape[0]}x{a.shape[1]} but signal has {x.shape[0]} rows",
            left=a.shape,
            right=x.shape,
        )
    out = x
    for _ in range(j):
        out = spmm(a, out)
    return out


def high_pass(a: sparse.csr_array, x: np.ndarray, j: int) -> np.ndarray:
    """Complement channel ``x - A_j x``; zero for j = 0 and for edgeless graphs."""
    if j == 0:
        return np.zeros_like(np.asarray(x, dtype=np.float64))
    return np.asarray(x, dtype=np.float64) - apply_smoothing(a, x, j)
