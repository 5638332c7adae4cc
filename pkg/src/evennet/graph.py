"""Undirected sparse graphs and the normalized propagation operator.

The graph is stored in CSR form (sorted neighbor lists, 64-bit indices).
All numerics are float64; neighbor lists are sorted so every traversal,
and hence every floating-point summation order, is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

DENSE_CAP = 5000


@dataclass
class Graph:
    """Simple undirected graph: no self-loops, no duplicate edges.

    Instances are immutable by convention after construction and safe to
    share read-only across concurrent workers.

    Attributes
    ----------
    num_nodes : int
    indptr, indices : int64 CSR arrays; ``indices[indptr[i]:indptr[i+1]]``
        is node i's sorted neighbor list.
    degrees : int64 vector, ``degrees[i] == len(neighbors(i))``.
    num_edges : number of undirected edges (each counted once).
    """

    num_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    num_edges: int
    _adj: sp.csr_matrix | None = field(default=None, repr=False, compare=False)
    _inv_sqrt_deg: np.ndarray | None = field(default=None, repr=False, compare=False)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edge_array(self) -> np.ndarray:
        """All undirected edges as an (m, 2) array with u < v, lexicographically sorted."""
        rows = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees)
        cols = self.indices
        keep = rows < cols
        return np.column_stack([rows[keep], cols[keep]])

    def adjacency(self) -> sp.csr_matrix:
        """0/1 adjacency as a float64 CSR matrix (cached)."""
        if self._adj is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            self._adj = sp.csr_matrix(
                (data, self.indices, self.indptr),
                shape=(self.num_nodes, self.num_nodes),
            )
        return self._adj

    def inv_sqrt_degrees(self) -> np.ndarray:
        """D^{-1/2} diagonal; entries for isolated nodes are defined as 0."""
        if self._inv_sqrt_deg is None:
            d = self.degrees.astype(np.float64)
            out = np.zeros_like(d)
            nz = d > 0
            out[nz] = 1.0 / np.sqrt(d[nz])
            self._inv_sqrt_deg = out
        return self._inv_sqrt_deg


@dataclass
class LabelAssignment:
    """Per-node class ids in 0..K-1 with the class-size vector."""

    classes: np.ndarray
    num_classes: int
    class_sizes: np.ndarray

    @classmethod
    def from_classes(cls, classes, num_classes: int | None = None) -> "LabelAssignment":
        arr = np.asarray(classes, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("class ids must be a 1-d sequence")
        if num_classes is None:
            num_classes = int(arr.max()) + 1 if arr.size else 0
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise ValueError(
                f"class id out of range: found {int(arr.min())}..{int(arr.max())} "
                f"with num_classes={num_classes}"
            )
        sizes = np.bincount(arr, minlength=num_classes).astype(np.int64)
        return cls(classes=arr, num_classes=num_classes, class_sizes=sizes)

    @property
    def num_nodes(self) -> int:
        return len(self.classes)

    def label_difference(self) -> np.ndarray:
        """Binary label-difference vector: +1 for class 0, -1 for class 1."""
        if self.num_classes != 2:
            raise ValueError("label difference is defined for binary tasks only")
        return np.where(self.classes == 0, 1.0, -1.0)

    def indicator_matrix(self) -> np.ndarray:
        """Dense N x K one-hot class indicator."""
        y = np.zeros((self.num_nodes, self.num_classes), dtype=np.float64)
        y[np.arange(self.num_nodes), self.classes] = 1.0
        return y


def validate_features(x, num_nodes: int | None = None) -> np.ndarray:
    """Coerce to a dense float64 N x F matrix, rejecting NaN/Inf."""
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {arr.shape}")
    if num_nodes is not None and arr.shape[0] != num_nodes:
        raise ValueError(f"feature matrix has {arr.shape[0]} rows, expected {num_nodes}")
    if not np.isfinite(arr).all():
        raise ValueError("feature matrix contains NaN or Inf")
    return arr


def build_graph(edge_list, num_nodes: int) -> Graph:
    """Build a Graph from (u, v) pairs: symmetrize, drop self-loops, dedup.

    Raises ValueError naming the offending pair when an endpoint is out of
    range.
    """
    if num_nodes < 0:
        raise ValueError("num_nodes must be non-negative")
    edges = np.asarray(list(edge_list), dtype=np.int64).reshape(-1, 2)
    if edges.size:
        bad = (edges < 0) | (edges >= num_nodes)
        if bad.any():
            u, v = edges[bad.any(axis=1)][0]
            raise ValueError(
                f"edge ({int(u)}, {int(v)}) out of range for num_nodes={num_nodes}"
            )
        edges = edges[edges[:, 0] != edges[:, 1]]
    if edges.size:
        both = np.vstack([edges, edges[:, ::-1]])
        both = np.unique(both, axis=0)  # sorts lexicographically -> sorted CSR
        rows, cols = both[:, 0], both[:, 1]
    else:
        rows = cols = np.empty(0, dtype=np.int64)
    degrees = np.bincount(rows, minlength=num_nodes).astype(np.int64)
    indptr = np.concatenate([[0], np.cumsum(degrees)]).astype(np.int64)
    return Graph(
        num_nodes=num_nodes,
        indptr=indptr,
        indices=cols,
        degrees=degrees,
        num_edges=len(cols) // 2,
    )


def propagate(g: Graph, x: np.ndarray) -> np.ndarray:
    """One application of P = D^{-1/2} A D^{-1/2} by a sparse pass over edges.

    Accepts an N-vector or an N x d matrix. Rows of isolated nodes map to
    zero (their D^{-1/2} entry is 0 by convention).
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[0] != g.num_nodes:
        raise ValueError(f"signal has {arr.shape[0]} rows, graph has {g.num_nodes} nodes")
    s = g.inv_sqrt_degrees()
    scale = s if arr.ndim == 1 else s[:, None]
    return scale * (g.adjacency() @ (scale * arr))


def _check_dense_cap(g: Graph, cap: int) -> None:
    if g.num_nodes > cap:
        raise ValueError(f"dense operator requested for N={g.num_nodes} > cap={cap}")


def normalized_laplacian_dense(g: Graph, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense L~ = I - D^{-1/2} A D^{-1/2}; isolated nodes get an identity row."""
    _check_dense_cap(g, cap)
    s = g.inv_sqrt_degrees()
    a = g.adjacency().toarray()
    return np.eye(g.num_nodes) - s[:, None] * a * s[None, :]


def unnormalized_laplacian_dense(g: Graph, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense L = D - A; trace equals the sum of degrees = 2m."""
    _check_dense_cap(g, cap)
    return np.diag(g.degrees.astype(np.float64)) - g.adjacency().toarray()


def edge_homophily(g: Graph, labels: LabelAssignment) -> float:
    """Fraction of edges joining same-class endpoints, each undirected edge once."""
    if labels.num_nodes != g.num_nodes:
        raise ValueError("labels must cover all nodes")
    if g.num_edges == 0:
        raise ValueError("edge homophily is undefined on an empty edge set")
    e = g.edge_array()
    same = labels.classes[e[:, 0]] == labels.classes[e[:, 1]]
    return float(np.count_nonzero(same)) / g.num_edges
