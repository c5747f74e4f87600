"""Graph construction, file IO, synthetic generators, and Laplacian forms.

Graphs are undirected, weighted, without self-loops, over dense 0-based
node ids. Adjacency is stored in CSR with neighbor lists sorted by id, the
canonical form used for equality and for byte-stable serialization.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, ParseError
from .sparse import SparseSymMatrix


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


class Graph:
    """Undirected weighted graph in CSR adjacency form."""

    __slots__ = ("n", "indptr", "indices", "weights")

    def __init__(self, n, indptr, indices, weights):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)

    @classmethod
    def from_edges(cls, edges, n: int | None = None) -> "Graph":
        """Build from an iterable of ``(i, j)`` or ``(i, j, w)`` tuples.

        Node count defaults to ``max id + 1``. Self-loops, duplicate pairs,
        non-positive weights, and negative ids are rejected.
        """
        ii, jj, ww = [], [], []
        for e in edges:
            if len(e) == 2:
                i, j = e
                w = 1.0
            else:
                i, j, w = e
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise InputError(f"self-loop on node {i}")
            if i < 0 or j < 0:
                raise InputError(f"negative node id in edge ({i}, {j})")
            if not (w > 0.0) or not np.isfinite(w):
                raise InputError(f"edge ({i}, {j}) has non-positive weight {w}")
            ii.append(i)
            jj.append(j)
            ww.append(w)
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        ww = np.asarray(ww, dtype=np.float64)
        n_implied = int(max(ii.max(initial=-1), jj.max(initial=-1))) + 1
        if n is None:
            n = n_implied
        elif n < n_implied:
            raise InputError(f"edge references node {n_implied - 1} >= n={n}")
        n = int(n)
        lo, hi = np.minimum(ii, jj), np.maximum(ii, jj)
        key = lo * n + hi
        uniq, counts = np.unique(key, return_counts=True)
        if np.any(counts > 1):
            k = int(uniq[np.argmax(counts > 1)])
            raise InputError(f"duplicate edge {{{k // n}, {k % n}}}")
        # symmetrize to half-edges and bucket into CSR
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        wts = np.concatenate([ww, ww])
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst, wts)

    # -- queries -----------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return int(self.indices.size) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        return self.weights[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        """Weighted degrees, accumulated in neighbor-sorted order."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(rows, weights=self.weights, minlength=self.n)

    def edge_array(self):
        """Edges once each as ``(i, j, w)`` arrays with ``i < j``."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = rows < self.indices
        return rows[mask], self.indices[mask], self.weights[mask]

    def adjacency(self) -> SparseSymMatrix:
        return SparseSymMatrix(self.n, self.indptr, self.indices, self.weights)

    def connected_components(self) -> tuple[int, np.ndarray]:
        """BFS labelling; returns (component count, per-node labels)."""
        labels = np.full(self.n, -1, dtype=np.int64)
        count = 0
        for s in range(self.n):
            if labels[s] >= 0:
                continue
            labels[s] = count
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.neighbors(u):
                    if labels[v] < 0:
                        labels[v] = count
                        stack.append(v)
            count += 1
        return count, labels

    def is_connected(self) -> bool:
        return self.n <= 1 or self.connected_components()[0] == 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):  # mutable ndarrays; identity hash is fine
        return id(self)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


# -- file IO ----------------------------------------------------------------


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated ``i j [w]`` edge list.

    Lines starting with ``#`` and blank lines are ignored. Missing weights
    default to 1. Duplicate edges are an error rather than a merge.
    """
    edges = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot open {path}: {e}") from e
    with fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) not in (2, 3):
                raise ParseError(path, lineno, f"expected 'i j [w]', got {stripped!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, lineno, f"node ids must be integers: {stripped!r}")
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(path, lineno, f"weight must be a number: {parts[2]!r}")
            if i == j:
                raise ParseError(path, lineno, f"self-loop on node {i}")
            if i < 0 or j < 0:
                raise ParseError(path, lineno, "negative node id")
            if not (w > 0.0):
                raise ParseError(path, lineno, f"non-positive weight {w}")
            edges.append((i, j, w))
    if not edges:
        raise InputError(f"{path}: no edges")
    try:
        return Graph.from_edges(edges)
    except InputError as e:
        raise InputError(f"{path}: {e}") from e


def save_edge_list(g: Graph, path) -> None:
    """Write canonical tab-separated edges (``i < j``, 17-digit weights)."""
    ii, jj, ww = g.edge_array()
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, w in zip(ii, jj, ww):
            fh.write(f"{i}\t{j}\t{_format_float(w)}\n")


def load_features_csv(path, header: bool = False) -> np.ndarray:
    """Read a comma-separated feature matrix, one sample per row."""
    try:
        X = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except OSError as e:
        raise InputError(f"cannot open {path}: {e}") from e
    except ValueError as e:
        raise InputError(f"{path}: malformed feature CSV: {e}") from e
    if X.shape[0] < 2:
        raise InputError(f"{path}: need at least 2 samples, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{path}: non-finite feature values")
    return X


# -- synthetic generators -----------------------------------------------------


def generate(kind: str, size) -> Graph:
    """Unit-weight graph of a named topology.

    kind one of ``path``, ``ring``, ``star``, ``grid``, ``trimesh``.
    ``size`` is the node count for path/ring/star, ``(rows, cols)`` for grid,
    and the side length (number of rows) for the triangular-lattice trimesh;
    side 4 gives the 10-node mesh with 18 edges.
    """
    if kind == "path":
        n = _int_size(size, 2, "path")
        return Graph.from_edges([(i, i + 1) for i in range(n - 1)], n=n)
    if kind == "ring":
        n = _int_size(size, 3, "ring")
        return Graph.from_edges(
            [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)], n=n
        )
    if kind == "star":
        n = _int_size(size, 2, "star")
        return Graph.from_edges([(0, i) for i in range(1, n)], n=n)
    if kind == "grid":
        try:
            r, c = (int(size[0]), int(size[1]))
        except (TypeError, IndexError):
            raise InputError("grid size must be (rows, cols)")
        if r < 2 or c < 2:
            raise InputError(f"grid needs rows, cols >= 2, got {r}x{c}")
        edges = []
        for a in range(r):
            for b in range(c):
                v = a * c + b
                if b + 1 < c:
                    edges.append((v, v + 1))
                if a + 1 < r:
                    edges.append((v, v + c))
        return Graph.from_edges(edges, n=r * c)
    if kind == "trimesh":
        side = _int_size(size, 2, "trimesh")
        first = [r * (r + 1) // 2 for r in range(side + 1)]
        edges = []
        for r in range(side):
            for c in range(r + 1):
                v = first[r] + c
                if c < r:
                    edges.append((v, v + 1))
                if r + 1 < side:
                    edges.append((v, first[r + 1] + c))
                    edges.append((v, first[r + 1] + c + 1))
        return Graph.from_edges(edges, n=first[side])
    raise InputError(f"unknown graph kind {kind!r}")


def _int_size(size, minimum: int, kind: str) -> int:
    try:
        n = int(size)
    except (TypeError, ValueError):
        raise InputError(f"{kind} size must be an integer")
    if n < minimum:
        raise InputError(f"{kind} needs at least {minimum} nodes, got {n}")
    return n


# -- kNN construction ---------------------------------------------------------


def knn_graph(X: np.ndarray, k: int, weighted: bool = True) -> Graph:
    """Symmetrized k-nearest-neighbor graph of a point cloud.

    Each point contributes directed edges to its ``k`` nearest Euclidean
    neighbors (ties at the k-th distance broken by lower index); the union
    of directions is kept, so every node ends with degree >= k. With
    ``weighted`` the Gaussian kernel ``exp(-d^2 / sigma^2)`` is applied,
    where ``sigma^2`` is the mean squared distance over retained edges.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError("feature matrix must be 2-D")
    n = X.shape[0]
    if not 1 <= k < n:
        raise InputError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)
    pairs = set()
    for i in range(n):
        nearest = np.argsort(d2[i], kind="stable")[:k]
        for j in nearest:
            pairs.add((min(i, int(j)), max(i, int(j))))
    ii = np.array([p[0] for p in sorted(pairs)], dtype=np.int64)
    jj = np.array([p[1] for p in sorted(pairs)], dtype=np.int64)
    if weighted:
        dist2 = d2[ii, jj]
        sigma2 = float(dist2.mean())
        if sigma2 > 0.0:
            w = np.exp(-dist2 / sigma2)
        else:
            w = np.ones_like(dist2)  # duplicate points: exp(0) = 1
        return Graph.from_edges(zip(ii, jj, w), n=n)
    return Graph.from_edges(zip(ii, jj), n=n)


# -- spectral objects ----------------------------------------------------------


def laplacian(g: Graph) -> SparseSymMatrix:
    """Combinatorial Laplacian (degree matrix minus adjacency).

    The diagonal is accumulated in the same order as the off-diagonal
    Gershgorin radius, so every disc left-end of the result is exactly 0.
    """
    deg = g.degrees()
    counts = np.diff(g.indptr)
    new_counts = counts + 1
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(new_counts, out=indptr[1:])
    nnz = int(indptr[-1])
    indices = np.empty(nnz, dtype=np.int64)
    data = np.empty(nnz, dtype=np.float64)
    for i in range(g.n):
        s, e = g.indptr[i], g.indptr[i + 1]
        cols = g.indices[s:e]
        pos = int(np.searchsorted(cols, i))
        out = indptr[i]
        indices[out:out + pos] = cols[:pos]
        data[out:out + pos] = -g.weights[s:s + pos]
        indices[out + pos] = i
        data[out + pos] = deg[i]
        indices[out + pos + 1:indptr[i + 1]] = cols[pos:]
        data[out + pos + 1:indptr[i + 1]] = -g.weights[s + pos:e]
    return SparseSymMatrix(g.n, indptr, indices, data)


def dirichlet_energy(g: Graph, x: np.ndarray) -> float:
    """Edge-weighted smoothness sum ``sum_ij w_ij (x_i - x_j)^2``.

    Equals the Laplacian quadratic form of ``x`` up to rounding.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise InputError(f"vector length {x.shape} does not match n={g.n}")
    ii, jj, ww = g.edge_array()
    diff = x[ii] - x[jj]
    return float(np.sum(ww * diff * diff))
