"""Attraction/repulsion operator pair for manifold-graph embeddings.

From a connected graph this module builds:

* the disconnected two-hop neighbor sets (nodes reachable in two hops with
  no direct edge),
* the repulsion matrix ``Q``: the Laplacian of the two-hop disagreement
  graph, where pair {i, j} gets weight ``1/|T_i| + 1/|T_j|``,
* the identity shift ``epsilon``: the smallest strictly-positive eigenvalue
  of ``Q``,
* the repulsion weight ``mu``: the largest value keeping every Gershgorin
  disc left-end of ``L - mu*Q + epsilon*I`` non-negative (attained with
  equality on the binding row),
* the combined positive semi-definite operator ``A = L - mu*Q + epsilon*I``,
* the diagonal balance ``B = diag(b)`` equalizing the generalized node
  degrees ``r_i / b_i`` under the unit-product constraint.

One-hop and disconnected-two-hop pairs never overlap, so off-diagonal
supports of ``L`` and ``Q`` are disjoint and the disc algebra in
``repulsion_weight`` is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DisconnectedGraphError, InputError
from .graph import Graph, laplacian
from .sparse import SparseSymMatrix


@dataclass(frozen=True)
class TwoHopSets:
    """Per-node sorted sets of disconnected two-hop neighbors (CSR-style)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass(frozen=True)
class DiagonalScaling:
    """Positive diagonal with unit geometric mean (product of entries 1)."""

    b: np.ndarray
    generalized_degree: float = field(default=float("nan"))

    @classmethod
    def identity(cls, n: int) -> "DiagonalScaling":
        return cls(b=np.ones(n), generalized_degree=float("nan"))

    @property
    def n(self) -> int:
        return int(self.b.size)


@dataclass(frozen=True)
class OperatorPair:
    """The assembled eigenproblem pair plus its construction parameters."""

    A: SparseSymMatrix
    B: DiagonalScaling
    mu: float
    epsilon: float
    Q: SparseSymMatrix

    def diagnostics(self) -> dict:
        left = self.A.disc_left_ends()
        binding = int(np.argmin(left))
        return {
            "mu": float(self.mu),
            "epsilon": float(self.epsilon),
            "min_disc_left_end": float(left[binding]),
            "q_nnz": int(self.Q.nnz),
            "binding_row": binding,
        }


def two_hop_sets(g: Graph) -> TwoHopSets:
    """Nodes reachable in exactly two hops that are not direct neighbors."""
    adj = sp.csr_matrix(
        (np.ones(g.indices.size), g.indices, g.indptr), shape=(g.n, g.n)
    )
    reach2 = (adj @ adj).tocoo()
    offdiag = reach2.row != reach2.col
    pairs = sp.csr_matrix(
        (np.ones(int(offdiag.sum())), (reach2.row[offdiag], reach2.col[offdiag])),
        shape=(g.n, g.n),
    )
    # keep pairs that are NOT direct edges
    t = pairs - pairs.multiply(adj)
    t.eliminate_zeros()
    t = sp.csr_matrix(t)
    t.sort_indices()
    return TwoHopSets(
        n=g.n,
        indptr=np.ascontiguousarray(t.indptr, dtype=np.int64),
        indices=np.ascontiguousarray(t.indices, dtype=np.int64),
    )


def two_hop_laplacian(t: TwoHopSets, literal_diagonal: bool = False) -> SparseSymMatrix:
    """Repulsion matrix: Laplacian of the weighted two-hop disagreement graph.

    Pair {i, j} with ``j`` in i's set gets weight ``1/T_i + 1/T_j``; rows
    sum to zero and the matrix is positive semi-definite. With
    ``literal_diagonal`` the diagonal is ``1/T_i + sum_{j in T_i} 1/T_j``
    instead (a debugging variant that is not a Laplacian: rows then sum to
    ``1/T_i - 1`` and the matrix can be indefinite).
    """
    counts = t.counts().astype(np.float64)
    inv = np.zeros(t.n)
    has = counts > 0
    inv[has] = 1.0 / counts[has]
    rows = np.repeat(np.arange(t.n), np.diff(t.indptr))
    cols = t.indices
    off = -(inv[rows] + inv[cols])
    if literal_diagonal:
        diag = inv + np.bincount(rows, weights=inv[cols], minlength=t.n)
    else:
        diag = np.bincount(rows, weights=-off, minlength=t.n)
    r = np.concatenate([rows, np.arange(t.n)])
    c = np.concatenate([cols, np.arange(t.n)])
    v = np.concatenate([off, diag])
    keep = v != 0.0
    return SparseSymMatrix.from_coo(t.n, r[keep], c[keep], v[keep])


def identity_shift(q: SparseSymMatrix, solver_seed: int = 42) -> float:
    """Smallest eigenvalue of ``q`` above ``tau = 1e-8 * trace/n``; 0 if none.

    Dense decomposition up to n = 512 (exact); beyond that the block
    eigensolver with constant-vector deflation takes over at a relaxed
    budget, since the shift only needs to be magnitude-accurate.
    """
    q.check_symmetric()
    n = q.n
    if n == 0 or q.nnz == 0:
        return 0.0
    tau = 1e-8 * q.trace() / n
    if n <= 512:
        w = np.linalg.eigvalsh(q.to_dense())
        above = w[w > tau]
        return float(above[0]) if above.size else 0.0
    from .eigensolver import smallest_above_null  # local import to avoid cycle

    return smallest_above_null(q, tau, seed=solver_seed, tol=1e-6, max_iter=60)


def repulsion_weight(l: SparseSymMatrix, q: SparseSymMatrix, epsilon: float) -> float:
    """Largest repulsion weight with all disc left-ends still non-negative.

    Per row with positive repulsion diagonal the critical weight is
    ``epsilon / (Q_ii - sum_{j != i} Q_ij)``; rows without repulsion need no
    protection and are skipped. Returns the row minimum, or 0 when no row
    qualifies.
    """
    if l.n != q.n:
        raise InputError(f"dimension mismatch: {l.n} vs {q.n}")
    if epsilon < 0:
        raise InputError(f"epsilon must be non-negative, got {epsilon}")
    diag = q.diagonal()
    denom = 2.0 * diag - q.row_sums()
    include = diag > 0.0
    if not np.any(include):
        return 0.0
    return float(np.min(epsilon / denom[include]))


def assemble_operator(
    l: SparseSymMatrix, q: SparseSymMatrix, mu: float, epsilon: float
) -> SparseSymMatrix:
    """Sparse combination ``L - mu*Q + epsilon*I`` with merged pattern."""
    if l.n != q.n:
        raise InputError(f"dimension mismatch: {l.n} vs {q.n}")
    m = l._csr - mu * q._csr + epsilon * sp.identity(l.n, format="csr")
    return SparseSymMatrix.from_scipy(m)


def balance_radii(radii: np.ndarray) -> DiagonalScaling:
    """Diagonal ``b`` proportional to ``radii`` with unit product.

    Computed in log space so the product constraint holds to machine
    precision at any size; ``radii / b`` is then a constant, the shared
    generalized degree.
    """
    radii = np.asarray(radii, dtype=np.float64)
    logr = np.log(radii)
    logb = logr - logr.mean()
    logb -= logb.mean()  # second pass pins the sum to ~1e-15
    return DiagonalScaling(
        b=np.exp(logb), generalized_degree=float(np.exp(logr.mean()))
    )


def degree_balancing(a: SparseSymMatrix) -> DiagonalScaling:
    """Balance generalized node degrees ``r_i / b_i`` of a sparse operator.

    ``r_i`` is the Gershgorin radius of row ``i`` of ``a``; all must be
    positive, which holds exactly when the underlying graph is connected
    with at least one edge.
    """
    _, radii = a.gershgorin()
    if np.any(radii <= 0.0):
        isolated = int(np.argmax(radii <= 0.0))
        raise DisconnectedGraphError(
            f"node {isolated} has no off-diagonal coupling; "
            "extract the largest connected component and retry"
        )
    return balance_radii(radii)


def build_operator_pair(
    g: Graph, literal_diagonal: bool = False, solver_seed: int = 42
) -> OperatorPair:
    """Full construction chain from a graph to the eigenproblem pair."""
    l = laplacian(g)
    t = two_hop_sets(g)
    q = two_hop_laplacian(t, literal_diagonal=literal_diagonal)
    eps = identity_shift(q, solver_seed=solver_seed)
    mu = repulsion_weight(l, q, eps)
    a = assemble_operator(l, q, mu, eps)
    b = degree_balancing(a)
    return OperatorPair(A=a, B=b, mu=mu, epsilon=eps, Q=q)
