"""End-to-end spectral embeddings.

``embed`` runs the full pipeline: two-hop sets -> repulsion matrix ->
identity shift -> repulsion weight -> combined operator -> degree balancing
-> block eigensolve. ``laplacian_eigenmaps`` is the classical baseline on
the plain Laplacian with an identity inner product.

Both methods solve for K+1 pairs and discard the bottom one. For the
baseline that is the standard removal of the exact constant eigenvector;
for the balanced pair (A, B) the bottom eigenvector is the near-constant
zero-frequency mode (exactly constant on regular graphs), which carries no
geometry. The K returned coordinates are the next eigenvectors in
ascending eigenvalue order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolver import EigenResult, SolverConfig, lobpcg_smallest, require_converged
from .errors import DisconnectedGraphError, InputError
from .graph import Graph, laplacian, _format_float
from .operators import DiagonalScaling, build_operator_pair


@dataclass
class Embedding:
    """N x K latent coordinates; rows are node vectors, columns eigenvectors."""

    P: np.ndarray
    method: str  # "proposed" | "le"
    eigenvalues: np.ndarray
    b: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.P.shape[0])

    @property
    def k(self) -> int:
        return int(self.P.shape[1])


def _check_embeddable(g: Graph, k: int) -> None:
    if not 1 <= k <= g.n - 1:
        raise InputError(
            f"embedding dimension must be in [1, {g.n - 1}] "
            f"(one extra eigenpair is solved and discarded), got {k}"
        )
    count, _ = g.connected_components()
    if count != 1:
        raise DisconnectedGraphError(
            f"graph has {count} connected components; embed the largest one",
            n_components=count,
        )


def _solve_drop_first(a, bdiag, k: int, cfg: SolverConfig | None, context: str,
                      require_convergence: bool) -> EigenResult:
    base = cfg or SolverConfig(k=k + 1)
    solver_cfg = SolverConfig(
        k=k + 1,
        tol=base.tol,
        max_iter=base.max_iter,
        seed=base.seed,
        preconditioner=base.preconditioner,
    )
    result = lobpcg_smallest(a, bdiag, solver_cfg)
    if require_convergence:
        require_converged(result, context)
    return result


def embed(
    g: Graph,
    k: int,
    cfg: SolverConfig | None = None,
    literal_diagonal: bool = False,
    require_convergence: bool = True,
) -> Embedding:
    """Balanced two-hop-aware spectral embedding of a connected graph."""
    _check_embeddable(g, k)
    pair = build_operator_pair(
        g,
        literal_diagonal=literal_diagonal,
        solver_seed=(cfg.seed if cfg else 42),
    )
    result = _solve_drop_first(
        pair.A, pair.B, k, cfg, "embedding eigensolve", require_convergence
    )
    diag = pair.diagnostics()
    diag.update(result.diagnostics())
    diag["dropped_eigenvalue"] = float(result.eigenvalues[0])
    return Embedding(
        P=result.eigenvectors[:, 1:],
        method="proposed",
        eigenvalues=result.eigenvalues[1:],
        b=pair.B.b,
        diagnostics=diag,
    )


def laplacian_eigenmaps(
    g: Graph,
    k: int,
    cfg: SolverConfig | None = None,
    require_convergence: bool = True,
) -> Embedding:
    """Classical baseline: plain Laplacian, identity inner product."""
    _check_embeddable(g, k)
    lap = laplacian(g)
    ident = DiagonalScaling.identity(g.n)
    result = _solve_drop_first(
        lap, ident, k, cfg, "baseline eigensolve", require_convergence
    )
    diag = result.diagnostics()
    diag["dropped_eigenvalue"] = float(result.eigenvalues[0])
    return Embedding(
        P=result.eigenvectors[:, 1:],
        method="le",
        eigenvalues=result.eigenvalues[1:],
        b=None,
        diagnostics=diag,
    )


# -- CSV round trip -------------------------------------------------------------


def save_embedding_csv(emb: Embedding, path) -> None:
    """Write ``node,c1,...,cK`` rows with 17-significant-digit coordinates."""
    with open(path, "w", encoding="utf-8") as fh:
        header = ",".join(["node"] + [f"c{j + 1}" for j in range(emb.k)])
        fh.write(header + "\n")
        for i in range(emb.n):
            coords = ",".join(_format_float(v) for v in emb.P[i])
            fh.write(f"{i},{coords}\n")


def load_embedding_csv(path) -> np.ndarray:
    """Read coordinates written by :func:`save_embedding_csv`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if not header or header[0] != "node":
                raise InputError(f"{path}: expected 'node,c1,...' header")
            rows = []
            ids = []
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != len(header):
                    raise InputError(f"{path}: ragged row {line.strip()!r}")
                ids.append(int(parts[0]))
                rows.append([float(v) for v in parts[1:]])
    except OSError as e:
        raise InputError(f"cannot open {path}: {e}") from e
    except ValueError as e:
        raise InputError(f"{path}: malformed embedding CSV: {e}") from e
    P = np.asarray(rows, dtype=np.float64)
    order = np.argsort(np.asarray(ids))
    if not np.array_equal(np.asarray(ids)[order], np.arange(len(ids))):
        raise InputError(f"{path}: node ids must be dense 0..n-1")
    return P[order]
