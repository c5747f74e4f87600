"""Block eigensolvers for the pair (A, B) with positive diagonal B.

``lobpcg_smallest`` runs a locally optimal block preconditioned conjugate
gradient iteration: Rayleigh-Ritz on the subspace spanned by the current
block X, preconditioned residuals W, and the previous search directions P.
Basis vectors are kept B-orthonormal by modified Gram-Schmidt; directions
whose B-norm collapses below 1e-12 of the block maximum are dropped, which
keeps the iteration deterministic without restarts. Converged eigenpairs
are soft-locked: they stay in the basis but stop contributing residuals.

``dense_oracle`` is the verification-grade reference: it densifies
``B^{-1/2} A B^{-1/2}`` and runs cyclic Jacobi rotations to full
convergence. It shares no code path with the block iteration.

Eigenvector sign convention (both solvers): the largest-magnitude entry of
each column is made positive, ties resolved by the lowest index, so results
are comparable across runs, platforms, and implementations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InputError
from .sparse import SparseSymMatrix

_DROP_REL = 1e-12


@dataclass
class SolverConfig:
    """Block size and iteration controls for ``lobpcg_smallest``."""

    k: int
    tol: float = 1e-8
    max_iter: int = 500
    seed: int = 42
    preconditioner: str = "jacobi"

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"block size must be >= 1, got {self.k}")
        if not self.tol > 0:
            raise InputError(f"tolerance must be positive, got {self.tol}")
        if self.preconditioner not in ("none", "jacobi"):
            raise InputError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class EigenResult:
    """Generalized eigenpairs in ascending order with solve diagnostics."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    iterations: int
    residual_norms: np.ndarray
    converged: np.ndarray
    ritz_sum_history: list = field(default_factory=list, repr=False)

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def diagnostics(self) -> dict:
        return {
            "iterations": int(self.iterations),
            "residuals": [float(r) for r in self.residual_norms],
            "converged": [bool(c) for c in self.converged],
        }


def _bvec(b, n: int) -> np.ndarray:
    vec = np.asarray(getattr(b, "b", b), dtype=np.float64)
    if vec.shape != (n,):
        raise InputError(f"diagonal length {vec.shape} does not match n={n}")
    if np.any(vec <= 0.0) or not np.all(np.isfinite(vec)):
        raise InputError("diagonal entries must be strictly positive and finite")
    return vec


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0.0:
            vectors[:, j] = -col
    return vectors


def _b_project_out(y: np.ndarray, block: np.ndarray, bvec: np.ndarray) -> np.ndarray:
    """Remove the B-inner-product component of ``y`` from each column."""
    by = bvec * y
    denom = float(y @ by)
    if denom <= 0.0:
        return block
    coef = (block.T @ by) / denom
    return block - np.outer(y, coef)


def _b_mgs_pair(blocks, ablocks, bvec, ortho_prefix: int = 0):
    """B-orthonormalize stacked columns, mirroring every op onto A-images.

    Two-pass modified Gram-Schmidt; columns whose post-projection B-norm
    falls below ``1e-12 *`` (largest B-norm seen in the block) are dropped
    from both stacks. The first ``ortho_prefix`` columns may be declared
    B-orthonormal already, in which case the remaining columns are first
    projected against them in bulk. Accepted columns are packed into
    preallocated output arrays so the sweeps work on views. Returns (S, AS).
    """
    S = np.concatenate(blocks, axis=1)
    AS = np.concatenate(ablocks, axis=1)
    n, m = S.shape
    # column-major workspaces: the sweeps below live on contiguous columns
    out = np.empty((n, m), order="F")
    aout = np.empty((n, m), order="F")
    p = ortho_prefix
    if p:
        out[:, :p] = S[:, :p]
        aout[:, :p] = AS[:, :p]
        rest = np.asfortranarray(S[:, p:])
        arest = np.asfortranarray(AS[:, p:])
        prefix = out[:, :p]
        aprefix = aout[:, :p]
        for _ in range(2):
            coef = prefix.T @ (bvec[:, None] * rest)
            rest -= prefix @ coef
            arest -= aprefix @ coef
    else:
        rest = np.asfortranarray(S)
        arest = np.asfortranarray(AS)
    # prefix columns stay orthogonal to the projected suffix, so the column
    # sweep only orthogonalizes the suffix internally
    cnt = p
    maxnorm = 1.0 if p else 0.0
    for j in range(m - p):
        v = rest[:, j]
        av = arest[:, j]
        for _ in range(2):
            if cnt > p:
                U = out[:, p:cnt]
                coef = U.T @ (bvec * v)
                v -= U @ coef
                av -= aout[:, p:cnt] @ coef
        norm = float(np.sqrt(max(v @ (bvec * v), 0.0)))
        maxnorm = max(maxnorm, norm)
        if norm < _DROP_REL * maxnorm or norm == 0.0:
            continue
        out[:, cnt] = v / norm
        aout[:, cnt] = av / norm
        cnt += 1
    return out[:, :cnt], aout[:, :cnt]


def lobpcg_smallest(
    a: SparseSymMatrix,
    b,
    cfg: SolverConfig,
    deflate: np.ndarray | None = None,
) -> EigenResult:
    """K smallest generalized eigenpairs of (a, diag(b)).

    ``deflate`` optionally holds vectors (columns) to project out of the
    search space in the B-inner product; used for removing a known null
    direction. A non-converged run returns its best-effort result with the
    per-pair flags set accordingly; callers decide whether that is an error.

    Residual test: ``||A q - lambda B q|| <= tol * (||A||_F/sqrt(n) +
    |lambda| max(b)) * ||q||_2``.
    """
    n = a.n
    bvec = _bvec(b, n)
    k = cfg.k
    if k > n:
        raise InputError(f"block size {k} exceeds dimension {n}")
    rng = np.random.default_rng(cfg.seed)
    X = rng.standard_normal((n, k))
    if deflate is not None:
        defl = np.atleast_2d(np.asarray(deflate, dtype=np.float64).T).T
        for col in defl.T:
            X = _b_project_out(col, X, bvec)
    else:
        defl = None

    def orth_pair(blocks, ablocks):
        S, AS = _b_mgs_pair(blocks, ablocks, bvec)
        while S.shape[1] < k:  # refill against degenerate random starts
            extra = rng.standard_normal((n, k - S.shape[1]))
            if defl is not None:
                for col in defl.T:
                    extra = _b_project_out(col, extra, bvec)
            S, AS = _b_mgs_pair([S, extra], [AS, a.matmat(extra)], bvec)
        return S, AS

    X, AX = orth_pair([X], [a.matmat(X)])
    gram = X.T @ AX
    theta, Y = np.linalg.eigh(0.5 * (gram + gram.T))
    theta, Y = theta[:k], Y[:, :k]
    X, AX = X @ Y, AX @ Y

    anorm = a.frobenius_norm() / np.sqrt(n)
    bmax = float(bvec.max())
    if cfg.preconditioner == "jacobi":
        diag = a.diagonal().copy()
        diag[diag <= 0.0] = 1.0
        prec = 1.0 / diag
    else:
        prec = None

    P = AP = None
    history: list[float] = []
    converged = np.zeros(k, dtype=bool)
    resnorm = np.full(k, np.inf)
    iterations = 0

    def residuals(Xb, AXb, th):
        R = AXb - (bvec[:, None] * Xb) * th
        rn = np.linalg.norm(R, axis=0)
        qn = np.linalg.norm(Xb, axis=0)
        denom = (anorm + np.abs(th) * bmax) * qn
        return R, rn, rn <= cfg.tol * denom

    for iterations in range(1, cfg.max_iter + 1):
        R, resnorm, converged = residuals(X, AX, theta)
        history.append(float(theta.sum()))
        if np.all(converged):
            # re-verify against a fresh product before declaring victory
            AX = a.matmat(X)
            gram = X.T @ AX
            theta = np.diag(0.5 * (gram + gram.T)).copy()
            R, resnorm, converged = residuals(X, AX, theta)
            if np.all(converged):
                break
        active = ~converged
        W = R[:, active]
        if prec is not None:
            W = prec[:, None] * W
        if defl is not None:
            for col in defl.T:
                W = _b_project_out(col, W, bvec)
        blocks = [X, W]
        ablocks = [AX, a.matmat(W)]
        if P is not None and P.shape[1] > 0:
            blocks.append(P)
            ablocks.append(AP)
        # full sweep every 32 iterations guards against slow drift of the
        # trusted-orthonormal X prefix
        prefix = X.shape[1] if iterations % 32 else 0
        S, AS = _b_mgs_pair(blocks, ablocks, bvec, ortho_prefix=prefix)
        gram = S.T @ AS
        theta_all, Y = np.linalg.eigh(0.5 * (gram + gram.T))
        take = min(k, S.shape[1])
        theta, Y = theta_all[:take], Y[:, :take]
        Xn = S @ Y
        AXn = AS @ Y
        P = S[:, k:] @ Y[k:, :]
        AP = AS[:, k:] @ Y[k:, :]
        X, AX = Xn, AXn
        if take < k:  # basis collapsed (k close to n); refill
            X, AX = orth_pair([X], [AX])
            gram = X.T @ AX
            theta, Y = np.linalg.eigh(0.5 * (gram + gram.T))
            theta, Y = theta[:k], Y[:, :k]
            X, AX = X @ Y, AX @ Y
            P = AP = None

    # honest final report from a fresh matrix product
    AX = a.matmat(X)
    gram = X.T @ AX
    theta = np.diag(0.5 * (gram + gram.T)).copy()
    order = np.argsort(theta, kind="stable")
    theta, X, AX = theta[order], X[:, order], AX[:, order]
    _, resnorm, converged = residuals(X, AX, theta)
    X = _fix_signs(X)
    return EigenResult(
        eigenvalues=theta,
        eigenvectors=X,
        iterations=iterations,
        residual_norms=resnorm,
        converged=converged,
        ritz_sum_history=history,
    )


# -- dense Jacobi reference ----------------------------------------------------

_MAX_DENSE = 2048
_JACOBI_SWEEPS = 60


def _jacobi_cycle_numpy(c: np.ndarray):
    """Cyclic Jacobi sweeps with vectorized row/column rotations."""
    n = c.shape[0]
    v = np.eye(n)
    target = 1e-12 * np.linalg.norm(c)
    sweeps = 0
    for sweeps in range(1, _JACOBI_SWEEPS + 1):
        off = np.sqrt(max(np.sum(c * c) - np.sum(np.diag(c) ** 2), 0.0))
        if off <= target:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = c[p, q]
                if apq == 0.0:
                    continue
                tau = (c[q, q] - c[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * cs
                rp, rq = c[p, :].copy(), c[q, :].copy()
                c[p, :] = cs * rp - sn * rq
                c[q, :] = sn * rp + cs * rq
                cp_, cq_ = c[:, p].copy(), c[:, q].copy()
                c[:, p] = cs * cp_ - sn * cq_
                c[:, q] = sn * cp_ + cs * cq_
                c[p, q] = c[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = cs * vp - sn * vq
                v[:, q] = sn * vp + cs * vq
    return np.diag(c).copy(), v, sweeps


_jacobi_numba = None


def _get_jacobi_kernel():
    """Numba-compiled cyclic Jacobi; falls back to the numpy sweep."""
    global _jacobi_numba
    if _jacobi_numba is not None:
        return _jacobi_numba
    try:
        from numba import njit
    except ImportError:
        _jacobi_numba = _jacobi_cycle_numpy
        return _jacobi_numba

    @njit(cache=True)
    def kernel(c):
        n = c.shape[0]
        v = np.eye(n)
        total = 0.0
        for i in range(n):
            for j in range(n):
                total += c[i, j] * c[i, j]
        target = 1e-12 * np.sqrt(total)
        sweeps = 0
        for sweep in range(_JACOBI_SWEEPS):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += c[i, j] * c[i, j]
            if np.sqrt(off) <= target:
                break
            sweeps = sweep + 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = c[p, q]
                    if apq == 0.0:
                        continue
                    tau = (c[q, q] - c[p, p]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    cs = 1.0 / np.sqrt(1.0 + t * t)
                    sn = t * cs
                    for idx in range(n):
                        rp = c[p, idx]
                        rq = c[q, idx]
                        c[p, idx] = cs * rp - sn * rq
                        c[q, idx] = sn * rp + cs * rq
                    for idx in range(n):
                        cp_ = c[idx, p]
                        cq_ = c[idx, q]
                        c[idx, p] = cs * cp_ - sn * cq_
                        c[idx, q] = sn * cp_ + cs * cq_
                    c[p, q] = 0.0
                    c[q, p] = 0.0
                    for idx in range(n):
                        vp = v[idx, p]
                        vq = v[idx, q]
                        v[idx, p] = cs * vp - sn * vq
                        v[idx, q] = sn * vp + cs * vq
        w = np.empty(n)
        for i in range(n):
            w[i] = c[i, i]
        return w, v, sweeps

    _jacobi_numba = kernel
    return _jacobi_numba


def dense_oracle(a: SparseSymMatrix, b, k: int, force_numpy: bool = False) -> EigenResult:
    """Reference solve by cyclic Jacobi on the symmetrized dense pencil.

    Forms ``C = B^{-1/2} A B^{-1/2}`` (exact for diagonal B), rotates to
    convergence, and maps eigenvectors back as ``q = B^{-1/2} u``, which
    makes them B-orthonormal. Deterministic; guarded to n <= 2048.
    """
    n = a.n
    if n > _MAX_DENSE:
        raise InputError(f"dense reference limited to n <= {_MAX_DENSE}, got {n}")
    if not 1 <= k <= n:
        raise InputError(f"k must be in [1, {n}], got {k}")
    bvec = _bvec(b, n)
    scale = 1.0 / np.sqrt(bvec)
    c = a.to_dense() * scale[:, None] * scale[None, :]
    c = 0.5 * (c + c.T)
    kernel = _jacobi_cycle_numpy if force_numpy else _get_jacobi_kernel()
    w, v, sweeps = kernel(c)
    order = np.argsort(w, kind="stable")[:k]
    w = w[order]
    q = _fix_signs(scale[:, None] * v[:, order])
    aq = a.matmat(q)
    resid = np.linalg.norm(aq - (bvec[:, None] * q) * w, axis=0)
    return EigenResult(
        eigenvalues=w,
        eigenvectors=q,
        iterations=sweeps,
        residual_norms=resid,
        converged=np.ones(k, dtype=bool),
    )


# -- null-space-aware smallest positive eigenvalue ------------------------------


def smallest_above_null(
    m: SparseSymMatrix,
    tau: float,
    seed: int = 42,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> float:
    """Smallest eigenvalue strictly above ``tau`` for a Laplacian-like matrix.

    Deflates the constant vector and grows the block until an eigenvalue
    above the near-null cluster appears. Best-effort: if the iteration
    budget runs out the current Ritz values are used; returns 0.0 when the
    whole reachable spectrum sits at or below ``tau``.
    """
    n = m.n
    if n <= 512:
        w = np.linalg.eigvalsh(m.to_dense())
        above = w[w > tau]
        return float(above[0]) if above.size else 0.0
    const = np.full(n, 1.0 / np.sqrt(n))
    k = 8
    while True:
        cfg = SolverConfig(k=min(k, n - 1), tol=tol, max_iter=max_iter, seed=seed)
        res = lobpcg_smallest(m, np.ones(n), cfg, deflate=const)
        above = res.eigenvalues[res.eigenvalues > tau]
        if above.size:
            return float(above[0])
        if k >= min(64, n - 1):
            return 0.0
        k *= 2


def fiedler_value(m: SparseSymMatrix, seed: int = 42) -> float:
    """Smallest eigenvalue above the zero cluster of a PSD Laplacian-like matrix."""
    if m.n == 0 or m.nnz == 0:
        return 0.0
    tau = 1e-8 * m.trace() / m.n
    return smallest_above_null(m, tau, seed=seed)


def require_converged(result: EigenResult, context: str) -> EigenResult:
    """Raise ConvergenceError (carrying the result) unless all pairs converged."""
    if not result.all_converged:
        bad = int(np.sum(~result.converged))
        raise ConvergenceError(
            f"{context}: {bad} of {result.converged.size} eigenpairs "
            f"unconverged after {result.iterations} iterations",
            result=result,
            diagnostics=result.diagnostics(),
        )
    return result
