"""k-means clustering and external cluster-agreement criteria.

The clustering half is Lloyd's algorithm with k-means++ seeding, restarted
from independent deterministic RNG streams (see :mod:`manigraph.rng`); the
restart with the lowest within-cluster sum of squares wins, ties by lowest
restart index. The evaluation half computes Rand index, pairwise precision,
purity, and normalized mutual information from the contingency table, all
in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import InputError
from .parallel import ordered_map
from .rng import Xoshiro256, stream_seed

_MAX_LLOYD_ITER = 300


@dataclass(frozen=True)
class MetricsReport:
    rand_index: float
    precision: float
    purity: float
    nmi: float

    def to_dict(self) -> dict:
        return {
            "rand_index": float(self.rand_index),
            "precision": float(self.precision),
            "purity": float(self.purity),
            "nmi": float(self.nmi),
        }


def _coerce_points(x) -> np.ndarray:
    pts = np.asarray(getattr(x, "P", x), dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InputError("points must form a non-empty 2-D array")
    return pts


def normalize_rows(points) -> np.ndarray:
    """Scale each row to unit Euclidean length; zero rows stay zero.

    The standard angular readout for spectral coordinates before k-means.
    """
    pts = _coerce_points(points)
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    return np.where(norms > 0.0, pts / np.where(norms > 0.0, norms, 1.0), pts)


def _kmeanspp_init(pts: np.ndarray, c: int, rng: Xoshiro256) -> np.ndarray:
    n = pts.shape[0]
    centers = np.empty((c, pts.shape[1]))
    centers[0] = pts[rng.index(n)]
    d2 = np.sum((pts - centers[0]) ** 2, axis=1)
    for j in range(1, c):
        cum = np.cumsum(d2)
        idx = rng.weighted_index(cum)
        centers[j] = pts[idx]
        d2 = np.minimum(d2, np.sum((pts - centers[j]) ** 2, axis=1))
    return centers


def _lloyd(pts: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    n, c = pts.shape[0], centers.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(_MAX_LLOYD_ITER):
        d2 = (
            np.sum(pts * pts, axis=1)[:, None]
            - 2.0 * (pts @ centers.T)
            + np.sum(centers * centers, axis=1)[None, :]
        )
        new_labels = np.argmin(d2, axis=1)
        # repair empty clusters by stealing the worst-fit point, in cluster order
        for j in range(c):
            if not np.any(new_labels == j):
                fit = d2[np.arange(n), new_labels]
                fit = np.where(np.bincount(new_labels, minlength=c)[new_labels] > 1, fit, -np.inf)
                steal = int(np.argmax(fit))
                new_labels[steal] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(c):
            members = pts[labels == j]
            if members.size:
                centers[j] = members.mean(axis=0)
    wcss = float(np.sum((pts - centers[labels]) ** 2))
    return labels, wcss


def kmeans(
    points,
    c: int,
    restarts: int = 20,
    seed: int = 42,
    threads: int | None = None,
) -> np.ndarray:
    """Cluster rows of ``points`` (array or embedding) into ``c`` groups.

    Fully deterministic for a given (seed, restarts): restart streams are
    derived from the restart index, so results do not depend on scheduling.
    """
    pts = _coerce_points(points)
    n = pts.shape[0]
    if not 1 <= c <= n:
        raise InputError(f"cluster count must be in [1, {n}], got {c}")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    if c == 1:
        return np.zeros(n, dtype=np.int64)
    if c == n:
        return np.arange(n, dtype=np.int64)

    def run(r: int) -> tuple[np.ndarray, float]:
        rng = Xoshiro256(stream_seed(seed, r))
        centers = _kmeanspp_init(pts, c, rng)
        return _lloyd(pts, centers.copy())

    results = ordered_map(run, range(restarts), threads)
    best_labels, best_wcss = results[0]
    for labels, wcss in results[1:]:
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss
    return best_labels


# -- agreement criteria ---------------------------------------------------------


def _contingency(pred, truth) -> np.ndarray:
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise InputError("label vectors must be 1-D and of equal length")
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    m = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(m, (pi, ti), 1)
    return m


def pair_counts(pred, truth) -> tuple[int, int, int, int]:
    """(TP, FP, FN, TN) over all unordered point pairs.

    TP: same cluster in both labelings; FP: together in ``pred`` only;
    FN: together in ``truth`` only; TN: separated in both. Computed from
    the contingency table, not by pair enumeration.
    """
    m = _contingency(pred, truth)
    n = int(m.sum())

    def pairs2(v) -> int:
        v = np.asarray(v, dtype=np.int64)
        return int(np.sum(v * (v - 1) // 2))

    tp = pairs2(m.ravel())
    fp = pairs2(m.sum(axis=1)) - tp
    fn = pairs2(m.sum(axis=0)) - tp
    tn = n * (n - 1) // 2 - tp - fp - fn
    return tp, fp, fn, tn


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def evaluate(pred, truth, nmi_norm: str = "arithmetic") -> MetricsReport:
    """Agreement of a predicted labeling against ground truth.

    Rand index and precision are pair-counting criteria; purity is the
    fraction of points in their cluster's majority class; NMI uses natural
    logs with mutual information normalized by the arithmetic (default) or
    geometric mean of the two label entropies.
    """
    if nmi_norm not in ("arithmetic", "geometric"):
        raise InputError(f"unknown NMI normalization {nmi_norm!r}")
    m = _contingency(pred, truth)
    n = int(m.sum())
    tp, fp, fn, tn = pair_counts(pred, truth)
    total = tp + fp + fn + tn
    ri = (tp + tn) / total if total else 1.0
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    purity = float(m.max(axis=1).sum()) / n
    hp = _entropy(m.sum(axis=1), n)
    ht = _entropy(m.sum(axis=0), n)
    if hp == 0.0 and ht == 0.0:
        nmi = 1.0
    elif hp == 0.0 or ht == 0.0:
        nmi = 0.0
    else:
        rowp = m.sum(axis=1) / n
        colp = m.sum(axis=0) / n
        mi = 0.0
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                if m[i, j]:
                    pij = m[i, j] / n
                    mi += pij * log(pij / (rowp[i] * colp[j]))
        denom = (hp + ht) / 2.0 if nmi_norm == "arithmetic" else np.sqrt(hp * ht)
        nmi = mi / denom
    return MetricsReport(
        rand_index=float(ri),
        precision=float(precision),
        purity=float(purity),
        nmi=float(min(max(nmi, 0.0), 1.0)),
    )


# -- labels CSV -----------------------------------------------------------------


def save_labels_csv(labels, path) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node,label\n")
        for i, lab in enumerate(labels):
            fh.write(f"{i},{lab}\n")


def load_labels_csv(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "node,label":
                raise InputError(f"{path}: expected 'node,label' header")
            ids, labs = [], []
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != 2:
                    raise InputError(f"{path}: ragged row {line.strip()!r}")
                ids.append(int(parts[0]))
                labs.append(int(parts[1]))
    except OSError as e:
        raise InputError(f"cannot open {path}: {e}") from e
    except ValueError as e:
        raise InputError(f"{path}: malformed labels CSV: {e}") from e
    ids = np.asarray(ids)
    labs = np.asarray(labs, dtype=np.int64)
    order = np.argsort(ids)
    if not np.array_equal(ids[order], np.arange(len(ids))):
        raise InputError(f"{path}: node ids must be dense 0..n-1")
    return labs[order]
