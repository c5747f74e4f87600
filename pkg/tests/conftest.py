import numpy as np
import pytest

from manigraph import Graph
from manigraph.datasets import find_football, karate_club, load_football


def random_connected_graph(rng, n, extra=None, weighted=False) -> Graph:
    """Spanning tree plus random extra edges; connected by construction."""
    tree = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    taken = {(min(e), max(e)) for e in tree}
    if extra is None:
        extra = n // 2
    pool = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in taken]
    edges = list(taken)
    if extra and pool:
        idx = rng.choice(len(pool), size=min(extra, len(pool)), replace=False)
        edges += [pool[int(i)] for i in np.atleast_1d(idx)]
    if weighted:
        w = rng.uniform(0.5, 2.0, size=len(edges))
        return Graph.from_edges(
            [(i, j, float(x)) for (i, j), x in zip(edges, w)], n=n
        )
    return Graph.from_edges(edges, n=n)


def blob_features(rng, c, per_cluster=60, dim=4, separation=5.0):
    """Gaussian blobs at simplex corners with the given pairwise separation."""
    centers = np.eye(c, dim) * (separation / np.sqrt(2.0))
    X = np.vstack([
        centers[j] + rng.normal(0.0, 1.0, size=(per_cluster, dim)) for j in range(c)
    ])
    truth = np.repeat(np.arange(c), per_cluster)
    return X, truth


@pytest.fixture(scope="session")
def karate():
    return karate_club()


@pytest.fixture(scope="session")
def football():
    path = find_football()
    if path is None:
        pytest.skip(
            "football.gml not present; fetch it per docs/fetch-datasets.md "
            "and place it in tests/data/ or $MANIGRAPH_DATA"
        )
    return load_football(path)
