"""Benchmark dataset access.

Nothing is vendored in the repository. Zachary's karate club is rebuilt at
runtime from networkx; the college-football network must be fetched once by
the user (see ``docs/fetch-datasets.md``) and is then found via an explicit
path, the ``MANIGRAPH_DATA`` directory, or ``tests/data/``.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import Graph

FOOTBALL_FILENAME = "football.gml"
FOOTBALL_NODES = 115
FOOTBALL_EDGES = 613
FOOTBALL_CLASSES = 12


def karate_club(weighted: bool = False) -> tuple[Graph, np.ndarray]:
    """Zachary's karate club (34 nodes, 78 edges) with the two-club labels."""
    import networkx as nx

    g = nx.karate_club_graph()
    edges = []
    for u, v, data in g.edges(data=True):
        w = float(data.get("weight", 1.0)) if weighted else 1.0
        edges.append((int(u), int(v), w))
    labels = np.array(
        [0 if g.nodes[i]["club"] == "Mr. Hi" else 1 for i in sorted(g.nodes)],
        dtype=np.int64,
    )
    return Graph.from_edges(edges, n=g.number_of_nodes()), labels


def football_search_paths() -> list[Path]:
    paths = []
    env = os.environ.get("MANIGRAPH_DATA")
    if env:
        paths.append(Path(env) / FOOTBALL_FILENAME)
    here = Path(__file__).resolve()
    for parent in [Path.cwd(), *here.parents]:
        candidate = parent / "tests" / "data" / FOOTBALL_FILENAME
        if candidate not in paths:
            paths.append(candidate)
    return paths


def find_football() -> Path | None:
    for p in football_search_paths():
        if p.is_file():
            return p
    return None


def load_football(path) -> tuple[Graph, np.ndarray]:
    """American college football network (GML) with conference labels.

    The file carries 115 teams, 613 games, and a ``value`` attribute in
    [0, 12) naming each team's conference.
    """
    import networkx as nx

    try:
        g = nx.read_gml(str(path), label="id")
    except Exception as e:  # nx raises several parser error types
        raise InputError(f"cannot parse GML file {path}: {e}") from e
    nodes = sorted(g.nodes)
    index = {node: i for i, node in enumerate(nodes)}
    edges = [(index[u], index[v]) for u, v in g.edges()]
    labels = np.array([int(g.nodes[node]["value"]) for node in nodes], dtype=np.int64)
    graph = Graph.from_edges(edges, n=len(nodes))
    if graph.n != FOOTBALL_NODES or graph.num_edges != FOOTBALL_EDGES:
        raise InputError(
            f"{path}: expected {FOOTBALL_NODES} nodes / {FOOTBALL_EDGES} edges, "
            f"got {graph.n} / {graph.num_edges}"
        )
    return graph, labels
