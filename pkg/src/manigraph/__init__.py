"""Spectral embedding of manifold-like graphs.

The pipeline qualifies an input graph by betweenness-centrality variance,
builds a positive semi-definite operator that attracts one-hop neighbors
and repels disconnected two-hop neighbors, balances generalized node
degrees with a positive diagonal, solves the resulting generalized
eigenproblem with a block iteration, and evaluates downstream k-means
clusterings against ground truth.
"""

__version__ = "0.1.0"

from .centrality import CentralityReport, betweenness, centrality_variance
from .clustering import (
    MetricsReport,
    evaluate,
    kmeans,
    load_labels_csv,
    normalize_rows,
    pair_counts,
    save_labels_csv,
)
from .eigensolver import (
    EigenResult,
    SolverConfig,
    dense_oracle,
    fiedler_value,
    lobpcg_smallest,
)
from .embedding import (
    Embedding,
    embed,
    laplacian_eigenmaps,
    load_embedding_csv,
    save_embedding_csv,
)
from .errors import (
    ConvergenceError,
    DisconnectedGraphError,
    InputError,
    ManigraphError,
    ParseError,
)
from .graph import (
    Graph,
    dirichlet_energy,
    generate,
    knn_graph,
    laplacian,
    load_edge_list,
    load_features_csv,
    save_edge_list,
)
from .operators import (
    DiagonalScaling,
    OperatorPair,
    TwoHopSets,
    assemble_operator,
    build_operator_pair,
    degree_balancing,
    identity_shift,
    repulsion_weight,
    two_hop_laplacian,
    two_hop_sets,
)
from .sparse import SparseSymMatrix

__all__ = [
    "CentralityReport",
    "ConvergenceError",
    "DiagonalScaling",
    "DisconnectedGraphError",
    "EigenResult",
    "Embedding",
    "Graph",
    "InputError",
    "ManigraphError",
    "MetricsReport",
    "OperatorPair",
    "ParseError",
    "SolverConfig",
    "SparseSymMatrix",
    "TwoHopSets",
    "assemble_operator",
    "betweenness",
    "build_operator_pair",
    "centrality_variance",
    "degree_balancing",
    "dense_oracle",
    "dirichlet_energy",
    "embed",
    "evaluate",
    "fiedler_value",
    "generate",
    "identity_shift",
    "kmeans",
    "knn_graph",
    "laplacian",
    "laplacian_eigenmaps",
    "lobpcg_smallest",
    "load_edge_list",
    "load_embedding_csv",
    "load_features_csv",
    "load_labels_csv",
    "normalize_rows",
    "pair_counts",
    "repulsion_weight",
    "save_edge_list",
    "save_embedding_csv",
    "save_labels_csv",
    "two_hop_laplacian",
    "two_hop_sets",
]
