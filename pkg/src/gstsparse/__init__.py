"""Graph sparsification that preserves scaled degrees, triangles and wedges."""

from .baselines import keep_count_from_ratio, local_degree, local_jaccard, random_edge
from .expectations import ScaledExpectations, compute_all
from .graph import ProbGraph, common_neighbors, from_edges, load_graph, parse_edgelist
from .solver import ConvergenceTrace, GstConfig, GstResult, SubgraphState, run

__all__ = [
    "ConvergenceTrace", "GstConfig", "GstResult", "ProbGraph", "ScaledExpectations", "SubgraphState",
    "common_neighbors", "compute_all", "from_edges", "keep_count_from_ratio", "load_graph",
    "local_degree", "local_jaccard", "parse_edgelist", "random_edge", "run",
]
__version__ = "0.1.0"
