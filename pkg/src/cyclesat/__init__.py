"""cyclesat: cycle-saturated spanning subgraphs of binomial random graphs.

Library + CLI for constructing, validating, and measuring C_m-saturated
spanning subgraphs of G(n,p), plus an exact minimum-saturation oracle for
small hosts.
"""

from .graphs import (
    BipartiteGraph,
    GnpHost,
    Graph,
    GraphFormatError,
    diameter,
    load_bipartite,
    load_graph,
    sample_bipartite,
    sample_gnp,
    store_bipartite,
    store_graph,
)
from .matching import (
    ForbiddenSet,
    Matching,
    block_matching_construct,
    constrained_matching,
    perfect_matching_bipartite,
    perfect_matching_general,
)
from .rng import RngSeed
from .saturation import (
    ExactResult,
    SaturationReport,
    contains_cycle_edge,
    greedy_saturate,
    is_cm_free,
    is_saturated,
    min_sat_exact,
)

__all__ = [
    "BipartiteGraph",
    "ExactResult",
    "ForbiddenSet",
    "GnpHost",
    "Graph",
    "GraphFormatError",
    "Matching",
    "RngSeed",
    "SaturationReport",
    "block_matching_construct",
    "constrained_matching",
    "contains_cycle_edge",
    "diameter",
    "greedy_saturate",
    "is_cm_free",
    "is_saturated",
    "load_bipartite",
    "load_graph",
    "min_sat_exact",
    "perfect_matching_bipartite",
    "perfect_matching_general",
    "sample_bipartite",
    "sample_gnp",
    "store_bipartite",
    "store_graph",
]

__version__ = "0.1.0"
