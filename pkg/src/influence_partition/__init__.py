"""Influence-based community partition under the Linear Threshold model."""
from .baselines import label_propagation, mamkcp, random_partition, samkcp
from .exact import ExactObjective, OracleBudgetError, exact_objective
from .graph import (DirectedGraph, derive_lt_weights, induced_subgraph, load_edge_list,
                    read_edge_list)
from .greedy import (CommunityPartition, PartitionMatroid, best_of_k_roundings,
                     continuous_greedy, max_weight_independent_set, randomized_round)
from .influence import (InfluenceEstimate, LiveEdgeBatch, community_influence,
                        partition_objective, sample_live_edge, single_seed_spread)
from .lovasz import lovasz_gradient, lovasz_value, sort_assignment

__all__ = [
    "CommunityPartition", "DirectedGraph", "ExactObjective", "InfluenceEstimate", "LiveEdgeBatch",
    "OracleBudgetError", "PartitionMatroid", "best_of_k_roundings", "community_influence",
    "continuous_greedy", "derive_lt_weights", "exact_objective", "induced_subgraph",
    "label_propagation", "load_edge_list", "lovasz_gradient", "lovasz_value", "mamkcp",
    "max_weight_independent_set", "partition_objective", "random_partition", "randomized_round",
    "read_edge_list", "sample_live_edge", "samkcp", "single_seed_spread", "sort_assignment",
]
__version__ = "0.1.0"
