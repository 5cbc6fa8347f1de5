"""Select marked leaves with pairwise disjoint neighbourhoods in plane binary trees."""
from ._jit import backend
from .generator import GenConfig, gen_tree, generate, mark_and_grow
from .selector import (Budget, Outcome, ParameterError, Selection, TraversalOutcome,
                       budgeted_traverse, compute_budget, select_leaves)
from .tree import (Component, ContractedTree, DegenerateTreeError, InvalidInstanceError,
                   IntervalPartition, Labeling, LeafOrder, MarkedTree, PlaneTree, Spine,
                   ValidationReport, analyze, build_components, classify, contract, delta_K,
                   find_spines, interval_partition, leaf_order, representative_and_delimiters,
                   validate)

__version__ = "0.1.0"

__all__ = [
    "backend", "GenConfig", "gen_tree", "generate", "mark_and_grow",
    "Budget", "Outcome", "ParameterError", "Selection", "TraversalOutcome",
    "budgeted_traverse", "compute_budget", "select_leaves",
    "Component", "ContractedTree", "DegenerateTreeError", "InvalidInstanceError",
    "IntervalPartition", "Labeling", "LeafOrder", "MarkedTree", "PlaneTree", "Spine",
    "ValidationReport", "analyze", "build_components", "classify", "contract", "delta_K",
    "find_spines", "interval_partition", "leaf_order", "representative_and_delimiters",
    "validate",
]
