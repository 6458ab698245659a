"""Spanning-tree discrepancy, balanced separators and the structures linking them."""

from .errors import (
    BudgetError,
    DiscLabError,
    DomainError,
    PreconditionError,
    SizeLimitError,
    TheoryViolationError,
)
from .graph import EdgeColouring, Graph, colour_components, colour_ranks, vertex_connectivity
from .discrepancy import (
    DiscrepancyReport,
    exact_tree_discrepancy,
    subgraph_family_discrepancy,
    tree_discrepancy_of_colouring,
)
from .separation import BalancedSeparation, exact_separation_number, is_balanced_separation
from .dual import build_dual, extract_separator

__version__ = "0.1.0"

__all__ = [
    "BalancedSeparation",
    "BudgetError",
    "DiscLabError",
    "DiscrepancyReport",
    "DomainError",
    "EdgeColouring",
    "Graph",
    "PreconditionError",
    "SizeLimitError",
    "TheoryViolationError",
    "build_dual",
    "colour_components",
    "colour_ranks",
    "exact_separation_number",
    "exact_tree_discrepancy",
    "extract_separator",
    "is_balanced_separation",
    "subgraph_family_discrepancy",
    "tree_discrepancy_of_colouring",
    "vertex_connectivity",
]
