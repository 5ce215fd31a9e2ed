"""Constraint-preserving QAOA for graph multi-coloring channel allocation."""
from .model import (DEFAULT_LAMBDA, ProblemInstance, SampleHistogram, channel_feasible,
                    channel_loads, conflict_count, load_instance, metrics, node_deviation,
                    penalty_cost, search_space_stats)
from .combinatorics import (dicke, enumerate_dual_basis, enumerate_johnson, greedy_dual_fill,
                            product_basis)

__version__ = "0.1.0"
