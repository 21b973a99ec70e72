"""Trajectory grouping structure: proximity Reeb graphs, maximal groups, robustness."""

from .model import Dataset, EntitySet, Interval, Params, position_at, validate
from .events import PairEvent, EventKind, all_events, initial_adjacency, pair_events
from .connectivity import SpanningForest
from .reeb import ReebGraph, ReebVertex, ReebEdge, VertexKind, audit, build_reeb, reduce_reeb
from .groups import GroupingTree, MaximalGroup, compute_maximal_groups, merge_trees, split_tree
from .robust import Encounter, find_initial_encounters, robustify
from .generators import gen_flock, gen_groups_cubic, gen_reeb_quadratic
from . import cli, oracle

__all__ = [
    "Dataset", "EntitySet", "Interval", "Params", "position_at", "validate",
    "PairEvent", "EventKind", "all_events", "initial_adjacency", "pair_events",
    "SpanningForest",
    "ReebGraph", "ReebVertex", "ReebEdge", "VertexKind", "audit", "build_reeb", "reduce_reeb",
    "GroupingTree", "MaximalGroup", "compute_maximal_groups", "merge_trees", "split_tree",
    "Encounter", "find_initial_encounters", "robustify",
    "gen_flock", "gen_groups_cubic", "gen_reeb_quadratic",
    "cli", "oracle",
]

__version__ = "0.1.0"
