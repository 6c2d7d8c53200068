"""Friendship- and attribute-paradox statistics on attributed social graphs."""

__version__ = "0.1.0"

from paradoxlab.errors import (
    DegenerateComponentError,
    IngestError,
    ParadoxError,
    ResamplingError,
)
from paradoxlab.graph import AttributedGraph, build_undirected, filter_min_degree, neighbor_stats

__all__ = [
    "AttributedGraph",
    "DegenerateComponentError",
    "IngestError",
    "ParadoxError",
    "ResamplingError",
    "build_undirected",
    "filter_min_degree",
    "neighbor_stats",
]
