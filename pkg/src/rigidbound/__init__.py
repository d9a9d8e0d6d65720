"""Upper bounds on planar embedding counts of Laman graphs via Cayley-Menger systems."""

from rigidbound.graph import (
    Graph,
    GraphClass,
    HennebergSequence,
    HennebergStep,
    classify,
    generate_laman,
    henneberg_decompose,
    is_laman_bruteforce,
    is_laman_pebble,
    replay,
)
from rigidbound.bounds import AnalysisOptions, BoundReport, analyze, table

__all__ = [
    "AnalysisOptions",
    "BoundReport",
    "analyze",
    "table",
    "Graph",
    "GraphClass",
    "HennebergSequence",
    "HennebergStep",
    "classify",
    "generate_laman",
    "henneberg_decompose",
    "is_laman_bruteforce",
    "is_laman_pebble",
    "replay",
]
