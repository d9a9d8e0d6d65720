"""Reference graphs and minor systems with known mixed volumes."""

from __future__ import annotations

from dataclasses import dataclass

from rigidbound.graph import Graph


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: Graph
    system: tuple[tuple[int, int, int, int], ...]
    unknowns: tuple[str, ...]
    mv: int
    bound: int


DESARGUES = Fixture(
    "desargues",
    Graph.from_string("12 13 14 23 25 36 45 46 56"),
    ((1, 4, 5, 6), (1, 3, 5, 6), (1, 2, 3, 5)),
    ("x_1_5", "x_1_6", "x_3_5"),
    mv=12,
    bound=24,
)

K33 = Fixture(
    "k33",
    Graph.from_string("14 15 16 24 25 26 34 35 36"),
    ((1, 2, 3, 6), (1, 2, 3, 5), (1, 2, 3, 4)),
    ("x_1_2", "x_1_3", "x_2_3"),
    mv=11,
    bound=22,
)

N7_WORST = Fixture(
    "n7_worst",
    Graph.from_string("12 13 14 17 23 25 36 46 47 56 57"),
    ((1, 4, 5, 7), (1, 3, 5, 6), (1, 4, 5, 6), (1, 2, 3, 5)),
    ("x_1_5", "x_1_6", "x_3_5", "x_4_5"),
    mv=28,
    bound=56,
)

FIXTURES = (DESARGUES, K33, N7_WORST)

# maximum bound over all Laman graphs on n vertices, n = 3..7
TABLE = {3: 2, 4: 4, 5: 8, 6: 24, 7: 56}
