"""Graphs, Laman tests, Henneberg constructions and the small-n Laman census."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..n``."""

    n: int
    edges: frozenset[Edge]

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        normed = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge {u}-{v} has an endpoint outside 1..{n}")
            key = _norm(u, v)
            if key in normed:
                raise ValueError(f"duplicate edge {key}")
            normed.add(key)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", frozenset(normed))

    @classmethod
    def from_string(cls, spec: str) -> "Graph":
        """Build from compact pair notation, e.g. ``"12 13 23"`` (single-digit ids)."""
        pairs = [(int(tok[0]), int(tok[1])) for tok in spec.split()]
        n = max(max(p) for p in pairs)
        return cls(n, pairs)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def neighbors(self, v: int) -> list[int]:
        return sorted(w for e in self.edges for w in e if v in e and w != v)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u - 1, v - 1] = a[v - 1, u - 1] = True
        return a

    def non_edges(self) -> list[Edge]:
        return [p for p in itertools.combinations(self.vertices, 2) if p not in self.edges]

    def relabel(self, mapping: dict[int, int]) -> "Graph":
        """Apply a bijection old id -> new id."""
        return Graph(self.n, [(mapping[u], mapping[v]) for u, v in self.edges])

    def induced_edge_count(self, subset: Iterable[int]) -> int:
        s = set(subset)
        return sum(1 for u, v in self.edges if u in s and v in s)

    def __str__(self) -> str:
        return f"Graph(n={self.n}, edges={' '.join(f'{u}{v}' if self.n < 10 else f'{u}-{v}' for u, v in self.sorted_edges())})"


# ---------------------------------------------------------------------------
# edge-list text format


def parse_edgelist(text: str) -> Graph:
    """Parse ``n <count>`` followed by ``u v`` lines; ``#`` starts a comment."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if n is None:
            if len(toks) != 2 or toks[0] != "n":
                raise ValueError(f"line {lineno}: expected 'n <count>' header")
            n = int(toks[1])
            continue
        if len(toks) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        edges.append((int(toks[0]), int(toks[1])))
    if n is None:
        raise ValueError("missing 'n <count>' header")
    return Graph(n, edges)


def format_edgelist(g: Graph, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(f"n {g.n}")
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def read_edgelist(path: str | Path) -> Graph:
    return parse_edgelist(Path(path).read_text())


# ---------------------------------------------------------------------------
# Laman tests


class _PebbleGame:
    """(2,3)-pebble game; every vertex starts with two pebbles."""

    def __init__(self, n: int):
        self.free = [2] * (n + 1)
        self.out: list[list[int]] = [[] for _ in range(n + 1)]

    def _find_pebble(self, root: int, blocked: set[int]) -> bool:
        # DFS along out-edges for a free pebble, then reverse the path to root.
        parent = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in self.out[x]:
                if y in parent or y in blocked:
                    continue
                parent[y] = x
                if self.free[y] > 0:
                    self.free[y] -= 1
                    self.free[root] += 1
                    while parent[y] is not None:
                        p = parent[y]
                        self.out[p].remove(y)
                        self.out[y].append(p)
                        y = p
                    return True
                stack.append(y)
        return False

    def insert(self, u: int, v: int) -> bool:
        while self.free[u] < 2:
            if not self._find_pebble(u, {v}):
                return False
        while self.free[v] < 2:
            if not self._find_pebble(v, {u}):
                return False
        self.free[u] -= 1
        self.out[u].append(v)
        return True


def is_laman_pebble(g: Graph) -> bool:
    """Laman test by the (2,3)-pebble game."""
    if g.n < 3:
        raise ValueError("Laman test needs n >= 3")
    if len(g.edges) != 2 * g.n - 3:
        return False
    game = _PebbleGame(g.n)
    return all(game.insert(u, v) for u, v in g.sorted_edges())


def is_laman_bruteforce(g: Graph) -> bool:
    """Laman test by scanning every vertex subset; only for n <= 9."""
    if g.n > 9:
        raise ValueError("brute-force Laman test is limited to n <= 9")
    if g.n < 3:
        raise ValueError("Laman test needs n >= 3")
    if len(g.edges) != 2 * g.n - 3:
        return False
    for k in range(3, g.n):
        for subset in itertools.combinations(g.vertices, k):
            if g.induced_edge_count(subset) > 2 * k - 3:
                return False
    return True


# ---------------------------------------------------------------------------
# Henneberg constructions


class StepKind(str, enum.Enum):
    H1 = "H1"
    H2 = "H2"


class GraphClass(str, enum.Enum):
    H1 = "H1"
    H2 = "H2"


@dataclass(frozen=True)
class HennebergStep:
    kind: StepKind
    new_vertex: int
    attach: tuple[int, ...]
    removed_edge: Edge | None = None

    def __post_init__(self):
        if self.kind == StepKind.H1:
            if len(self.attach) != 2 or self.removed_edge is not None:
                raise ValueError("H1 step attaches to exactly 2 vertices and removes nothing")
        else:
            if len(self.attach) != 3 or self.removed_edge is None:
                raise ValueError("H2 step attaches to 3 vertices and removes one edge")
            if not set(self.removed_edge) <= set(self.attach):
                raise ValueError("H2 removed edge must join two attach vertices")
        if len(set(self.attach)) != len(self.attach):
            raise ValueError("attach vertices must be distinct")


@dataclass(frozen=True)
class HennebergSequence:
    """Steps applied to the triangle on {1, 2, 3}.

    ``order`` optionally records which vertex of the decomposed graph each
    replayed vertex stands for (``order[k-1]`` is the original id of vertex k).
    """

    steps: tuple[HennebergStep, ...] = ()
    order: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def all_h1(self) -> bool:
        return all(s.kind == StepKind.H1 for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def replay(seq: HennebergSequence) -> Graph:
    """Build the graph described by a Henneberg sequence."""
    edges = {(1, 2), (1, 3), (2, 3)}
    n = 3
    for step in seq.steps:
        if step.new_vertex != n + 1:
            raise ValueError(f"step adds vertex {step.new_vertex}, expected {n + 1}")
        if any(not 1 <= a <= n for a in step.attach):
            raise ValueError(f"attach vertices {step.attach} not all present")
        if step.kind == StepKind.H2:
            e = _norm(*step.removed_edge)
            if e not in edges:
                raise ValueError(f"H2 step removes absent edge {e}")
            edges.discard(e)
        n += 1
        edges.update(_norm(a, n) for a in step.attach)
    return Graph(n, edges)


def _reverse_moves(n_alive: frozenset[int], edges: frozenset[Edge], allow_h2: bool):
    """Yield (kind, vertex, neighbors, reinserted_edge, reduced_edges) in preference order."""
    nbrs: dict[int, list[int]] = {v: [] for v in n_alive}
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    for v in sorted(n_alive):
        if len(nbrs[v]) == 2:
            reduced = frozenset(e for e in edges if v not in e)
            yield StepKind.H1, v, tuple(sorted(nbrs[v])), None, reduced
    if not allow_h2:
        return
    for v in sorted(n_alive):
        if len(nbrs[v]) != 3:
            continue
        a, b, c = sorted(nbrs[v])
        base = frozenset(e for e in edges if v not in e)
        for pair in ((a, b), (a, c), (b, c)):
            if pair in base:
                continue
            reduced = base | {pair}
            if _laman_subgraph(n_alive - {v}, reduced):
                yield StepKind.H2, v, (a, b, c), pair, reduced


def _laman_subgraph(verts: frozenset[int], edges: frozenset[Edge]) -> bool:
    index = {v: i + 1 for i, v in enumerate(sorted(verts))}
    return is_laman_pebble(Graph(len(verts), [(index[u], index[v]) for u, v in edges]))


def _search(g: Graph, allow_h2: bool):
    """Reverse Henneberg search with backtracking; returns removal records or None."""
    dead: set[frozenset[Edge]] = set()

    def rec(alive: frozenset[int], edges: frozenset[Edge]):
        if len(alive) == 3:
            return []
        if edges in dead:
            return None
        for kind, v, nb, pair, reduced in _reverse_moves(alive, edges, allow_h2):
            tail = rec(alive - {v}, reduced)
            if tail is not None:
                return [(kind, v, nb, pair)] + tail
        dead.add(edges)
        return None

    return rec(frozenset(g.vertices), g.edges)


def _records_to_sequence(g: Graph, records) -> HennebergSequence:
    removed = [r[1] for r in records]
    base = sorted(set(g.vertices) - set(removed))
    order = tuple(base + removed[::-1])
    label = {v: i + 1 for i, v in enumerate(order)}
    steps = []
    for kind, v, nb, pair in reversed(records):
        attach = tuple(sorted(label[a] for a in nb))
        rem = _norm(label[pair[0]], label[pair[1]]) if pair is not None else None
        steps.append(HennebergStep(kind, label[v], attach, rem))
    return HennebergSequence(tuple(steps), order)


def henneberg_decompose(g: Graph) -> HennebergSequence:
    """Find a Henneberg construction of a Laman graph.

    Reverse-H1 moves are tried before reverse-H2, lowest vertex first.  The
    returned sequence carries ``order`` so that relabelling ``replay(seq)`` by
    ``k -> order[k-1]`` reproduces ``g`` exactly.
    """
    if not is_laman_pebble(g):
        raise ValueError("graph is not Laman")
    records = _search(g, allow_h2=True)
    if records is None:  # pragma: no cover - impossible for Laman input
        raise RuntimeError("no Henneberg construction found for a Laman graph")
    return _records_to_sequence(g, records)


def h1_witness(g: Graph) -> HennebergSequence | None:
    """An all-H1 construction of ``g`` if one exists (exhaustive backtracking)."""
    if not is_laman_pebble(g):
        raise ValueError("graph is not Laman")
    records = _search(g, allow_h2=False)
    return None if records is None else _records_to_sequence(g, records)


def classify(g: Graph) -> GraphClass:
    return GraphClass.H1 if h1_witness(g) is not None else GraphClass.H2


# ---------------------------------------------------------------------------
# canonical forms and census


@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


@lru_cache(maxsize=None)
def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, k=1)
    weights = np.left_shift(np.int64(1), np.arange(len(iu) - 1, -1, -1, dtype=np.int64))
    return iu, ju, weights


def canonical_code(g: Graph) -> int:
    """Minimum upper-triangular adjacency bitstring over all vertex permutations.

    Pairs are read row by row, the first pair being the most significant bit,
    so integer order equals lexicographic bitstring order.
    """
    return _canonical(g)[0]


def _canonical(g: Graph) -> tuple[int, np.ndarray]:
    a = g.adjacency()
    perms = _perm_table(g.n)
    iu, ju, weights = _pair_index(g.n)
    bits = a[perms[:, iu], perms[:, ju]]
    codes = bits.astype(np.int64) @ weights
    k = int(np.argmin(codes))
    return int(codes[k]), perms[k]


def canonical_form(g: Graph) -> Graph:
    """The relabelling of ``g`` that attains its canonical code."""
    _, perm = _canonical(g)
    # new vertex a+1 plays the role of old vertex perm[a]+1
    mapping = {int(perm[a]) + 1: a + 1 for a in range(g.n)}
    return g.relabel(mapping)


def graph_from_code(n: int, code: int) -> Graph:
    iu, ju, _ = _pair_index(n)
    m = len(iu)
    edges = [(int(iu[k]) + 1, int(ju[k]) + 1) for k in range(m) if (code >> (m - 1 - k)) & 1]
    return Graph(n, edges)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and len(g.edges) == len(h.edges) and canonical_code(g) == canonical_code(h)


def expansions(g: Graph) -> Iterator[tuple[StepKind, Graph]]:
    """All single H1 / H2 extensions of ``g`` by a new vertex ``n+1``."""
    new = g.n + 1
    for a, b in itertools.combinations(g.vertices, 2):
        yield StepKind.H1, Graph(new, list(g.edges) + [(a, new), (b, new)])
    for u, v in g.sorted_edges():
        rest = g.edges - {(u, v)}
        for w in g.vertices:
            if w in (u, v):
                continue
            yield StepKind.H2, Graph(new, list(rest) + [(u, new), (v, new), (w, new)])


@lru_cache(maxsize=None)
def _census_codes(n: int) -> tuple[int, ...]:
    if n == 3:
        return (canonical_code(Graph(3, [(1, 2), (1, 3), (2, 3)])),)
    seen: set[frozenset[Edge]] = set()
    codes: set[int] = set()
    for code in _census_codes(n - 1):
        parent = graph_from_code(n - 1, code)
        for _, child in expansions(parent):
            if child.edges in seen:
                continue
            seen.add(child.edges)
            codes.add(canonical_code(child))
    return tuple(sorted(codes))


def generate_laman(n: int) -> list[Graph]:
    """All Laman graphs on ``n`` vertices up to isomorphism, in canonical form.

    Ordered by canonical code, so the output is deterministic.
    """
    if not 3 <= n <= 8:
        raise ValueError("census is available for 3 <= n <= 8")
    return [graph_from_code(n, c) for c in _census_codes(n)]
