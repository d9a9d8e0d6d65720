"""Square systems of 4-point Cayley-Menger minors."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from rigidbound.cayley import CayleyMengerMatrix, fraction_rank, minor_poly
from rigidbound.mixedvol import NewtonPolytope, mv_inclusion_exclusion, newton_polytope
from rigidbound.polynomial import Polynomial, Variable

DEFAULT_BUDGET = 100_000
JACOBIAN_RETRIES = 3


@dataclass(frozen=True)
class MinorCandidate:
    indices: tuple[int, int, int, int]
    unknowns: frozenset[Variable]
    parameters: frozenset[Variable]
    poly: Polynomial

    @property
    def label(self) -> str:
        return "D(" + ", ".join(map(str, self.indices)) + ")"


class SizeClass(str, enum.Enum):
    N_MINUS_3 = "NMinus3"
    N_MINUS_2 = "NMinus2"

    def size(self, n: int) -> int:
        return n - 3 if self is SizeClass.N_MINUS_3 else n - 2


@dataclass(frozen=True)
class MinorSystem:
    n: int
    equations: tuple[MinorCandidate, ...]
    system_unknowns: tuple[Variable, ...]

    def __post_init__(self):
        if len(self.equations) != len(self.system_unknowns):
            raise ValueError("minor system is not square")

    @classmethod
    def from_equations(cls, n: int, equations: Sequence[MinorCandidate]) -> "MinorSystem":
        unknowns = tuple(sorted(set().union(*(e.unknowns for e in equations))))
        return cls(n, tuple(equations), unknowns)

    @property
    def size_class(self) -> SizeClass | None:
        k = len(self.equations)
        if k == self.n - 3:
            return SizeClass.N_MINUS_3
        if k == self.n - 2:
            return SizeClass.N_MINUS_2
        return None

    @property
    def polynomials(self) -> list[Polynomial]:
        return [e.poly for e in self.equations]

    def polytopes(self) -> list[NewtonPolytope]:
        return [newton_polytope(e.poly, self.system_unknowns) for e in self.equations]

    def key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e.indices for e in self.equations)

    def describe(self) -> str:
        eqs = ", ".join(e.label for e in self.equations)
        return f"{{{eqs}}} in ({', '.join(map(str, self.system_unknowns))})"

    def to_json(self) -> dict:
        return {
            "equations": [list(e.indices) for e in self.equations],
            "unknowns": [str(v) for v in self.system_unknowns],
            "size_class": self.size_class.value if self.size_class else None,
        }


def _candidate(cm: CayleyMengerMatrix, idx: tuple[int, ...]) -> MinorCandidate:
    p = minor_poly(cm, idx)
    pair_vars = {cm.variable(a, b) for a, b in itertools.combinations(idx, 2)}
    unknowns = frozenset(v for v in pair_vars if v.is_unknown)
    params = frozenset(pair_vars - unknowns)
    if p.unknowns != unknowns:  # pragma: no cover - every pair variable occurs in a 4-point minor
        raise AssertionError(f"minor {idx} lost a variable")
    return MinorCandidate(tuple(idx), unknowns, params, p)


def enumerate_minors(cm: CayleyMengerMatrix) -> list[MinorCandidate]:
    """All C(n,4) four-point minors, in lexicographic index order."""
    if cm.n < 4:
        raise ValueError("need at least 4 points")
    return [_candidate(cm, idx) for idx in itertools.combinations(range(1, cm.n + 1), 4)]


def make_system(cm: CayleyMengerMatrix, index_sets: Iterable[Sequence[int]]) -> MinorSystem:
    """System from explicit quadruples, e.g. ``[(1,4,5,6), (1,3,5,6), (1,2,3,5)]``."""
    return MinorSystem.from_equations(cm.n, [_candidate(cm, tuple(sorted(q))) for q in index_sets])


# ---------------------------------------------------------------------------
# genericity test


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 10007), 1009)


def realizable_point(n: int, seed: int, attempt: int) -> dict[tuple[int, int], Fraction]:
    """Exact squared distances of random rational points in the plane.

    Every Cayley-Menger minor vanishes here, so it is a root of every system.
    """
    rng = random.Random(f"{seed}:{attempt}:{n}")
    pts = [(random_rational(rng), random_rational(rng)) for _ in range(n)]
    return {
        (i + 1, j + 1): (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
        for i, j in itertools.combinations(range(n), 2)
    }


@lru_cache(maxsize=65536)
def _gradient(poly: Polynomial, n: int, seed: int, attempt: int) -> dict[Variable, Fraction]:
    dist = realizable_point(n, seed, attempt)
    point = {v: dist[v.pair] for v in poly.variables}
    return {v: poly.diff(v).evaluate(point) for v in poly.unknowns}


def jacobian_at(sys: MinorSystem, seed: int, attempt: int) -> list[list[Fraction]]:
    """Exact Jacobian (equations x system unknowns) at a seeded realizable configuration."""
    rows = []
    for eq in sys.equations:
        g = _gradient(eq.poly, sys.n, seed, attempt)
        rows.append([g.get(v, Fraction(0)) for v in sys.system_unknowns])
    return rows


def is_well_constrained(sys: MinorSystem, seed: int = 0) -> bool:
    """Square, with a nonsingular Jacobian at a generic realizable configuration.

    The Jacobian is evaluated at the squared distances of random planar
    points (up to 3 draws).  Such a point solves every minor, so full rank
    there means the realizable completions are isolated roots.  A random
    point off the solution set would not detect flexible sub-frameworks,
    whose minors vanish along a curve.
    """
    if len(sys.equations) != len(sys.system_unknowns):
        return False
    m = len(sys.equations)
    return any(fraction_rank(jacobian_at(sys, seed, t)) == m for t in range(JACOBIAN_RETRIES))


def leftover_unknowns(sys: MinorSystem, cm: CayleyMengerMatrix) -> set[Variable]:
    return set(cm.unknowns) - set(sys.system_unknowns)


# ---------------------------------------------------------------------------
# search


def find_systems(
    cm: CayleyMengerMatrix,
    size_class: SizeClass = SizeClass.N_MINUS_3,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    rank: bool = False,
) -> list[MinorSystem]:
    """Well-constrained square minor systems of the requested size.

    Subsets are scanned in lexicographic order; branches whose unknown union
    already exceeds the target size are cut, and ``budget`` bounds the number
    of complete subsets examined.  With ``rank=True`` the result is sorted by
    (mixed volume, Bezout number, equation indices).
    """
    if cm.n < 4:
        raise ValueError("need at least 4 points")
    size = size_class.size(cm.n)
    if size < 1:
        return []
    cands = enumerate_minors(cm)
    universe = {v: k for k, v in enumerate(cm.unknowns)}
    masks = [sum(1 << universe[v] for v in c.unknowns) for c in cands]
    found: list[MinorSystem] = []
    scanned = 0

    def rec(start: int, chosen: list[int], mask: int) -> bool:
        nonlocal scanned
        if len(chosen) == size:
            scanned += 1
            if mask.bit_count() == size:
                sys = MinorSystem.from_equations(cm.n, [cands[k] for k in chosen])
                if is_well_constrained(sys, seed):
                    found.append(sys)
            return scanned < budget
        for k in range(start, len(cands)):
            if not masks[k]:
                continue
            new = mask | masks[k]
            if new.bit_count() > size:
                continue
            chosen.append(k)
            go = rec(k + 1, chosen, new)
            chosen.pop()
            if not go:
                return False
        return True

    rec(0, [], 0)
    if rank:
        found.sort(key=ranking_key)
    return found


def system_mv(sys: MinorSystem) -> int:
    return _cached_mv(canonical_family(sys.polytopes()))


def ranking_key(sys: MinorSystem) -> tuple:
    from rigidbound.mixedvol import bezout_bound

    return (system_mv(sys), bezout_bound(sys), sys.key())


def canonical_family(polys: Sequence[NewtonPolytope]) -> tuple:
    """Key invariant under reordering polytopes and permuting coordinates."""
    m = len(polys)
    best = None
    for perm in itertools.permutations(range(m)):
        key = tuple(sorted(tuple(sorted(tuple(p[k] for k in perm) for p in poly.points)) for poly in polys))
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def _cached_mv(family: tuple) -> int:
    m = len(family)
    return mv_inclusion_exclusion([NewtonPolytope(m, pts) for pts in family]).value
