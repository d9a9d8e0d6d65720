"""Newton polytopes and exact mixed volumes.

Two independent routes are provided:

* :func:`mv_inclusion_exclusion` sums signed volumes of Minkowski sums, each
  volume obtained from an exact placing triangulation in integer arithmetic.
* :func:`mv_mixed_cells` lifts the supports randomly and sums the volumes of
  the fine mixed cells of the induced subdivision.

Both use the normalisation MV(P, ..., P) = m! vol(P).
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from rigidbound.polynomial import Polynomial, Variable

Point = tuple[int, ...]


@dataclass(frozen=True)
class NewtonPolytope:
    dim: int
    points: frozenset[Point]

    def __init__(self, dim: int, points: Iterable[Sequence[int]]):
        pts = frozenset(tuple(int(c) for c in p) for p in points)
        for p in pts:
            if len(p) != dim:
                raise ValueError(f"point {p} does not have {dim} coordinates")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "points", pts)

    def sorted_points(self) -> list[Point]:
        return sorted(self.points)

    def translate(self, shift: Sequence[int]) -> "NewtonPolytope":
        return NewtonPolytope(self.dim, [tuple(a + b for a, b in zip(p, shift)) for p in self.points])

    def minkowski(self, other: "NewtonPolytope") -> "NewtonPolytope":
        return NewtonPolytope(self.dim, minkowski_sum(self.points, other.points))

    def volume(self) -> Fraction:
        return Fraction(normalized_volume(self.points, self.dim), math.factorial(self.dim))

    def to_json(self) -> dict:
        return {"dim": self.dim, "points": [list(p) for p in self.sorted_points()]}

    @classmethod
    def from_json(cls, data: dict) -> "NewtonPolytope":
        return cls(data["dim"], data["points"])


def newton_polytope(p: Polynomial, unknown_order: Sequence[Variable]) -> NewtonPolytope:
    """Support of ``p`` projected onto ``unknown_order``; parameters are dropped."""
    stray = set(p.unknowns) - set(unknown_order)
    if stray:
        raise ValueError(f"unknowns {sorted(stray)} missing from the order list")
    return NewtonPolytope(len(unknown_order), p.support(list(unknown_order)))


# ---------------------------------------------------------------------------
# exact integer geometry


def _int_det(rows: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _affine_basis(points: list[Point], dim: int) -> list[int]:
    """Indices of a maximal affinely independent subset (greedy, exact)."""
    if not points:
        return []
    chosen = [0]
    basis: list[list[Fraction]] = []  # reduced echelon rows of difference vectors
    pivots: list[int] = []
    p0 = points[0]
    for idx in range(1, len(points)):
        v = [Fraction(a - b) for a, b in zip(points[idx], p0)]
        for row, piv in zip(basis, pivots):
            if v[piv]:
                f = v[piv] / row[piv]
                v = [x - f * y for x, y in zip(v, row)]
        nz = next((k for k in range(dim) if v[k]), None)
        if nz is None:
            continue
        basis.append(v)
        pivots.append(nz)
        chosen.append(idx)
        if len(chosen) == dim + 1:
            break
    return chosen


def affine_rank(points: Iterable[Sequence[int]]) -> int:
    pts = [tuple(p) for p in points]
    if not pts:
        return -1
    return len(_affine_basis(pts, len(pts[0]))) - 1


def _det3(a, b, c) -> int:
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _facet_plane(verts: list[Point]) -> tuple[list[int], int]:
    """Integer normal n and offset b with n.x = b on the hyperplane through ``verts``.

    n is the cofactor vector, so n.(p - v0) = det(v1 - v0, ..., v_{m-1} - v0, p - v0).
    """
    m = len(verts[0])
    v0 = verts[0]
    diffs = [[a - b for a, b in zip(v, v0)] for v in verts[1:]]
    if m == 2:
        (dx, dy), = diffs
        normal = [-dy, dx]
    elif m == 3:
        a, b = diffs
        normal = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    elif m == 4:
        cols = [[row[c] for c in range(4) if c != k] for k in range(4) for row in diffs]
        normal = [(-1) ** (3 + k) * _det3(*cols[3 * k : 3 * k + 3]) for k in range(4)]
    else:
        normal = []
        for k in range(m):
            sub = [[row[c] for c in range(m) if c != k] for row in diffs]
            normal.append((-1) ** (m - 1 + k) * _int_det(sub))
    offset = sum(a * b for a, b in zip(normal, v0))
    return normal, offset


class _Triangulation:
    """Placing triangulation of a full-dimensional integer point set.

    Only the boundary facets are stored, as outward integer planes in a
    growing array, so the visibility test for a new point is one
    matrix-vector product.
    """

    def __init__(self, points: list[Point]):
        self.points = points
        self.dim = m = len(points[0])
        base = _affine_basis(points, m)
        if len(base) != m + 1:
            raise ValueError("point set is not full-dimensional")
        self.centroid_sum = [sum(points[i][k] for i in base) for k in range(m)]
        # Hadamard bound on |n.p - b|; fall back to Python ints if int64 could overflow
        c = max(abs(x) for p in points for x in p) + 1
        bound = (2 * c * math.sqrt(m)) ** (m - 1) * 4 * c * m
        dtype = np.int64 if bound < 2**62 else object
        self._N = np.zeros((64, m), dtype=dtype)
        self._b = np.zeros(64, dtype=dtype)
        self._alive = np.zeros(64, dtype=bool)
        self._keys: list[tuple[int, ...]] = []
        self._rows: dict[tuple[int, ...], int] = {}
        for omit in base:
            self._add_facet(tuple(sorted(i for i in base if i != omit)))
        v0 = points[base[0]]
        self.volume = abs(_int_det([[a - b for a, b in zip(points[i], v0)] for i in base[1:]]))
        self._inserted = set(base)

    def _add_facet(self, key: tuple[int, ...]):
        normal, offset = _facet_plane([self.points[i] for i in key])
        # orient outward: the inner point must satisfy n.x < b
        inner = sum(a * b for a, b in zip(normal, self.centroid_sum)) - (self.dim + 1) * offset
        if inner > 0:
            normal = [-a for a in normal]
            offset = -offset
        row = len(self._keys)
        if row == len(self._alive):
            grow = len(self._alive)
            self._N = np.vstack([self._N, np.zeros((grow, self.dim), dtype=self._N.dtype)])
            self._b = np.concatenate([self._b, np.zeros(grow, dtype=self._b.dtype)])
            self._alive = np.concatenate([self._alive, np.zeros(grow, dtype=bool)])
        self._N[row] = normal
        self._b[row] = offset
        self._alive[row] = True
        self._keys.append(key)
        self._rows[key] = row

    def insert(self, idx: int):
        if idx in self._inserted:
            return
        self._inserted.add(idx)
        p = np.array(self.points[idx], dtype=self._N.dtype)
        count = len(self._keys)
        vals = self._N[:count] @ p - self._b[:count]
        visible = np.nonzero((vals > 0) & self._alive[:count])[0]
        if len(visible) == 0:
            return
        self.volume += int(sum(int(vals[k]) for k in visible))
        ridge_count: dict[tuple[int, ...], int] = {}
        for k in visible:
            key = self._keys[k]
            for r in itertools.combinations(key, self.dim - 1):
                ridge_count[r] = ridge_count.get(r, 0) + 1
            self._alive[k] = False
            del self._rows[key]
        for r, cnt in ridge_count.items():
            if cnt == 1:
                self._add_facet(tuple(sorted(r + (idx,))))

    def boundary_points(self) -> set[int]:
        return {i for key in self._rows for i in key}


def _hull_and_volume(points: Iterable[Sequence[int]], dim: int) -> tuple[list[Point], int]:
    """(superset of hull vertices, dim! * volume) in one placing pass."""
    pts = sorted({tuple(p) for p in points})
    if dim == 0:
        return pts, 1 if pts else 0
    if len(pts) < dim + 1 or affine_rank(pts) < dim:
        return pts, 0
    tri = _Triangulation(pts)
    centre = np.mean(np.array(pts, dtype=float), axis=0)
    spread = np.sum((np.array(pts, dtype=float) - centre) ** 2, axis=1)
    for i in sorted(range(len(pts)), key=lambda i: (-spread[i], pts[i])):
        tri.insert(i)
    return sorted(pts[i] for i in tri.boundary_points()), tri.volume


def normalized_volume(points: Iterable[Sequence[int]], dim: int) -> int:
    """``dim! * vol(conv(points))`` as an exact integer (0 if not full-dimensional)."""
    return _hull_and_volume(points, dim)[1]


def hull_points(points: Iterable[Sequence[int]]) -> list[Point]:
    """A subset of ``points`` containing every vertex of their convex hull."""
    pts = [tuple(p) for p in points]
    if not pts:
        return []
    return _hull_and_volume(pts, len(pts[0]))[0]


def minkowski_sum(a: Iterable[Point], b: Iterable[Point]) -> set[Point]:
    return {tuple(x + y for x, y in zip(p, q)) for p in a for q in b}


# ---------------------------------------------------------------------------
# mixed volume


class MVMethod(str, enum.Enum):
    INCLUSION_EXCLUSION = "InclusionExclusion"
    MIXED_CELLS = "MixedCells"


@dataclass(frozen=True)
class MixedVolumeResult:
    value: int
    method: MVMethod
    polytopes: tuple[NewtonPolytope, ...]

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method.value,
            "polytopes": [p.to_json() for p in self.polytopes],
        }


def _check_family(polys: Sequence[NewtonPolytope]) -> int:
    m = len(polys)
    if m == 0:
        raise ValueError("need at least one polytope")
    for p in polys:
        if p.dim != m:
            raise ValueError(f"polytope of dim {p.dim} in a family of {m}")
        if not p.points:
            raise ValueError("empty polytope")
    return m


def mv_inclusion_exclusion(polys: Sequence[NewtonPolytope]) -> MixedVolumeResult:
    """MV = sum over nonempty S of (-1)^(m-|S|) vol(sum of P_i, i in S)."""
    m = _check_family(polys)
    if m > 6:
        raise ValueError("inclusion-exclusion is limited to m <= 6")
    reduced = [hull_points(p.points) for p in polys]
    sums: dict[tuple[int, ...], list[Point]] = {}
    total = 0
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            if size == 1:
                pts, vol = reduced[subset[0]], normalized_volume(reduced[subset[0]], m)
            else:
                pts, vol = _hull_and_volume(minkowski_sum(sums[subset[:-1]], reduced[subset[-1]]), m)
            sums[subset] = pts
            total += (-1) ** (m - size) * vol
    # each normalized volume carries a factor m!
    value, rem = divmod(total, math.factorial(m))
    if rem:  # pragma: no cover - would indicate an arithmetic bug
        raise ArithmeticError("inclusion-exclusion sum is not divisible by m!")
    return MixedVolumeResult(value, MVMethod.INCLUSION_EXCLUSION, tuple(polys))


class DegenerateLifting(RuntimeError):
    pass


_LIFT_SCALE = float(2**31)
_FEAS_TOL = 1e-7


@lru_cache(maxsize=None)
def _combos(n: int, r: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), r)), dtype=np.intp).reshape(-1, r)


def _feasible(eq: np.ndarray, eq_rhs: np.ndarray, G: np.ndarray, h: np.ndarray) -> bool:
    """Is {x : eq x = eq_rhs, G x <= h} nonempty?  Float test, errs towards True.

    The equalities are eliminated, any lineality space of the remaining
    inequalities is projected out, and the (now pointed) polyhedron is
    nonempty iff one of its candidate vertices, obtained by making r of the
    constraints tight, satisfies all of them.
    """
    k = eq.shape[0]
    u, sv, vt = np.linalg.svd(eq)
    if sv[-1] < 1e-9 * max(sv[0], 1.0):
        return False  # dependent edge directions never yield a full-dimensional cell
    x0 = vt[:k].T @ ((u.T @ eq_rhs) / sv)
    Z = vt[k:].T
    Gx = G @ x0
    slack = h - Gx
    tol = _FEAS_TOL * (1.0 + np.abs(h).max() + np.abs(Gx).max())
    if Z.shape[1] == 0:
        return bool(slack.min() >= -tol)
    Gz = G @ Z
    if Z.shape[1] == 1:
        # one free direction: intersect the half-lines
        g = Gz[:, 0]
        pos, neg, zero = g > 1e-12, g < -1e-12, np.abs(g) <= 1e-12
        if zero.any() and slack[zero].min() < -tol:
            return False
        hi = (slack[pos] / g[pos]).min() if pos.any() else np.inf
        lo = (slack[neg] / g[neg]).max() if neg.any() else -np.inf
        return bool(lo <= hi + tol)
    _, s2, vt2 = np.linalg.svd(Gz, full_matrices=False)
    r = int(np.sum(s2 > 1e-9 * max(s2[0], 1.0))) if s2.size else 0
    if r == 0:
        return bool(slack.min() >= -tol)
    Gr = Gz @ vt2[:r].T
    combos = _combos(len(Gr), r)
    mats = Gr[combos]
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-12
    if not ok.any():
        return False
    ys = np.linalg.solve(mats[ok], slack[combos[ok]][..., None])[..., 0]
    viol = ys @ Gr.T - slack
    return bool(np.any(np.all(viol <= tol, axis=1)))


def _mixed_cells_once(supports: list[list[Point]], lifts: list[dict[Point, int]]) -> int:
    m = len(supports)
    arrays = [np.array(s, dtype=float) for s in supports]
    wf = [np.array([lifts[i][p] for p in supports[i]], dtype=float) / _LIFT_SCALE for i in range(m)]

    def rows(i: int, a: int, b: int):
        A, w = arrays[i], wf[i]
        # <alpha, a> + w(a) <= <alpha, q> + w(q), with equality at q = b
        return A[b] - A[a], w[a] - w[b], A[a][None, :] - A, w - w[a]

    # lower edges of each lifted support
    edges: dict[int, list[tuple[int, int]]] = {}
    for i in range(m):
        cands = []
        for a, b in itertools.combinations(range(len(supports[i])), 2):
            e, er, G, h = rows(i, a, b)
            if _feasible(e[None, :], np.array([er]), G, h):
                cands.append((a, b))
        edges[i] = cands
    order = sorted(range(m), key=lambda i: len(edges[i]))

    def finish(choice: list[tuple[int, int, int]]) -> int:
        by_poly = {i: (a, b) for i, a, b in choice}
        mat, rhs = [], []
        for i in range(m):
            a, b = by_poly[i]
            pa, pb = supports[i][a], supports[i][b]
            mat.append([y - x for x, y in zip(pa, pb)])
            rhs.append(Fraction(lifts[i][pa] - lifts[i][pb]))
        det = _int_det(mat)
        if det == 0:
            return 0
        alpha = _solve([[Fraction(v) for v in r] for r in mat], rhs)
        for i in range(m):
            a, b = by_poly[i]
            pa = supports[i][a]
            base = sum(x * y for x, y in zip(alpha, pa)) + lifts[i][pa]
            for k, q in enumerate(supports[i]):
                if k in (a, b):
                    continue
                val = sum(x * y for x, y in zip(alpha, q)) + lifts[i][q]
                if val < base:
                    return 0  # admitted by the permissive float test only
                if val == base:
                    raise DegenerateLifting("non-simple mixed cell")
        return abs(det)

    total = 0

    def rec(depth: int, choice, eq, eq_rhs, G, h):
        nonlocal total
        if depth == m:
            total += finish(choice)
            return
        i = order[depth]
        for a, b in edges[i]:
            e, er, Gi, hi = rows(i, a, b)
            eq2 = np.vstack([eq, e[None, :]]) if eq is not None else e[None, :]
            rhs2 = np.append(eq_rhs, er) if eq_rhs is not None else np.array([er])
            G2 = np.vstack([G, Gi]) if G is not None else Gi
            h2 = np.concatenate([h, hi]) if h is not None else hi
            if depth == 0 or _feasible(eq2, rhs2, G2, h2):
                rec(depth + 1, choice + [(i, a, b)], eq2, rhs2, G2, h2)

    rec(0, [], None, None, None, None)
    return total


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows)
    aug = [r[:] + [v] for r, v in zip(rows, rhs)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c] / aug[c][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[r][n] / aug[r][r] for r in range(n)]


def mv_mixed_cells(polys: Sequence[NewtonPolytope], seed: int = 0, retries: int = 10) -> MixedVolumeResult:
    """Mixed volume from the fine mixed cells of a random regular subdivision."""
    m = _check_family(polys)
    if m > 8:
        raise ValueError("mixed-cell route is limited to m <= 8")
    if any(len(p.points) < 2 for p in polys):
        return MixedVolumeResult(0, MVMethod.MIXED_CELLS, tuple(polys))
    supports = [hull_points(p.points) for p in polys]
    rng = random.Random(seed)
    for _ in range(retries):
        lifts = [{pt: rng.randrange(2**31) for pt in s} for s in supports]
        try:
            value = _mixed_cells_once(supports, lifts)
        except DegenerateLifting:
            continue
        return MixedVolumeResult(value, MVMethod.MIXED_CELLS, tuple(polys))
    raise DegenerateLifting(f"no generic lifting found after {retries} attempts")


def mixed_volume(polys: Sequence[NewtonPolytope]) -> int:
    return mv_inclusion_exclusion(polys).value


def bezout_bound(system) -> int:
    """Product of total degrees in the system unknowns.

    Accepts a minor system (anything with ``polynomials`` and
    ``system_unknowns``) or a plain sequence of polynomials, in which case the
    degree is taken in all their unknowns.
    """
    if hasattr(system, "system_unknowns"):
        polys, among = system.polynomials, system.system_unknowns
    else:
        polys = list(system)
        among = sorted(set().union(*(p.unknowns for p in polys)))
    return math.prod(p.total_degree(among) for p in polys)
