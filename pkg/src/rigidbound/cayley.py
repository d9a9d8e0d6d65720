"""Symbolic Cayley-Menger matrices, their bordered minors, and the embeddability test."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from rigidbound.graph import Graph
from rigidbound.polynomial import Number, Polynomial, Variable

Entry = Union[int, Variable]


@dataclass(frozen=True)
class CayleyMengerMatrix:
    """Bordered squared-distance matrix of a graph.

    Row/column 0 is the border of ones; ``entries[i][j]`` for ``i != j >= 1``
    is ``c_ij`` on edges and ``x_ij`` on non-edges.
    """

    n: int
    entries: tuple[tuple[Entry, ...], ...]

    @property
    def unknowns(self) -> list[Variable]:
        return sorted({e for row in self.entries for e in row if isinstance(e, Variable) and e.is_unknown})

    @property
    def parameters(self) -> list[Variable]:
        return sorted({e for row in self.entries for e in row if isinstance(e, Variable) and not e.is_unknown})

    def variable(self, i: int, j: int) -> Variable:
        e = self.entries[i][j]
        if not isinstance(e, Variable):
            raise ValueError(f"entry ({i},{j}) is not a distance variable")
        return e

    def pretty(self) -> str:
        cells = [[str(e) for e in row] for row in self.entries]
        w = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(w) for c in row) for row in cells)


def build_cm(g: Graph) -> CayleyMengerMatrix:
    n = g.n
    rows = []
    for i in range(n + 1):
        row: list[Entry] = []
        for j in range(n + 1):
            if i == j:
                row.append(0)
            elif i == 0 or j == 0:
                row.append(1)
            elif g.has_edge(i, j):
                row.append(Variable.parameter(i, j))
            else:
                row.append(Variable.unknown(i, j))
        rows.append(tuple(row))
    return CayleyMengerMatrix(n, tuple(rows))


@lru_cache(maxsize=None)
def _bordered_det_template(k: int) -> dict[tuple[int, ...], int]:
    """Determinant of the generic bordered matrix on k points.

    Keys are exponent vectors over the slots ``combinations(range(k), 2)``.
    Computed by Laplace expansion along row 0 with memoised sub-minors.
    """
    slots = list(itertools.combinations(range(k), 2))
    slot_index = {p: s for s, p in enumerate(slots)}
    size = k + 1

    def entry(r: int, c: int) -> dict[tuple[int, ...], int]:
        if r == c:
            return {}
        if r == 0 or c == 0:
            return {(0,) * len(slots): 1}
        exp = [0] * len(slots)
        exp[slot_index[(min(r, c) - 1, max(r, c) - 1)]] = 1
        return {tuple(exp): 1}

    def mul(a, b):
        out: dict[tuple[int, ...], int] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return out

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset[int]) -> tuple:
        if row == size:
            return ((((0,) * len(slots)), 1),)
        acc: dict[tuple[int, ...], int] = {}
        for pos, c in enumerate(sorted(cols)):
            a = entry(row, c)
            if not a:
                continue
            sign = -1 if pos % 2 else 1
            sub = dict(minor(row + 1, cols - {c}))
            for e, v in mul(a, sub).items():
                acc[e] = acc.get(e, 0) + sign * v
        return tuple((e, v) for e, v in acc.items() if v)

    return dict(minor(0, frozenset(range(size))))


def minor_poly(cm: CayleyMengerMatrix, indices: Sequence[int]) -> Polynomial:
    """Exact determinant of the bordered submatrix on rows/cols ``{0} + indices``."""
    idx = list(indices)
    k = len(idx)
    if k < 2 or k > cm.n or len(set(idx)) != k or any(not 1 <= i <= cm.n for i in idx):
        raise ValueError(f"invalid index set {indices} for n={cm.n}")
    if k > 5:
        raise ValueError("minors are supported for up to 5 points")
    idx = sorted(idx)
    template = _bordered_det_template(k)
    slot_vars = [cm.variable(idx[a], idx[b]) for a, b in itertools.combinations(range(k), 2)]
    order = sorted(range(len(slot_vars)), key=lambda s: slot_vars[s])
    vs = tuple(slot_vars[s] for s in order)
    return Polynomial(vs, {tuple(e[s] for s in order): c for e, c in template.items()})


def specialize(p: Polynomial, parameter_values: Mapping[Variable, Number]) -> Polynomial:
    """Substitute rational values for every parameter of ``p``."""
    missing = [v for v in p.parameters if v not in parameter_values]
    if missing:
        raise ValueError(f"missing parameter values for {', '.join(map(str, sorted(missing)))}")
    return p.substitute({v: parameter_values[v] for v in p.parameters})


# ---------------------------------------------------------------------------
# numeric embeddability


@dataclass(frozen=True)
class Embeddability:
    ok: bool
    rank: int
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def bordered(dist2: np.ndarray) -> np.ndarray:
    n = dist2.shape[0]
    b = np.ones((n + 1, n + 1))
    b[0, 0] = 0.0
    b[1:, 1:] = dist2
    return b


def embeddable_check(dist2, d: int = 2) -> Embeddability:
    """Can the squared-distance matrix be realised by points in R^d?

    Checks the rank of the bordered matrix, the sign of every bordered minor
    on 2..d+2 points, and vanishing of all minors on d+3 points.
    """
    D = np.asarray(dist2, dtype=float)
    n = D.shape[0]
    if D.shape != (n, n):
        raise ValueError("distance matrix must be square")
    scale = float(np.max(np.abs(D))) if n else 0.0
    if not np.allclose(D, D.T, rtol=0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("distance matrix is not symmetric")
    off = D[~np.eye(n, dtype=bool)]
    if np.any(np.diag(D) != 0) or np.any(off <= 0):
        raise ValueError("need zero diagonal and positive off-diagonal entries")
    B = bordered(D)
    M = max(scale, 1.0)
    sv = np.linalg.svd(B, compute_uv=False)
    rank = int(np.sum(sv > 1e-9 * M))
    if rank > d + 2:
        return Embeddability(False, rank, f"rank {rank} exceeds {d + 2}")
    slack = 1e-9 * M**3
    for k in range(2, min(d + 2, n) + 1):
        for idx in itertools.combinations(range(n), k):
            sub = B[np.ix_((0,) + tuple(i + 1 for i in idx), (0,) + tuple(i + 1 for i in idx))]
            val = (-1) ** k * np.linalg.det(sub)
            if val < -slack:
                name = ",".join(str(i + 1) for i in idx)
                return Embeddability(False, rank, f"sign of D({name}) violated: {val:.3e}")
    for idx in itertools.combinations(range(n), d + 3):
        sub = B[np.ix_((0,) + tuple(i + 1 for i in idx), (0,) + tuple(i + 1 for i in idx))]
        val = np.linalg.det(sub)
        if abs(val) > slack * M:
            name = ",".join(str(i + 1) for i in idx)
            return Embeddability(False, rank, f"D({name}) = {val:.3e} does not vanish")
    return Embeddability(True, rank)


def squared_distances(points: np.ndarray) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    diff = p[:, None, :] - p[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def cm_det_value(dist2: Mapping[tuple[int, int], Number], indices: Sequence[int]) -> Fraction:
    """Exact bordered determinant from explicit squared distances (Fraction elimination)."""
    idx = list(indices)
    k = len(idx)
    size = k + 1
    m = [[Fraction(0)] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            if a == b:
                continue
            if a == 0 or b == 0:
                m[a][b] = Fraction(1)
            else:
                i, j = idx[a - 1], idx[b - 1]
                m[a][b] = Fraction(dist2[(min(i, j), max(i, j))])
    return _fraction_det(m)


def _fraction_det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for cc in range(c, n):
                    m[r][cc] -= f * m[c][cc]
    return det


def fraction_rank(rows: list[list[Fraction]]) -> int:
    m = [row[:] for row in rows]
    if not m:
        return 0
    rank = 0
    cols = len(m[0])
    for c in range(cols):
        p = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                for cc in range(c, cols):
                    m[r][cc] -= f * m[rank][cc]
        rank += 1
    return rank

