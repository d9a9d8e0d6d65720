"""Exact embedding enumeration for H1 graphs and generic length sampling.

Embeddings are enumerated over the complex numbers: every H1 step
intersects two circles, which always meet in two points (counted in C^2)
for generic lengths.  Real embeddings are the subset with vanishing
imaginary parts.  Vertex 1 of the base triangle is pinned at the origin,
vertex 2 on the positive x-axis and vertex 3 in the upper half-plane, so
each element is one class modulo rigid motions and reflection.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from rigidbound.graph import Edge, Graph, HennebergSequence, StepKind

TANGENT_TOL = 1e-12
VERIFY_RTOL = 1e-9
MIN_TRIANGLE_AREA = 1e-3


class NonGenericLengths(ValueError):
    """Raised when a circle intersection is (numerically) tangential."""


class Provenance(str, enum.Enum):
    SAMPLED = "Sampled"
    EXTERNAL = "External"


class Quotient(str, enum.Enum):
    MOD_RIGID = "ModRigid"
    MOD_RIGID_AND_REFLECTION = "ModRigidAndReflection"


@dataclass(frozen=True)
class LengthAssignment:
    """Squared edge lengths, optionally with the embedding they were measured on."""

    values: Mapping[Edge, float]
    provenance: Provenance = Provenance.EXTERNAL
    source: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for e, v in self.values.items():
            if not v > 0:
                raise ValueError(f"squared length of {e} must be positive, got {v}")

    def __getitem__(self, edge: Edge) -> float:
        u, v = edge
        return self.values[(min(u, v), max(u, v))]

    def to_text(self) -> str:
        return "".join(f"{u} {v} {val!r}\n" for (u, v), val in sorted(self.values.items()))

    @classmethod
    def from_text(cls, text: str) -> "LengthAssignment":
        vals = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            u, v, x = line.split()
            a, b = int(u), int(v)
            vals[(min(a, b), max(a, b))] = float(x)
        return cls(vals, Provenance.EXTERNAL)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path: str | Path) -> "LengthAssignment":
        return cls.from_text(Path(path).read_text())


@dataclass
class EmbeddingSet:
    """Embeddings as (n, 2) coordinate arrays; row ``v-1`` holds vertex ``v``."""

    embeddings: list[np.ndarray]
    quotient: Quotient = Quotient.MOD_RIGID_AND_REFLECTION

    def __len__(self) -> int:
        return len(self.embeddings)

    def real(self, tol: float = 1e-9) -> list[np.ndarray]:
        out = []
        for e in self.embeddings:
            scale = max(1.0, float(np.abs(e).max()))
            if np.abs(e.imag).max() <= tol * scale:
                out.append(e.real.copy())
        return out

    def count_mod_rigid(self) -> int:
        return 2 * len(self) if self.quotient is Quotient.MOD_RIGID_AND_REFLECTION else len(self)

    def to_json(self) -> dict:
        def enc(z):
            return float(z.real) if abs(z.imag) == 0 else [float(z.real), float(z.imag)]

        return {
            "quotient": self.quotient.value,
            "count": len(self),
            "real_count": len(self.real()),
            "embeddings": [[[enc(complex(c)) for c in row] for row in e] for e in self.embeddings],
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")


def _min_triangle_area(pts: np.ndarray) -> float:
    idx = np.array(list(itertools.combinations(range(len(pts)), 3)))
    a, b, c = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return float(np.abs(cross).min() / 2)


def sample_lengths(g: Graph, seed: int = 0, max_attempts: int = 1000) -> LengthAssignment:
    """Squared edge lengths of uniform random points in the unit square.

    Configurations with any triangle of area below ``MIN_TRIANGLE_AREA`` are
    resampled.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        pts = rng.random((g.n, 2))
        if g.n >= 3 and _min_triangle_area(pts) < MIN_TRIANGLE_AREA:
            continue
        vals = {(u, v): float(np.sum((pts[u - 1] - pts[v - 1]) ** 2)) for u, v in g.sorted_edges()}
        return LengthAssignment(vals, Provenance.SAMPLED, pts)
    raise RuntimeError(f"no non-degenerate configuration in {max_attempts} attempts")


def normalize(coords: np.ndarray, base: Sequence[int]) -> np.ndarray:
    """Move a real embedding into the gauge fixed by the base triangle ``base``."""
    p = np.asarray(coords, dtype=float)
    a, b, c = (int(v) - 1 for v in base)
    p = p - p[a]
    ang = np.arctan2(p[b, 1], p[b, 0])
    rot = np.array([[np.cos(ang), np.sin(ang)], [-np.sin(ang), np.cos(ang)]])
    p = p @ rot.T
    if p[c, 1] < 0:
        p[:, 1] = -p[:, 1]
    return p


def _sqdist(p: np.ndarray, q: np.ndarray) -> complex:
    d = p - q
    return complex(d[0] * d[0] + d[1] * d[1])


def _circle_points(p: np.ndarray, q: np.ndarray, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Both (complex) points at squared distance ``a`` from p and ``b`` from q."""
    d2 = _sqdist(q, p)
    scale = max(abs(a), abs(b), abs(d2))
    if abs(d2) < TANGENT_TOL * scale:
        raise NonGenericLengths("coincident circle centres")
    d = np.sqrt(d2)
    e = (q - p) / d
    perp = np.array([-e[1], e[0]])
    x = (d2 + a - b) / (2 * d)
    h2 = a - x * x
    if abs(h2) < TANGENT_TOL * scale:
        raise NonGenericLengths(f"tangential circle intersection (disc = {h2:.3e})")
    h = np.sqrt(h2 + 0j)
    base = p + x * e
    return base + h * perp, base - h * perp


def enumerate_h1(g: Graph, seq: HennebergSequence, lengths: LengthAssignment) -> EmbeddingSet:
    """All embeddings of an H1 graph modulo rigid motions and reflection.

    ``seq`` must be an all-H1 construction of ``g`` carrying ``order`` (as
    returned by ``h1_witness``), or one whose replay equals ``g`` verbatim.
    """
    if not seq.all_h1:
        raise ValueError("enumerate_h1 needs an all-H1 sequence")
    if len(seq) != g.n - 3:
        raise ValueError("sequence does not match the graph size")
    order = seq.order or tuple(range(1, g.n + 1))
    a, b, c = order[:3]
    l_ab, l_ac, l_bc = lengths[(a, b)], lengths[(a, c)], lengths[(b, c)]
    P = np.zeros((g.n, 2), dtype=complex)
    P[b - 1] = [np.sqrt(l_ab), 0.0]
    up, down = _circle_points(P[a - 1], P[b - 1], l_ac, l_bc)
    P[c - 1] = up if up[1].real > 0 else down
    if abs(P[c - 1][1].imag) > 0 or P[c - 1][1].real <= 0:
        raise NonGenericLengths("base triangle lengths violate the triangle inequality")
    P[c - 1] = P[c - 1].real

    partial = [P]
    for step in seq.steps:
        assert step.kind == StepKind.H1
        v = order[step.new_vertex - 1]
        u, w = (order[k - 1] for k in step.attach)
        nxt = []
        for Q in partial:
            for point in _circle_points(Q[u - 1], Q[w - 1], lengths[(u, v)], lengths[(w, v)]):
                R = Q.copy()
                R[v - 1] = point
                nxt.append(R)
        partial = nxt

    out = []
    for Q in partial:
        scale = max(1.0, float(np.abs(Q).max()))
        Q = Q.copy()
        small = np.abs(Q.imag) <= 1e-12 * scale
        Q[small] = Q[small].real
        out.append(Q)
    out.sort(key=lambda e: tuple(np.round(np.concatenate([e.real.ravel(), e.imag.ravel()]), 9)))
    return EmbeddingSet(out, Quotient.MOD_RIGID_AND_REFLECTION)


def verify_embedding(g: Graph, coords, lengths: LengthAssignment, rtol: float = VERIFY_RTOL) -> bool:
    """Does every edge have its prescribed squared length (relative ``rtol``)?

    ``coords`` is an (n, 2) array or a mapping vertex -> point; complex
    coordinates are measured with the bilinear squared distance.
    """
    if isinstance(coords, Mapping):
        missing = [v for v in g.vertices if v not in coords]
        if missing:
            raise ValueError(f"no coordinates for vertices {missing}")
        P = np.array([coords[v] for v in g.vertices])
    else:
        P = np.asarray(coords)
        if P.shape[0] < g.n:
            raise ValueError("coordinates do not cover all vertices")
    for u, v in g.sorted_edges():
        want = lengths[(u, v)]
        got = _sqdist(P[u - 1], P[v - 1])
        if abs(got - want) > rtol * abs(want):
            return False
    return True


def realize_distances(
    n: int, known: Mapping[Edge, float], rtol: float = 1e-7, seed: int = 0
) -> np.ndarray | None:
    """A real planar point set with the given squared distances, or None.

    Vertices are placed by trilateration (branching on both circle
    intersections) as long as some unplaced vertex has two placed
    neighbours in ``known``; otherwise a least-squares fit from random
    starts is used.
    """
    nbrs: dict[int, dict[int, float]] = {v: {} for v in range(1, n + 1)}
    for (u, v), d2 in known.items():
        nbrs[u][v] = d2
        nbrs[v][u] = d2

    def consistent(P, placed, v):
        for w, d2 in nbrs[v].items():
            if w in placed and abs(float(np.sum((P[v - 1] - P[w - 1]) ** 2)) - d2) > rtol * max(d2, 1e-300):
                return False
        return True

    stuck = False

    def rec(P, placed: list[int], flip_fixed: bool):
        nonlocal stuck
        if len(placed) == n:
            return P
        cands = [(sum(w in placed for w in nbrs[v]), -v) for v in range(1, n + 1) if v not in placed]
        k, negv = max(cands)
        if k < 2:
            stuck = True
            return None
        v = -negv
        u, w = [x for x in placed if x in nbrs[v]][:2]
        p, q = P[u - 1], P[w - 1]
        a, b = nbrs[v][u], nbrs[v][w]
        d2 = float(np.sum((q - p) ** 2))
        scale = max(a, b, d2)
        d = np.sqrt(d2)
        e = (q - p) / d
        perp = np.array([-e[1], e[0]])
        x = (d2 + a - b) / (2 * d)
        h2 = a - x * x
        if h2 < -rtol * scale:
            return None
        h = np.sqrt(max(h2, 0.0))
        # the first off-axis vertex fixes the reflection
        options = [h, -h] if flip_fixed and h > 0.0 else [h]
        for s in options:
            R = P.copy()
            R[v - 1] = p + x * e + s * perp
            if consistent(R, placed, v):
                out = rec(R, placed + [v], True)
                if out is not None:
                    return out
        return None

    if not known:
        return None
    (a, b), d2 = max(known.items(), key=lambda kv: (len(nbrs[kv[0][0]]) + len(nbrs[kv[0][1]]), kv[0]))
    P = np.zeros((n, 2))
    P[b - 1] = [np.sqrt(d2), 0.0]
    out = rec(P, [a, b], False)
    if out is not None or not stuck:
        return out
    return _least_squares_realization(n, known, rtol, seed)


def _least_squares_realization(n, known, rtol, seed, starts: int = 20):
    from scipy.optimize import least_squares

    pairs = np.array(list(known), dtype=int) - 1
    target = np.array(list(known.values()))
    rng = np.random.default_rng(seed)
    scale = np.sqrt(target.max())

    def resid(z):
        P = z.reshape(n, 2)
        d = P[pairs[:, 0]] - P[pairs[:, 1]]
        return (np.sum(d * d, axis=1) - target) / target

    for _ in range(starts):
        with np.errstate(all="ignore"):
            sol = least_squares(resid, rng.random(2 * n) * scale, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.abs(resid(sol.x)).max() < rtol:
            return sol.x.reshape(n, 2)
    return None
