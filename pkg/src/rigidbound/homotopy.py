"""Total-degree homotopy continuation for small square polynomial systems.

All paths are tracked simultaneously as a batch; each keeps its own path
parameter and step size, so the result does not depend on batching.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from rigidbound.polynomial import Polynomial, Variable


@dataclass(frozen=True)
class TrackerOptions:
    initial_step: float = 0.05
    max_step: float = 0.1
    min_step: float = 1e-7
    growth_after: int = 4
    corrector_iterations: int = 3
    corrector_tol: float = 1e-8
    contraction: float = 0.5
    max_first_correction: float = 0.1
    divergence: float = 1e12
    near_end: float = 1e-2
    polish_iterations: int = 30
    residual_tol: float = 1e-10
    endpoint_tol: float = 0.5
    dedup_tol: float = 1e-6
    real_tol: float = 1e-8
    torus_tol: float = 1e-6
    max_iterations: int = 20000
    unreliable_fraction: float = 0.05


@dataclass
class TrackedPath:
    start: np.ndarray
    end: np.ndarray | None
    residual: float
    steps: int
    status: str  # "finite", "diverged", "failed"


@dataclass
class RootCount:
    total_paths: int
    finite_roots: int
    distinct_roots: int
    real_roots: int
    torus_roots: int
    failed_paths: int = 0
    unreliable: bool = False

    def __post_init__(self):
        assert self.distinct_roots <= self.finite_roots <= self.total_paths
        assert self.real_roots <= self.distinct_roots and self.torus_roots <= self.distinct_roots


@dataclass
class SolveResult:
    count: RootCount
    roots: list[np.ndarray]
    residuals: list[float]
    paths: list[TrackedPath] = field(repr=False)
    seed: int = 0
    options: TrackerOptions = field(default_factory=TrackerOptions)

    def real_roots(self, tol: float | None = None) -> list[np.ndarray]:
        tol = self.options.real_tol if tol is None else tol
        return [r for r in self.roots if _is_real(r, tol)]

    def torus_roots(self) -> list[np.ndarray]:
        return [r for r in self.roots if _in_torus(r, self.options.torus_tol)]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "tolerances": asdict(self.options),
            "count": asdict(self.count),
            "roots": [[[float(z.real), float(z.imag)] for z in r] for r in self.roots],
            "residuals": [float(x) for x in self.residuals],
        }


def _is_real(x: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(x.imag) <= tol * np.maximum(1.0, np.abs(x.real))))


def _in_torus(x: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(x) > tol))


class NumericSystem:
    """Batched evaluation of a square system given as exponent/coefficient tables."""

    def __init__(self, tables: Sequence[tuple[np.ndarray, np.ndarray]]):
        self.m = len(tables)
        self.dim = tables[0][0].shape[1]
        if self.dim != self.m:
            raise ValueError(f"system is not square: {self.m} equations, {self.dim} unknowns")
        exps, rows, coeffs = [], [], []
        self.degrees = []
        for i, (E, c) in enumerate(tables):
            E = np.asarray(E, dtype=np.int64)
            c = np.asarray(c, dtype=complex)
            scale = np.abs(c).max() if len(c) else 1.0
            exps.append(E)
            rows.append(np.full(len(c), i))
            coeffs.append(c / scale)
            self.degrees.append(int(E.sum(axis=1).max()) if len(c) else 0)
        self.E = np.vstack(exps)
        eq = np.concatenate(rows)
        self.C = np.zeros((len(eq), self.m), dtype=complex)
        self.C[np.arange(len(eq)), eq] = np.concatenate(coeffs)
        self.dE = [np.maximum(self.E - np.eye(self.dim, dtype=np.int64)[j], 0) for j in range(self.dim)]

    @classmethod
    def from_polynomials(cls, polys: Sequence[Polynomial], order: Sequence[Variable]) -> "NumericSystem":
        return cls([p.compile(order) for p in polys])

    def _mon(self, X: np.ndarray, E: np.ndarray) -> np.ndarray:
        return np.prod(X[:, None, :] ** E[None, :, :], axis=2)

    def value(self, X: np.ndarray) -> np.ndarray:
        return self._mon(X, self.E) @ self.C

    def jacobian(self, X: np.ndarray) -> np.ndarray:
        J = np.empty((X.shape[0], self.m, self.dim), dtype=complex)
        for j in range(self.dim):
            J[:, :, j] = (self._mon(X, self.dE[j]) * self.E[:, j]) @ self.C
        return J


class _Homotopy:
    """H(x, t) = (1 - t) * gamma * G(x) + t * F(x), G_i = x_i^d_i - g_i."""

    def __init__(self, target: NumericSystem, gamma: complex, g: np.ndarray):
        self.F = target
        self.gamma = gamma
        self.g = g
        self.d = np.array(target.degrees)

    def start_points(self) -> np.ndarray:
        per_coord = [
            self.g[i] ** (1.0 / self.d[i]) * np.exp(2j * np.pi * np.arange(self.d[i]) / self.d[i])
            for i in range(len(self.d))
        ]
        return np.array(list(itertools.product(*per_coord)), dtype=complex).reshape(-1, len(self.d))

    def G(self, X):
        return X ** self.d - self.g

    def Gx(self, X):
        return np.einsum("pi,ij->pij", self.d * X ** (self.d - 1), np.eye(len(self.d)))

    def H(self, X, t):
        return (1 - t)[:, None] * self.gamma * self.G(X) + t[:, None] * self.F.value(X)

    def Hx(self, X, t):
        return (1 - t)[:, None, None] * self.gamma * self.Gx(X) + t[:, None, None] * self.F.jacobian(X)

    def Ht(self, X):
        return self.F.value(X) - self.gamma * self.G(X)

    def velocity(self, X, t):
        return -_solve(self.Hx(X, t), self.Ht(X))


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for k in range(len(b)):
            out[k] = np.linalg.lstsq(A[k], b[k], rcond=None)[0]
        return out


def _track(hom: _Homotopy, X0: np.ndarray, opts: TrackerOptions):
    P, m = X0.shape
    X = X0.copy()
    t = np.zeros(P)
    h = np.full(P, opts.initial_step)
    streak = np.zeros(P, dtype=int)
    steps = np.zeros(P, dtype=int)
    status = np.array(["active"] * P, dtype=object)
    for _ in range(opts.max_iterations):
        act = np.nonzero(status == "active")[0]
        if len(act) == 0:
            break
        x, tt = X[act], t[act]
        hh = np.minimum(h[act], 1.0 - tt)
        # classical RK4 predictor for dx/dt = -Hx^{-1} Ht
        with np.errstate(all="ignore"):
            k1 = hom.velocity(x, tt)
            k2 = hom.velocity(x + 0.5 * hh[:, None] * k1, tt + 0.5 * hh)
            k3 = hom.velocity(x + 0.5 * hh[:, None] * k2, tt + 0.5 * hh)
            k4 = hom.velocity(x + hh[:, None] * k3, tt + hh)
            xp = x + (hh / 6.0)[:, None] * (k1 + 2 * k2 + 2 * k3 + k4)
            t1 = tt + hh
            ok = np.all(np.isfinite(xp), axis=1)
            prev = np.full(len(act), np.inf)
            last = np.full(len(act), np.inf)
            for it in range(opts.corrector_iterations):
                dx = _solve(hom.Hx(xp, t1), hom.H(xp, t1))
                xp = xp - dx
                last = np.abs(dx).max(axis=1)
                scale = 1.0 + np.abs(xp).max(axis=1)
                if it == 0:
                    # a large first correction means the predictor left the path
                    ok &= last <= opts.max_first_correction * scale
                else:
                    # Newton must contract unless already converged
                    ok &= (last <= opts.contraction * prev) | (last <= opts.corrector_tol * scale)
                prev = last
            scale = 1.0 + np.abs(xp).max(axis=1)
            ok &= np.isfinite(last) & (last <= opts.corrector_tol * scale)
        # accepted steps
        acc = act[ok]
        X[acc] = xp[ok]
        t[acc] = t1[ok]
        steps[acc] += 1
        streak[acc] += 1
        grow = acc[streak[acc] >= opts.growth_after]
        h[grow] = np.minimum(2 * h[grow], opts.max_step)
        streak[grow] = 0
        # rejected steps
        rej = act[~ok]
        h[rej] *= 0.5
        streak[rej] = 0
        # termination
        done = acc[t[acc] >= 1.0]
        status[done] = "finite"
        big = act[np.abs(X[act]).max(axis=1) > opts.divergence]
        status[big] = "diverged"
        tiny = rej[h[rej] < opts.min_step]
        for k in tiny:
            status[k] = "diverged" if t[k] > 1.0 - opts.near_end else "failed"
    status[status == "active"] = "failed"
    return X, t, steps, status


def _polish(F: NumericSystem, X: np.ndarray, opts: TrackerOptions):
    X = X.copy()
    with np.errstate(all="ignore"):
        for _ in range(opts.polish_iterations):
            dx = _solve(F.jacobian(X), F.value(X))
            dx[~np.isfinite(dx)] = 0
            X = X - dx
        res = np.abs(F.value(X)).max(axis=1)
    return X, res


def solve_total_degree(
    system: Sequence[Polynomial] | NumericSystem,
    unknown_order: Sequence[Variable] | None = None,
    seed: int = 0,
    options: TrackerOptions | None = None,
) -> SolveResult:
    """Isolated roots of a square system by total-degree homotopy.

    ``system`` is either polynomials in unknowns only (with their variable
    order) or a prebuilt :class:`NumericSystem`.
    """
    opts = options or TrackerOptions()
    if isinstance(system, NumericSystem):
        F = system
    else:
        polys = list(system)
        if unknown_order is None:
            unknown_order = sorted(set().union(*(p.trim().variables for p in polys)))
        stray = [v for p in polys for v in p.trim().variables if not v.is_unknown]
        if stray:
            raise ValueError("system still contains parameters; specialize first")
        F = NumericSystem.from_polynomials(polys, unknown_order)
    if min(F.degrees) < 1:
        raise ValueError("every equation needs degree >= 1")
    rng = np.random.default_rng(seed)
    gamma = np.exp(2j * np.pi * rng.random())
    g = np.exp(2j * np.pi * rng.random(F.m)) * (0.5 + rng.random(F.m))
    hom = _Homotopy(F, gamma, g)
    X0 = hom.start_points()
    X, t, steps, status = _track(hom, X0, opts)
    # paths given up close to t = 1 may still sit next to a regular root
    fin = np.nonzero((status == "finite") | ((status == "diverged") & (t > 1.0 - opts.near_end)))[0]
    Xp, res = _polish(F, X[fin], opts) if len(fin) else (np.empty((0, F.m), complex), np.empty(0))
    paths = []
    for k in range(len(X0)):
        paths.append(TrackedPath(X0[k], X[k] if status[k] == "finite" else None, np.inf, int(steps[k]), status[k]))
    good: list[tuple[np.ndarray, float]] = []
    for j, k in enumerate(fin):
        # Newton must not carry a path end (e.g. one heading to infinity) onto a distant root
        moved = np.abs(Xp[j] - X[k]).max() if np.all(np.isfinite(Xp[j])) else np.inf
        close = moved <= opts.endpoint_tol * (1.0 + np.abs(Xp[j]).max())
        if res[j] < opts.residual_tol and close:
            paths[k].status = "finite"
            paths[k].residual = float(res[j])
            paths[k].end = Xp[j]
            good.append((Xp[j], float(res[j])))
        else:
            # converged to a singular or non-polishable endpoint
            paths[k].status = "diverged"
    distinct: list[tuple[np.ndarray, float]] = []
    for x, r in good:
        if not any(np.abs(x - y).max() <= opts.dedup_tol * max(1.0, np.abs(y).max()) for y, _ in distinct):
            distinct.append((x, r))
    distinct.sort(key=lambda xr: tuple(np.round(np.concatenate([xr[0].real, xr[0].imag]), 8)))
    roots = [x for x, _ in distinct]
    failed = int(np.sum(status == "failed"))
    count = RootCount(
        total_paths=len(X0),
        finite_roots=len(good),
        distinct_roots=len(roots),
        real_roots=sum(_is_real(x, opts.real_tol) for x in roots),
        torus_roots=sum(_in_torus(x, opts.torus_tol) for x in roots),
        failed_paths=failed,
        unreliable=failed > opts.unreliable_fraction * len(X0),
    )
    return SolveResult(count, roots, [r for _, r in distinct], paths, seed, opts)


def random_coefficient_system(
    supports: Sequence[Sequence[Sequence[int]]], rng: np.random.Generator
) -> NumericSystem:
    """Generic complex coefficients on fixed supports."""
    tables = []
    for pts in supports:
        E = np.array(sorted(tuple(p) for p in pts), dtype=np.int64)
        c = rng.normal(size=len(E)) + 1j * rng.normal(size=len(E))
        tables.append((E, c))
    return NumericSystem(tables)


def specialize_numeric(
    polys: Sequence[Polynomial], values: Mapping[Variable, float | Fraction], order: Sequence[Variable]
) -> NumericSystem:
    """Substitute (possibly floating) parameter values and compile over ``order``."""
    tables = []
    for p in polys:
        params = [v for v in p.variables if not v.is_unknown]
        full = list(order) + params
        E, c = p.compile(full)
        vals = np.array([float(values[v]) for v in params])
        k = len(order)
        factor = np.prod(vals[None, :] ** E[:, k:], axis=1) if params else np.ones(len(c))
        Eu = E[:, :k]
        merged: dict[tuple[int, ...], complex] = {}
        for e, cc in zip(map(tuple, Eu), c * factor):
            merged[e] = merged.get(e, 0.0) + cc
        items = sorted(merged.items())
        tables.append((np.array([e for e, _ in items], dtype=np.int64).reshape(-1, k), np.array([v for _, v in items])))
    return NumericSystem(tables)


class UnreliableSolve(RuntimeError):
    """Too many paths failed for the root count to be trusted."""


def real_embedding_roots(g, sys, lengths, seed: int = 0, options: TrackerOptions | None = None):
    """Real positive roots of ``sys`` at the given squared edge lengths that extend to planar embeddings.

    Returns ``(roots, points)``: each root with one planar realization of
    the completed distance data.
    """
    from rigidbound.cayley import embeddable_check, squared_distances
    from rigidbound.embed import realize_distances

    order = list(sys.system_unknowns)
    params = {v: lengths[v.pair] for eq in sys.equations for v in eq.parameters}
    F = specialize_numeric(sys.polynomials, params, order)
    res = solve_total_degree(F, seed=seed, options=options)
    if res.count.unreliable:
        raise UnreliableSolve(f"{res.count.failed_paths} of {res.count.total_paths} paths failed")
    known = {e: float(lengths[e]) for e in g.sorted_edges()}
    roots, points = [], []
    for r in res.real_roots():
        x = r.real
        if np.any(x <= 0):
            continue
        dist = dict(known)
        dist.update({v.pair: float(val) for v, val in zip(order, x)})
        P = realize_distances(g.n, dist, seed=seed)
        if P is None:
            continue
        D = squared_distances(P)
        if np.any(D[~np.eye(g.n, dtype=bool)] <= 0) or not embeddable_check(D, 2):
            continue
        roots.append(x)
        points.append(P)
    return roots, points


def count_real_embedding_roots(g, sys, lengths, seed: int = 0, options: TrackerOptions | None = None) -> int:
    """Number of distinct real embedding roots (one per embedding modulo rigid motions and reflection)."""
    return len(real_embedding_roots(g, sys, lengths, seed, options)[0])
