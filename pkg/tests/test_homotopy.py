import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidbound.cayley import build_cm, specialize
from rigidbound.embed import sample_lengths
from rigidbound.fixtures import DESARGUES, K33, N7_WORST
from rigidbound.graph import Graph
from rigidbound.homotopy import (
    NumericSystem,
    RootCount,
    TrackerOptions,
    count_real_embedding_roots,
    random_coefficient_system,
    real_embedding_roots,
    solve_total_degree,
    specialize_numeric,
)
from rigidbound.polynomial import Polynomial, Variable
from rigidbound.systems import find_systems, make_system, random_rational

X, Y = Variable.unknown(1, 2), Variable.unknown(1, 3)


def test_two_quadrics():
    x, y = Polynomial.var(X), Polynomial.var(Y)
    res = solve_total_degree([x**2 - 1, y**2 - 1], [X, Y])
    c = res.count
    assert (c.total_paths, c.distinct_roots, c.real_roots, c.torus_roots) == (4, 4, 4, 4)
    got = sorted(tuple(np.round(r.real, 8)) for r in res.roots)
    assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert max(res.residuals) < 1e-10


def test_diverging_paths_and_origin_root():
    x, y = Polynomial.var(X), Polynomial.var(Y)
    # x*y = 0, x + y = 0 has only the origin; one of the two paths diverges
    res = solve_total_degree([x * y, x + y - 0], [X, Y])
    assert res.count.torus_roots == 0
    # x^2 - 1 = 0 and x*y - 2 = 0: two roots, two paths lost at infinity
    res = solve_total_degree([x**2 - 1, x * y - 2], [X, Y])
    assert res.count.distinct_roots == 2 and res.count.total_paths == 4
    assert sum(p.status == "diverged" for p in res.paths) == 2


def test_rejects_bad_input():
    x = Polynomial.var(X)
    with pytest.raises(ValueError):
        solve_total_degree([x - 1], [X, Y])
    with pytest.raises(ValueError):
        solve_total_degree([x - Polynomial.var(Variable.parameter(1, 2))], [X])
    with pytest.raises(ValueError):
        NumericSystem([(np.zeros((1, 2), dtype=int), np.ones(1))])


def test_root_count_invariants():
    with pytest.raises(AssertionError):
        RootCount(total_paths=2, finite_roots=3, distinct_roots=1, real_roots=0, torus_roots=0)


def test_json_report_is_reproducible():
    x, y = Polynomial.var(X), Polynomial.var(Y)
    a = solve_total_degree([x**2 - 2, x * y - 3], [X, Y], seed=4).to_json()
    b = solve_total_degree([x**2 - 2, x * y - 3], [X, Y], seed=4).to_json()
    assert a == b and a["count"]["distinct_roots"] == 2 and a["tolerances"]["dedup_tol"] == 1e-6


@pytest.mark.parametrize("fx", [DESARGUES, K33, N7_WORST], ids=lambda f: f.name)
def test_generic_coefficients_reach_mv(fx):
    sys = make_system(build_cm(fx.graph), fx.system)
    supports = [sorted(p.points) for p in sys.polytopes()]
    F = random_coefficient_system(supports, np.random.default_rng(7))
    res = solve_total_degree(F, seed=7)
    assert res.count.torus_roots == fx.mv
    # no two paths may end on the same root
    assert res.count.finite_roots == res.count.distinct_roots
    assert not res.count.unreliable


def test_desargues_random_parameters():
    cm = build_cm(DESARGUES.graph)
    sys = make_system(cm, DESARGUES.system)
    rnd = random.Random(0)
    vals = {v: random_rational(rnd) for v in cm.parameters}
    polys = [specialize(p, vals) for p in sys.polynomials]
    res = solve_total_degree(polys, sys.system_unknowns, seed=0)
    assert res.count.torus_roots == 12
    assert all(r < 1e-10 for r in res.residuals)


def test_k33_random_parameters_stay_below_mv():
    # Cayley-Menger coefficients are not generic for this support: fewer than 11 roots
    cm = build_cm(K33.graph)
    sys = make_system(cm, K33.system)
    rnd = random.Random(0)
    for _ in range(3):
        vals = {v: random_rational(rnd) for v in cm.parameters}
        polys = [specialize(p, vals) for p in sys.polynomials]
        res = solve_total_degree(polys, sys.system_unknowns, seed=0)
        assert 1 <= res.count.torus_roots < 11


def test_specialize_numeric_matches_exact():
    cm = build_cm(DESARGUES.graph)
    sys = make_system(cm, DESARGUES.system)
    rnd = random.Random(5)
    vals = {v: random_rational(rnd) for v in cm.parameters}
    order = list(sys.system_unknowns)
    F = specialize_numeric(sys.polynomials, vals, order)
    G = NumericSystem.from_polynomials([specialize(p, vals) for p in sys.polynomials], order)
    z = np.random.default_rng(0).normal(size=(5, 3)) + 0j
    # both are normalised by their largest coefficient
    assert np.allclose(F.value(z), G.value(z))


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_torus_roots_never_exceed_mv(seed):
    sys = make_system(build_cm(DESARGUES.graph), DESARGUES.system)
    supports = [sorted(p.points) for p in sys.polytopes()]
    rng = np.random.default_rng(seed)
    F = random_coefficient_system(supports, rng)
    res = solve_total_degree(F, seed=seed)
    assert res.count.torus_roots <= 12
    assert all(r < TrackerOptions().residual_tol for r in res.residuals)


class TestRealEmbeddingRoots:
    def test_four_vertex_h1(self):
        g = Graph.from_string("12 13 14 23 24")
        sys = find_systems(build_cm(g))[0]
        for s in range(5):
            assert count_real_embedding_roots(g, sys, sample_lengths(g, s), seed=s) == 2

    def test_desargues_contains_source(self, desargues):
        sys = make_system(build_cm(desargues), DESARGUES.system)
        for s in range(3):
            L = sample_lengths(desargues, s)
            roots, points = real_embedding_roots(desargues, sys, L, seed=s)
            assert 1 <= len(roots) <= 12
            src = L.source
            want = np.array([np.sum((src[v.i - 1] - src[v.j - 1]) ** 2) for v in sys.system_unknowns])
            assert any(np.allclose(r, want, rtol=1e-6) for r in roots)
            for P in points:
                for u, v in desargues.sorted_edges():
                    assert np.isclose(np.sum((P[u - 1] - P[v - 1]) ** 2), L[(u, v)], rtol=1e-6)

    @pytest.mark.parametrize("n", [5, 6])
    def test_at_least_one_root_on_census(self, n):
        from rigidbound.graph import generate_laman

        for g in generate_laman(n):
            sys = find_systems(build_cm(g), rank=True)[0]
            assert count_real_embedding_roots(g, sys, sample_lengths(g, 1), seed=1) >= 1
