import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidbound.cayley import (
    build_cm,
    cm_det_value,
    embeddable_check,
    minor_poly,
    specialize,
    squared_distances,
)
from rigidbound.graph import Graph
from rigidbound.polynomial import Polynomial, Variable


def names(vs):
    return {str(v) for v in vs}


def test_cm_structure(desargues, k33, triangle):
    cm = build_cm(desargues)
    assert names(cm.unknowns) == {"x_1_5", "x_1_6", "x_2_4", "x_2_6", "x_3_4", "x_3_5"}
    assert names(cm.parameters) == {f"c_{u}_{v}" for u, v in desargues.sorted_edges()}
    assert names(build_cm(k33).unknowns) == {"x_1_2", "x_1_3", "x_2_3", "x_4_5", "x_4_6", "x_5_6"}
    assert build_cm(triangle).unknowns == []
    B = cm.entries
    assert B[0][0] == 0 and all(B[0][i] == 1 == B[i][0] for i in range(1, 7))
    assert all(B[i][i] == 0 and B[i][j] == B[j][i] for i in range(7) for j in range(7))


@pytest.mark.parametrize("n", [5, 6, 7])
def test_unknown_count(n):
    from rigidbound.graph import generate_laman

    for g in generate_laman(n)[:5]:
        assert len(build_cm(g).unknowns) == n * (n - 1) // 2 - (2 * n - 3)


def test_two_point_minor():
    g = Graph.from_string("12 13 23")
    p = minor_poly(build_cm(g), [1, 2])
    assert p == 2 * Polynomial.var(Variable.parameter(1, 2))


def test_three_point_equilateral():
    cm = build_cm(Graph.from_string("12 13 23"))
    p = minor_poly(cm, [1, 2, 3])
    s = Fraction(random.Random(1).randint(1, 1000), 7)
    val = p.evaluate({v: s for v in p.variables})
    assert val == -3 * s**2
    assert val == -16 * (3 * s**2 / 16)


def test_desargues_minor_unknowns(desargues):
    p = minor_poly(build_cm(desargues), [1, 4, 5, 6])
    assert names(p.unknowns) == {"x_1_5", "x_1_6"}


def test_four_point_minors_are_cubic(n7_worst):
    cm = build_cm(n7_worst)
    for idx in itertools.combinations(range(1, 8), 4):
        p = minor_poly(cm, idx)
        assert {sum(e) for e in p.terms} == {3}


def test_minor_validation(desargues):
    cm = build_cm(desargues)
    for bad in ([1], [1, 1, 2], [0, 1, 2], [1, 2, 9], [1, 2, 3, 4, 5, 6]):
        with pytest.raises(ValueError):
            minor_poly(cm, bad)


@given(st.permutations([1, 3, 4, 6]))
def test_minor_permutation_invariant(perm):
    cm = build_cm(Graph.from_string("12 13 14 23 25 36 45 46 56"))
    assert minor_poly(cm, perm) == minor_poly(cm, [1, 3, 4, 6])


@settings(max_examples=25)
@given(st.integers(2, 5), st.randoms(use_true_random=False))
def test_minor_matches_exact_numeric_determinant(k, rnd):
    g = Graph.from_string("12 13 14 23 25 36 45 46 56")
    cm = build_cm(g)
    idx = sorted(rnd.sample(range(1, 7), k))
    dist = {(i, j): Fraction(rnd.randint(1, 500), rnd.randint(1, 50)) for i, j in itertools.combinations(range(1, 7), 2)}
    p = minor_poly(cm, idx)
    val = p.evaluate({v: dist[v.pair] for v in p.variables})
    assert val == cm_det_value(dist, idx)


def test_specialize(desargues):
    c12 = Variable.parameter(1, 2)
    assert specialize(2 * Polynomial.var(c12), {c12: 5}) == Polynomial.constant(10)
    x = Polynomial.var(Variable.unknown(1, 5))
    assert specialize(x, {}) == x
    p = minor_poly(build_cm(desargues), [1, 2, 3, 5])
    rnd = random.Random(3)
    vals = {v: Fraction(rnd.randint(1, 10007), 1009) for v in p.parameters}
    q = specialize(p, vals)
    assert q.unknowns == p.unknowns and not q.parameters
    assert q.support(sorted(p.unknowns)) == p.support(sorted(p.unknowns))
    with pytest.raises(ValueError):
        specialize(p, {})


class TestEmbeddable:
    def test_unit_square(self):
        D = squared_distances(np.array([[0, 0], [1, 0], [1, 1], [0, 1]]))
        assert embeddable_check(D, 2)

    def test_triangle_inequality(self):
        D = np.array([[0, 1, 1], [1, 0, 9], [1, 9, 0]], dtype=float)
        res = embeddable_check(D, 2)
        assert not res and "D(1,2,3)" in res.violation

    def test_spatial_points_fail_rank(self, rng):
        for _ in range(20):
            D = squared_distances(rng.random((4, 3)))
            res = embeddable_check(D, 2)
            assert not res and res.rank == 5

    def test_input_validation(self):
        with pytest.raises(ValueError):
            embeddable_check(np.array([[0, 1], [2, 0]]))
        with pytest.raises(ValueError):
            embeddable_check(np.array([[0, -1], [-1, 0]]))

    @given(st.integers(2, 7), st.integers(0, 2**32 - 1))
    def test_planar_samples_pass(self, n, seed):
        pts = np.random.default_rng(seed).random((n, 2))
        D = squared_distances(pts)
        if np.any(D[~np.eye(n, dtype=bool)] < 1e-6):
            return
        assert embeddable_check(D, 2)

    @given(st.integers(4, 7), st.integers(0, 2**32 - 1))
    def test_spatial_samples_fail(self, n, seed):
        pts = np.random.default_rng(seed).random((n, 3))
        assert not embeddable_check(squared_distances(pts), 2)
