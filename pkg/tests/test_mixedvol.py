import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidbound.cayley import build_cm
from rigidbound.fixtures import DESARGUES, K33, N7_WORST
from rigidbound.mixedvol import (
    DegenerateLifting,
    MVMethod,
    NewtonPolytope,
    bezout_bound,
    hull_points,
    minkowski_sum,
    mixed_volume,
    mv_inclusion_exclusion,
    mv_mixed_cells,
    newton_polytope,
    normalized_volume,
)
from rigidbound.polynomial import Polynomial, Variable
from rigidbound.systems import make_system

SIMPLEX2 = NewtonPolytope(2, [(0, 0), (1, 0), (0, 1)])
SQUARE = NewtonPolytope(2, [(0, 0), (1, 0), (0, 1), (1, 1)])


def both(polys, seed=0):
    a = mv_inclusion_exclusion(polys)
    b = mv_mixed_cells(polys, seed=seed)
    assert a.method is MVMethod.INCLUSION_EXCLUSION and b.method is MVMethod.MIXED_CELLS
    assert a.value == b.value
    return a.value


def polytopes(m, max_points=8, coord=3):
    pt = st.tuples(*[st.integers(0, coord)] * m)
    return st.lists(pt, min_size=1, max_size=max_points).map(lambda ps: NewtonPolytope(m, ps))


@st.composite
def families(draw, max_dim=3, max_points=8):
    m = draw(st.integers(1, max_dim))
    return [draw(polytopes(m, max_points)) for _ in range(m)]


class TestNewtonPolytope:
    def test_constant(self):
        assert newton_polytope(Polynomial.constant(4), [Variable.unknown(1, 2)]).points == {(0,)}

    def test_parameters_dropped(self):
        x, y, c = Variable.unknown(1, 2), Variable.unknown(1, 3), Variable.parameter(2, 3)
        X, Y, C = map(Polynomial.var, (x, y, c))
        p = X**2 + X * Y + 3 * C * Y
        assert newton_polytope(p, [x, y]).points == {(2, 0), (1, 1), (0, 1)}
        with pytest.raises(ValueError):
            newton_polytope(p, [x])

    def test_desargues_minor_ignores_third_unknown(self):
        sys = make_system(build_cm(DESARGUES.graph), DESARGUES.system)
        order = [str(v) for v in sys.system_unknowns]
        k = order.index("x_3_5")
        P = sys.polytopes()[0]
        assert sys.equations[0].indices == (1, 4, 5, 6)
        assert all(p[k] == 0 for p in P.points)

    def test_validation_and_json(self):
        with pytest.raises(ValueError):
            NewtonPolytope(2, [(1, 2, 3)])
        P = NewtonPolytope(2, [(1, 0), (0, 1), (1, 0)])
        assert len(P.points) == 2
        assert NewtonPolytope.from_json(P.to_json()) == P


class TestVolumes:
    def test_known_volumes(self):
        assert normalized_volume(SQUARE.points, 2) == 2
        assert SQUARE.volume() == 1
        cube = [(a, b, c) for a in (0, 2) for b in (0, 3) for c in (0, 1)]
        assert normalized_volume(cube, 3) == 36
        assert normalized_volume([(0, 0), (1, 1), (2, 2)], 2) == 0

    def test_hull_points_drop_interior(self):
        pts = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
        assert sorted(hull_points(pts)) == [(0, 0), (0, 2), (2, 0), (2, 2)]

    def test_minkowski(self):
        assert minkowski_sum({(0,), (1,)}, {(0,), (2,)}) == {(0,), (1,), (2,), (3,)}


class TestMixedVolume:
    def test_two_triangles(self):
        assert both([SIMPLEX2, SIMPLEX2]) == 1

    def test_two_squares(self):
        assert both([SQUARE, SQUARE]) == 2

    def test_interval(self):
        assert both([NewtonPolytope(1, [(2,), (7,), (4,)])]) == 5

    def test_point_gives_zero(self):
        assert both([NewtonPolytope(2, [(1, 1)]), SQUARE]) == 0

    @pytest.mark.parametrize("fx", [DESARGUES, K33, N7_WORST], ids=lambda f: f.name)
    def test_reference_fixtures(self, fx):
        sys = make_system(build_cm(fx.graph), fx.system)
        assert both(sys.polytopes()) == fx.mv
        assert bezout_bound(sys) >= fx.mv

    def test_bezout(self):
        x, y = Variable.unknown(1, 2), Variable.unknown(1, 3)
        X, Y = Polynomial.var(x), Polynomial.var(y)
        assert bezout_bound([X**2 + Y - 1, Y**2 - 3]) == 4
        assert bezout_bound([X + 2 * Y - 1, 3 * X - Y]) == 1
        sys = make_system(build_cm(DESARGUES.graph), DESARGUES.system)
        assert bezout_bound(sys) == 12

    def test_dimension_checks(self):
        with pytest.raises(ValueError):
            mv_inclusion_exclusion([SQUARE])
        big = [NewtonPolytope(7, [(0,) * 7, (1,) * 7])] * 7
        with pytest.raises(ValueError):
            mv_inclusion_exclusion(big)

    def test_result_json(self):
        d = mv_mixed_cells([SQUARE, SIMPLEX2]).to_json()
        assert d["value"] == 2 and d["method"] == "MixedCells" and len(d["polytopes"]) == 2

    def test_degenerate_retries_exhausted(self, monkeypatch):
        import rigidbound.mixedvol as mvmod

        def always(*a, **k):
            raise DegenerateLifting("forced")

        monkeypatch.setattr(mvmod, "_mixed_cells_once", always)
        with pytest.raises(DegenerateLifting):
            mv_mixed_cells([SQUARE, SQUARE])

    @settings(max_examples=40)
    @given(families())
    def test_algorithms_agree(self, polys):
        both(polys)

    @settings(max_examples=30)
    @given(families(), st.randoms(use_true_random=False))
    def test_symmetric(self, polys, rnd):
        shuffled = list(polys)
        rnd.shuffle(shuffled)
        assert mixed_volume(shuffled) == mixed_volume(polys)

    @settings(max_examples=30)
    @given(families(), st.data())
    def test_translation_invariant(self, polys, data):
        m = len(polys)
        k = data.draw(st.integers(0, m - 1))
        shift = data.draw(st.tuples(*[st.integers(-3, 3)] * m))
        moved = list(polys)
        moved[k] = polys[k].translate(shift)
        assert mixed_volume(moved) == mixed_volume(polys)

    @settings(max_examples=30)
    @given(st.integers(1, 3).flatmap(lambda m: polytopes(m)))
    def test_diagonal_is_normalized_volume(self, P):
        m = P.dim
        assert mixed_volume([P] * m) == math.factorial(m) * P.volume()

    @settings(max_examples=30)
    @given(polytopes(2), polytopes(2), polytopes(2))
    def test_multilinear(self, P1, Q, P2):
        lhs = mixed_volume([P1.minkowski(Q), P2])
        assert lhs == mixed_volume([P1, P2]) + mixed_volume([Q, P2])
