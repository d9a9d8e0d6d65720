from fractions import Fraction

import pytest

from rigidbound.bounds import (
    AnalysisOptions,
    BoundReport,
    MVDisagreement,
    Rule,
    analyze,
    bound_ratio,
    census_reports,
    h2_multiplier_experiment,
    table,
)
from rigidbound.embed import enumerate_h1, sample_lengths
from rigidbound.fixtures import DESARGUES, K33, N7_WORST, TABLE
from rigidbound.graph import Graph, GraphClass, generate_laman, h1_witness
from rigidbound.systems import SizeClass


@pytest.mark.parametrize("fx", [DESARGUES, K33, N7_WORST], ids=lambda f: f.name)
def test_fixture_reports(fx):
    rep = analyze(fx.graph)
    assert rep.laman and rep.graph_class is GraphClass.H2
    assert rep.mv == rep.mv_mixed_cells == fx.mv
    assert rep.bound_mod_rigid == fx.bound
    assert rep.rule_applied is Rule.MV_TIMES_2
    assert rep.chosen_system["size_class"] == "NMinus3"
    assert not rep.conjectural and not rep.possibly_loose


def test_non_laman():
    g = Graph.from_string("12 13 14 23 24 34")
    rep = analyze(g)
    assert not rep.laman and rep.bound_mod_rigid is None
    assert "not Laman" in rep.summary()


def test_h1_power_rule():
    g = Graph.from_string("12 13 14 23 24 15 45")
    rep = analyze(g)
    assert rep.rule_applied is Rule.H1_POWER and rep.bound_mod_rigid == 8 and rep.mv is None


def test_h1_cross_check_with_cm_pipeline():
    g = Graph.from_string("12 13 14 23 24")
    rep = analyze(g, AnalysisOptions(cm_for_h1=True, verify=True))
    assert rep.bound_mod_rigid == 4 and rep.mv == 2
    v = rep.verification
    assert v["h1_embeddings_mod_reflection"] == 2
    assert 2 * v["real_embedding_roots"] == rep.bound_mod_rigid


def test_verification_for_h2(desargues):
    rep = analyze(desargues, AnalysisOptions(verify=True, seed=3))
    v = rep.verification
    assert v["generic_torus_roots"] == 12
    assert 1 <= v["real_embedding_roots"] <= rep.mv


def test_report_invariants_are_enforced():
    with pytest.raises(AssertionError):
        BoundReport("x", 5, None, True, rule_applied=Rule.H1_POWER, bound_mod_rigid=7)
    with pytest.raises(AssertionError):
        BoundReport("x", 6, None, True, mv=10, bound_mod_rigid=10, rule_applied=Rule.MV_TIMES_2,
                    chosen_system={"size_class": "NMinus3"})
    with pytest.raises(AssertionError):
        BoundReport("x", 6, None, True, mv=10, bound_mod_rigid=20, rule_applied=Rule.MV_TIMES_2,
                    chosen_system={"size_class": "NMinus2"})


def _force_n_minus_2(monkeypatch):
    import rigidbound.bounds as b

    real = b.find_systems

    def only_n2(cm, size_class=SizeClass.N_MINUS_3, **kw):
        return [] if size_class is SizeClass.N_MINUS_3 else real(cm, size_class, **kw)

    monkeypatch.setattr(b, "find_systems", only_n2)


def test_n_minus_2_fallback_is_doubled_by_default(monkeypatch, desargues):
    _force_n_minus_2(monkeypatch)
    rep = analyze(desargues)
    assert rep.chosen_system["size_class"] == "NMinus2"
    assert rep.rule_applied is Rule.MV_TIMES_2 and rep.possibly_loose
    assert rep.bound_mod_rigid == 2 * rep.mv


def test_n_minus_2_conjecture_flag(monkeypatch, desargues):
    _force_n_minus_2(monkeypatch)
    rep = analyze(desargues, AnalysisOptions(allow_n2_conjecture=True))
    assert rep.rule_applied is Rule.MV_CONJECTURE_NO_DOUBLE and rep.conjectural
    assert rep.bound_mod_rigid == rep.mv


def test_mv_disagreement_raises(monkeypatch, desargues):
    import rigidbound.bounds as b
    from rigidbound.mixedvol import MVMethod, MixedVolumeResult

    monkeypatch.setattr(b, "mv_mixed_cells", lambda polys, seed=0: MixedVolumeResult(13, MVMethod.MIXED_CELLS, tuple(polys)))
    with pytest.raises(MVDisagreement):
        analyze(desargues)


def test_table_rows():
    rows = table(6)
    assert [r.bound for r in rows] == [2, 4, 8, 24, 96, 128, 512, 2048]
    assert [r.heuristic for r in rows] == [False] * 4 + [True] * 4
    with pytest.raises(ValueError):
        table(8)


def test_table_n6_max_is_desargues():
    from rigidbound.graph import is_isomorphic

    reps = census_reports(6)
    best = [r for r in reps if r.bound_mod_rigid == 24]
    assert len(best) == 1
    g = Graph.from_string(best[0].graph)
    assert is_isomorphic(g, DESARGUES.graph)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_h1_bounds_are_tight(n):
    for rep, g in zip(census_reports(n), generate_laman(n)):
        if rep.graph_class is GraphClass.H1:
            E = enumerate_h1(g, h1_witness(g), sample_lengths(g, 0))
            assert rep.bound_mod_rigid == 2 * len(E) == 2 ** (n - 2)


def test_h2_experiment():
    rows = h2_multiplier_experiment(6)
    assert rows and not any(r.exceeds_4 for r in rows)
    h1_from_h1 = [r for r in rows if r.step == "H1" and r.child_bound == 2 ** (r.n_child - 2)
                  and r.parent_bound == 2 ** (r.n_child - 3)]
    assert h1_from_h1 and all(r.ratio == 2 for r in h1_from_h1)
    to_desargues = [r for r in rows if r.step == "H2" and r.child_bound == 24]
    assert to_desargues and all(r.ratio <= 4 for r in to_desargues)
    rep = analyze(DESARGUES.graph)
    assert bound_ratio(rep, rep) == Fraction(1)
