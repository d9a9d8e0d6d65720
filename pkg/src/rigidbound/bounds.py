"""Bound reports per graph, census tables and the H2 multiplier experiment."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from rigidbound.cayley import build_cm
from rigidbound.embed import enumerate_h1, sample_lengths, verify_embedding
from rigidbound.graph import (
    Graph,
    GraphClass,
    canonical_code,
    classify,
    expansions,
    generate_laman,
    h1_witness,
    is_laman_pebble,
)
from rigidbound.homotopy import count_real_embedding_roots, random_coefficient_system, solve_total_degree
from rigidbound.mixedvol import bezout_bound, mv_mixed_cells
from rigidbound.systems import DEFAULT_BUDGET, MinorSystem, SizeClass, find_systems, system_mv

COMPUTED_MAX_N = 7
HEURISTIC_MAX_N = 10
# previously published bound for n = 8; not derivable here (4 * 56 = 224 would be weaker)
CITED_BOUNDS = {8: 128}


class Rule(str, enum.Enum):
    H1_POWER = "H1Power"
    MV_TIMES_2 = "MVTimes2"
    MV_CONJECTURE_NO_DOUBLE = "MVConjectureNoDouble"


class MVDisagreement(RuntimeError):
    """The two mixed-volume algorithms returned different values."""


@dataclass(frozen=True)
class AnalysisOptions:
    seed: int = 0
    verify: bool = False
    allow_n2_conjecture: bool = False
    budget: int = DEFAULT_BUDGET
    cm_for_h1: bool = False  # also run the minor-system pipeline on H1 graphs


@dataclass
class BoundReport:
    graph: str
    n: int
    canonical_code: int | None
    laman: bool
    graph_class: GraphClass | None = None
    chosen_system: dict | None = None
    systems_found: int = 0
    mv: int | None = None
    mv_mixed_cells: int | None = None
    bezout: int | None = None
    bound_mod_rigid: int | None = None
    rule_applied: Rule | None = None
    conjectural: bool = False
    possibly_loose: bool = False
    verification: dict | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.rule_applied is Rule.H1_POWER:
            assert self.bound_mod_rigid == 2 ** (self.n - 2)
        elif self.rule_applied is Rule.MV_TIMES_2:
            assert self.bound_mod_rigid == 2 * self.mv
            size = self.chosen_system["size_class"]
            assert size == SizeClass.N_MINUS_3.value or self.possibly_loose
        elif self.rule_applied is Rule.MV_CONJECTURE_NO_DOUBLE:
            assert self.bound_mod_rigid == self.mv and self.conjectural
            assert self.chosen_system["size_class"] == SizeClass.N_MINUS_2.value

    def to_json(self) -> dict:
        d = asdict(self)
        d["graph_class"] = self.graph_class.value if self.graph_class else None
        d["rule_applied"] = self.rule_applied.value if self.rule_applied else None
        return d

    def summary(self) -> str:
        if not self.laman:
            return f"{self.graph}: not Laman, no bound"
        parts = [f"{self.graph}: {self.graph_class.value}"]
        if self.bound_mod_rigid is None:
            parts.append("no bound (no well-constrained system found)")
        else:
            parts.append(f"bound {self.bound_mod_rigid} mod rigid ({self.rule_applied.value})")
        if self.mv is not None:
            parts.append(f"mv {self.mv}, bezout {self.bezout}")
        if self.chosen_system:
            eqs = " ".join("D(" + ",".join(map(str, q)) + ")" for q in self.chosen_system["equations"])
            parts.append(f"system {eqs}")
        if self.conjectural:
            parts.append("conjectural")
        if self.possibly_loose:
            parts.append("possibly loose")
        return "; ".join(parts)


def _best_system(g: Graph, size: SizeClass, opts: AnalysisOptions) -> tuple[MinorSystem | None, int]:
    found = find_systems(build_cm(g), size, budget=opts.budget, seed=opts.seed, rank=True)
    return (found[0] if found else None), len(found)


def _verify(g: Graph, rep: BoundReport, sys: MinorSystem | None, opts: AnalysisOptions) -> dict:
    out: dict = {"seed": opts.seed}
    lengths = sample_lengths(g, opts.seed)
    if rep.graph_class is GraphClass.H1:
        emb = enumerate_h1(g, h1_witness(g), lengths)
        out["h1_embeddings_mod_reflection"] = len(emb)
        out["h1_real_embeddings_mod_reflection"] = len(emb.real())
        out["h1_all_verified"] = all(verify_embedding(g, e, lengths) for e in emb.embeddings)
    if sys is not None:
        supports = [sorted(p.points) for p in sys.polytopes()]
        F = random_coefficient_system(supports, np.random.default_rng(opts.seed))
        res = solve_total_degree(F, seed=opts.seed)
        out["generic_torus_roots"] = res.count.torus_roots
        out["generic_unreliable"] = res.count.unreliable
        out["real_embedding_roots"] = count_real_embedding_roots(g, sys, lengths, seed=opts.seed)
    return out


def analyze(g: Graph, options: AnalysisOptions | None = None) -> BoundReport:
    """Laman check, classification, system search and bound for one graph."""
    opts = options or AnalysisOptions()
    laman = g.n >= 3 and is_laman_pebble(g)
    rep = BoundReport(
        graph=" ".join(f"{u}{v}" if g.n < 10 else f"{u}-{v}" for u, v in g.sorted_edges()),
        n=g.n,
        canonical_code=canonical_code(g) if g.n <= 8 else None,
        laman=laman,
    )
    if not laman:
        return rep
    rep.graph_class = classify(g)
    sys = None
    if rep.graph_class is GraphClass.H1:
        rep.rule_applied = Rule.H1_POWER
        rep.bound_mod_rigid = 2 ** (g.n - 2)
    if (rep.graph_class is GraphClass.H2 or opts.cm_for_h1) and g.n >= 4:
        size = SizeClass.N_MINUS_3
        sys, rep.systems_found = _best_system(g, size, opts)
        if sys is None:
            size = SizeClass.N_MINUS_2
            sys, rep.systems_found = _best_system(g, size, opts)
            if sys is not None:
                rep.notes.append("no (n-3)-size system found; using an (n-2)-size system")
        if sys is not None:
            rep.chosen_system = sys.to_json()
            rep.mv = system_mv(sys)
            rep.mv_mixed_cells = mv_mixed_cells(sys.polytopes(), seed=opts.seed).value
            rep.bezout = bezout_bound(sys)
            if rep.mv != rep.mv_mixed_cells:
                raise MVDisagreement(
                    f"{rep.graph}: inclusion-exclusion {rep.mv} vs mixed cells {rep.mv_mixed_cells}"
                )
            if rep.rule_applied is None:
                if size is SizeClass.N_MINUS_2 and opts.allow_n2_conjecture:
                    rep.rule_applied = Rule.MV_CONJECTURE_NO_DOUBLE
                    rep.bound_mod_rigid = rep.mv
                    rep.conjectural = True
                else:
                    rep.rule_applied = Rule.MV_TIMES_2
                    rep.bound_mod_rigid = 2 * rep.mv
                    rep.possibly_loose = size is SizeClass.N_MINUS_2
            rep.__post_init__()
    if opts.verify:
        rep.verification = _verify(g, rep, sys, opts)
    return rep


# ---------------------------------------------------------------------------
# census tables


@dataclass
class TableRow:
    n: int
    bound: int | None
    heuristic: bool
    source: str = "computed"  # computed | cited | x4
    graphs: int | None = None
    h2_graphs: int | None = None
    argmax: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


def census_reports(n: int, options: AnalysisOptions | None = None) -> list[BoundReport]:
    """Reports for every Laman graph on ``n`` vertices, in canonical order."""
    return [analyze(g, options) for g in generate_laman(n)]


def table(n_max: int, options: AnalysisOptions | None = None) -> list[TableRow]:
    """Maximum bound per vertex count.

    Rows up to ``n_max`` are computed over the census.  Later rows up to
    n = 10 are heuristic: the published n = 8 value where available,
    otherwise four times the previous row.
    """
    if not 3 <= n_max <= COMPUTED_MAX_N:
        raise ValueError(f"computed rows need 3 <= n_max <= {COMPUTED_MAX_N}")
    rows = []
    for n in range(3, n_max + 1):
        reps = census_reports(n, options)
        best = max(reps, key=lambda r: (r.bound_mod_rigid or 0, -(r.canonical_code or 0)))
        rows.append(
            TableRow(
                n,
                best.bound_mod_rigid,
                False,
                graphs=len(reps),
                h2_graphs=sum(r.graph_class is GraphClass.H2 for r in reps),
                argmax=best.graph,
            )
        )
    for n in range(n_max + 1, HEURISTIC_MAX_N + 1):
        if n in CITED_BOUNDS and n > COMPUTED_MAX_N:
            rows.append(TableRow(n, CITED_BOUNDS[n], True, "cited"))
            continue
        prev = rows[-1].bound
        rows.append(TableRow(n, None if prev is None else 4 * prev, True, "x4"))
    return rows


# ---------------------------------------------------------------------------
# H2 multiplier experiment


@dataclass
class ExtensionRatio:
    parent: str
    child: str
    step: str
    n_child: int
    parent_bound: int
    child_bound: int
    ratio: Fraction
    exceeds_4: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["ratio"] = str(self.ratio)
        return d


def bound_ratio(parent: BoundReport, child: BoundReport) -> Fraction:
    return Fraction(child.bound_mod_rigid, parent.bound_mod_rigid)


def h2_multiplier_experiment(n_max: int, options: AnalysisOptions | None = None) -> list[ExtensionRatio]:
    """Child/parent bound ratio for every single Henneberg extension of census graphs.

    Ratios above 4 after an H2 step would contradict the conjectured
    multiplier; they are flagged, never asserted.
    """
    if not 4 <= n_max <= COMPUTED_MAX_N:
        raise ValueError(f"need 4 <= n_max <= {COMPUTED_MAX_N}")
    by_code: dict[int, BoundReport] = {}
    for n in range(3, n_max + 1):
        for rep in census_reports(n, options):
            by_code[rep.canonical_code] = rep
    out = []
    for n in range(3, n_max):
        for g in generate_laman(n):
            parent = by_code[canonical_code(g)]
            seen = set()
            for kind, child in expansions(g):
                code = canonical_code(child)
                if (kind, code) in seen:
                    continue
                seen.add((kind, code))
                crep = by_code[code]
                r = bound_ratio(parent, crep)
                out.append(
                    ExtensionRatio(
                        parent.graph,
                        crep.graph,
                        kind.value,
                        n + 1,
                        parent.bound_mod_rigid,
                        crep.bound_mod_rigid,
                        r,
                        kind.value == "H2" and r > 4,
                    )
                )
    return out
