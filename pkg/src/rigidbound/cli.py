"""Command line entry point: ``rigidbound analyze|table|census|experiment``."""

from __future__ import annotations

import argparse
import json
import sys

from rigidbound.bounds import (
    AnalysisOptions,
    MVDisagreement,
    analyze,
    h2_multiplier_experiment,
    table,
)
from rigidbound.graph import canonical_code, classify, generate_laman, read_edgelist

EXIT_OK = 0
EXIT_NOT_LAMAN = 2
EXIT_MV_DISAGREEMENT = 3


def _emit(payload, text: str, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(
        seed=args.seed,
        verify=getattr(args, "verify", False),
        allow_n2_conjecture=getattr(args, "allow_n2_conjecture", False),
    )


def cmd_analyze(args) -> int:
    g = read_edgelist(args.edgelist)
    rep = analyze(g, _options(args))
    text = rep.summary()
    if rep.verification:
        text += "\nverification: " + ", ".join(f"{k}={v}" for k, v in sorted(rep.verification.items()))
    _emit(rep.to_json(), text, args.json)
    return EXIT_OK if rep.laman else EXIT_NOT_LAMAN


def cmd_table(args) -> int:
    rows = table(args.n_max, _options(args))
    lines = [f"{'n':>3} {'bound':>6}  note"]
    for r in rows:
        if r.source == "cited":
            note = "heuristic (published value, not computed)"
        elif r.heuristic:
            note = "heuristic (4 x previous row)"
        else:
            note = f"{r.graphs} graphs, {r.h2_graphs} H2, max at {r.argmax}"
        lines.append(f"{r.n:>3} {r.bound:>6}  {note}")
    _emit({"rows": [r.to_json() for r in rows]}, "\n".join(lines), args.json)
    return EXIT_OK


def cmd_census(args) -> int:
    graphs = generate_laman(args.n)
    items = []
    for g in graphs:
        items.append(
            {
                "canonical_code": canonical_code(g),
                "class": classify(g).value,
                "edges": [list(e) for e in g.sorted_edges()],
            }
        )
    lines = [f"{len(graphs)} Laman graphs on {args.n} vertices"]
    lines += [f"{it['class']}  " + " ".join(f"{u}{v}" for u, v in it["edges"]) for it in items]
    text = "\n".join(lines)
    _emit({"n": args.n, "count": len(graphs), "graphs": items}, text, args.json)
    return EXIT_OK


def cmd_experiment(args) -> int:
    rows = h2_multiplier_experiment(args.n_max, _options(args))
    flagged = [r for r in rows if r.exceeds_4]
    worst_h2 = max((r.ratio for r in rows if r.step == "H2"), default=None)
    lines = [f"{len(rows)} extensions examined up to n = {args.n_max}"]
    lines.append(f"largest ratio after an H2 step: {worst_h2}")
    lines.append(f"H2 steps with ratio > 4: {len(flagged)}")
    for r in flagged:
        lines.append(f"  {r.parent} -> {r.child}: {r.parent_bound} -> {r.child_bound}")
    payload = {
        "n_max": args.n_max,
        "extensions": [r.to_json() for r in rows],
        "max_h2_ratio": None if worst_h2 is None else str(worst_h2),
        "counterexamples": len(flagged),
    }
    _emit(payload, "\n".join(lines), args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rigidbound", description="Embedding-count bounds for Laman graphs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="bound for one graph")
    a.add_argument("edgelist")
    a.add_argument("--verify", action="store_true", help="cross-check with homotopy / enumeration")
    a.add_argument("--allow-n2-conjecture", action="store_true", help="do not double (n-2)-size system bounds")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("table", parents=[common], help="maximum bound per vertex count")
    t.add_argument("--n-max", type=int, default=7)
    t.add_argument("--allow-n2-conjecture", action="store_true")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("census", parents=[common], help="list Laman graphs up to isomorphism")
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_census)

    e = sub.add_parser("experiment", help="experiments")
    esub = e.add_subparsers(dest="experiment", required=True)
    h2 = esub.add_parser("h2", parents=[common], help="bound ratios across single Henneberg steps")
    h2.add_argument("--n-max", type=int, default=6)
    h2.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MVDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MV_DISAGREEMENT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
