"""Recompute the maximum-bound table and write it to a JSON file.

    python3 scripts/reproduce_table.py --n-max 7 --out results/table.json
"""

import argparse
import json
import time
from pathlib import Path

from rigidbound.bounds import AnalysisOptions, table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = table(args.n_max, AnalysisOptions(seed=args.seed))
    elapsed = time.perf_counter() - t0
    for r in rows:
        tag = r.source if r.heuristic else f"{r.graphs} graphs, {r.h2_graphs} H2"
        print(f"n={r.n:2d}  bound={r.bound:5d}  {tag}")
    print(f"computed in {elapsed:.1f}s")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps([r.to_json() for r in rows], indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
