"""Bound ratios across single Henneberg steps, grouped by step type.

Prints a histogram of child/parent ratios for H1 and H2 steps and lists any
H2 step whose ratio exceeds 4.
"""

import argparse
from collections import Counter

from rigidbound.bounds import h2_multiplier_experiment


def main():
    ap = argparse.ArgumentParser(description="H2 multiplier experiment")
    ap.add_argument("--n-max", type=int, default=7)
    args = ap.parse_args()

    rows = h2_multiplier_experiment(args.n_max)
    for step in ("H1", "H2"):
        hist = Counter(r.ratio for r in rows if r.step == step)
        print(f"{step} steps: {sum(hist.values())}")
        for ratio, k in sorted(hist.items()):
            print(f"  ratio {str(ratio):>6}: {k}")
    bad = [r for r in rows if r.exceeds_4]
    print(f"H2 steps with ratio > 4: {len(bad)}")
    for r in bad:
        print(f"  {r.parent} -> {r.child}  {r.parent_bound} -> {r.child_bound}")


if __name__ == "__main__":
    main()
