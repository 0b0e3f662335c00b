"""Monte Carlo scaling on paths and complete graphs.

The path from two adjacent maxima takes n(n-2) rounds on average and the
complete graph n*H(n-2); the ratio columns should hover around 1.
"""
import sys

from maxdyn.estimator import rows_to_csv, scaling_study

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
for fam in ("path", "complete"):
    rows = scaling_study(fam, [8, 16, 32], trials, seed=7)
    for r in rows:
        print(f"{fam:>8} n={r['n']:>3}  mean {r['mean']:9.2f} +- {r['se']:.2f}  "
              f"ratio to {r['reference']} {r['ratio_reference']:.3f}")
    if fam == "path":
        print(rows_to_csv(rows))
