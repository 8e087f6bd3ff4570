"""Observed temporal order as the grading exponent moves from uniform past 2/(1+alpha).

    python3 scripts/grading_sweep.py --alphas 0.2,0.8 --kappa 1
"""

import argparse
import io

import numpy as np

from cnpi.harness import StudyConfig, run_study
from cnpi.mesh import optimal_grading


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alphas", default="0.2,0.8")
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--M", type=int, default=2048)
    ap.add_argument("--points", type=int, default=7)
    args = ap.parse_args()
    alphas = tuple(float(a) for a in args.alphas.split(","))
    g_opt = optimal_grading(min(alphas))
    print(f"alpha = {min(alphas)}, 2/(1+alpha) = {g_opt:.4f}, expected order min(gamma(1+alpha), 2)")
    print(f"{'gamma':>7}  {'expected':>8}  {'final rate':>10}  rates  (* = finer error below the spatial floor)")
    for gamma in np.linspace(1.0, g_opt + 1.0, args.points):
        cfg = StudyConfig(alphas=alphas, kappa=args.kappa, gamma_rule=float(gamma), M=args.M,
                          timing=False)
        report = run_study(cfg, sink=io.StringIO())
        rates = report.rates
        expected = min(gamma * (1 + min(alphas)), 2.0)
        marks = ["*" if row["N"] in report.below_floor else "" for row in report.rows[1:]]
        print(f"{gamma:7.3f}  {expected:8.2f}  {rates[-1]:10.2f}  "
              + " ".join(f"{r:.2f}{m}" for r, m in zip(rates, marks)))


if __name__ == "__main__":
    main()
