"""Growth exponent of |1_{A_m}| in L_2(|t|^lambda) across a grid of lambda."""
import argparse
from dataclasses import dataclass

import numpy as np

from tsirelson_greedy.reports import Report
from tsirelson_greedy.trig import dirichlet_growth, loglog_slope


@dataclass
class SweepConfig:
    lam_min: float = -0.9
    lam_max: float = 0.9
    steps: int = 19
    mmax: int = 200
    mmin: int = 4
    out: str = "reports"


def sweep(cfg: SweepConfig) -> Report:
    rep = Report("dirichlet_sweep", vars(cfg).copy())
    rep.header = ["lambda", "target", "slope_vs_size", "slope_vs_m", "error"]
    for lam in np.linspace(cfg.lam_min, cfg.lam_max, cfg.steps):
        lam = round(float(lam), 10)
        slope, ms, norms = dirichlet_growth(lam, cfg.mmax, cfg.mmin)
        target = (1 - lam) / 2
        rep.rows.append([lam, target, slope, loglog_slope(ms, norms), slope - target])
    errs = [abs(r[4]) for r in rep.rows]
    rep.summary = {"max_abs_error": max(errs), "worst_lambda": rep.rows[int(np.argmax(errs))][0]}
    return rep


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=19)
    ap.add_argument("--mmax", type=int, default=200)
    ap.add_argument("--out", default="reports")
    a = ap.parse_args()
    rep = sweep(SweepConfig(steps=a.steps, mmax=a.mmax, out=a.out))
    rep.write(a.out)
    for row in rep.rows:
        print("lambda {:+.2f}  target {:.3f}  slope {:.4f}".format(*row[:3]))
    print(f"max |slope - target| = {rep.summary['max_abs_error']:.4f}")
