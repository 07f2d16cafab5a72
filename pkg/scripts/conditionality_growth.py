"""Signed-indicator witness growth of the rotated trigonometric basis for several a."""
import argparse
from dataclasses import dataclass

import numpy as np

from tsirelson_greedy.reports import Report
from tsirelson_greedy.trig import loglog_slope, rotated_witness_ratios


@dataclass
class GrowthConfig:
    a_values: tuple = (0.3, 0.5, 0.7, 0.9)
    mmin: int = 8
    mmax: int = 100


def run(cfg: GrowthConfig) -> Report:
    ms = np.arange(cfg.mmin, cfg.mmax + 1)
    rep = Report("conditionality_growth", {"a": list(cfg.a_values), "mmin": cfg.mmin, "mmax": cfg.mmax})
    rep.header = ["m", *(f"a={a:g}" for a in cfg.a_values)]
    cols, slopes = [], {}
    for a in cfg.a_values:
        r = rotated_witness_ratios(a, ms)
        cols.append(r)
        slopes[f"{a:g}"] = loglog_slope(ms, r)
    rep.rows = [[int(m), *(c[i] for c in cols)] for i, m in enumerate(ms)]
    rep.summary = {"slopes": slopes}
    return rep


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mmax", type=int, default=100)
    ap.add_argument("--out", default="reports")
    a = ap.parse_args()
    rep = run(GrowthConfig(mmax=a.mmax))
    rep.write(a.out)
    for a_, s in rep.summary["slopes"].items():
        print(f"a = {a_}: witness slope {s:.4f}")
