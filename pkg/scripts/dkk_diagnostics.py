"""Diagnostics for the finite-scale conditional almost greedy basis over a (p, a) grid."""
import argparse
from dataclasses import dataclass

import numpy as np

from tsirelson_greedy.dkk import build_ag_basis, check_ag_hypothesis, loglog_slope, partial_sum_ratios
from tsirelson_greedy.finvec import FinVec
from tsirelson_greedy.greedy_analysis import almost_greedy_gap, quasi_greedy_ratio
from tsirelson_greedy.reports import Report, make_rng


@dataclass
class DiagConfig:
    jmax: int = 3
    samples: int = 10
    seed: int = 0
    ps: tuple = (1.5, 2.0, 3.0)
    as_: tuple = (0.5, 0.7, 0.9)


def run(cfg: DiagConfig) -> Report:
    rng = make_rng(cfg.seed)
    rep = Report("dkk_diagnostics", {"jmax": cfg.jmax, "samples": cfg.samples, "seed": cfg.seed,
                                     "p": list(cfg.ps), "a": list(cfg.as_)})
    rep.header = ["p", "a", "dim", "partial_sum_max", "partial_sum_slope", "quasi_greedy", "almost_greedy"]
    for p in cfg.ps:
        for a in cfg.as_:
            try:
                check_ag_hypothesis(p, a)
            except ValueError:
                continue
            ag = build_ag_basis(p, a, cfg.jmax)
            ps = partial_sum_ratios(ag.basis, ag.dimension, cfg.samples, rng)
            ms = sorted(ps)
            vecs = [FinVec.from_dense(rng.standard_normal(min(ag.dimension, 10))) for _ in range(cfg.samples)]
            qg = quasi_greedy_ratio(ag.basis, vecs)
            agg = max(almost_greedy_gap(ag.basis, f, 3) for f in vecs[:10])
            rep.rows.append([p, a, ag.dimension, max(ps.values()), loglog_slope(ms, [ps[m] for m in ms]), qg, agg])
    rep.summary = {"max_partial_sum_slope": float(np.max([r[4] for r in rep.rows]))}
    return rep


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--jmax", type=int, default=3)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="reports")
    a = ap.parse_args()
    rep = run(DiagConfig(a.jmax, a.samples, a.seed))
    rep.write(a.out)
    print(rep.csv_text())
