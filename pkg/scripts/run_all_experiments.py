"""Run every CLI experiment with desk-scale settings and summarise the exit codes."""
import argparse
import time
from dataclasses import dataclass, field

from tsirelson_greedy.cli import main as tsg


@dataclass
class Suite:
    out: str = "reports"
    seed: int = 0
    quick: bool = False
    runs: list = field(default_factory=list)

    def __post_init__(self):
        n = 60 if self.quick else 500
        self.runs = [
            ["norm", "--space", "tsirelson", "--vec", "[1,1,1,1,1,1]"],
            ["oracle-check", "--n", "8", "--cases", "40" if self.quick else "200"],
            ["fundfn", "--space", "tsirelson", "--mmax", "6", "--window", "12"],
            ["democracy", "--space", "tsirelson", "--mmax", "5", "--window", "10"],
            ["greedy-consts", "--space", "tsirelson", "--dim", "6", "--samples", "20", "--greedy-samples", "2"],
            ["cond-params", "--space", "rot(a=0.5, dim=402)", "--mmax", "8", "--witness-ms", "8:100"],
            *(["dirichlet", "--lambda", lam] for lam in ("-0.5", "0", "0.5")),
            ["dkk-build", "--p", "2", "--a", "0.5", "--jmax", "3"],
            *(["haar-spread", "--u", u, "--p", "2", "--draws", str(n)] for u in ("0", "2", "4")),
            ["continuum", "--prefixes", "50", "--jmax", "12"],
            ["square-split", "--n", "16", "--samples", str(n)],
            ["iso-ratio", "--phi", "fgh(1)", "--p", "1", "--n", "12", "--samples", "50" if self.quick else "200"],
        ]


def run(suite: Suite) -> int:
    failures = 0
    for argv in suite.runs:
        t0 = time.perf_counter()
        code = tsg([*argv, "--seed", str(suite.seed), "--out", suite.out])
        failures += code != 0
        print(f"== {' '.join(argv[:1])}: exit {code} ({time.perf_counter() - t0:.1f}s)\n")
    print(f"{len(suite.runs) - failures}/{len(suite.runs)} experiments passed; reports in {suite.out}/")
    return 1 if failures else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="smaller sample counts")
    a = ap.parse_args()
    raise SystemExit(run(Suite(a.out, a.seed, a.quick)))
