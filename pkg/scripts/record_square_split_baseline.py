"""Record the square-split regression baseline used by the acceptance suite."""
import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from tsirelson_greedy.cli import square_split_ratios
from tsirelson_greedy.reports import atomic_write, make_rng

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "square_split_baseline.json"


@dataclass
class BaselineConfig:
    n: int = 16
    samples: int = 500
    seed: int = 0


def record(cfg: BaselineConfig, out: Path) -> float:
    ratios = square_split_ratios(cfg.n, cfg.samples, make_rng(cfg.seed))
    const = max(ratios) / min(ratios)
    atomic_write(out, json.dumps({"constant": const, **asdict(cfg)}, indent=2) + "\n")
    return const


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    a = ap.parse_args()
    const = record(BaselineConfig(a.n, a.samples, a.seed), a.out)
    print(f"constant {const:.6f} -> {a.out}")


if __name__ == "__main__":
    main()
