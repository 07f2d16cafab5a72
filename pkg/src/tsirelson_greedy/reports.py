"""Report assembly: deterministic JSON/CSV written atomically, plus the RNG."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy

from . import __version__


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the whole run derives from this one seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(int(seed)).spawn(n)]


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def to_jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [to_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    return str(v)


def format_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def versions() -> dict:
    return {"tsirelson_greedy": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


@dataclass
class Report:
    """One experiment's output: scalar summary, optional per-m table, invariant verdicts."""

    name: str
    config: dict
    mode: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(bool(v) for v in self.invariants.values())

    def check(self, name: str, holds) -> bool:
        self.invariants[name] = bool(holds)
        return bool(holds)

    def json_text(self) -> str:
        doc = {
            "experiment": self.name,
            "config": self.config,
            "versions": versions(),
            "mode": self.mode,
            "summary": self.summary,
            "invariants": self.invariants,
            "ok": self.ok,
        }
        return json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n"

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([format_scalar(v) for v in row])
        return buf.getvalue()

    def write(self, out_dir) -> list[Path]:
        out_dir = Path(out_dir)
        paths = [atomic_write(out_dir / f"{self.name}.json", self.json_text())]
        if self.header:
            paths.append(atomic_write(out_dir / f"{self.name}.csv", self.csv_text()))
        return paths
