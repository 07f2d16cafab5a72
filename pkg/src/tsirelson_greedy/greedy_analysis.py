"""Thresholding greedy algorithm and basis diagnostics.

Every basis handled here is the unit vector system of some sequence space,
so the coordinate functionals just read entries of a :class:`FinVec`.
(For the weighted trigonometric systems this is the self-duality of the
system under the opposite-weight pairing; for DKK spaces it is the
canonical basis of the constructed space.)
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar

from .core_spaces import SpaceHandle
from .finvec import FinVec

EXHAUSTIVE_CUTOFF = 12
MAX_WINDOW = 24
SUBSET_BUDGET = 1 << 16
COND_EXHAUSTIVE_MAX = 14


class SizeError(ValueError):
    """An exhaustive enumeration would exceed its budget."""


@dataclass(frozen=True)
class BasisHandle:
    """Unit vector basis of ``space``; norms are memoised per vector."""

    space: SpaceHandle
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_cached", lru_cache(maxsize=1 << 16)(self.space.norm))

    def norm(self, f: FinVec):
        return self._cached(f)

    def coefficient(self, f: FinVec, n):
        return f[n]

    def unit(self, n) -> FinVec:
        return FinVec.unit(n)

    def indicator(self, A, signs=None) -> FinVec:
        return FinVec.indicator(A, signs)

    @property
    def unconditional(self) -> bool:
        return bool(self.space.unconditional)

    @property
    def hilbert(self) -> bool:
        return bool(getattr(self.space, "hilbert", False))

    def __str__(self):
        return self.name or str(self.space)


def _ratio(a, b) -> float:
    if b == 0:
        return 1.0 if a == 0 else math.inf
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return float(a) / float(b)


# -- greedy algorithm ----------------------------------------------------------

def greedy_ordering(f: FinVec) -> list:
    """Support sorted by decreasing modulus, ties broken by the smaller index."""
    return sorted(f.support, key=lambda i: (-abs(f[i]), i))


def greedy_set(f: FinVec, m: int) -> list:
    return greedy_ordering(f)[:m]


def greedy_sum(f: FinVec, m: int, basis: BasisHandle | None = None) -> FinVec:
    if m < 0:
        raise ValueError("m must be >= 0")
    return f.restrict(greedy_set(f, m))


# -- democracy and the fundamental function ------------------------------------

def _subsets(window: int, size: int):
    return itertools.combinations(range(1, window + 1), size)


@dataclass
class SizeStats:
    size: int
    max_norm: float
    min_norm: float
    argmax: tuple
    exact: bool


def indicator_stats(basis: BasisHandle, size: int, window: int, rng=None,
                    budget: int = SUBSET_BUDGET, samples: int = 200) -> SizeStats:
    """Max/min of ``|1_A|`` over ``|A| = size``, ``A`` inside ``[1, window]``.

    Exhaustive when ``C(window, size) <= budget``; otherwise prefixes, shifted
    intervals and random sets are tried and the result is only a bracket.
    """
    exact = math.comb(window, size) <= budget
    if exact:
        cands = _subsets(window, size)
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        shifted = [tuple(range(k + 1, k + size + 1)) for k in range(window - size + 1)]
        rand = [tuple(sorted(rng.choice(window, size, replace=False) + 1)) for _ in range(samples)]
        cands = shifted + rand
    best = worst = None
    arg = ()
    for A in cands:
        v = basis.norm(FinVec.indicator(A))
        if best is None or v > best:
            best, arg = v, tuple(A)
        if worst is None or v < worst:
            worst = v
    return SizeStats(size, best, worst, arg, exact)


@dataclass
class FundamentalFunction:
    values: list
    exact: list
    argmax: list

    def __iter__(self):
        return iter(self.values)


def fundamental_function(basis: BasisHandle, mmax: int, window: int | None = None,
                         cutoff: int = EXHAUSTIVE_CUTOFF, rng=None,
                         budget: int = SUBSET_BUDGET) -> FundamentalFunction:
    """``phi(m) = sup_{|A| <= m} |1_A|`` for ``m = 1..mmax``, searched inside ``[1, window]``.

    Entries flagged exact are the true supremum over the window; others are lower bounds.
    """
    window = 2 * mmax if window is None else window
    if window < 2 * mmax:
        raise ValueError(f"window {window} must be at least 2*mmax = {2 * mmax}")
    values, exact, args = [], [], []
    run_max, run_exact, run_arg = None, True, ()
    for m in range(1, mmax + 1):
        allowed = m <= cutoff and window <= MAX_WINDOW
        st = indicator_stats(basis, m, window, rng, budget if allowed else 0)
        if run_max is None or st.max_norm > run_max:
            run_max, run_arg = st.max_norm, st.argmax
        run_exact = run_exact and st.exact
        values.append(run_max)
        exact.append(run_exact)
        args.append(run_arg)
    return FundamentalFunction(values, exact, args)


@dataclass
class DemocracyResult:
    delta: float
    exact: bool
    stats: list


def democracy_ratio(basis: BasisHandle, mmax: int, window: int | None = None, rng=None,
                    budget: int = SUBSET_BUDGET) -> DemocracyResult:
    """``max |1_A| / |1_B|`` over tested ``|A| <= |B| <= mmax``."""
    window = 2 * mmax if window is None else window
    if window < 2 * mmax:
        raise ValueError(f"window {window} must be at least 2*mmax = {2 * mmax}")
    stats = [indicator_stats(basis, k, window, rng, budget) for k in range(1, mmax + 1)]
    delta = 1.0
    for a in range(mmax):
        for b in range(a, mmax):
            delta = max(delta, _ratio(stats[a].max_norm, stats[b].min_norm))
    return DemocracyResult(delta, all(s.exact for s in stats), stats)


# -- greedy-type constants -------------------------------------------------------

def quasi_greedy_ratio(basis: BasisHandle, samples: Iterable[FinVec], ms: Iterable[int] | None = None) -> float:
    """``max |G_m f| / |f|`` over the samples (a lower bound for the quasi-greedy constant)."""
    best = 0.0
    ms = None if ms is None else list(ms)
    for f in samples:
        nf = basis.norm(f)
        if nf == 0:
            continue
        order = greedy_ordering(f)
        for m in (range(1, len(order) + 1) if ms is None else ms):
            best = max(best, _ratio(basis.norm(f.restrict(order[:m])), nf))
    return best


def _candidate_sets(support: Sequence, m: int, budget: int):
    m = min(m, len(support))
    total = sum(math.comb(len(support), k) for k in range(m + 1))
    if total > budget:
        raise SizeError(f"{total} candidate sets exceed the budget {budget}")
    for k in range(m + 1):
        yield from itertools.combinations(support, k)


def almost_greedy_gap(basis: BasisHandle, f: FinVec, m: int, budget: int = SUBSET_BUDGET) -> float:
    """``|f - G_m f|`` over the exact ``min_{|A| <= m} |f - P_A f|``."""
    num = basis.norm(f - greedy_sum(f, m))
    den = min(basis.norm(f.drop(A)) for A in _candidate_sets(f.support, m, budget))
    return _ratio(num, den)


def _descent(basis: BasisHandle, f: FinVec, A: Sequence, sweeps: int, rtol: float) -> float:
    """Coordinate descent on ``alpha -> |f - sum_A alpha_n x_n|`` from the projection."""
    if not A:
        return float(basis.norm(f))
    alpha = {n: float(f[n]) for n in A}
    base = f.as_float()

    def resid(al):
        return float(basis.norm(base - FinVec(al)))

    cur = resid(alpha)
    for _ in range(sweeps):
        before = cur
        for n in A:
            def obj(t, n=n):
                trial = dict(alpha)
                trial[n] = t
                return resid(trial)

            width = max(abs(alpha[n]), 1.0)
            res = minimize_scalar(obj, bracket=(alpha[n] - width, alpha[n] + width),
                                  options={"xtol": 1e-12})
            if res.fun < cur:
                alpha[n], cur = float(res.x), float(res.fun)
        if before - cur <= rtol * max(before, 1e-300):
            break
    return cur


def greedy_gap(basis: BasisHandle, f: FinVec, m: int, sweeps: int = 64, rtol: float = 1e-10,
               budget: int = SUBSET_BUDGET) -> float:
    """``|f - G_m f|`` over an upper bound for ``inf |f - sum_{|A|=m} alpha_n x_n|``.

    The infimum over coefficients is approximated by coordinate descent, so
    the returned ratio is a lower bound for the greedy constant.
    """
    num = basis.norm(f - greedy_sum(f, m))
    if m == 0:
        return 1.0
    cands = list(_candidate_sets(f.support, m, budget))
    if basis.unconditional:
        # the projection is optimal for lattice norms: alpha_n = f_n leaves f off A
        den = min(basis.norm(f.drop(A)) for A in cands)
    else:
        den = min(_descent(basis, f, A, sweeps, rtol) for A in cands)
    return _ratio(num, den)


# -- conditionality ---------------------------------------------------------------

@dataclass
class CondResult:
    m: int
    k: float
    k_tilde: float
    mode: str
    exact: bool


def _hilbert_op_norm(G: np.ndarray, A: Sequence[int]) -> float:
    """``|S_A|`` for the norm ``sqrt(c^T G c)`` via ``(P G P) v = mu G v``."""
    if not A:
        return 0.0
    idx = np.asarray(A) - 1
    PGP = np.zeros_like(G)
    PGP[np.ix_(idx, idx)] = G[np.ix_(idx, idx)]
    mu = eigh(PGP, G, eigvals_only=True)
    return math.sqrt(max(float(mu[-1]), 0.0))


def default_witnesses(m: int, rng=None, random_count: int = 6) -> list[FinVec]:
    rng = np.random.default_rng(0) if rng is None else rng
    idx = list(range(1, m + 1))
    out = [FinVec.indicator(idx), FinVec.indicator(idx, [(-1) ** n for n in idx])]
    for _ in range(random_count):
        vals = rng.standard_normal(m)
        mask = rng.random(m) < 0.7
        if mask.any():
            out.append(FinVec.from_dense(np.where(mask, vals, 0.0)))
    return out


def _subsets_upto(m: int):
    for k in range(m + 1):
        yield from itertools.combinations(range(1, m + 1), k)


def cond_params(basis: BasisHandle, m: int, mode: str = "exhaustive",
                witnesses: Sequence[FinVec] | None = None, sets=None, rng=None) -> CondResult:
    """Bounds for ``k_m = sup_{|A|<=m} |S_A|`` and ``k~_m`` (``f`` supported in ``[1, m]``).

    Hilbert engines: exact operator norms for every ``A`` in ``[1, m]``; ``k~_m``
    is then exact and ``k_m`` a lower bound (``A`` is not searched beyond ``[1, m]``).
    Other engines: witness lower bounds, computed from the same (vector, set)
    pairs so that ``k~_m <= k_m``.  1-unconditional engines have ``k_m = 1``.
    """
    if mode not in ("exhaustive", "witness"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and m > COND_EXHAUSTIVE_MAX:
        raise SizeError(f"exhaustive mode supports m <= {COND_EXHAUSTIVE_MAX}")
    if sets is None:
        if mode == "exhaustive":
            sets = list(_subsets_upto(m))
        else:
            sets = [tuple(range(1, m + 1, 2)), tuple(range(2, m + 1, 2)),
                    *(tuple(range(1, k + 1)) for k in range(1, m + 1))]
    if basis.hilbert:
        G_full = basis.space.gram()
        if G_full.shape[0] < m:
            raise ValueError(f"space dimension {G_full.shape[0]} is smaller than m={m}")
        G_m = G_full[:m, :m]
        kt = max((_hilbert_op_norm(G_m, A) for A in sets), default=0.0)
        k = max((_hilbert_op_norm(G_full, A) for A in sets), default=0.0)
        return CondResult(m, max(k, kt), kt, mode, exact=False)
    witnesses = default_witnesses(m, rng) if witnesses is None else list(witnesses)
    kt = Fraction(0)
    for f in witnesses:
        if f.max_index() > m:
            continue
        nf = basis.norm(f)
        if nf == 0:
            continue
        for A in sets:
            kt = max(kt, _ratio(basis.norm(f.restrict(A)), nf))
    k = kt  # every witness pair also bounds k_m (A can be cut down to [1, m])
    if basis.unconditional:
        if k > 1 + 1e-12:
            raise AssertionError(f"unconditional engine produced |S_A f| / |f| = {k} > 1")
        return CondResult(m, k, kt, mode, exact=True)
    return CondResult(m, k, kt, mode, exact=False)


# -- regularity of the fundamental function ------------------------------------------

@dataclass
class RegularityFit:
    slope: float
    alpha: float
    c_lower: float
    beta: float
    c_upper: float
    alpha_sharp: float
    beta_sharp: float
    urp_ok: bool
    lrp_ok: bool


def regularity_fit(values: Sequence) -> RegularityFit:
    """Power-type fits for ``phi(1..M)``.

    The least-squares log-log slope serves as both exponents; the constants are
    the smallest ones making ``C phi(mn) >= m^alpha phi(n)`` and
    ``phi(n) <= C (n/m)^beta phi(m)`` hold on the data.  ``alpha_sharp`` and
    ``beta_sharp`` are the exponents that work with constant 1.
    """
    phi = np.asarray([float(v) for v in values])
    M = len(phi)
    if M < 8:
        raise ValueError("regularity_fit needs at least 8 values")
    if not np.all(np.isfinite(phi)) or np.any(phi <= 0):
        raise ValueError("fundamental function values must be finite and positive")
    m = np.arange(1, M + 1)
    slope = float(np.polyfit(np.log(m), np.log(phi), 1)[0])
    c_lo, c_up = 1.0, 1.0
    a_sharp, b_sharp = math.inf, 0.0
    for k in range(2, M + 1):
        for n in range(1, M // k + 1):
            c_lo = max(c_lo, k**slope * phi[n - 1] / phi[k * n - 1])
            a_sharp = min(a_sharp, math.log(phi[k * n - 1] / phi[n - 1]) / math.log(k))
    for a in range(1, M + 1):
        for b in range(a + 1, M + 1):
            c_up = max(c_up, phi[b - 1] / ((b / a) ** slope * phi[a - 1]))
            b_sharp = max(b_sharp, math.log(phi[b - 1] / phi[a - 1]) / math.log(b / a))
    return RegularityFit(slope, slope, float(c_lo), slope, float(c_up), float(a_sharp), float(b_sharp),
                         urp_ok=slope < 1 - 1e-9, lrp_ok=slope > 1e-9)


# -- reports ----------------------------------------------------------------------

@dataclass
class GreedyReport:
    basis: str
    ms: list
    phi: list = field(default_factory=list)
    phi_exact: list = field(default_factory=list)
    democracy: list = field(default_factory=list)
    quasi_greedy: list = field(default_factory=list)
    almost_greedy: list = field(default_factory=list)
    greedy: list = field(default_factory=list)
    k_lower: list = field(default_factory=list)
    k_tilde_lower: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    COLUMNS = ("m", "phi", "phi_exact", "democracy", "quasi_greedy", "almost_greedy",
               "greedy", "k_lower", "k_tilde_lower")

    def check(self) -> list[str]:
        """Violated report invariants (empty when everything is consistent)."""
        bad = []
        phi = [float(v) for v in self.phi]
        if any(b < a - 1e-12 for a, b in zip(phi, phi[1:])):
            bad.append("fundamental function is not nondecreasing")
        for name in ("democracy", "quasi_greedy", "almost_greedy", "greedy"):
            if any(v is not None and float(v) < 1 - 1e-9 for v in getattr(self, name)):
                bad.append(f"{name} ratio below 1")
        for k, kt in zip(self.k_lower, self.k_tilde_lower):
            if k is not None and kt is not None and float(kt) > float(k) + 1e-9:
                bad.append("k~_m exceeds k_m")
        return bad

    def rows(self):
        n = len(self.ms)
        cols = [getattr(self, c) if c != "m" else self.ms for c in self.COLUMNS]
        for i in range(n):
            yield [c[i] if i < len(c) else "" for c in cols]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.rows():
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items()}
        return json.dumps(d, default=_fmt, indent=2, sort_keys=True)


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v if isinstance(v, (int, str, bool)) else str(v)
