"""Tsirelson norm on finitely supported vectors.

The norm is the fixed point of the Figiel-Johnson recursion

    |x|_0     = |x|_inf
    |x|_{m+1} = max(|x|_m, 1/2 sup sum_k |E_k x|_m)

where the sup runs over admissible families ``E_1 < ... < E_n`` with
``n <= min E_1``.  :func:`tsirelson_norm` evaluates it with a dynamic program
over interval families; :func:`tsirelson_norm_bruteforce` enumerates
arbitrary successive sets and serves as the oracle for the interval
reduction.

Both engines work on scaled values ``S_m = 2^m W_m``, so the recursion
only ever adds, doubles and compares.  For rational input the scaled
values are integers and the result is an exact :class:`Fraction`; float
input runs the same program in binary64 (power-of-two scaling is
lossless).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .finvec import FinVec

BRUTEFORCE_MAX_INDEX = 8
_INT_HEADROOM = 1 << 60


class SupportTooLarge(ValueError):
    """Raised when an exponential enumeration is asked for too large an input."""


@dataclass(frozen=True)
class AdmissibleFamily:
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if any(not s for s in sets):
            raise ValueError("admissible families consist of nonempty sets")
        for a, b in zip(sets, sets[1:]):
            if max(a) >= min(b):
                raise ValueError("sets must be successive (max E_k < min E_k+1)")
        if sets and len(sets) > min(sets[0]):
            raise ValueError(f"{len(sets)} sets but min E_1 = {min(sets[0])}")


@dataclass
class NormTable:
    """Scaled interval values ``S[a, b] = 2^level * W_level(a, b)``.

    Rows and columns are offsets from ``lo`` (the first index of the
    support hull).  ``history`` keeps the per-level tables when requested.
    """

    lo: int
    scaled: np.ndarray
    level: int
    denominator: int | None
    history: list = field(default_factory=list)

    def value(self, a: int, b: int):
        raw = self.scaled[a - self.lo, b - self.lo]
        if self.denominator is None:
            return float(raw) / 2.0**self.level
        return Fraction(int(raw), self.denominator << self.level)


def _prepare(f: FinVec):
    """Absolute values on the support hull, as integers over a common denominator."""
    lo, hi = f.support[0], f.support[-1]
    if not isinstance(lo, int):
        raise TypeError("the Tsirelson norm acts on integer-indexed vectors")
    vals = [abs(f[i]) for i in range(lo, hi + 1)]
    if f.is_exact:
        den = math.lcm(*(v.denominator for v in vals))
        ints = [int(v * den) for v in vals]
        peak = max(ints) * len(ints)
        dtype = np.int64 if peak < _INT_HEADROOM else object
        return lo, np.array(ints, dtype=dtype), den
    return lo, np.array([float(v) for v in vals]), None


def _neg_inf(dtype):
    if dtype == np.float64:
        return -np.inf
    return -(_INT_HEADROOM << 2) if dtype == np.int64 else -(1 << 4096)


def _initial_table(x: np.ndarray) -> np.ndarray:
    n = len(x)
    S = np.empty((n, n), dtype=x.dtype)
    for a in range(n):
        S[a, a:] = np.maximum.accumulate(x[a:])
        S[a, :a] = 0
    return S


def _next_level(S: np.ndarray, x_scaled_l1: np.ndarray, lo: int) -> np.ndarray:
    """One step of the recursion on the scaled table ``S`` (level m -> m+1).

    ``x_scaled_l1[a, b]`` is ``sum_{a..b} S[i, i]``: the value of the
    singleton family, which is optimal once the allowed number of sets
    reaches the interval length.
    """
    n = S.shape[0]
    neg = _neg_inf(S.dtype)
    out = 2 * S
    # masked copy: entries with d < c are unusable
    Sm = S.copy()
    Sm[np.tril_indices(n, -1)] = neg
    for b in range(n):
        # target for start c: at most min(abs(c), length) pieces covering [c, b]
        width = b + 1
        caps = np.minimum(np.arange(lo, lo + width), b - np.arange(width) + 1)
        best_start = np.full(width, neg, dtype=object if S.dtype == object else S.dtype)
        full = caps == (b - np.arange(width) + 1)
        best_start[full] = x_scaled_l1[np.arange(width)[full], b]
        need = ~full
        if need.any():
            kmax = int(caps[need].max())
            # G[c] = best partition of [c, b] into at most k pieces, G[b+1] = 0
            G = np.empty(width + 1, dtype=best_start.dtype)
            G[:width] = S[:width, b]
            G[width] = 0
            if 1 <= kmax:
                hit = need & (caps == 1)
                best_start[hit] = G[:width][hit]
            block = Sm[:width, :width]
            for k in range(2, kmax + 1):
                cand = (block + G[1 : width + 1][None, :]).max(axis=1)
                G = G.copy()
                G[:width] = np.maximum(G[:width], cand)
                hit = need & (caps == k)
                if hit.any():
                    best_start[hit] = G[:width][hit]
        # dropping leading coordinates is allowed: suffix max over starts c >= a
        suffix = np.maximum.accumulate(best_start[::-1])[::-1]
        out[:width, b] = np.maximum(out[:width, b], suffix)
    return out


def _promote(S: np.ndarray, x: np.ndarray):
    if S.dtype == np.int64 and int(S.max()) >= _INT_HEADROOM >> 3:
        return S.astype(object), x.astype(object)
    return S, x


def norm_table(f: FinVec, keep_history: bool = False, max_levels: int | None = None) -> NormTable:
    """Run the recursion to its fixed point and return the final interval table."""
    if len(f) == 0:
        return NormTable(lo=1, scaled=np.zeros((0, 0), dtype=np.int64), level=0, denominator=1)
    lo, x, den = _prepare(f)
    n = len(x)
    S = _initial_table(x)
    history = [S.copy()] if keep_history else []
    limit = n + 1 if max_levels is None else max_levels
    level = 0
    while level < limit:
        S, x = _promote(S, x)
        diag = np.diagonal(S).copy()
        prefix = np.concatenate([np.zeros(1, dtype=S.dtype), np.cumsum(diag)])
        l1 = prefix[None, 1:] - prefix[:-1, None]
        nxt = _next_level(S, l1, lo)
        level += 1
        if keep_history:
            history.append(nxt.copy())
        if np.array_equal(nxt, 2 * S):
            S = nxt
            break
        S = nxt
    else:
        if max_levels is None:
            raise RuntimeError("Tsirelson recursion did not stabilise within N levels")
    return NormTable(lo=lo, scaled=S, level=level, denominator=den, history=history)


def tsirelson_norm(f: FinVec):
    """Exact Tsirelson norm of ``f`` (a float if ``f`` has float entries)."""
    if len(f) == 0:
        return Fraction(0)
    table = norm_table(f)
    return table.value(f.support[0], f.support[-1])


def stabilization_level(f: FinVec) -> int:
    """Number of recursion rounds until ``W_{m+1} = W_m`` on every interval."""
    if len(f) == 0:
        return 0
    return norm_table(f).level - 1


# -- brute-force oracle -----------------------------------------------------

@lru_cache(maxsize=None)
def _families(n_max: int) -> np.ndarray:
    """All admissible families of nonempty successive subsets of [1, n_max] as bitmasks.

    Row ``r`` lists the masks of one family, padded with zeros (the empty set).
    """
    rows: list[list[int]] = []
    # each index is unused (0) or belongs to the current set (1) or opens a new set (2)
    for labels in itertools.product((0, 1, 2), repeat=n_max):
        sets: list[int] = []
        ok = True
        for pos, lab in enumerate(labels):
            bit = 1 << pos
            if lab == 2:
                sets.append(bit)
            elif lab == 1:
                if not sets:
                    ok = False
                    break
                sets[-1] |= bit
        if not ok or not sets:
            continue
        first_min = (sets[0] & -sets[0]).bit_length()
        if len(sets) <= first_min:
            rows.append(sets)
    width = max(len(r) for r in rows)
    out = np.zeros((len(rows), width), dtype=np.int64)
    for r, sets in enumerate(rows):
        out[r, : len(sets)] = sets
    return out


def admissible_families(n_max: int) -> list[AdmissibleFamily]:
    """Every admissible family of subsets of ``[1, n_max]`` (for inspection and tests)."""
    fams = []
    for row in _families(n_max):
        sets = [frozenset(i + 1 for i in range(n_max) if m >> i & 1) for m in row if m]
        fams.append(AdmissibleFamily(tuple(sets)))
    return fams


def tsirelson_norm_bruteforce(f: FinVec, max_index: int = BRUTEFORCE_MAX_INDEX):
    """Tsirelson norm by enumerating every admissible family of arbitrary sets.

    Works on all subsets of ``[1, max_index]`` as bitmasks; exponential, so
    the support must stay inside ``[1, max_index]`` with ``max_index <= 8``.
    """
    if len(f) == 0:
        return Fraction(0)
    if max_index > BRUTEFORCE_MAX_INDEX or f.max_index() > max_index:
        raise SupportTooLarge(
            f"brute force needs support in [1, {max_index}] with max_index <= {BRUTEFORCE_MAX_INDEX}"
        )
    N = max_index
    exact = f.is_exact
    if exact:
        den = math.lcm(*(abs(v).denominator for v in f.values()))
        coords = [int(abs(f[i]) * den) for i in range(1, N + 1)]
        dtype = object
    else:
        den = None
        coords = [float(abs(f[i])) for i in range(1, N + 1)]
        dtype = np.float64
    masks = np.arange(1 << N)
    # level 0: sup norm of the restriction to each mask
    table = np.zeros(1 << N, dtype=dtype)
    for m in range(1, 1 << N):
        table[m] = max(coords[i] for i in range(N) if m >> i & 1)
    fams = _families(N)
    level = 0
    while True:
        nxt = 2 * table
        for S in range(1, 1 << N):
            sums = table[fams & S].sum(axis=1)
            best = sums.max()
            if best > nxt[S]:
                nxt[S] = best
        level += 1
        if all(nxt[m] == 2 * table[m] for m in masks):
            break
        table = nxt
        if level > N + 1:
            raise RuntimeError("brute-force recursion did not stabilise")
    full = (1 << N) - 1
    if exact:
        return Fraction(int(nxt[full]), den << level)
    return float(nxt[full]) / 2.0**level


# -- block comparisons ------------------------------------------------------

def block_norm_compare(phi, blocks: Sequence[FinVec]):
    """Return ``(|sum f_k|, |sum |f_k| t_phi(k)|)`` for blocks ``f_k`` in ``(phi(k-1), phi(k)]``.

    ``phi(0)`` is taken as 0.
    """
    total: dict = {}
    outer: dict = {}
    for k, fk in enumerate(blocks, start=1):
        left = 0 if k == 1 else phi(k - 1)
        right = phi(k)
        if fk.support and (fk.support[0] <= left or fk.support[-1] > right):
            raise IndexError(f"block {k} must be supported in ({left}, {right}]")
        for i, v in fk.items():
            total[i] = v
        nk = tsirelson_norm(fk)
        if nk:
            outer[right] = nk
    return tsirelson_norm(FinVec(total)), tsirelson_norm(FinVec(outer))


def block_ratio(lhs, rhs) -> float:
    if lhs == 0 and rhs == 0:
        return 1.0
    return float(Fraction(rhs) / Fraction(lhs)) if not isinstance(lhs, float) else rhs / lhs


def subsequence_l1_equivalence(phi, j: int, samples: int = 500, rng=None, max_window: int = 12):
    """Sampled ``(min, max)`` of ``|sum a_n t_{n+phi(j)}| / sum |a_n|`` on one window."""
    lo, hi = phi(j), phi(j + 1)
    width = hi - lo
    if width > max_window:
        raise SupportTooLarge(f"window of size {width} exceeds {max_window}")
    if width < 1:
        raise ValueError("phi must be increasing at j")
    rng = np.random.default_rng(0) if rng is None else rng
    ratios = []
    for s in range(samples):
        if s == 0:
            coeffs = [1] * width
        else:
            nums = rng.integers(-9, 10, size=width)
            dens = rng.integers(1, 7, size=width)
            coeffs = [Fraction(int(a), int(d)) for a, d in zip(nums, dens)]
        f = FinVec({lo + n + 1: c for n, c in enumerate(coeffs)})
        l1 = sum(abs(v) for v in f.values())
        if l1 == 0:
            continue
        ratios.append(tsirelson_norm(f) / l1)
    return min(ratios), max(ratios)
