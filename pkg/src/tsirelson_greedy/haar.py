"""Dyadic intervals, L_p-normalised Haar functions and step-function norms.

Every function here is a step function on a dyadic grid of ``2^G`` cells of
``[0, 1)``, so every norm is a finite sum.  A level-``n`` dyadic interval has
length ``2^(1-n)``; level ``n`` therefore has ``2^(n-1)`` intervals and its
Haar functions live on grid ``n``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core_spaces import Convexify, Tsirelson
from .finvec import BlockIndex, FinVec

MAX_LEVEL = 20


class GridOverflow(ValueError):
    """A level beyond the grid budget was requested."""


def _check_level(n: int):
    if n > MAX_LEVEL:
        raise GridOverflow(f"level {n} exceeds the grid budget of {MAX_LEVEL}")


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[k 2^(1-n), (k+1) 2^(1-n))`` for level ``n >= 1`` and ``0 <= k < 2^(n-1)``."""

    level: int
    offset: int

    def __post_init__(self):
        if self.level < 1 or not 0 <= self.offset < 1 << (self.level - 1):
            raise ValueError(f"no dyadic interval at level {self.level} with offset {self.offset}")

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << (self.level - 1))

    @property
    def left(self) -> Fraction:
        return self.offset * self.length

    def cells(self, grid: int) -> range:
        """Cells of grid ``grid`` covered by the interval."""
        width = 1 << (grid - self.level + 1)
        return range(self.offset * width, (self.offset + 1) * width)

    def children(self):
        return (DyadicInterval(self.level + 1, 2 * self.offset), DyadicInterval(self.level + 1, 2 * self.offset + 1))

    def contains(self, other: "DyadicInterval") -> bool:
        if other.level < self.level:
            return False
        return other.offset >> (other.level - self.level) == self.offset


def level_intervals(n: int) -> list[DyadicInterval]:
    """``D_n``; it has ``2^(n-1)`` members."""
    return [DyadicInterval(n, k) for k in range(1 << (n - 1))]


def intervals_of_levels(levels: Iterable[int]) -> list[DyadicInterval]:
    """``D_A`` in canonical order: by level, then left to right."""
    return [I for n in sorted(set(levels)) for I in level_intervals(n)]


@dataclass(frozen=True)
class PiecewiseConstant:
    """Function constant on each of the ``2^grid`` cells of ``[0, 1)``."""

    grid: int
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != 1 << self.grid:
            raise ValueError(f"grid {self.grid} needs {1 << self.grid} values, got {len(self.values)}")

    @classmethod
    def zeros(cls, grid: int, exact: bool = False) -> "PiecewiseConstant":
        _check_level(grid)
        vals = np.array([Fraction(0)] * (1 << grid), dtype=object) if exact else np.zeros(1 << grid)
        return cls(grid, vals)

    @classmethod
    def constant(cls, c, grid: int = 0) -> "PiecewiseConstant":
        return cls(grid, np.full(1 << grid, c, dtype=object if isinstance(c, Fraction) else float))

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def cell_measure(self) -> Fraction:
        return Fraction(1, 1 << self.grid)

    def refine(self, grid: int) -> "PiecewiseConstant":
        if grid < self.grid:
            raise ValueError("cannot coarsen a step function")
        _check_level(grid)
        return PiecewiseConstant(grid, np.repeat(self.values, 1 << (grid - self.grid)))

    def _common(self, other: "PiecewiseConstant"):
        g = max(self.grid, other.grid)
        return self.refine(g).values, other.refine(g).values, g

    def __add__(self, other: "PiecewiseConstant") -> "PiecewiseConstant":
        a, b, g = self._common(other)
        return PiecewiseConstant(g, a + b)

    def __sub__(self, other):
        a, b, g = self._common(other)
        return PiecewiseConstant(g, a - b)

    def __mul__(self, c) -> "PiecewiseConstant":
        return PiecewiseConstant(self.grid, self.values * c)

    __rmul__ = __mul__

    def integral(self):
        total = self.values.sum()
        return total * self.cell_measure if self.exact else float(total) / (1 << self.grid)

    def inner(self, other: "PiecewiseConstant"):
        a, b, g = self._common(other)
        total = (a * b).sum()
        return total * Fraction(1, 1 << g) if a.dtype == object and b.dtype == object else float(total) / (1 << g)

    def restrict(self, mask: np.ndarray) -> "PiecewiseConstant":
        zero = Fraction(0) if self.exact else 0.0
        return PiecewiseConstant(self.grid, np.where(mask, self.values, zero))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell", "value"])
        for i, v in enumerate(self.values):
            w.writerow([i, str(v) if isinstance(v, Fraction) else repr(float(v))])
        return buf.getvalue()


def _haar_height(level: int, p: float):
    """``|I|^(-1/p) = 2^((n-1)/p)``, exact when the exponent is an integer."""
    e = Fraction(level - 1) / Fraction(p).limit_denominator(10**6) if p != math.inf else Fraction(0)
    if e.denominator == 1:
        return Fraction(1 << int(e))
    return 2.0 ** ((level - 1) / p)


def haar_function(I: DyadicInterval, p: float, grid: int | None = None) -> PiecewiseConstant:
    """``h_I^(p)``: ``+|I|^(-1/p)`` on the left half of ``I``, minus that on the right half."""
    if not p > 0:
        raise ValueError("p must be positive")
    grid = I.level if grid is None else grid
    if grid < I.level:
        raise ValueError(f"grid {grid} is too coarse for a level-{I.level} Haar function")
    h = _haar_height(I.level, p)
    f = PiecewiseConstant.zeros(grid, exact=isinstance(h, Fraction))
    cells = I.cells(grid)
    mid = cells.start + len(cells) // 2
    f.values[cells.start:mid] = h
    f.values[mid:cells.stop] = -h
    return f


def lp_norm_pc(f: PiecewiseConstant, p: float):
    """``(sum |v|^p 2^-G)^(1/p)``; exact for ``p = 1`` on rational values, ``max |v|`` for ``p = inf``."""
    if p == math.inf:
        return max(abs(v) for v in f.values)
    if not p > 0:
        raise ValueError("p must be positive")
    if p == 1:
        total = np.abs(f.values).sum()
        return total * f.cell_measure if f.exact else float(total) / (1 << f.grid)
    vals = np.abs(f.values.astype(float))
    return float((np.sum(vals**p) / (1 << f.grid)) ** (1 / p))


def haar_sum(coeffs: Mapping[DyadicInterval, object], p: float, grid: int | None = None) -> PiecewiseConstant:
    """``sum c_I h_I^(p)`` on a common grid (vectorised over intervals of each level)."""
    if not coeffs:
        return PiecewiseConstant.zeros(grid or 0)
    top = max(I.level for I in coeffs)
    grid = top if grid is None else grid
    _check_level(grid)
    exact = all(isinstance(c, Fraction) for c in coeffs.values()) and all(
        isinstance(_haar_height(I.level, p), Fraction) for I in coeffs)
    out = PiecewiseConstant.zeros(grid, exact)
    by_level: dict[int, dict[int, object]] = {}
    for I, c in coeffs.items():
        by_level.setdefault(I.level, {})[I.offset] = c
    for n, offs in by_level.items():
        # coefficient per level-n interval, then expand to the signed pattern on the grid
        per = np.zeros(1 << (n - 1), dtype=object if exact else float)
        if exact:
            per[:] = Fraction(0)
        for k, c in offs.items():
            per[k] = c
        h = _haar_height(n, p)
        h = h if exact else float(h)
        half = 1 << (grid - n)
        signs = np.array([1] * half + [-1] * half, dtype=object if exact else float)
        out.values[:] = out.values + np.outer(per * h, signs).ravel()
    return out


# -- equi-integrability ---------------------------------------------------------------

@dataclass
class EquiResult:
    integrability: bool
    key_lower: bool
    key_upper: bool
    mass_on_A: float
    bound: float
    lower: float
    upper: float
    value: float

    @property
    def holds(self) -> bool:
        return self.integrability and self.key_lower and self.key_upper


def equi_integrability_check(f: PiecewiseConstant, A: np.ndarray, eps: float, n: int,
                             g: PiecewiseConstant | None = None, grid: int | None = None) -> EquiResult:
    """Check ``int_A |f| <= eps |f|_1`` and the two-sided estimate for ``|f + g|_1``.

    ``f`` must be measurable for the algebra generated by the Haar functions
    of levels ``<= n`` (constant on cells of length ``2^-n``), ``A`` is a
    boolean cell mask on grid ``grid`` with ``|A| <= 2^-n eps``, and ``g``
    vanishes off ``A``.  Then ``|f| <= 2^n |f|_1`` pointwise, which is all
    the integrability bound needs.  The estimate is
    ``(1 - sqrt eps)(|f| + |g|) <= |f + g| <= (1 + eps + sqrt eps)(|f| + |g|)``.
    """
    grid = f.grid if grid is None else grid
    A = np.asarray(A, dtype=bool)
    if len(A) != 1 << grid:
        raise ValueError("mask length does not match the grid")
    if A.sum() / (1 << grid) > 2.0**-n * eps * (1 + 1e-12):
        raise ValueError("the set A is larger than 2^-n eps")
    if f.grid > n:
        coarse = f.values.reshape(1 << n, -1).astype(float)
        if not np.allclose(coarse, coarse[:, :1]):
            raise ValueError(f"f is not measurable for the level-{n} algebra")
    F = f.refine(grid)
    nf = float(lp_norm_pc(F, 1))
    mass = float(lp_norm_pc(F.restrict(A), 1))
    integ = mass <= eps * nf * (1 + 1e-12) + 1e-15
    g = PiecewiseConstant.zeros(grid) if g is None else g.refine(grid)
    if np.any(np.asarray(g.values[~A], dtype=float) != 0):
        raise ValueError("g must vanish outside A")
    ng = float(lp_norm_pc(g, 1))
    val = float(lp_norm_pc(F + g, 1))
    r = math.sqrt(eps)
    lo, hi = (1 - r) * (nf + ng), (1 + eps + r) * (nf + ng)
    tol = 1e-12 * max(1.0, nf + ng)
    return EquiResult(integ, val >= lo - tol, val <= hi + tol, mass, eps * nf, lo, hi, val)


def random_equi_case(rng, n: int, eps: float, extra_bits: int = 8):
    """Random ``f`` constant on cells of length ``2^-n`` and random ``g`` on a set of measure ``<= 2^-n eps``."""
    grid = n + extra_bits
    f = PiecewiseConstant(n, rng.standard_normal(1 << n) * rng.exponential(1.0)).refine(grid)
    cap = int(math.floor(2.0**-n * eps * (1 << grid)))
    size = int(rng.integers(0, cap + 1))
    mask = np.zeros(1 << grid, dtype=bool)
    if size:
        mask[rng.choice(1 << grid, size, replace=False)] = True
    gv = np.where(mask, rng.standard_normal(1 << grid) * rng.exponential(5.0), 0.0)
    return f, PiecewiseConstant(grid, gv), mask, grid


# -- spread-out subsystems -------------------------------------------------------------

@dataclass(frozen=True)
class Enclosure:
    lo: float
    hi: float

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def dhk_constants(u: int, p: float, K: int = 60) -> tuple[Enclosure, Enclosure]:
    """Enclosures of ``C_1(u) = prod (1 - 2^(-(k+u)/2))^(1/p)`` and
    ``C_2(u) = prod (1 + 2^(-(k+u)/2) + 2^-(k+u))^(1/p)`` (products over ``k >= 1``).

    The first ``K`` factors are multiplied out; the tail of the log-product is
    bounded by geometric series.
    """
    if K < 1 or u < 0 or not p > 0:
        raise ValueError("need K >= 1, u >= 0 and p > 0")
    x = 2.0 ** (-(np.arange(1, K + 1) + u) / 2)
    L1 = float(np.sum(np.log1p(-x)))
    L2 = float(np.sum(np.log1p(x + x * x)))
    xt = 2.0 ** (-(K + 1 + u) / 2)
    tail = xt / (1 - 2**-0.5)  # sum_{k > K} x_k
    tail2 = xt * xt / (1 - 0.5)  # sum_{k > K} x_k^2
    pad = 1e-13 * K
    c1 = Enclosure(math.exp((L1 - tail / (1 - xt) - pad) / p), math.exp((L1 - tail + pad) / p))
    c2 = Enclosure(math.exp((L2 - pad) / p), math.exp((L2 + tail + tail2 + pad) / p))
    return c1, c2


def spread_levels(u: int, first: int = 1, max_level: int = MAX_LEVEL) -> tuple[int, ...]:
    """Smallest levels with ``phi(i+1) = 2 phi(i) + i + u + 1`` up to ``max_level``."""
    levels = [first]
    while True:
        i = len(levels)
        nxt = 2 * levels[-1] + i + u + 1
        if nxt > max_level:
            return tuple(levels)
        levels.append(nxt)


@dataclass(frozen=True)
class SpreadSpec:
    levels: tuple
    S: tuple
    u: int
    p: float

    def __post_init__(self):
        lv = tuple(int(x) for x in self.levels)
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "S", tuple(self.S))
        for i in range(1, len(lv)):
            if lv[i] < 2 * lv[i - 1] + i + self.u + 1:
                raise ValueError(f"levels {lv} grow too slowly at i={i} for u={self.u}")
        allowed = set(lv)
        for I in self.S:
            if I.level not in allowed:
                raise ValueError(f"{I} is not at one of the levels {lv}")
            _check_level(I.level)
        for i in range(1, len(lv)):
            hits = sum(1 for I in self.S if I.level == lv[i])
            if hits > 1 << lv[i - 1]:
                raise ValueError(f"{hits} intervals at level {lv[i]} exceed 2|D_{lv[i - 1]}|")


def random_spread_spec(rng, u: int, p: float, max_level: int = MAX_LEVEL) -> SpreadSpec:
    levels = spread_levels(u, max_level=max_level)
    S = []
    for i, n in enumerate(levels):
        cap = 1 << (n - 1) if i == 0 else min(1 << levels[i - 1], 1 << (n - 1))
        k = int(rng.integers(1, cap + 1))
        for off in sorted(rng.choice(1 << (n - 1), k, replace=False)):
            S.append(DyadicInterval(n, int(off)))
    return SpreadSpec(levels, tuple(S), u, p)


def spread_equivalence_ratio(spec: SpreadSpec, coeffs: Mapping[DyadicInterval, object]) -> float:
    """``|sum c_I h_I^(p)|_p / (sum |c_I|^p)^(1/p)`` for ``c`` supported on ``spec.S``."""
    allowed = set(spec.S)
    if any(I not in allowed for I in coeffs):
        raise ValueError("coefficients outside the spread set")
    vals = np.array([abs(float(c)) for c in coeffs.values()])
    den = float(np.sum(vals**spec.p) ** (1 / spec.p))
    if den == 0:
        return 1.0
    num = float(lp_norm_pc(haar_sum({I: float(c) for I, c in coeffs.items()}, spec.p), spec.p))
    return num / den


# -- Rademacher blocks and block spaces -----------------------------------------------

def rademacher_block(levels: Iterable[int], p: float) -> list[PiecewiseConstant]:
    """``r_n = 2^(-(n-1)/p) sum_{I in D_n} h_I^(p)``: the ``+-1`` Rademacher pattern of level ``n``."""
    out = []
    for n in sorted(set(levels)):
        _check_level(n)
        h = _haar_height(n, p)
        c = 1 / h
        out.append(haar_sum({I: c for I in level_intervals(n)}, p))
    return out


def khintchine_range(levels: Sequence[int], p: float, samples: int, rng) -> tuple[float, float]:
    """Min and max of ``|sum a_n r_n|_p / |a|_2`` over random Gaussian ``a``."""
    rs = rademacher_block(levels, p)
    grid = max(r.grid for r in rs)
    R = np.array([r.refine(grid).values.astype(float) for r in rs])
    lo, hi = math.inf, 0.0
    for _ in range(samples):
        a = rng.standard_normal(len(rs))
        f = PiecewiseConstant(grid, a @ R)
        ratio = lp_norm_pc(f, p) / float(np.linalg.norm(a))
        lo, hi = min(lo, ratio), max(hi, ratio)
    return lo, hi


def haar_block_space_norm(level_sets: Sequence[Sequence[int]], p: float, f: FinVec):
    """Norm in ``((+)_j L_p^{A_j})_{T^(p)}``.

    ``f`` is indexed by ``BlockIndex(j, i)``, ``i`` enumerating ``D_{A_j}`` in
    canonical order (level, then offset).
    """
    blocks: dict[int, dict] = {}
    for idx, v in f.items():
        if not isinstance(idx, BlockIndex):
            raise IndexError(f"expected block indices, got {idx!r}")
        if idx.block > len(level_sets):
            raise IndexError(f"block {idx.block} beyond the {len(level_sets)} level sets")
        blocks.setdefault(idx.block, {})[idx.inner] = v
    norms = {}
    for j, entries in blocks.items():
        ivs = intervals_of_levels(level_sets[j - 1])
        if max(entries) > len(ivs):
            raise IndexError(f"block {j} has {len(ivs)} Haar functions, got index {max(entries)}")
        coeffs = {ivs[i - 1]: v for i, v in entries.items()}
        norms[j] = lp_norm_pc(haar_sum(coeffs, p), p)
    if not norms:
        return Fraction(0)
    outer = Tsirelson() if p == 1 else Convexify(Tsirelson(), p)
    vec = FinVec(norms)
    if not vec.is_exact:
        vec = vec.as_float()
    return outer.norm(vec)
