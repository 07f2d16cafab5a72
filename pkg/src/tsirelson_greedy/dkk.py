"""Averaging projections and the DKK conditional-basis construction.

Given an ordered partition ``sigma`` of the integers into consecutive
blocks, a subsymmetric space ``S`` (here ``l_p``) and a base space ``X``,
the constructed norm is

    |f| = |Q f|_S + |sum_n v_n*(f) x_n|_X,

with ``v_n = 1_{sigma_n} / Lambda_{|sigma_n|}``,
``v_n* = (Lambda_{|sigma_n|} / |sigma_n|) sum_{j in sigma_n} e_j*``,
``P = sum_n v_n* (.) v_n`` (block averages) and ``Q = I - P``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .core_spaces import Convexify, DirectSum, FiniteLp, ListDims, Lp, SpaceDomainError, SpaceHandle, Tsirelson
from .finvec import FinVec
from .greedy_analysis import BasisHandle
from .trig import RotatedTrigSum


def geometric_length(n: int) -> int:
    return 1 << (n - 1)


@dataclass(frozen=True)
class OrderedPartition:
    """Consecutive integer blocks ``sigma_1 < sigma_2 < ...`` given by their lengths.

    With a ``rule`` the partition is generative and grows on demand; the
    explicit ``lengths`` then only fix a prefix.
    """

    lengths: tuple = ()
    rule: Callable[[int], int] | None = None

    def __post_init__(self):
        lengths = tuple(int(x) for x in self.lengths)
        if any(x < 1 for x in lengths):
            raise ValueError("block lengths must be >= 1")
        if not lengths and self.rule is None:
            raise ValueError("an ordered partition needs block lengths or a rule")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "_cum", [0])
        object.__setattr__(self, "_lens", [])
        for x in lengths:
            self._push(x)

    @classmethod
    def geometric(cls, nblocks: int = 0) -> "OrderedPartition":
        """``|sigma_n| = 2^(n-1)``."""
        return cls(tuple(geometric_length(n) for n in range(1, nblocks + 1)), geometric_length)

    def _push(self, x: int):
        self._lens.append(x)
        self._cum.append(self._cum[-1] + x)

    def _grow_to_block(self, n: int):
        while len(self._lens) < n:
            if self.rule is None:
                raise SpaceDomainError(f"block {n} beyond the {len(self._lens)} declared blocks")
            x = int(self.rule(len(self._lens) + 1))
            if x < 1:
                raise ValueError("block length rule produced a length < 1")
            self._push(x)

    def _grow_to_index(self, j: int):
        while self._cum[-1] < j:
            if self.rule is None:
                raise SpaceDomainError(f"index {j} beyond the last block (ends at {self._cum[-1]})")
            self._grow_to_block(len(self._lens) + 1)

    @property
    def generative(self) -> bool:
        return self.rule is not None

    def length(self, n: int) -> int:
        self._grow_to_block(n)
        return self._lens[n - 1]

    def M(self, r: int) -> int:
        """``M_r = |sigma_1| + ... + |sigma_r|``."""
        self._grow_to_block(r)
        return self._cum[r]

    def block(self, n: int) -> range:
        self._grow_to_block(n)
        return range(self._cum[n - 1] + 1, self._cum[n] + 1)

    def block_of(self, j: int) -> int:
        self._grow_to_index(j)
        return bisect.bisect_left(self._cum, j)

    def blocks_covering(self, j: int) -> int:
        """Number of blocks needed to cover ``[1, j]``."""
        return self.block_of(j) if j > 0 else 0

    def __str__(self):
        if self.generative and self.rule is geometric_length:
            return "geometric"
        return ",".join(str(x) for x in self.lengths)


def _subsymmetric_p(S: SpaceHandle) -> float:
    if isinstance(S, Lp):
        return S.p
    raise ValueError(f"{S} is not a supported subsymmetric space (use lp)")


def lambda_fn(S: SpaceHandle, m: int):
    """``Lambda_m = |e_1 + ... + e_m|_S`` (``m^(1/p)`` for ``l_p``)."""
    p = _subsymmetric_p(S)
    if m < 0:
        raise ValueError("m must be >= 0")
    if p == 1:
        return Fraction(m)
    return float(m) ** (1.0 / p)


def v_vector(sigma: OrderedPartition, S: SpaceHandle, n: int) -> FinVec:
    lam = lambda_fn(S, sigma.length(n))
    return FinVec.indicator(sigma.block(n)) * (1 / lam)


def v_functional(sigma: OrderedPartition, S: SpaceHandle, f: FinVec, n: int):
    """``v_n*(f) = (Lambda_{|sigma_n|} / |sigma_n|) sum_{j in sigma_n} f_j``."""
    size = sigma.length(n)
    total = sum((f[j] for j in sigma.block(n)), Fraction(0))
    lam = lambda_fn(S, size)
    return lam * total / size


def block_sums(sigma: OrderedPartition, f: FinVec) -> dict[int, object]:
    sums: dict[int, object] = {}
    for j, v in f.items():
        n = sigma.block_of(j)
        sums[n] = sums.get(n, 0) + v
    return sums


def averaging_projection(sigma: OrderedPartition, f: FinVec, S: SpaceHandle | None = None):
    """``(P f, Q f)``: ``P f`` replaces ``f`` by its average on every block.

    The averages do not depend on ``S`` (the Lambda factors cancel).
    """
    out = {}
    for n, total in block_sums(sigma, f).items():
        avg = total / sigma.length(n)
        for j in sigma.block(n):
            out[j] = avg
    P = FinVec(out)
    return P, f - P


def coefficient_vector(sigma: OrderedPartition, S: SpaceHandle, f: FinVec) -> FinVec:
    """``(v_n*(f))_n`` as a vector indexed by block number."""
    sums = block_sums(sigma, f)
    return FinVec({n: lambda_fn(S, sigma.length(n)) * t / sigma.length(n) for n, t in sums.items()})


@dataclass(frozen=True)
class DKK(SpaceHandle):
    """``|f| = |Q f|_S + |(v_n*(f))_n|_X`` over the partition ``sigma``."""

    base: SpaceHandle
    S: SpaceHandle
    sigma: OrderedPartition = field(default_factory=OrderedPartition.geometric)
    unconditional = False

    def __post_init__(self):
        _subsymmetric_p(self.S)

    @property
    def exact(self):
        return self.base.exact and self.S.exact

    @property
    def modulus(self):
        return max(self.base.modulus, self.S.modulus)

    def dimension(self):
        d = self.base.dimension()
        if d is None:
            return None
        return self.sigma.M(d) if (self.sigma.generative or d <= len(self.sigma.lengths)) else None

    def norm(self, f):
        _, Q = averaging_projection(self.sigma, f)
        coeffs = coefficient_vector(self.sigma, self.S, f)
        a, b = self.S.norm(Q), self.base.norm(coeffs)
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a + b
        return float(a) + float(b)

    def __str__(self):
        return f"dkk(base={self.base}, s={self.S}, sigma={self.sigma})"


def dkk_norm(space: DKK, f: FinVec):
    return space.norm(f)


@dataclass(frozen=True)
class ImpEstimate:
    holds: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def imp_estimate_check(space: DKK, f: FinVec, A: Iterable[int], s: float | None = None,
                       C_s: float = 1.0) -> ImpEstimate:
    """Both sides of the projection estimate

        |Q S_A f|_S <= 5 |Q f|_S + 2 C_s (sum_n (Lambda_{|A cap sigma_n|} / Lambda_{|sigma_n|})^s |v_n*(f)|^s)^(1/s).

    ``l_p`` satisfies a lower ``s``-estimate with constant 1 whenever ``s >= p``.
    """
    p = _subsymmetric_p(space.S)
    s = p if s is None else float(s)
    if s < p and C_s == 1.0:
        raise ValueError(f"l_p with p={p} has no lower {s}-estimate with constant 1 (need s >= p)")
    A = set(A)
    sigma, S = space.sigma, space.S
    _, Qf = averaging_projection(sigma, f)
    _, QSA = averaging_projection(sigma, f.restrict(A))
    lhs = float(S.norm(QSA))
    coeffs = coefficient_vector(sigma, S, f)
    acc = 0.0
    for n, c in coeffs.items():
        hit = sum(1 for j in sigma.block(n) if j in A)
        ratio = float(lambda_fn(S, hit)) / float(lambda_fn(S, sigma.length(n)))
        acc += (ratio * abs(float(c))) ** s
    rhs = 5 * float(S.norm(Qf)) + 2 * C_s * acc ** (1 / s)
    return ImpEstimate(lhs <= rhs * (1 + 1e-12) + 1e-15, lhs, rhs)


# -- the almost greedy conditional basis at finite scale ---------------------------

def check_ag_hypothesis(p: float, a: float):
    lo = max(1 / p, 1 - 1 / p)
    if not (lo <= a < 1):
        raise ValueError(f"need max(1/p, 1-1/p) = {lo:g} <= a < 1, got a={a}")


@dataclass(frozen=True)
class AGBasis:
    """Finite truncation of ``((+)_j Y^(psi(j)) (+) l_p^j)`` with outer ``T^(p)``."""

    basis: BasisHandle
    p: float
    a: float
    sigma: OrderedPartition
    psi: tuple
    dims: tuple

    @property
    def dimension(self) -> int:
        return sum(self.dims)

    def dkk_blocks(self) -> list[int]:
        return list(range(1, len(self.dims) + 1, 2))


def build_ag_basis(p: float, a: float, jmax: int, sigma: OrderedPartition | None = None,
                   psi: Callable[[int], int] | None = None) -> AGBasis:
    """Assemble the truncated composite space; ``psi(j)`` defaults to ``M_j``.

    Block ``2j - 1`` is the DKK space over the rotated trigonometric system
    cut to its first ``psi(j)`` coordinates, block ``2j`` is ``l_p^j``.
    """
    check_ag_hypothesis(p, a)
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    sigma = OrderedPartition.geometric() if sigma is None else sigma
    psi = sigma.M if psi is None else psi
    inners, dims, psis = [], [], []
    for j in range(1, jmax + 1):
        size = int(psi(j))
        nblocks = sigma.blocks_covering(size)
        if sigma.M(nblocks) != size:
            raise ValueError(f"psi({j}) = {size} does not end on a block boundary of sigma")
        inners.append(DKK(RotatedTrigSum(a, nblocks), Lp(p), sigma))
        dims.append(size)
        inners.append(FiniteLp(p, j))
        dims.append(j)
        psis.append(size)
    outer = Tsirelson() if p == 1 else Convexify(Tsirelson(), p)
    space = DirectSum(outer, tuple(inners), ListDims(tuple(dims)))
    name = f"ag(p={p:g},a={a:g},jmax={jmax})"
    return AGBasis(BasisHandle(space, name), p, a, sigma, tuple(psis), tuple(dims))


TAIL_SCALES = (0.0, 0.125, 0.25, 0.5, 1.0)


def partial_sum_ratios(basis: BasisHandle, dim: int, samples: int, rng,
                       ms: Sequence[int] | None = None) -> dict[int, float]:
    """Sampled lower bounds for ``|S_m|`` on ``[1, dim]``, for each ``m``.

    Each random ``f`` is tried with its tail beyond ``m`` scaled by every
    factor in ``TAIL_SCALES``; a generic ``f`` alone puts most of its mass
    in the tail and badly underestimates the operator norm for small ``m``.
    """
    ms = list(range(1, dim + 1)) if ms is None else list(ms)
    best = {m: 0.0 for m in ms}
    for _ in range(samples):
        vals = rng.standard_normal(dim)
        for m in ms:
            head = FinVec.from_dense(vals[:m])
            nh = float(basis.norm(head))
            for t in TAIL_SCALES:
                g = vals.copy()
                g[m:] *= t
                best[m] = max(best[m], nh / float(basis.norm(FinVec.from_dense(g))))
    return best


def biorthogonality_defect(sigma: OrderedPartition, S: SpaceHandle, nblocks: int):
    """``max |v_k*(v_n) - delta_kn|`` over the first ``nblocks`` blocks (0 in exact mode)."""
    worst = 0
    for n in range(1, nblocks + 1):
        v = v_vector(sigma, S, n)
        for k in range(1, nblocks + 1):
            val = v_functional(sigma, S, v, k)
            worst = max(worst, abs(val - (1 if k == n else 0)))
    return worst


def loglog_slope(ms, values) -> float:
    return float(np.polyfit(np.log(np.asarray(ms, float)), np.log(np.asarray(values, float)), 1)[0])
