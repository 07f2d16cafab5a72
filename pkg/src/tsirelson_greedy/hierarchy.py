"""Growth functions: the fast growing hierarchy and friends.

``F_0(j) = j + 1`` and ``F_n(j) = F_{n-1}^{(j)}(j)``.  Values are Python
integers; anything that would exceed the digit budget raises
:class:`HierarchyOverflow` instead of being computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

DEFAULT_DIGIT_BUDGET = 10_000
_LOG2_10 = math.log2(10)


class HierarchyOverflow(ArithmeticError):
    """A value would exceed the configured decimal digit budget."""

    def __init__(self, what: str, n=None, j=None, digits=None):
        self.n, self.j, self.digits = n, j, digits
        if isinstance(j, int) and j.bit_length() > 64:
            j = f"<{j.bit_length()}-bit integer>"
        super().__init__(f"{what}: value at (n={n}, j={j}) exceeds the digit budget ({digits} digits)")


def _bit_budget(digits: int) -> int:
    return int(digits * _LOG2_10) + 1


def _guard(value: int, digits: int, n=None, j=None) -> int:
    if value.bit_length() > _bit_budget(digits):
        raise HierarchyOverflow("growth function", n, j, digits)
    return value


def _fgh_iterate(n: int, k: int, j: int, digits: int) -> int:
    """``F_n^{(k)}(j)``, refusing to build numbers beyond the budget."""
    if n == 0:
        return j + k
    if n == 1:
        # F_1^{(k)}(j) = j 2^k
        if j.bit_length() + k > _bit_budget(digits):
            raise HierarchyOverflow("F_1 iterate", n, j, digits)
        return j << k
    for _ in range(k):
        j = _fgh_iterate(n - 1, j, j, digits)
    return j


@lru_cache(maxsize=4096)
def _fgh_cached(n: int, j: int, digits: int) -> int:
    return _fgh_iterate(n - 1, j, j, digits) if n > 0 else j + 1


def fgh_eval(n: int, j: int, digits: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Exact ``F_n(j)``."""
    if n < 0 or j < 1:
        raise ValueError("need n >= 0 and j >= 1")
    try:
        return _fgh_cached(n, j, digits)
    except HierarchyOverflow as exc:
        raise HierarchyOverflow("fgh_eval", n, j, digits) from exc


class GrowthFunction:
    """A map N -> N.  Subclasses implement :meth:`eval`."""

    digits: int = DEFAULT_DIGIT_BUDGET
    increasing: bool = False

    def eval(self, j: int) -> int:
        raise NotImplementedError

    def __call__(self, j: int) -> int:
        if j < 1:
            raise ValueError(f"growth functions are defined on j >= 1 (got {j})")
        return _guard(int(self.eval(j)), self.digits, j=j)

    def values(self, jmax: int) -> list[int]:
        return [self(j) for j in range(1, jmax + 1)]

    def is_increasing(self, jmax: int, start: int = 1) -> bool:
        vals = [self(j) for j in range(start, jmax + 1)]
        return all(a < b for a, b in zip(vals, vals[1:]))

    # composition helpers
    def __matmul__(self, inner: "GrowthFunction") -> "GrowthFunction":
        return Composite(self, inner)

    def __add__(self, other: "GrowthFunction") -> "GrowthFunction":
        return Sum(self, other)

    def __mul__(self, other: "GrowthFunction") -> "GrowthFunction":
        return Product(self, other)


@dataclass(frozen=True)
class FGH(GrowthFunction):
    n: int
    digits: int = DEFAULT_DIGIT_BUDGET
    increasing = True

    def eval(self, j):
        return fgh_eval(self.n, j, self.digits)


@dataclass(frozen=True)
class Identity(GrowthFunction):
    increasing = True

    def eval(self, j):
        return j


@dataclass(frozen=True)
class Const(GrowthFunction):
    c: int

    def eval(self, j):
        return self.c


@dataclass(frozen=True)
class Composite(GrowthFunction):
    outer: GrowthFunction
    inner: GrowthFunction

    def eval(self, j):
        return self.outer(self.inner(j))


@dataclass(frozen=True)
class Sum(GrowthFunction):
    left: GrowthFunction
    right: GrowthFunction

    def eval(self, j):
        return self.left(j) + self.right(j)


@dataclass(frozen=True)
class Product(GrowthFunction):
    left: GrowthFunction
    right: GrowthFunction

    def eval(self, j):
        return self.left(j) * self.right(j)


@dataclass(frozen=True)
class Power(GrowthFunction):
    """``base(j) ** exponent(j)``."""

    base: GrowthFunction
    exponent: GrowthFunction
    digits: int = DEFAULT_DIGIT_BUDGET

    def eval(self, j):
        b, e = self.base(j), self.exponent(j)
        if b > 1 and e * math.log10(b) > self.digits:
            raise HierarchyOverflow("power", j=j, digits=self.digits)
        return b**e


@dataclass(frozen=True)
class CumulativeSum(GrowthFunction):
    """``j -> sum_{i <= j} f(i)``."""

    f: GrowthFunction

    def eval(self, j):
        return sum(self.f(i) for i in range(1, j + 1))


@dataclass(frozen=True)
class Explicit(GrowthFunction):
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    def eval(self, j):
        if j > len(self.table):
            raise IndexError(f"explicit table has {len(self.table)} entries, asked for j={j}")
        return self.table[j - 1]


@dataclass(frozen=True)
class Lambda(GrowthFunction):
    """Wrap a plain callable (handy for one-off test functions)."""

    fn: Callable[[int], int]
    name: str = "lambda"

    def eval(self, j):
        return self.fn(j)


@dataclass(frozen=True)
class Alpha(GrowthFunction):
    """``k -> 5 * 2^(k-1) - 2k - 2``."""

    increasing = True
    digits: int = DEFAULT_DIGIT_BUDGET

    def eval(self, k):
        if k - 1 > _bit_budget(self.digits):
            raise HierarchyOverflow("alpha", j=k, digits=self.digits)
        return 5 * (1 << (k - 1)) - 2 * k - 2


@dataclass(frozen=True)
class Beta(GrowthFunction):
    """``k -> k^2``."""

    increasing = True

    def eval(self, k):
        return k * k


def iterate_fn(f: Callable[[int], int], n: int, j: int) -> int:
    """``f^{(n)}(j)``: ``n``-fold composition, ``f^{(0)} = Id``."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    if isinstance(f, FGH):
        try:
            return _fgh_iterate(f.n, n, j, f.digits)
        except HierarchyOverflow as exc:
            raise HierarchyOverflow("iterate_fn", f.n, j, f.digits) from exc
    for _ in range(n):
        j = f(j)
    return j


@dataclass(frozen=True)
class DominanceResult:
    holds: bool
    first_violation: int | None
    checked_range: tuple[int, int]

    def __bool__(self):
        return self.holds


def dominance_check(phi: Callable[[int], int], n: int, j0: int, jmax: int,
                    digits: int = DEFAULT_DIGIT_BUDGET) -> DominanceResult:
    """Check ``phi(j) <= F_n(j)`` for ``j0 <= j <= jmax``.

    A finite certificate only; it says nothing about ``j > jmax``.
    """
    for j in range(j0, jmax + 1):
        if phi(j) > fgh_eval(n, j, digits):
            return DominanceResult(False, j, (j0, jmax))
    return DominanceResult(True, None, (j0, jmax))


# -- the continuum family ---------------------------------------------------

@dataclass(frozen=True)
class ContinuumSpec:
    """Finite prefix of a sequence in {1, 2}^N."""

    eps: tuple

    def __post_init__(self):
        eps = tuple(int(e) for e in self.eps)
        if any(e not in (1, 2) for e in eps):
            raise ValueError("continuum prefixes take values in {1, 2}")
        object.__setattr__(self, "eps", eps)

    def __len__(self):
        return len(self.eps)


def triadic_partial_sum(spec: ContinuumSpec, j: int) -> Fraction:
    """``s(j) = sum_{n <= j} eps_n 3^{-n}``."""
    if j > len(spec):
        raise ValueError(f"prefix of length {len(spec)} is too short for j={j}")
    return sum((Fraction(e, 3**n) for n, e in enumerate(spec.eps[:j], start=1)), Fraction(0))


def triadic_rank(x: Fraction) -> int:
    """Smallest ``j`` with ``3^j x`` an integer (``x`` must be triadic)."""
    den = x.denominator
    j = 0
    while den % 3 == 0:
        den //= 3
        j += 1
    if den != 1:
        raise ValueError(f"{x} is not a triadic rational")
    return j


def nu(x: Fraction) -> int:
    """``3^{j(x)} (1 + 2x)``."""
    j = triadic_rank(x)
    val = 3**j * (1 + 2 * x)
    assert val.denominator == 1
    return int(val)


def continuum_phi(spec: ContinuumSpec, j: int) -> int:
    return nu(triadic_partial_sum(spec, j))


@dataclass(frozen=True)
class ContinuumMember(GrowthFunction):
    spec: ContinuumSpec
    increasing = True

    def eval(self, j):
        return continuum_phi(self.spec, j)


def levels_A(phi: Callable[[int], int], j: int, digits: int = DEFAULT_DIGIT_BUDGET) -> list[int]:
    """``{alpha(phi(n)) : beta(j-1) < n <= beta(j)}`` as a sorted list (size ``2j - 1``)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    alpha, beta = Alpha(digits=digits), Beta()
    lo = beta(j - 1) if j > 1 else 0
    ns = range(lo + 1, beta(j) + 1)
    vals = [phi(n) for n in ns]
    if any(a >= b for a, b in zip(vals, vals[1:])):
        raise ValueError(f"phi is not strictly increasing on ({lo}, {beta(j)}]")
    out = [alpha(v) for v in vals]
    assert len(out) == 2 * j - 1
    return out


def first_disagreement(a: Sequence[int], b: Sequence[int]) -> int | None:
    """1-based position of the first differing entry, or None if one is a prefix of the other."""
    for pos, (x, y) in enumerate(zip(a, b), start=1):
        if x != y:
            return pos
    return None
