"""Quasi-normed sequence spaces built from a small combinator algebra.

Every space exposes one capability, ``space.norm(f)`` for a
:class:`~tsirelson_greedy.finvec.FinVec` ``f``; :func:`norm` is the module
level entry point.  Rational engines (Tsirelson, l_1, convexifications
with integer exponents feeding them) return :class:`Fraction` values;
everything else returns floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .finvec import BlockIndex, FinVec
from .hierarchy import GrowthFunction
from .tsirelson_norm import tsirelson_norm


class SpaceDomainError(IndexError):
    """A vector has support outside the index set of a space."""


def _check_p(p) -> float:
    p = float(p)
    if not p > 0:
        raise ValueError(f"exponent p must be positive (got {p})")
    return p


def _lp_value(values: Iterable, p: float):
    vals = [abs(v) for v in values]
    if not vals:
        return Fraction(0)
    if math.isinf(p):
        return max(vals)
    if p == 1:
        return sum(vals[1:], vals[0])
    return sum(float(v) ** p for v in vals) ** (1.0 / p)


def _root(value, p: float):
    """``value ** (1/p)`` keeping exact rationals when p == 1."""
    if p == 1:
        return value
    return float(value) ** (1.0 / p)


class SpaceHandle:
    """Base class for quasi-normed sequence spaces.

    ``modulus`` is the quasi-triangle constant: ``|f+g| <= modulus (|f| + |g|)``.
    ``unconditional`` flags engines whose unit vectors form a 1-unconditional basis.
    """

    unconditional: bool = True
    exact: bool = False

    def norm(self, f: FinVec):
        raise NotImplementedError

    @property
    def modulus(self) -> float:
        return 1.0

    def dimension(self) -> int | None:
        """Number of basis vectors, or None for infinite-dimensional spaces."""
        return None

    def check_support(self, f: FinVec) -> None:
        dim = self.dimension()
        for i in f.support:
            if not isinstance(i, int):
                raise SpaceDomainError(f"{self} is indexed by positive integers, got {i!r}")
            if dim is not None and i > dim:
                raise SpaceDomainError(f"index {i} outside {self} (dimension {dim})")


@dataclass(frozen=True)
class Tsirelson(SpaceHandle):
    exact = True

    def norm(self, f):
        self.check_support(f)
        return tsirelson_norm(f)

    def __str__(self):
        return "tsirelson"


@dataclass(frozen=True)
class Lp(SpaceHandle):
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))

    @property
    def exact(self):
        return self.p == 1 or math.isinf(self.p)

    @property
    def modulus(self):
        return 1.0 if self.p >= 1 else 2.0 ** (1.0 / self.p - 1.0)

    def norm(self, f):
        self.check_support(f)
        return _lp_value(f.values(), self.p)

    def __str__(self):
        return f"lp(p={self.p:g})"


@dataclass(frozen=True)
class FiniteLp(Lp):
    n: int = 1

    def __post_init__(self):
        super().__post_init__()
        if self.n < 1:
            raise ValueError("dimension must be positive")

    def dimension(self):
        return self.n

    def __str__(self):
        return f"lpn(p={self.p:g},n={self.n})"


@dataclass(frozen=True)
class Convexify(SpaceHandle):
    """``f -> |(|f|^p)|_inner^(1/p)``."""

    inner: SpaceHandle
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))

    @property
    def exact(self):
        return self.p == 1 and self.inner.exact

    @property
    def modulus(self):
        # a p-convexification of a lattice norm is a norm for p >= 1
        k = self.inner.modulus
        if self.p >= 1 and k == 1.0:
            return 1.0
        return max(k, 1.0) ** (1.0 / self.p) * 2.0 ** max(1.0 / self.p - 1.0, 0.0)

    @property
    def unconditional(self):
        return self.inner.unconditional

    def dimension(self):
        return self.inner.dimension()

    def norm(self, f):
        return convexify_norm(self.inner, self.p, f)

    def __str__(self):
        return f"convex({self.inner},p={self.p:g})"


def convexify_norm(inner: SpaceHandle, p, f: FinVec):
    p = _check_p(p)
    powered = abs(f) if p == 1 else f.power(p)
    if not f.is_exact and powered.is_exact:
        powered = powered.as_float()
    return _root(inner.norm(powered), p)


# -- dimension rules for direct sums ---------------------------------------

class DimRule:
    """Block dimensions ``j -> dim_j`` (``None`` means infinite)."""

    def __call__(self, j: int) -> int | None:
        raise NotImplementedError


@dataclass(frozen=True)
class GrowthDims(DimRule):
    fn: GrowthFunction
    label: str = ""

    def __call__(self, j):
        return int(self.fn(j))

    def __str__(self):
        return self.label or str(self.fn)


@dataclass(frozen=True)
class ListDims(DimRule):
    dims: tuple

    def __call__(self, j):
        if j > len(self.dims):
            raise SpaceDomainError(f"block {j} beyond the {len(self.dims)} declared blocks")
        return self.dims[j - 1]

    def __str__(self):
        return ",".join(str(d) for d in self.dims)


@dataclass(frozen=True)
class InfiniteDims(DimRule):
    def __call__(self, j):
        return None

    def __str__(self):
        return "inf"


def flat_to_block(k: int, dims: DimRule) -> BlockIndex:
    """Canonical bijection: ``k = n + sum_{i < j} dims(i)`` maps to ``(j, n)``."""
    j, offset = 1, 0
    while True:
        d = dims(j)
        if d is None:
            if j == 1:
                return BlockIndex(1, k)
            raise SpaceDomainError("flat indexing needs finite blocks before an infinite one")
        if k <= offset + d:
            return BlockIndex(j, k - offset)
        offset += d
        j += 1


def block_to_flat(idx: BlockIndex, dims: DimRule) -> int:
    return idx.inner + sum(dims(i) for i in range(1, idx.block))


@dataclass(frozen=True)
class DirectSum(SpaceHandle):
    """``(+)_j X_j`` with outer sequence space ``outer``.

    ``inners`` is either one space used for every block or a sequence with
    one entry per block.  Blocks are materialised only when touched.
    """

    outer: SpaceHandle
    inners: SpaceHandle | tuple
    dims: DimRule = field(default_factory=InfiniteDims)

    def inner(self, j: int) -> SpaceHandle:
        if isinstance(self.inners, SpaceHandle):
            return self.inners
        if j > len(self.inners):
            raise SpaceDomainError(f"block {j} beyond the {len(self.inners)} declared inner spaces")
        return self.inners[j - 1]

    @property
    def exact(self):
        inner = [self.inners] if isinstance(self.inners, SpaceHandle) else list(self.inners)
        return self.outer.exact and all(s.exact for s in inner)

    @property
    def unconditional(self):
        inner = [self.inners] if isinstance(self.inners, SpaceHandle) else list(self.inners)
        return self.outer.unconditional and all(s.unconditional for s in inner)

    @property
    def modulus(self):
        inner = [self.inners] if isinstance(self.inners, SpaceHandle) else list(self.inners)
        return self.outer.modulus * max(s.modulus for s in inner)

    def to_blocks(self, f: FinVec) -> FinVec:
        out = {}
        for i, v in f.items():
            idx = i if isinstance(i, BlockIndex) else flat_to_block(i, self.dims)
            out[idx] = v
        return FinVec(out)

    def norm(self, f):
        return direct_sum_norm(self.outer, self.inner, self.to_blocks(f), self.dims)

    def __str__(self):
        inner = self.inners if isinstance(self.inners, SpaceHandle) else "[...]"
        return f"dsum(outer={self.outer}, inner={inner}, dims={self.dims})"


def split_blocks(f: FinVec) -> dict[int, FinVec]:
    blocks: dict[int, dict] = {}
    for idx, v in f.items():
        if not isinstance(idx, BlockIndex):
            raise SpaceDomainError(f"expected block indices, got {idx!r}")
        blocks.setdefault(idx.block, {})[idx.inner] = v
    return {j: FinVec(entries) for j, entries in blocks.items()}


def direct_sum_norm(outer: SpaceHandle, inners, f: FinVec, dims: DimRule | None = None):
    """``|f| = |(|f_j|_{X_j})_j|_outer`` for block-indexed ``f``.

    ``inners`` is a space, a sequence of spaces, or a callable ``j -> space``.
    """
    if isinstance(inners, SpaceHandle):
        inner_of = lambda j: inners  # noqa: E731
    elif callable(inners):
        inner_of = inners
    else:
        seq = list(inners)

        def inner_of(j):
            if j > len(seq):
                raise SpaceDomainError(f"block {j} beyond the {len(seq)} inner spaces")
            return seq[j - 1]

    block_norms = {}
    for j, fj in split_blocks(f).items():
        if dims is not None:
            d = dims(j)
            if d is not None and fj.max_index() > d:
                raise SpaceDomainError(f"block {j} has dimension {d}, entry at {fj.max_index()}")
        block_norms[j] = inner_of(j).norm(fj)
    vec = FinVec(block_norms)
    if block_norms and not all(isinstance(v, Fraction) for v in block_norms.values()):
        vec = vec.as_float()
    return outer.norm(vec)


@dataclass(frozen=True)
class Restrict(SpaceHandle):
    """Restriction of ``inner`` to an index set (``index_map`` sends k to its image)."""

    inner: SpaceHandle
    index_map: Callable[[int], int] | None = None
    index_set: frozenset | None = None

    @property
    def exact(self):
        return self.inner.exact

    @property
    def unconditional(self):
        return self.inner.unconditional

    @property
    def modulus(self):
        return self.inner.modulus

    def norm(self, f):
        if self.index_set is not None:
            outside = [i for i in f.support if i not in self.index_set]
            if outside:
                raise SpaceDomainError(f"indices {outside} outside the restriction")
        g = f if self.index_map is None else f.map_indices(self.index_map)
        return self.inner.norm(g)

    def __str__(self):
        return f"restrict({self.inner})"


def norm(space: SpaceHandle, f: FinVec):
    """Quasi-norm of ``f`` in ``space``."""
    return space.norm(f)


# -- reindexings ------------------------------------------------------------

def square_reindex(f: FinVec) -> FinVec:
    """Split ``f`` along ``pi(j, n) = 2n + j - 2``: odd indices -> block 1, even -> block 2."""
    out = {}
    for k, v in f.items():
        j = 1 if k % 2 == 1 else 2
        n = (k - j + 2) // 2
        out[BlockIndex(j, n)] = v
    return FinVec(out)


def square_unreindex(f: FinVec) -> FinVec:
    return FinVec({2 * idx.inner + idx.block - 2: v for idx, v in f.items()})


def tsirelson_iso_reindex(phi: Callable[[int], int], f: FinVec) -> FinVec:
    """``k = n + sum_{i < j} phi(i)`` maps to ``(j, n)``."""
    dims = GrowthDims(phi) if isinstance(phi, GrowthFunction) else _CallableDims(phi)
    return FinVec({flat_to_block(k, dims): v for k, v in f.items()})


def tsirelson_iso_unreindex(phi: Callable[[int], int], f: FinVec) -> FinVec:
    dims = GrowthDims(phi) if isinstance(phi, GrowthFunction) else _CallableDims(phi)
    return FinVec({block_to_flat(idx, dims): v for idx, v in f.items()})


@dataclass(frozen=True)
class _CallableDims(DimRule):
    fn: Callable[[int], int]

    def __call__(self, j):
        return int(self.fn(j))


def square_split_norms(f: FinVec, space: SpaceHandle | None = None):
    """``(|f|, max(|f_1|, |f_2|))`` for the odd/even split of ``f``.

    The square ``X (+) X`` carries the max of the two block norms.
    """
    space = Tsirelson() if space is None else space
    blocks = split_blocks(square_reindex(f))
    whole = space.norm(f)
    parts = [space.norm(blocks[j]) for j in (1, 2) if j in blocks]
    return whole, max(parts) if parts else Fraction(0)


def iso_norms(phi: Callable[[int], int], f: FinVec, p=1):
    """``(|f|_{T^(p)}, |pi f|)`` with ``pi f`` in ``((+) l_p^{phi(j)})_{T^(p)}``."""
    p = _check_p(p)
    dims = GrowthDims(phi) if isinstance(phi, GrowthFunction) else _CallableDims(phi)
    outer = Tsirelson() if p == 1 else Convexify(Tsirelson(), p)
    space = DirectSum(outer, Lp(p), dims)
    return outer.norm(f), space.norm(tsirelson_iso_reindex(phi, f))


def ratio(a, b) -> float:
    if a == 0 and b == 0:
        return 1.0
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return float(a / b)
    return float(a) / float(b)


def block_inner_norms(space: DirectSum, f: FinVec) -> dict:
    return {j: space.inner(j).norm(fj) for j, fj in split_blocks(space.to_blocks(f)).items()}


__all__ = [
    "SpaceHandle", "Tsirelson", "Lp", "FiniteLp", "Convexify", "DirectSum", "Restrict",
    "DimRule", "GrowthDims", "ListDims", "InfiniteDims", "SpaceDomainError",
    "norm", "convexify_norm", "direct_sum_norm", "square_reindex", "square_unreindex",
    "tsirelson_iso_reindex", "tsirelson_iso_unreindex", "square_split_norms", "iso_norms",
    "flat_to_block", "block_to_flat", "split_blocks", "ratio",
]
