"""Finitely supported scalar sequences.

Indices are positive integers for plain sequence spaces and
:class:`BlockIndex` pairs for direct sums.  Scalars are exact
:class:`~fractions.Fraction` values or binary64 floats; mixing the two
degrades to floats.
"""
from __future__ import annotations

import json
import numbers
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

Scalar = Union[Fraction, float]


class BlockIndex(NamedTuple):
    """Position ``inner`` inside block ``block`` of a direct sum."""

    block: int
    inner: int


Index = Union[int, BlockIndex]


def as_scalar(value) -> Scalar:
    """Coerce ``value`` to an exact rational when possible, else a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    return float(value)


def _check_index(idx) -> Index:
    if isinstance(idx, BlockIndex):
        if idx.block < 1 or idx.inner < 1:
            raise IndexError(f"block index {idx} must have positive components")
        return idx
    if isinstance(idx, tuple) and len(idx) == 2:
        return _check_index(BlockIndex(int(idx[0]), int(idx[1])))
    if isinstance(idx, numbers.Integral) and not isinstance(idx, bool):
        if idx < 1:
            raise IndexError(f"index {idx} must be >= 1")
        return int(idx)
    raise TypeError(f"unsupported index {idx!r}")


class FinVec:
    """Immutable finitely supported vector ``index -> scalar``.

    Zero entries are never stored, so ``len(v)`` is the support size.
    """

    __slots__ = ("_entries", "_support")

    def __init__(self, entries: Mapping | Iterable = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict = {}
        for idx, val in items:
            idx = _check_index(idx)
            val = as_scalar(val)
            if val != 0:
                clean[idx] = val
            else:
                clean.pop(idx, None)
        self._support = tuple(sorted(clean))
        self._entries = MappingProxyType({i: clean[i] for i in self._support})

    # -- constructors -----------------------------------------------------
    @classmethod
    def unit(cls, n: Index) -> "FinVec":
        return cls({n: 1})

    @classmethod
    def indicator(cls, indices: Iterable[Index], signs: Iterable | None = None) -> "FinVec":
        indices = list(indices)
        if signs is None:
            return cls({i: 1 for i in indices})
        return cls(dict(zip(indices, signs)))

    @classmethod
    def from_dense(cls, values: Iterable, start: int = 1) -> "FinVec":
        return cls({start + k: v for k, v in enumerate(values)})

    @classmethod
    def from_triples(cls, triples: Iterable) -> "FinVec":
        return cls({int(i): Fraction(int(num), int(den)) for i, num, den in triples})

    @classmethod
    def parse(cls, text: str) -> "FinVec":
        """Parse a JSON array (dense values or ``[index, num, den]`` triples) or a CSV row."""
        text = text.strip()
        if text.startswith("["):
            data = json.loads(text)
            if data and all(isinstance(t, list) for t in data):
                if any(len(t) != 3 for t in data):
                    raise ValueError("triples must have the form [index, numerator, denominator]")
                return cls.from_triples(data)
            return cls.from_dense(data)
        return cls.from_dense(tok for tok in text.split(",") if tok.strip())

    # -- mapping protocol -------------------------------------------------
    def __getitem__(self, idx) -> Scalar:
        return self._entries.get(idx, Fraction(0))

    def __len__(self) -> int:
        return len(self._support)

    def __iter__(self):
        return iter(self._support)

    def __contains__(self, idx) -> bool:
        return idx in self._entries

    def items(self):
        return self._entries.items()

    def values(self):
        return self._entries.values()

    @property
    def support(self) -> tuple:
        return self._support

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self._entries.values())

    def max_index(self) -> int:
        return max(self._support) if self._support else 0

    # -- algebra ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, FinVec):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    def __hash__(self):
        return hash(tuple(self._entries.items()))

    def __add__(self, other: "FinVec") -> "FinVec":
        out = dict(self._entries)
        for i, v in other.items():
            out[i] = out.get(i, 0) + v
        return FinVec(out)

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + (-other)

    def __neg__(self) -> "FinVec":
        return FinVec({i: -v for i, v in self.items()})

    def __mul__(self, c) -> "FinVec":
        c = as_scalar(c)
        return FinVec({i: c * v for i, v in self.items()})

    __rmul__ = __mul__

    def __abs__(self) -> "FinVec":
        return FinVec({i: abs(v) for i, v in self.items()})

    def power(self, p) -> "FinVec":
        """Coordinatewise ``|a_n|^p``; stays exact for positive integer ``p``."""
        if isinstance(p, numbers.Integral) or (isinstance(p, float) and p.is_integer() and p > 0):
            k = int(p)
            return FinVec({i: abs(v) ** k for i, v in self.items()})
        return FinVec({i: float(abs(v)) ** p for i, v in self.items()})

    def restrict(self, indices) -> "FinVec":
        keep = set(indices)
        return FinVec({i: v for i, v in self.items() if i in keep})

    def drop(self, indices) -> "FinVec":
        gone = set(indices)
        return FinVec({i: v for i, v in self.items() if i not in gone})

    def map_indices(self, fn) -> "FinVec":
        out: dict = {}
        for i, v in self.items():
            j = fn(i)
            if j in out:
                raise ValueError(f"index map is not injective on the support ({i} -> {j})")
            out[j] = v
        return FinVec(out)

    def as_float(self) -> "FinVec":
        return FinVec({i: float(v) for i, v in self.items()})

    def dense(self, n: int | None = None, dtype=float) -> list:
        n = self.max_index() if n is None else n
        return [dtype(self[i]) for i in range(1, n + 1)]

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {v}" for i, v in self.items())
        return f"FinVec({{{body}}})"
