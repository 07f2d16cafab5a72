"""Parser for textual space descriptors.

Grammar (keywords are case-insensitive, blanks are ignored)::

    space    := "tsirelson" | "lp(p=" REAL ")" | "lpn(p=" REAL ",n=" INT ")"
              | "convex(" space ",p=" REAL ")"
              | "dsum(outer=" space ",inner=" space ",dims=" dimspec ")"
              | "wtrig(lambda=" REAL ",dim=" INT ")" | "rot(a=" REAL ",dim=" INT ")"
              | "dkk(base=" space ",s=" space ",sigma=" intlist ")"
    dimspec  := "fgh(" INT ")" | "id" | "const(" INT ")" | intlist
    intlist  := INT ("," INT)*          (optionally wrapped in brackets)
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .core_spaces import Convexify, DirectSum, FiniteLp, GrowthDims, ListDims, Lp, SpaceHandle, Tsirelson
from .dkk import DKK, OrderedPartition
from .hierarchy import FGH, Const, Identity
from .trig import RotatedTrigSum, WeightedTrig


class DescriptorError(ValueError):
    pass


class DescriptorSyntaxError(DescriptorError):
    def __init__(self, text: str, pos: int, expected):
        self.text, self.pos = text, pos
        self.expected = tuple(expected)
        found = repr(text[pos:pos + 12]) if pos < len(text) else "end of input"
        msg = f"at position {pos}: expected {' or '.join(self.expected)}, found {found}\n  {text}\n  {' ' * pos}^"
        super().__init__(msg)


class DescriptorSemanticError(DescriptorError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<punct>[(),=\[\]]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise DescriptorSyntaxError(text, pos, ["a name, number or one of ( ) , = [ ]"])
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, *expected):
        raise DescriptorSyntaxError(self.text, self.cur.pos, expected)

    def punct(self, ch: str):
        if self.cur.kind == "punct" and self.cur.text == ch:
            self.i += 1
            return
        self.fail(repr(ch))

    def peek_punct(self, ch: str) -> bool:
        return self.cur.kind == "punct" and self.cur.text == ch

    def keyword(self, *words):
        if self.cur.kind == "name" and self.cur.text.lower() in words:
            w = self.cur.text.lower()
            self.i += 1
            return w
        self.fail(*(repr(w) for w in words))

    def number(self, integer: bool = False):
        if self.cur.kind != "num" or (integer and not re.fullmatch(r"[+-]?\d+", self.cur.text)):
            self.fail("an integer" if integer else "a number")
        tok = self.cur
        self.i += 1
        return (int(tok.text) if integer else float(tok.text)), tok.pos

    def arg(self, name: str):
        self.keyword(name)
        self.punct("=")

    def int_list(self) -> tuple[int, ...]:
        bracket = self.peek_punct("[")
        if bracket:
            self.punct("[")
        vals = [self.number(integer=True)[0]]
        while self.peek_punct(","):
            self.punct(",")
            vals.append(self.number(integer=True)[0])
        if bracket:
            self.punct("]")
        return tuple(vals)

    # -- grammar ------------------------------------------------------------
    def space(self) -> SpaceHandle:
        word = self.keyword("tsirelson", "lp", "lpn", "convex", "dsum", "wtrig", "rot", "dkk")
        return getattr(self, f"_{word}")()

    def _positive(self, name: str):
        val, pos = self.number()
        if not val > 0:
            raise DescriptorSemanticError(f"at position {pos}: {name} must be positive, got {val:g}")
        return val

    def _count(self, name: str):
        val, pos = self.number(integer=True)
        if val < 1:
            raise DescriptorSemanticError(f"at position {pos}: {name} must be >= 1, got {val}")
        return val

    def _tsirelson(self):
        return Tsirelson()

    def _lp(self):
        self.punct("(")
        self.arg("p")
        p = self._positive("p")
        self.punct(")")
        return Lp(p)

    def _lpn(self):
        self.punct("(")
        self.arg("p")
        p = self._positive("p")
        self.punct(",")
        self.arg("n")
        n = self._count("n")
        self.punct(")")
        return FiniteLp(p, n)

    def _convex(self):
        self.punct("(")
        inner = self.space()
        self.punct(",")
        self.arg("p")
        p = self._positive("p")
        self.punct(")")
        return Convexify(inner, p)

    def _dims(self):
        if self.cur.kind == "name":
            word = self.keyword("fgh", "id", "const")
            if word == "id":
                return GrowthDims(Identity(), "id")
            self.punct("(")
            val, pos = self.number(integer=True)
            self.punct(")")
            if word == "fgh":
                if val < 0:
                    raise DescriptorSemanticError(f"at position {pos}: hierarchy level must be >= 0")
                return GrowthDims(FGH(val), f"fgh({val})")
            if val < 1:
                raise DescriptorSemanticError(f"at position {pos}: block dimension must be >= 1")
            return GrowthDims(Const(val), f"const({val})")
        if self.cur.kind == "num" or self.peek_punct("["):
            start = self.cur.pos
            dims = self.int_list()
            if any(d < 1 for d in dims):
                raise DescriptorSemanticError(f"at position {start}: block dimensions must be >= 1")
            return ListDims(dims)
        self.fail("'fgh'", "'id'", "'const'", "an integer list")

    def _dsum(self):
        self.punct("(")
        self.arg("outer")
        outer = self.space()
        self.punct(",")
        self.arg("inner")
        inner = self.space()
        self.punct(",")
        self.arg("dims")
        dims = self._dims()
        self.punct(")")
        return DirectSum(outer, inner, dims)

    def _wtrig(self):
        self.punct("(")
        self.arg("lambda")
        lam, pos = self.number()
        if not -1 < lam < 1:
            raise DescriptorSemanticError(f"at position {pos}: lambda must lie in (-1, 1), got {lam:g}")
        self.punct(",")
        self.arg("dim")
        dim = self._count("dim")
        self.punct(")")
        return WeightedTrig(lam, dim)

    def _rot(self):
        self.punct("(")
        self.arg("a")
        a, pos = self.number()
        if not 0 < a < 1:
            raise DescriptorSemanticError(f"at position {pos}: a must lie in (0, 1), got {a:g}")
        self.punct(",")
        self.arg("dim")
        dim = self._count("dim")
        self.punct(")")
        return RotatedTrigSum(a, dim)

    def _dkk(self):
        self.punct("(")
        self.arg("base")
        base = self.space()
        self.punct(",")
        self.arg("s")
        pos = self.cur.pos
        S = self.space()
        if not isinstance(S, Lp):
            raise DescriptorSemanticError(f"at position {pos}: s must be an lp space, got {S}")
        self.punct(",")
        self.arg("sigma")
        start = self.cur.pos
        lengths = self.int_list()
        if any(x < 1 for x in lengths):
            raise DescriptorSemanticError(f"at position {start}: block lengths must be >= 1")
        self.punct(")")
        return DKK(base, S, OrderedPartition(lengths))


def parse_space_descriptor(text: str) -> SpaceHandle:
    """Build the space described by ``text``; raises :class:`DescriptorError` on bad input."""
    parser = _Parser(text)
    space = parser.space()
    if parser.cur.kind != "end":
        parser.fail("end of input")
    return space


def parse_dims(text: str):
    """Parse a bare ``dimspec`` (``fgh(n)``, ``id``, ``const(c)`` or an integer list)."""
    parser = _Parser(text)
    dims = parser._dims()
    if parser.cur.kind != "end":
        parser.fail("end of input")
    return dims
