"""Recursive-descent parser for superfunction expressions.

Grammar (whitespace ignored, no implicit multiplication)::

    expr   := ["+" | "-"] term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" exp)?
    atom   := number | "i" | "pi" | ident | "abs(x)" | "absS(x)" | "(" expr ")"
    exp    := ["-"] integer | "(" ["-"] integer ["/" integer] ")"

Products keep their written order when lowered, so fermionic variables and
Clifford generators are never reordered before the algebra canonicalizes them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..algebra import Dims, GaussQ, SuperExpr
from ..operators import super_pow, supervector, witt, zcvar, zgcvar, zgvar, zvar

__all__ = [
    "ParseError",
    "Num",
    "Imag",
    "Pi",
    "Var",
    "Abs",
    "Neg",
    "BinOp",
    "Pow",
    "tokenize",
    "parse_ast",
    "lower",
    "parse",
]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} at position {pos}")
        self.pos = pos


# ------------------------------------------------------------------- AST
@dataclass(frozen=True)
class Num:
    value: Fraction | float


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    kind: str  # x, xg, yg, z, zc, zg, zgc, e, eg, f, fd, fg, fgd
    index: int


@dataclass(frozen=True)
class Abs:
    super_: bool  # False: bosonic |x|, True: super |x|


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: Fraction


_KINDS = ("x", "xg", "yg", "z", "zc", "zg", "zgc", "e", "eg", "f", "fd", "fg", "fgd")

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+(?:[eE][+-]?\d+)?|\d+/\d+|\d+)"
    r"|(?P<ident>[A-Za-z]+\d*)"
    r"|(?P<op>[-+*^()])"
    r")"
)


def tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        kind, val, pos = self.take()
        if val != text or kind == "end":
            raise ParseError(f"expected {text!r}, found {val or 'end of input'!r}", pos)

    def accept(self, text: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "op" and val == text:
            self.i += 1
            return True
        return False

    def expr(self):
        neg = False
        if self.accept("-"):
            neg = True
        else:
            self.accept("+")
        node = self.term()
        if neg:
            node = Neg(node)
        while True:
            if self.accept("+"):
                node = BinOp("+", node, self.term())
            elif self.accept("-"):
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while self.accept("*"):
            node = BinOp("*", node, self.factor())
        return node

    def factor(self):
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.exponent())
        return base

    def _integer(self) -> int:
        kind, val, pos = self.take()
        if kind != "num" or not val.isdigit():
            raise ParseError(f"expected an integer exponent, found {val or 'end of input'!r}", pos)
        return int(val)

    def exponent(self) -> Fraction:
        if self.accept("("):
            sign = -1 if self.accept("-") else 1
            kind, val, pos = self.take()
            if kind != "num" or not re.fullmatch(r"\d+(/\d+)?", val):
                raise ParseError(f"expected a rational exponent, found {val!r}", pos)
            self.expect(")")
            return sign * Fraction(val)
        sign = -1 if self.accept("-") else 1
        return Fraction(sign * self._integer())

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            if re.fullmatch(r"\d+(/\d+)?", val):
                if "/" in val and int(val.split("/")[1]) == 0:
                    raise ParseError("division by zero", pos)
                return Num(Fraction(val))
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if val == "i":
                return Imag()
            if val == "pi":
                return Pi()
            if val in ("abs", "absS"):
                self.expect("(")
                _k, v2, p2 = self.take()
                if v2 != "x":
                    raise ParseError(f"{val}() takes the argument x", p2)
                self.expect(")")
                return Abs(val == "absS")
            m = re.fullmatch(r"([A-Za-z]+)(\d+)", val)
            if not m or m.group(1) not in _KINDS:
                raise ParseError(f"unknown symbol {val!r}", pos)
            idx = int(m.group(2))
            if idx < 1:
                raise ParseError(f"index of {val!r} must be positive", pos)
            return Var(m.group(1), idx)
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_ast(src: str):
    p = _Parser(src)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return node


# ---------------------------------------------------------------- lowering
def _uses_params(node) -> bool:
    if isinstance(node, Var):
        return node.kind == "yg"
    if isinstance(node, Neg):
        return _uses_params(node.operand)
    if isinstance(node, BinOp):
        return _uses_params(node.left) or _uses_params(node.right)
    if isinstance(node, Pow):
        return _uses_params(node.base)
    return False


def _check_range(v: Var, limit: int, what: str):
    if not 1 <= v.index <= limit:
        raise IndexError(f"{v.kind}{v.index}: {what} index out of range 1..{limit}")


def _need_hermitian(d: Dims, v: Var):
    if not d.hermitian:
        raise ValueError(f"{v.kind}{v.index} needs hermitian dimensions")


def _lower_var(v: Var, d: Dims) -> SuperExpr:
    k = v.kind
    if k == "x":
        _check_range(v, d.p, "bosonic")
        return SuperExpr.var(d, v.index)
    if k == "xg":
        _check_range(v, 2 * d.n, "fermionic")
        return SuperExpr.fvar(d, v.index)
    if k == "yg":
        _check_range(v, 2 * d.n, "parameter")
        return SuperExpr.param(d, v.index)
    if k == "e":
        _check_range(v, d.p, "orthogonal generator")
        return SuperExpr.gen(d, v.index)
    if k == "eg":
        _check_range(v, 2 * d.n, "symplectic generator")
        return SuperExpr.sgen(d, v.index)
    _need_hermitian(d, v)
    if k in ("z", "zc", "f", "fd"):
        _check_range(v, d.m, "complex bosonic")
        if k == "z":
            return zvar(d, v.index)
        if k == "zc":
            return zcvar(d, v.index)
        return witt(d, k, v.index)
    _check_range(v, d.n, "complex fermionic")
    if k == "zg":
        return zgvar(d, v.index)
    if k == "zgc":
        return zgcvar(d, v.index)
    return witt(d, k, v.index)


def _lower(node, d: Dims) -> SuperExpr:
    if isinstance(node, Num):
        return SuperExpr.const(d, node.value)
    if isinstance(node, Imag):
        return SuperExpr.const(d, GaussQ(0, 1))
    if isinstance(node, Pi):
        return SuperExpr.const(d, 1, pipow=2)
    if isinstance(node, Var):
        return _lower_var(node, d)
    if isinstance(node, Abs):
        return _abs_power(node, Fraction(1), d)
    if isinstance(node, Neg):
        return -_lower(node.operand, d)
    if isinstance(node, BinOp):
        a, b = _lower(node.left, d), _lower(node.right, d)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Pow):
        e = node.exp
        if isinstance(node.base, Abs):
            return _abs_power(node.base, e, d)
        if isinstance(node.base, Pi):
            if (2 * e).denominator != 1:
                raise ValueError("powers of pi must be multiples of 1/2")
            return SuperExpr.const(d, 1, pipow=int(2 * e))
        if e.denominator != 1 or e < 0:
            raise ValueError(f"exponent {e} must be a nonnegative integer here")
        return _lower(node.base, d) ** int(e)
    raise TypeError(f"unknown node {node!r}")


def _abs_power(node: Abs, e: Fraction, d: Dims) -> SuperExpr:
    if not node.super_:
        return SuperExpr.radial(d, e)
    x = supervector(d)
    return super_pow(-(x * x), e / 2)


def lower(node, dims: Dims) -> SuperExpr:
    if _uses_params(node) and not dims.params:
        dims = dims.with_params()
    return _lower(node, dims)


def parse(src: str, dims: Dims) -> SuperExpr:
    """Parse ``src`` and lower it to a SuperExpr over ``dims``."""
    return lower(parse_ast(src), dims)
