"""Expressions ``f: R^d -> R`` with exact symbolic partial derivatives.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? atom ('^' '-'? integer)?
    atom   := decimal | 'x' index | '(' expr ')'

Decimals are read exactly (``0.3`` is 3/10).  ``-x1^2`` means ``-(x1^2)``.
Trees are built through folding constructors, so the parser and the
differentiator both produce a canonical form and printing round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product as cartesian
from typing import Callable, Sequence

from .errors import DivisionDomainError, DomainError, ExprSyntaxError
from .numeric import Interval, as_rational


class Expr:
    """Base node.  Subclasses are frozen dataclasses."""

    prec = 5

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __str__(self) -> str:
        return to_text(self)

    @cached_property
    def point_fn(self) -> Callable[[Sequence[Fraction]], Fraction]:
        return _compile_point(self)

    @cached_property
    def interval_fn(self) -> Callable[[Sequence[Interval]], Interval]:
        return _compile_interval(self)

    @cached_property
    def _partials(self) -> dict:
        return {}

    def partial(self, i: int) -> Expr:
        cache = self._partials
        if i not in cache:
            cache[i] = _diff(self, i)
        return cache[i]


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    prec = 3


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr
    prec = 1


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr
    prec = 1


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr
    prec = 2


@dataclass(frozen=True, eq=True)
class Div(Expr):
    left: Expr
    right: Expr
    prec = 2


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exp: int
    prec = 4


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _lift(x) -> Expr:
    return x if isinstance(x, Expr) else Const(as_rational(x))


def const(x) -> Const:
    return Const(as_rational(x))


def var(i: int) -> Var:
    if i < 1:
        raise DomainError("variable indices start at 1")
    return Var(i)


# folding constructors


def _is(e: Expr, v) -> bool:
    return isinstance(e, Const) and e.value == v


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if _is(a, -1):
        return neg(b)
    if _is(b, -1):
        return neg(a)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        raise DivisionDomainError("division by the constant 0")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    if _is(b, 1):
        return a
    if _is(a, 0):
        return ZERO
    return Div(a, b)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        if a.value == 0 and n < 0:
            raise DivisionDomainError("0 raised to a negative power")
        return Const(a.value**n)
    return Pow(a, n)


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str, d: int | None):
        self.text = text.replace("−", "-")
        self.d = d
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise ExprSyntaxError(msg, self.pos if pos is None else pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.take("+"):
                e = add(e, self.term())
            elif self.take("-"):
                e = sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.take("*"):
                e = mul(e, self.factor())
            elif self.take("/"):
                at = self.pos
                rhs = self.factor()
                if _is(rhs, 0):
                    self.error("division by the constant 0", at)
                e = div(e, rhs)
            else:
                return e

    def factor(self) -> Expr:
        negate = self.take("-")
        e = self.atom()
        if self.take("^"):
            sign = -1 if self.take("-") else 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("expected an integer exponent")
            n = sign * int(self.text[start:self.pos])
            if _is(e, 0) and n < 0:
                self.error("0 raised to a negative power", start)
            e = power(e, n)
        return neg(e) if negate else e

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            e = self.expr()
            if not self.take(")"):
                self.error("expected ')'")
            return e
        if ch == "x":
            start = self.pos
            self.pos += 1
            digits = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if digits == self.pos:
                self.error("expected a variable index after 'x'")
            i = int(self.text[digits:self.pos])
            if i < 1 or (self.d is not None and i > self.d):
                self.error(f"variable x{i} out of range 1..{self.d}", start)
            return Var(i)
        if ch.isdigit() or ch == ".":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
                self.pos += 1
            raw = self.text[start:self.pos]
            if raw.count(".") > 1 or raw == ".":
                self.error(f"malformed number {raw!r}", start)
            return Const(Fraction(raw))
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")


def parse_expr(text: str, d: int | None = None) -> Expr:
    """Parse ``text``; ``d`` bounds the variable indices when given."""
    return _Parser(text, d).parse()


# ---------------------------------------------------------------------------
# printing


def _const_text(v: Fraction) -> str:
    q = v.denominator
    while q % 2 == 0:
        q //= 2
    while q % 5 == 0:
        q //= 5
    if q != 1:
        return f"({v.numerator}/{v.denominator})"
    if v.denominator == 1:
        return str(v.numerator)
    # terminating decimal
    digits = 0
    while (v * 10**digits).denominator != 1:
        digits += 1
    scaled = abs(v * 10**digits).numerator
    body = str(scaled).rjust(digits + 1, "0")
    s = body[:-digits] + "." + body[-digits:]
    return ("-" if v < 0 else "") + s


def _prec(e: Expr) -> int:
    if isinstance(e, Const):
        text = _const_text(e.value)
        return 3 if text.startswith("-") else 5
    return e.prec


def _wrap(e: Expr, need: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < need else s


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 4)
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return _wrap(e.left, 1) + op + _wrap(e.right, 2)
    if isinstance(e, (Mul, Div)):
        op = " * " if isinstance(e, Mul) else " / "
        return _wrap(e.left, 2) + op + _wrap(e.right, 3)
    if isinstance(e, Pow):
        return _wrap(e.base, 5) + f"^{e.exp}"
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# calculus and evaluation


def _diff(e: Expr, i: int) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == i else ZERO
    if isinstance(e, Neg):
        return neg(e.arg.partial(i))
    if isinstance(e, Add):
        return add(e.left.partial(i), e.right.partial(i))
    if isinstance(e, Sub):
        return sub(e.left.partial(i), e.right.partial(i))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(u.partial(i), v), mul(u, v.partial(i)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = u.partial(i), v.partial(i)
        if _is(dv, 0):
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    if isinstance(e, Pow):
        return mul(mul(Const(Fraction(e.exp)), power(e.base, e.exp - 1)), e.base.partial(i))
    raise TypeError(f"unknown node {e!r}")


def differentiate(e: Expr, i: int) -> Expr:
    if i < 1:
        raise DomainError("variable indices start at 1")
    return e.partial(i)


def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Neg,)):
        return variables(e.arg)
    if isinstance(e, Pow):
        return variables(e.base)
    return variables(e.left) | variables(e.right)


def substitute(e: Expr, mapping: dict[int, Expr]) -> Expr:
    """Replace variables by expressions, refolding constants."""
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return neg(substitute(e.arg, mapping))
    if isinstance(e, Pow):
        return power(substitute(e.base, mapping), e.exp)
    l, r = substitute(e.left, mapping), substitute(e.right, mapping)
    return {Add: add, Sub: sub, Mul: mul, Div: div}[type(e)](l, r)


def reflect_variable(e: Expr, i: int, lo, hi) -> Expr:
    """``f`` with ``x_i`` replaced by ``lo + hi - x_i``."""
    c = Const(as_rational(lo) + as_rational(hi))
    return substitute(e, {i: sub(c, Var(i))})


def _compile_point(e: Expr):
    if isinstance(e, Const):
        v = e.value
        return lambda xs: v
    if isinstance(e, Var):
        k = e.index - 1
        return lambda xs: xs[k]
    if isinstance(e, Neg):
        f = _compile_point(e.arg)
        return lambda xs: -f(xs)
    if isinstance(e, Pow):
        f, n = _compile_point(e.base), e.exp

        def pw(xs):
            b = f(xs)
            if b == 0 and n < 0:
                raise DivisionDomainError("0 raised to a negative power")
            return b**n

        return pw
    f, g = _compile_point(e.left), _compile_point(e.right)
    if isinstance(e, Add):
        return lambda xs: f(xs) + g(xs)
    if isinstance(e, Sub):
        return lambda xs: f(xs) - g(xs)
    if isinstance(e, Mul):
        return lambda xs: f(xs) * g(xs)

    def dv(xs):
        den = g(xs)
        if den == 0:
            raise DivisionDomainError("division by zero")
        return f(xs) / den

    return dv


def _compile_interval(e: Expr):
    if isinstance(e, Const):
        iv = Interval(e.value, e.value)
        return lambda box: iv
    if isinstance(e, Var):
        k = e.index - 1
        return lambda box: box[k]
    if isinstance(e, Neg):
        f = _compile_interval(e.arg)
        return lambda box: -f(box)
    if isinstance(e, Pow):
        f, n = _compile_interval(e.base), e.exp
        return lambda box: f(box) ** n
    f, g = _compile_interval(e.left), _compile_interval(e.right)
    if isinstance(e, Add):
        return lambda box: f(box) + g(box)
    if isinstance(e, Sub):
        return lambda box: f(box) - g(box)
    if isinstance(e, Mul):
        return lambda box: f(box) * g(box)
    return lambda box: f(box) / g(box)


def _check_arity(e: Expr, n: int) -> None:
    vs = variables(e)
    if vs and max(vs) > n:
        raise DomainError(f"expression uses x{max(vs)} but only {n} coordinates were given")


def eval_point(e: Expr, xs: Sequence) -> Fraction:
    xs = [as_rational(x) for x in xs]
    _check_arity(e, len(xs))
    return e.point_fn(xs)


def eval_interval(e: Expr, box: Sequence[Interval]) -> Interval:
    """Natural interval extension; exact when each variable occurs once."""
    _check_arity(e, len(box))
    return e.interval_fn(box)


# ---------------------------------------------------------------------------
# derivative bounds


@dataclass(frozen=True)
class BoxBounds:
    """Enclosures of every partial derivative over one box.

    ``L[i]`` bounds ``|df/dx_i|`` from above, ``S[i]`` from below; ``signs[i]``
    is ``"+"``, ``"-"`` or ``"indefinite"``.  Index 0 is ``x1``.
    """

    enclosures: tuple[Interval, ...]
    L: tuple[Fraction, ...]
    S: tuple[Fraction, ...]
    signs: tuple[str, ...]

    def r(self, i: int) -> Fraction | None:
        """``L_i / S_i`` for the 0-based coordinate ``i``; None when ``S_i = 0``."""
        return self.L[i] / self.S[i] if self.S[i] > 0 else None

    @property
    def definite(self) -> bool:
        return all(s != "indefinite" for s in self.signs)


def partial_bounds(e: Expr, box: Sequence[Interval]) -> BoxBounds:
    _check_arity(e, len(box))
    encs, Ls, Ss, signs = [], [], [], []
    for i in range(1, len(box) + 1):
        enc = e.partial(i).interval_fn(box)
        encs.append(enc)
        Ls.append(max(abs(enc.lo), abs(enc.hi)))
        if enc.lo > 0:
            Ss.append(enc.lo)
            signs.append("+")
        elif enc.hi < 0:
            Ss.append(-enc.hi)
            signs.append("-")
        else:
            Ss.append(Fraction(0))
            signs.append("indefinite")
    return BoxBounds(tuple(encs), tuple(Ls), tuple(Ss), tuple(signs))


def monotone_box_image(e: Expr, box: Sequence[Interval], bounds: BoxBounds | None = None) -> Interval:
    """Exact image of a box under a coordinatewise monotone ``f``."""
    if bounds is None:
        bounds = partial_bounds(e, box)
    if not bounds.definite:
        raise DomainError("monotone image needs definite partial signs")
    low = [iv.lo if s == "+" else iv.hi for iv, s in zip(box, bounds.signs)]
    high = [iv.hi if s == "+" else iv.lo for iv, s in zip(box, bounds.signs)]
    f = e.point_fn
    return Interval(f(low), f(high))


def corner_image(e: Expr, box: Sequence[Interval], signs: Sequence[str]) -> Interval:
    """Like :func:`monotone_box_image` with signs already known."""
    low = [iv.lo if s == "+" else iv.hi for iv, s in zip(box, signs)]
    high = [iv.hi if s == "+" else iv.lo for iv, s in zip(box, signs)]
    f = e.point_fn
    return Interval(f(low), f(high))


def corners(box: Sequence[Interval]):
    """All vertices of a box, lexicographic in (lo, hi) per coordinate."""
    return cartesian(*[(iv.lo, iv.hi) for iv in box])
