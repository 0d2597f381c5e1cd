"""Exact rational scalars, closed intervals and normalized interval unions.

Every coordinate in the package is a :class:`fractions.Fraction`.  Floats are
rejected at the boundary so that no rounded value can leak into a proof.
Irrational constants enter only through :class:`Enclosure` objects, rational
intervals obtained with outward rounding.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DivisionDomainError, DomainError

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions and strings such as ``"1/3"`` or ``"0.3"``.
    Floats are refused because their binary expansion is rarely what the
    caller meant (``0.3`` is not 3/10).
    """
    if type(x) is Fraction:
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip().replace("−", "-"))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {x!r}") from exc
    if isinstance(x, float):
        raise TypeError(f"float {x!r} rejected; pass an exact rational string instead")
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def rational_str(x: Fraction) -> str:
    """Exact ``p/q`` rendering (integers print without a denominator)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, digits: int = 20) -> str:
    """Round-to-nearest decimal rendering with ``digits`` significant digits.

    Display only; never parsed back.
    """
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    # exponent e with 10**e <= x < 10**(e+1)
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    elif Fraction(10) ** (e + 1) <= x:
        e += 1
    scale = digits - 1 - e
    scaled = x * Fraction(10) ** scale
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    s = str(q)
    if len(s) > digits:  # rounding carried into a new digit
        e += 1
        scale -= 1
        s = s[:-1]
    point = len(s) - scale
    if scale <= 0:
        body = s + "0" * (-scale)
    elif point <= 0:
        body = "0." + "0" * (-point) + s
    else:
        body = s[:point] + "." + s[point:]
    if "." in body:
        body = body.rstrip("0").rstrip(".")
    return sign + body


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval ``[lo, hi]`` with rational endpoints; points allowed."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if type(self.lo) is not Fraction:
            object.__setattr__(self, "lo", as_rational(self.lo))
        if type(self.hi) is not Fraction:
            object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> Interval:
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def issubset(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersects(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def scale(self, c) -> Interval:
        c = as_rational(c)
        a, b = self.lo * c, self.hi * c
        return Interval(a, b) if a <= b else Interval(b, a)

    def shift(self, t) -> Interval:
        t = as_rational(t)
        return Interval(self.lo + t, self.hi + t)

    def __add__(self, other: Interval) -> Interval:
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: Interval) -> Interval:
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: Interval) -> Interval:
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a >= 0 and c >= 0:
            return Interval(a * c, b * d)
        ps = (a * c, a * d, b * c, b * d)
        return Interval(min(ps), max(ps))

    def __truediv__(self, other: Interval) -> Interval:
        if other.lo <= 0 <= other.hi:
            raise DivisionDomainError(f"divisor {other} contains 0")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __pow__(self, n: int) -> Interval:
        if n == 0:
            return Interval(Fraction(1), Fraction(1))
        if n < 0:
            return Interval(Fraction(1), Fraction(1)) / (self ** (-n))
        a, b = self.lo**n, self.hi**n
        if n % 2 == 1 or self.lo >= 0:
            return Interval(a, b) if a <= b else Interval(b, a)
        if self.hi <= 0:
            return Interval(b, a)
        return Interval(Fraction(0), max(a, b))

    def __repr__(self) -> str:
        return f"[{rational_str(self.lo)}, {rational_str(self.hi)}]"


def union_normalize(intervals: Iterable[Interval]) -> IntervalUnion:
    """Sort and merge overlapping or touching intervals."""
    items = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
    merged: list[Interval] = []
    if not items:
        return IntervalUnion(())
    lo, hi = items[0].lo, items[0].hi
    for iv in items[1:]:
        if iv.lo <= hi:
            if iv.hi > hi:
                hi = iv.hi
        else:
            merged.append(Interval(lo, hi))
            lo, hi = iv.lo, iv.hi
    merged.append(Interval(lo, hi))
    return IntervalUnion(tuple(merged), _checked=True)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, strictly separated finite union of closed intervals.

    Build instances with :func:`union_normalize` or :meth:`of`; the raw
    constructor validates that ``parts`` is already canonical.
    """

    parts: tuple[Interval, ...]
    _checked: bool = False

    def __post_init__(self):
        if not self._checked:
            parts = tuple(self.parts)
            for p, q in zip(parts, parts[1:]):
                if not p.hi < q.lo:
                    raise DomainError("IntervalUnion parts must be sorted and separated")
            object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_checked", True)

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    @classmethod
    def of(cls, *intervals) -> IntervalUnion:
        """Normalize intervals given as :class:`Interval` or ``(lo, hi)`` pairs."""
        ivs = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
        return union_normalize(ivs)

    @classmethod
    def empty(cls) -> IntervalUnion:
        return cls(())

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(p) for p in self.parts) + "}"

    @property
    def hull(self) -> Interval:
        if not self.parts:
            raise DomainError("empty union has no hull")
        return Interval(self.parts[0].lo, self.parts[-1].hi)

    def measure(self) -> Fraction:
        return union_measure(self)

    def gaps(self) -> list[Interval]:
        return union_gaps(self)

    def _locate(self, x) -> int:
        # index of the last part with lo <= x, or -1
        los = [p.lo for p in self.parts]
        return bisect.bisect_right(los, x) - 1

    def contains(self, x) -> bool:
        i = self._locate(x)
        return i >= 0 and x <= self.parts[i].hi

    def contains_interval(self, iv: Interval) -> bool:
        i = self._locate(iv.lo)
        return i >= 0 and iv.hi <= self.parts[i].hi

    def issubset(self, other: IntervalUnion) -> bool:
        return all(other.contains_interval(p) for p in self.parts)

    def intersection(self, other: IntervalUnion) -> IntervalUnion:
        out = []
        i = j = 0
        a, b = self.parts, other.parts
        while i < len(a) and j < len(b):
            lo = max(a[i].lo, b[j].lo)
            hi = min(a[i].hi, b[j].hi)
            if lo <= hi:
                out.append(Interval(lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return union_normalize(out)

    def union(self, other: IntervalUnion) -> IntervalUnion:
        return union_normalize(self.parts + other.parts)

    def scale(self, c) -> IntervalUnion:
        return union_normalize(p.scale(c) for p in self.parts)

    def shift(self, t) -> IntervalUnion:
        return union_normalize(p.shift(t) for p in self.parts)

    def negate(self) -> IntervalUnion:
        return union_normalize(-p for p in self.parts)


def union_measure(u: IntervalUnion) -> Fraction:
    return sum((p.hi - p.lo for p in u.parts), Fraction(0))


def union_gaps(u: IntervalUnion) -> list[Interval]:
    """Closures of the bounded complementary components, left to right."""
    return [Interval(p.hi, q.lo) for p, q in zip(u.parts, u.parts[1:])]


_OPS = {
    "sum": Interval.__add__,
    "diff": Interval.__sub__,
    "product": Interval.__mul__,
    "quotient": Interval.__truediv__,
}


def union_pointwise(a: IntervalUnion, b: IntervalUnion, op: str) -> IntervalUnion:
    """Exact image of ``a x b`` under ``+``, ``-``, ``*`` or ``/``.

    Exact because each part is a full interval and every operation is
    continuous on a product of intervals (divisors must avoid 0).
    """
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(_OPS)}") from None
    if op == "quotient":
        for q in b.parts:
            if q.contains_zero():
                raise DivisionDomainError(f"divisor part {q} contains 0")
    return union_normalize(fn(p, q) for p in a.parts for q in b.parts)


# ---------------------------------------------------------------------------
# enclosures of irrational quantities


@dataclass(frozen=True)
class Enclosure:
    """Rational interval certified to contain an irrational value."""

    value: Interval
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits <= 0:
            raise DomainError("precision_bits must be positive")

    @property
    def lo(self) -> Fraction:
        return self.value.lo

    @property
    def hi(self) -> Fraction:
        return self.value.hi

    def width_ok(self) -> bool:
        v = self.value
        return v.width <= Fraction(1, 2**self.precision_bits) * max(Fraction(1), abs(v.lo))


def iroot(x: int, n: int) -> int:
    """Floor of the real n-th root of a nonnegative integer."""
    if x < 0:
        raise DomainError("iroot of a negative integer")
    if n == 1 or x < 2:
        return x
    if n == 2:
        import math

        return math.isqrt(x)
    r = 1 << ((x.bit_length() + n - 1) // n)  # r**n >= x
    while True:
        s = ((n - 1) * r + x // r ** (n - 1)) // n
        if s >= r:
            break
        r = s
    while r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def root_enclosure(x, n: int, precision_bits: int = 128) -> Enclosure:
    """Dyadic enclosure of ``x ** (1/n)``; a point when the root is rational."""
    x = as_rational(x)
    if n < 1:
        raise DomainError("root degree must be positive")
    if x < 0:
        raise DomainError(f"root of negative number {x}")
    p, q = x.numerator, x.denominator
    rp, rq = iroot(p, n), iroot(q, n)
    if rp**n == p and rq**n == q:
        return Enclosure(Interval.point(Fraction(rp, rq)), precision_bits)
    scale = 1 << precision_bits
    m = iroot((p * scale**n) // q, n)
    # m**n <= floor(x 2^(pn)) and (m+1)**n > x 2^(pn)
    return Enclosure(Interval(Fraction(m, scale), Fraction(m + 1, scale)), precision_bits)


def _e_fixed(q: int) -> tuple[int, int]:
    """Return (T, err) with e * 2**q in [T, T + err]."""
    t = 1 << q
    total = t
    k = 0
    while t:
        k += 1
        t //= k
        total += t
    # each floor chain loses < 2 ulps per term; the omitted tail is < 1 ulp
    return total, 2 * (k + 1) + 8


def _atan_inv_fixed(x: int, q: int) -> tuple[int, int]:
    """Return (A, err) with atan(1/x) * 2**q in [A - err, A + err]."""
    p = (1 << q) // x
    x2 = x * x
    total = 0
    k = 0
    while p:
        term = p // (2 * k + 1)
        total += -term if k % 2 else term
        p //= x2
        k += 1
    return total, 3 * (k + 1) + 2


def constant_enclosure(name: str, precision_bits: int = 128) -> Enclosure:
    """Enclosure of ``e``, ``pi`` or ``sqrt2`` of width at most 2**-precision_bits."""
    if name == "sqrt2":
        return root_enclosure(2, 2, precision_bits)
    guard = 32
    q = precision_bits + guard
    if name == "e":
        t, err = _e_fixed(q)
        lo, hi = t, t + err
    elif name == "pi":
        a, ea = _atan_inv_fixed(5, q)
        b, eb = _atan_inv_fixed(239, q)
        mid = 16 * a - 4 * b
        err = 16 * ea + 4 * eb
        lo, hi = mid - err, mid + err
    else:
        raise DomainError(f"unknown constant {name!r}; expected 'e', 'pi' or 'sqrt2'")
    # fold the guard bits back with outward rounding onto a 2**-(bits+1) grid
    lo_r = lo >> (guard - 1)
    hi_r = -((-hi) >> (guard - 1))
    scale = 1 << (precision_bits + 1)
    return Enclosure(Interval(Fraction(lo_r, scale), Fraction(hi_r, scale)), precision_bits)


def enclosure_of(value, precision_bits: int = 128) -> Interval:
    """Interval for a rational, an :class:`Enclosure`, an Interval, or a constant name."""
    if isinstance(value, Enclosure):
        return value.value
    if isinstance(value, Interval):
        return value
    if isinstance(value, str) and value in ("e", "pi", "sqrt2"):
        return constant_enclosure(value, precision_bits).value
    return Interval.point(as_rational(value))


def hull_of(intervals: Sequence[Interval]) -> Interval:
    return Interval(min(iv.lo for iv in intervals), max(iv.hi for iv in intervals))
