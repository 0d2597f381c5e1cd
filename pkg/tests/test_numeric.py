import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorkit.errors import DivisionDomainError, DomainError
from cantorkit.numeric import (
    Interval,
    IntervalUnion,
    as_rational,
    constant_enclosure,
    decimal_str,
    iroot,
    rational_str,
    root_enclosure,
    union_gaps,
    union_measure,
    union_normalize,
    union_pointwise,
)

# 50 correct digits, typed in from standard tables
E_50 = F("2.71828182845904523536028747135266249775724709369995")
PI_50 = F("3.14159265358979323846264338327950288419716939937510")
SQRT2_50 = F("1.41421356237309504880168872420969807856967187537694")
ULP_50 = F(1, 10**50)


def U(*pairs):
    return IntervalUnion.of(*[(F(a), F(b)) for a, b in pairs])


def test_as_rational_is_exact():
    assert as_rational("0.3") == F(3, 10)
    assert as_rational("1/3") == F(1, 3)
    assert as_rational(" −2/4 ") == F(-1, 2)
    with pytest.raises(TypeError):
        as_rational(0.3)
    with pytest.raises(ValueError):
        as_rational("abc")


def test_rational_rendering():
    assert rational_str(F(6, 4)) == "3/2"
    assert rational_str(F(-4, 2)) == "-2"
    assert decimal_str(F(1, 3), 5) == "0.33333"


def test_interval_invariant():
    with pytest.raises(DomainError):
        Interval(F(1), F(0))
    assert Interval.point(F(1, 2)).width == 0


def test_normalize_examples():
    assert U((0, 1), (1, 2)) == U((0, 2))
    assert union_normalize([Interval(F(1, 3), F(2, 3)), Interval(F(0), F(1, 3))]) == U((0, F(2, 3)))
    three = U((0, F(1, 9)), (F(2, 9), F(1, 3)), (F(2, 3), 1))
    assert len(three) == 3
    assert union_normalize(three.parts) == three


def test_raw_union_must_be_canonical():
    with pytest.raises(DomainError):
        IntervalUnion((Interval(F(0), F(1)), Interval(F(1), F(2))))


def test_measure_examples():
    assert union_measure(U((0, 2))) == 2
    assert union_measure(U((0, F(4, 9)), (F(6, 9), F(10, 9)))) == F(8, 9)
    assert union_measure(IntervalUnion.empty()) == 0


def test_gap_examples():
    assert union_gaps(U((0, F(1, 3)), (F(2, 3), 1))) == [Interval(F(1, 3), F(2, 3))]
    assert union_gaps(U((0, 2))) == []
    assert union_gaps(U((0, F(1, 9)), (F(2, 9), F(1, 3)))) == [Interval(F(1, 9), F(2, 9))]


def test_pointwise_examples():
    c1 = U((0, F(1, 3)), (F(2, 3), 1))
    assert union_pointwise(c1, c1, "sum") == U((0, 2))
    right = U((F(2, 3), 1))
    assert union_pointwise(right, right, "quotient") == U((F(2, 3), F(3, 2)))
    assert union_pointwise(U((0, 1)), U((0, 1)), "diff") == U((-1, 1))
    assert union_pointwise(U((1, 2)), U((F(-1), F(3))), "product") == U((-2, 6))


def test_quotient_by_zero_straddling_part():
    with pytest.raises(DivisionDomainError):
        union_pointwise(U((1, 2)), U((-1, 1)), "quotient")
    with pytest.raises(DivisionDomainError):
        union_pointwise(U((1, 2)), U((0, 0)), "quotient")


def test_union_set_algebra():
    a = U((0, 1), (2, 3))
    b = U((F(1, 2), F(5, 2)))
    assert a.intersection(b) == U((F(1, 2), 1), (2, F(5, 2)))
    assert a.union(b) == U((0, 3))
    assert a.scale(-1) == U((-3, -2), (-1, 0))
    assert a.shift(1) == U((1, 2), (3, 4))
    assert a.contains(F(5, 2)) and not a.contains(F(3, 2))
    assert a.contains_interval(Interval(F(2), F(3)))
    assert not a.contains_interval(Interval(F(1, 2), F(5, 2)))
    assert a.hull == Interval(F(0), F(3))


def _random_intervals(rng, n):
    out = []
    for _ in range(n):
        lo = F(rng.randint(-30, 30), rng.randint(1, 6))
        out.append(Interval(lo, lo + F(rng.randint(0, 20), rng.randint(1, 6))))
    return out


def test_normalize_idempotent_and_order_insensitive_1000_cases():
    rng = random.Random(20261015)
    for _ in range(1000):
        ivs = _random_intervals(rng, rng.randint(0, 12))
        u = union_normalize(ivs)
        shuffled = ivs[:]
        rng.shuffle(shuffled)
        assert union_normalize(u.parts) == u
        assert union_normalize(shuffled) == u
        for p, q in zip(u.parts, u.parts[1:]):
            assert p.hi < q.lo
        # every input lies inside some output part
        assert all(u.contains_interval(iv) for iv in ivs)


def _overlap_length(ivs):
    total = F(0)
    for i, p in enumerate(ivs):
        for q in ivs[i + 1 :]:
            total += max(F(0), min(p.hi, q.hi) - max(p.lo, q.lo))
    return total


def test_measure_subadditive():
    rng = random.Random(7)
    for _ in range(300):
        ivs = _random_intervals(rng, rng.randint(0, 8))
        raw = sum((iv.width for iv in ivs), F(0))
        m = union_measure(union_normalize(ivs))
        assert m <= raw
        # equality exactly when no two raw parts overlap in positive length
        assert (m == raw) == (_overlap_length(ivs) == 0)


small = st.fractions(min_value=-5, max_value=5, max_denominator=8)


@st.composite
def unions(draw):
    ivs = []
    for _ in range(draw(st.integers(1, 4))):
        lo = draw(small)
        ivs.append(Interval(lo, lo + draw(st.fractions(min_value=0, max_value=3, max_denominator=8))))
    return union_normalize(ivs)


@settings(max_examples=150, deadline=None)
@given(unions(), unions(), st.sampled_from(["sum", "diff", "product"]))
def test_pointwise_matches_grid_membership(a, b, op):
    c = union_pointwise(a, b, op)
    fn = {"sum": lambda x, y: x + y, "diff": lambda x, y: x - y, "product": lambda x, y: x * y}[op]
    for p in a:
        for q in b:
            for x in (p.lo, p.mid, p.hi):
                for y in (q.lo, q.mid, q.hi):
                    assert c.contains(fn(x, y))
    # every point of the result is attained: sample a grid of each result part
    for part in c:
        for t in range(5):
            z = part.lo + part.width * F(t, 4)
            assert any((Interval.point(z)).issubset(_box_image(p, q, op)) for p in a for q in b)


def _box_image(p, q, op):
    return {"sum": p + q, "diff": p - q, "product": p * q}[op]


def test_iroot_exact():
    for x in [0, 1, 2, 7, 8, 9, 10**30, 3**40 - 1, 3**40]:
        for n in (2, 3, 5):
            r = iroot(x, n)
            assert r**n <= x < (r + 1) ** n


def test_root_enclosure_examples():
    assert root_enclosure(4, 2).value == Interval.point(F(2))
    assert root_enclosure(8, 3).value == Interval.point(F(2))
    assert root_enclosure(F(9, 4), 2).value == Interval.point(F(3, 2))
    enc = root_enclosure(2, 2, 64)
    assert enc.lo <= SQRT2_50 + ULP_50 and SQRT2_50 - ULP_50 <= enc.hi
    assert enc.value.width <= F(2, 2**64)
    assert enc.width_ok()
    with pytest.raises(DomainError):
        root_enclosure(-1, 2)


def test_root_enclosure_soundness_500_cases():
    rng = random.Random(99)
    for _ in range(500):
        x = F(rng.randint(0, 10**6), rng.randint(1, 10**4))
        n = rng.randint(1, 9)
        bits = rng.choice([16, 64, 128])
        enc = root_enclosure(x, n, bits)
        assert enc.lo**n <= x <= enc.hi**n
        assert enc.width_ok()


def test_constant_enclosures_against_tables():
    for bits in (32, 64, 128, 160):
        e = constant_enclosure("e", bits)
        pi = constant_enclosure("pi", bits)
        s2 = constant_enclosure("sqrt2", bits)
        for enc, ref in ((e, E_50), (pi, PI_50), (s2, SQRT2_50)):
            assert enc.lo <= ref + ULP_50 and ref - ULP_50 <= enc.hi
            assert enc.width_ok()
    assert constant_enclosure("e", 32).value.issubset(Interval(F("2.718281"), F("2.718282")))
    assert constant_enclosure("pi", 32).value.issubset(Interval(F("3.141592"), F("3.141593")))
    assert constant_enclosure("sqrt2", 64).value == root_enclosure(2, 2, 64).value
    with pytest.raises(DomainError):
        constant_enclosure("gamma", 64)


def test_interval_arithmetic_contains_pointwise():
    rng = random.Random(3)
    for _ in range(200):
        a, b = _random_intervals(rng, 2)
        for x in (a.lo, a.mid, a.hi):
            for y in (b.lo, b.mid, b.hi):
                assert (a + b).contains(x + y)
                assert (a - b).contains(x - y)
                assert (a * b).contains(x * y)
                if not b.contains_zero():
                    assert (a / b).contains(x / y)
        n = rng.randint(0, 4)
        assert (a**n).contains(a.mid**n)
