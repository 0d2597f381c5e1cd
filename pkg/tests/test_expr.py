import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorkit.errors import DivisionDomainError, DomainError, ExprSyntaxError
from cantorkit.expr import (
    Add,
    Const,
    Div,
    Mul,
    Var,
    differentiate,
    eval_interval,
    eval_point,
    monotone_box_image,
    parse_expr,
    partial_bounds,
    reflect_variable,
    substitute,
    to_text,
    variables,
)
from cantorkit.numeric import Interval

I = Interval
TWO3 = I(F(2, 3), F(1))
ES = "-1/x1 - 1/x2 - 1/x3 - 1/x4"


def test_parse_examples():
    assert isinstance(parse_expr("x1 + x2", 2), Add)
    assert isinstance(parse_expr("x1 * x2", 2), Mul)
    es = parse_expr(ES, 4)
    assert variables(es) == {1, 2, 3, 4}
    assert eval_point(es, [1, 1, 2, 2]) == -3


def test_parse_exact_constants_and_precedence():
    assert eval_point(parse_expr("0.3 * x1"), [1]) == F(3, 10)
    assert eval_point(parse_expr("1/3 + 2^3 * x1"), [F(1, 2)]) == F(13, 3)
    assert eval_point(parse_expr("-x1^2"), [3]) == -9
    assert eval_point(parse_expr("(x1 - x2) / (x1 + x2)"), [3, 1]) == F(1, 2)
    assert eval_point(parse_expr("x1^-2"), [2]) == F(1, 4)
    assert eval_point(parse_expr("x1 − x2"), [3, 1]) == 2


@pytest.mark.parametrize(
    "text,pos",
    [("x1 +", 4), ("x1 * * x2", 5), ("(x1 + x2", 8), ("x1 $ x2", 3), ("x1^x2", 3), ("x0", 0)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.position == pos


def test_variable_index_out_of_range():
    with pytest.raises(ExprSyntaxError):
        parse_expr("x1 + x3", 2)


def test_differentiate_examples():
    assert differentiate(parse_expr("x1 + x2"), 1) == Const(F(1))
    d = differentiate(parse_expr("-1/x1"), 1)
    assert eval_point(d, [F(2, 3)]) == F(9, 4)
    assert eval_point(d, [3]) == F(1, 9)
    assert differentiate(parse_expr("x1 * x2"), 2) == Var(1)
    assert differentiate(parse_expr("x1 * x2"), 3) == Const(F(0))


def test_eval_interval_examples():
    assert eval_interval(parse_expr("x1 + x2"), [I(F(0), F(1))] * 2) == I(F(0), F(2))
    assert eval_interval(parse_expr("1/x1"), [TWO3]) == I(F(1), F(3, 2))
    assert eval_interval(parse_expr("x1 * x2"), [TWO3, TWO3]) == I(F(4, 9), F(1))
    with pytest.raises(DivisionDomainError):
        eval_interval(parse_expr("1/x1"), [I(F(-1), F(1))])


def test_partial_bounds_examples():
    b = partial_bounds(parse_expr("x1 + x2"), [I(F(-5), F(7)), I(F(0), F(1))])
    assert b.L == (1, 1) and b.S == (1, 1) and b.signs == ("+", "+")
    b = partial_bounds(parse_expr(ES, 4), [TWO3] * 4)
    assert all(enc == I(F(1), F(9, 4)) for enc in b.enclosures)
    assert b.signs == ("+",) * 4 and all(b.r(i) == F(9, 4) for i in range(4))
    b = partial_bounds(parse_expr("x1 / x2"), [TWO3, TWO3])
    assert b.enclosures[0] == I(F(1), F(3, 2))
    assert b.enclosures[1] == I(F(-9, 4), F(-2, 3))
    assert b.signs == ("+", "-")
    b = partial_bounds(parse_expr("x1 * x2"), [I(F(-1), F(1)), I(F(-1), F(1))])
    assert b.signs == ("indefinite", "indefinite") and b.S == (0, 0)
    assert b.r(0) is None and not b.definite


def test_monotone_box_image_examples():
    assert monotone_box_image(parse_expr("x1 + x2"), [I(F(0), F(1, 3)), TWO3]) == I(F(2, 3), F(4, 3))
    assert monotone_box_image(parse_expr(ES, 4), [TWO3] * 4) == I(F(-6), F(-4))
    assert monotone_box_image(parse_expr("x1 / x2"), [TWO3, TWO3]) == I(F(2, 3), F(3, 2))
    with pytest.raises(DomainError):
        monotone_box_image(parse_expr("x1 * x2"), [I(F(-1), F(1))] * 2)


def test_reflect_and_substitute():
    e = parse_expr("x1 * x2", 2)
    r = reflect_variable(e, 1, 0, 1)
    assert eval_point(r, [F(1, 4), 2]) == eval_point(e, [F(3, 4), 2])
    s = substitute(e, {2: parse_expr("x1 + 1")})
    assert eval_point(s, [2]) == 6


# --- random expression generator ---------------------------------------
# Box coordinates are in [1, 2]; "positive" subtrees stay bounded away from 0
# so every generated division is defined on the whole box.


def _pos(rng, depth, d):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.6:
            return Var(rng.randint(1, d))
        return Const(F(rng.randint(1, 9), rng.randint(1, 5)))
    k = rng.randrange(4)
    a, b = _pos(rng, depth - 1, d), _pos(rng, depth - 1, d)
    if k == 0:
        return a + b
    if k == 1:
        return a * b
    if k == 2:
        return a / b
    return a ** rng.randint(-2, 3)


def _gen(rng, depth, d):
    if depth == 0 or rng.random() < 0.25:
        return _pos(rng, 1, d)
    k = rng.randrange(6)
    a = _gen(rng, depth - 1, d)
    if k == 0:
        return a + _gen(rng, depth - 1, d)
    if k == 1:
        return a - _gen(rng, depth - 1, d)
    if k == 2:
        return a * _gen(rng, depth - 1, d)
    if k == 3:
        return a / _pos(rng, depth - 1, d)
    if k == 4:
        return -a
    return a ** rng.randint(0, 3)


def test_derivative_matches_finite_difference_200_cases():
    rng = random.Random(1015)
    d = 3
    h = F(1, 10**6)  # box width is 1
    for _ in range(200):
        e = _gen(rng, 4, d)
        x = [F(rng.randint(1100, 1900), 1000) for _ in range(d)]
        i = rng.randint(1, d)
        up, dn = list(x), list(x)
        up[i - 1] += h
        dn[i - 1] -= h
        fd = (eval_point(e, up) - eval_point(e, dn)) / (2 * h)
        exact = eval_point(differentiate(e, i), x)
        assert abs(fd - exact) <= F(1, 10**6) * max(abs(exact), F(1)), to_text(e)


def test_interval_soundness_random():
    rng = random.Random(5)
    box = [I(F(1), F(2))] * 3
    for _ in range(100):
        e = _gen(rng, 3, 3)
        enc = eval_interval(e, box)
        for _ in range(10):
            x = [F(rng.randint(1000, 2000), 1000) for _ in range(3)]
            assert enc.contains(eval_point(e, x))


def test_monotone_image_inside_interval_extension():
    rng = random.Random(11)
    box = [I(F(1), F(2))] * 2
    checked = 0
    for _ in range(200):
        e = _gen(rng, 3, 2)
        b = partial_bounds(e, box)
        if not b.definite:
            continue
        checked += 1
        mono = monotone_box_image(e, box, b)
        assert mono.issubset(eval_interval(e, box))
        for _ in range(5):
            x = [F(rng.randint(1000, 2000), 1000) for _ in range(2)]
            assert mono.contains(eval_point(e, x))
    assert checked > 20


def test_roundtrip_random():
    rng = random.Random(17)
    for _ in range(300):
        e = _gen(rng, 4, 3)
        text = to_text(e)
        again = parse_expr(text)
        assert again == parse_expr(to_text(again))
        x = [F(rng.randint(1000, 2000), 1000) for _ in range(3)]
        assert eval_point(again, x) == eval_point(e, x)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["x1 + x2", "x1 * x2", ES, "x1 / x2", "(x1 - 1/2)^2 + x2", "-x1^3 * x2^-1"]))
def test_roundtrip_fixed(text):
    e = parse_expr(text)
    assert parse_expr(to_text(e)) == e
