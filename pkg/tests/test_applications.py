import random
from fractions import Fraction as F

import pytest

from cantorkit.applications import (
    APPLICATIONS,
    M_INTERVAL,
    division_formula_union,
    cc_measure_experiment,
    constants_intersections,
    erdos_straus_cover,
    fermat_alpha_ranges,
    fermat_solution_family,
    homogeneous_degree,
    load_cc_golden,
    verify_division_set,
    verify_examples_3,
    verify_steinhaus,
)
from cantorkit.errors import DomainError
from cantorkit.expr import parse_expr
from cantorkit.images import quotient_closed_form
from cantorkit.numeric import Interval, IntervalUnion, root_enclosure
from cantorkit.specfile import dumps


def _check(rep, name):
    for c in rep.checks:
        if c.name.startswith(name):
            return c
    raise KeyError(name)


def test_steinhaus():
    rep = verify_steinhaus()
    assert rep.passed
    assert _check(rep, "sum image").computed == IntervalUnion.of((0, 2))
    assert _check(rep, "difference image").computed == IntervalUnion.of((-1, 1))


def test_examples_report_values():
    rep = verify_examples_3()
    assert _check(rep, "tau(K)").passed
    assert _check(rep, "J + C image").passed
    assert _check(rep, "interval count").passed
    assert rep.data["interval_bound"] == 4
    # the depth-2 cover contains K + K and already has the gap (1/5, 3/10)
    kk = _check(rep, "K + K")
    assert Interval(F(1, 5), F(3, 10)) in kk.computed.gaps()


def test_division_formula_union():
    assert division_formula_union(0) == IntervalUnion.of((F(2, 3), F(3, 2)))
    u = division_formula_union(2)
    assert len(u) == 5
    assert all(p.hi < q.lo for p, q in zip(u.parts, u.parts[1:]))


@pytest.mark.parametrize("N", [0, 1, 2, 4])
def test_division_set(N):
    rep = verify_division_set(N)
    assert rep.passed, rep.failures()
    closed, _ = quotient_closed_form(F(1, 3), -N, N)
    assert closed == division_formula_union(N)


def test_division_rejects_negative_n():
    with pytest.raises(DomainError):
        verify_division_set(-1)


def test_erdos_straus():
    rep = erdos_straus_cover(2)
    assert rep.passed, rep.failures()
    assert _check(rep, "window 1 image").computed == IntervalUnion.of((4, 6))
    # the M interval spans 81/19 + 1 + 18/7 to 3 + 9/8 + 81/18
    assert M_INTERVAL == Interval(F(81, 19) + 1 + F(18, 7), 3 + F(9, 8) + F(81, 18))
    rep1 = erdos_straus_cover(1)
    assert _check(rep1, "assembled union contains [4, 18]").passed


def test_fermat_brackets():
    b = fermat_alpha_ranges(F(1, 3), 2, 0)
    assert not b.alpha_range_line1.empty
    assert b.alpha_range_line1.lower == Interval(F(0), F(0))
    up = b.alpha_range_line1.upper
    # sqrt(5/4) - 1 = 0.1180339887498948482045868...
    ref = F("0.1180339887498948482045868343656381177203")
    assert up.lo <= ref + F(1, 10**40) and ref - F(1, 10**40) <= up.hi
    assert (up.lo + 1) ** 2 <= F(5, 4) <= (up.hi + 1) ** 2
    b3 = fermat_alpha_ranges(F(1, 3), 3, 0).alpha_range_line1
    assert (b3.upper.lo + 1) ** 3 <= F(19, 8) <= (b3.upper.hi + 1) ** 3
    assert fermat_alpha_ranges(F(1, 3), 2, 1).alpha_range_line1.empty
    with pytest.raises(DomainError):
        fermat_alpha_ranges(F(2, 5), 2, 0)
    with pytest.raises(DomainError):
        fermat_alpha_ranges(F(1, 3), 1, 0)


def _inside(rng, lo: Interval, hi: Interval | None):
    top = hi.lo if hi is not None else lo.hi + 5
    if top <= lo.hi:
        return None
    return lo.hi + (top - lo.hi) * F(rng.randint(0, 1000), 1000)


@pytest.mark.parametrize("n,k", [(2, 0), (3, 0), (5, 0), (2, -1), (4, -1), (3, 1)])
def test_fermat_lines_by_sampling(n, k):
    lam = F(1, 3)
    br = fermat_alpha_ranges(lam, n, k)
    piece_lo = (lam**k * (1 - lam)) ** n
    piece_hi = (lam**k / (1 - lam)) ** n
    rho_lo, rho_hi = piece_lo - 1, piece_hi - 1
    rng = random.Random(n * 10 + k)
    l1, l2 = br.alpha_range_line1, br.alpha_range_line2
    for _ in range(50):
        if not l1.empty:
            a = _inside(rng, l1.lower, l1.upper)
            if a is not None:
                # y = (1 + a) x gives (z/x)^n = 1 + (1 + a)^n inside the piece
                assert piece_lo <= 1 + (1 + a) ** n <= piece_hi
                # swapping the roles of x and y: 1 + b = 1/(1 + a) meets line 2's inequality
                b = 1 / (1 + a) - 1
                assert rho_lo <= (1 + b) ** -n <= rho_hi
        if not l2.empty:
            a = _inside(rng, l2.lower, l2.upper)
            if a is not None:
                assert piece_lo <= 1 + (1 + a) ** -n <= piece_hi


def test_fermat_family():
    rep = fermat_solution_family(F(1, 3))
    assert rep.passed
    assert len([c for c in rep.checks if c.name.startswith("2^(1/")]) == 9
    assert root_enclosure(2, 10).value.issubset(Interval(F(2, 3), F(3, 2)))


def test_homogeneous_degree():
    assert homogeneous_degree(parse_expr("x1^3 + x2^3 - x3^3")) == 3
    assert homogeneous_degree(parse_expr("x3 / x1")) == 0
    assert homogeneous_degree(parse_expr("x1 + 1")) is None
    assert homogeneous_degree(parse_expr("x1 * x2^-2")) == -1


def test_constants():
    rep = constants_intersections()
    assert rep.passed
    assert len(rep.checks) == 4


def test_cc_measure_small_depth():
    rep = cc_measure_experiment(4)
    assert rep.passed
    seq = rep.data["sequence"]
    assert seq[:2] == [1, F(8, 9)]


def test_cc_golden_file_consistent():
    golden = load_cc_golden()
    assert golden[0] == 1 and golden[1] == F(8, 9)
    values = [golden[k] for k in sorted(golden)]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert F(80855, 100000) <= golden[8] <= F(8, 9)


def test_reports_deterministic():
    for name in ("steinhaus", "division", "erdos-straus", "fermat", "constants"):
        a = dumps(APPLICATIONS[name]())
        b = dumps(APPLICATIONS[name]())
        assert a == b
