"""Acceptance criteria, one test each.

Every criterion prints a ``PASS``/``FAIL`` line with its wall time; under
pytest the lines are collected into a summary section at the end of the
run.  ``python3 tests/test_acceptance.py`` runs them without pytest.
"""

import sys
import time
import traceback
from fractions import Fraction as F

import pytest

from cantorkit.applications import (
    CC_FLOOR,
    division_formula_union,
    cc_measure_experiment,
    constants_intersections,
    erdos_straus_cover,
    fermat_alpha_ranges,
    fermat_solution_family,
    load_cc_golden,
    verify_division_set,
    verify_steinhaus,
)
from cantorkit.checkers import check_cor_astels_ext, check_thm_arithmetic_sss, check_thm_main, check_thm_ratio_two
from cantorkit.expr import parse_expr
from cantorkit.fractal import cylinder, quarter_pair, quarter_system, middle_third, thickness
from cantorkit.images import disjoint_regime, image_exact, image_outer, quotient_closed_form
from cantorkit.numeric import Interval, IntervalUnion, root_enclosure

RESULTS: list[str] = []
C = middle_third()
SUM2 = parse_expr("x1 + x2", 2)


def U(*pairs):
    return IntervalUnion.of(*[(F(a), F(b)) for a, b in pairs])


def c01_steinhaus():
    rep = verify_steinhaus()
    assert rep.passed, rep.failures()
    checks = {c.name: c.computed for c in rep.checks}
    assert checks["sum image"] == U((0, 2))
    assert checks["difference image"] == U((-1, 1))


def c02_example_k():
    K = quarter_pair()
    t = thickness(K, 2)
    assert t.exact and t.lower_bound == F(1, 2), t
    v = check_thm_arithmetic_sss(SUM2, [K, K])
    cover = image_outer(SUM2, [K, K], 2).set
    assert v.proved and v.conclusion == U((0, 2)), (
        f"K + K = [0, 2] not certified: {v.status} {list(v.notes)}; "
        f"the depth-2 outer cover {cover} contains K + K and has gaps {cover.gaps()}"
    )


def c03_example_j():
    J = cylinder(C, [1, 1])  # C n [0, 1/9]
    v = check_thm_ratio_two(SUM2, J, C)
    assert v.proved, v
    got = image_exact(SUM2, [J, C], v).set
    assert got == U((0, F(4, 9)), (F(6, 9), F(10, 9))), got
    bound = v.witness["interval_bound"]
    assert len(got) == 2 and len(got) <= bound
    assert bound == 2, (
        f"interval-count bound h1 + v1 + 1 = {v.witness['h_1']} + {v.witness['v_1']} + 1 = {bound}, not 2"
    )


def c04_division():
    rep = verify_division_set(4)
    assert rep.passed, rep.failures()
    u = division_formula_union(4)
    third = F(1, 3)
    assert [(p.lo, p.hi) for p in u] == [
        (third**n * F(2, 3), third**n * F(3, 2)) for n in range(4, -5, -1)
    ]
    assert all(p.hi < q.lo for p, q in zip(u.parts, u.parts[1:]))


def c05_erdos_straus():
    rep = erdos_straus_cover(2)
    assert rep.passed, rep.failures()
    crit = [c for c in rep.checks if c.name.endswith("criterion")]
    assert len(crit) == 6 and all(c.computed == "Proved" for c in crit)
    names = {c.name for c in rep.checks}
    assert "assembled union contains [4, 54] as one interval" in names
    assert "1/C + 1/C avoids (3, 4)" in names and "1/C + 1/C + 1/C avoids (9/2, 5)" in names


def c06_cc_measure():
    rep = cc_measure_experiment(8)
    assert rep.passed, rep.failures()
    seq = rep.data["sequence"]
    assert seq[0] == 1 and seq[1] == F(8, 9)
    assert all(b <= a for a, b in zip(seq, seq[1:]))
    assert all(x >= CC_FLOOR for x in seq)
    assert load_cc_golden()[8] == seq[8]


def c07_quotient_closed_form():
    u, flag = quotient_closed_form(F(1, 3), -4, 4)
    assert flag and u == division_formula_union(4)
    # (3 - sqrt 5)/2 = 0.3819660112501...
    for below, above in ((F(381965, 10**6), F(381967, 10**6)), (F(3819660112, 10**10), F(3819660113, 10**10))):
        assert below * below - 3 * below + 1 > 0 > above * above - 3 * above + 1
        assert disjoint_regime(below) and not disjoint_regime(above)
        assert len(quotient_closed_form(below, 0, 1)[0]) == 2
        assert len(quotient_closed_form(above, 0, 1)[0]) == 1


def c08_fermat():
    piece = Interval(F(2, 3), F(3, 2))
    for n in range(2, 11):
        assert root_enclosure(2, n, 128).value.issubset(piece)
    up = fermat_alpha_ranges(F(1, 3), 2, 0).alpha_range_line1.upper
    assert (up.lo + 1) ** 2 <= F(5, 4) <= (up.hi + 1) ** 2
    rep = fermat_solution_family(F(1, 3))
    assert rep.passed, rep.failures()


def c09_constants():
    rep = constants_intersections(F(1, 3), precision_bits=128, max_bits=128)
    assert rep.passed, rep.failures()


def c10_thickness_conditions():
    v = check_thm_main(SUM2, [C, C])
    assert v.proved and v.witness["cond2_sum"] == 1 and v.witness["cond2_slack"] == 0
    v = check_cor_astels_ext([quarter_system()] * 2)
    assert not v.proved
    assert v.witness["tau_1"] == F(1, 2) and v.witness["cond2_sum"] == F(2, 3)
    assert v.witness["cond2_slack"] == F(-1, 3) and v.witness["cond1_slack_1"] == F(-1, 2)


def c11_property_suites():
    import test_expr
    import test_images
    import test_numeric

    test_numeric.test_normalize_idempotent_and_order_insensitive_1000_cases()
    test_expr.test_derivative_matches_finite_difference_200_cases()
    for f, systems in test_images.ANTITONE_CASES:
        test_images.test_outer_covers_antitone(f, systems)
    test_numeric.test_root_enclosure_soundness_500_cases()


CRITERIA = [
    (1, "Steinhaus identities", c01_steinhaus, 1),
    (2, "K: thickness 1/2 and K + K = [0, 2]", c02_example_k, 1),
    (3, "J + C image and interval-count bound 2", c03_example_j, 1),
    (4, "division set, |n| <= 4", c04_division, 1),
    (5, "reciprocal sums cover [4, 54]", c05_erdos_straus, 5),
    (6, "C*C outer measure to depth 8", c06_cc_measure, 60),
    (7, "K/K closed form and regime flip", c07_quotient_closed_form, 1),
    (8, "Fermat brackets and solution family", c08_fermat, 1),
    (9, "constants intersections", c09_constants, 1),
    (10, "thickness-theorem conditions", c10_thickness_conditions, 1),
    (11, "property suites", c11_property_suites, 120),
]


def run_criterion(num, title, fn, limit):
    start = time.perf_counter()
    error = None
    try:
        fn()
    except AssertionError as exc:
        error = exc
    elapsed = time.perf_counter() - start
    if error is None and elapsed >= limit:
        error = AssertionError(f"took {elapsed:.2f} s, limit {limit} s")
    status = "PASS" if error is None else "FAIL"
    line = f"criterion {num:2d} {status} {elapsed:7.3f}s (limit {limit}s)  {title}"
    if error is not None:
        line += f"\n    {str(error).splitlines()[0] if str(error) else type(error).__name__}"
    RESULTS.append(line)
    print(line)
    return error


@pytest.mark.parametrize("num,title,fn,limit", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, fn, limit):
    error = run_criterion(num, title, fn, limit)
    if error is not None:
        raise error


if __name__ == "__main__":
    failed = 0
    for spec in CRITERIA:
        try:
            failed += run_criterion(*spec) is not None
        except Exception:
            traceback.print_exc()
            failed += 1
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria pass")
    sys.exit(1 if failed else 0)
