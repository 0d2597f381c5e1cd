"""Scripted verifications built from the checkers and the image engine.

Each ``verify_*`` style function returns a :class:`Report`: a list of named
checks with the expected and computed values and a pass flag.  Reports are
deterministic, so their serialized form can be compared byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .checkers import check_cor_interval_two, check_thm_arithmetic_sss, check_thm_cantor, check_thm_ratio_two
from .errors import DomainError
from .expr import Expr, parse_expr
from .fractal import (
    AffineMap,
    cylinder,
    quarter_pair,
    lambda_system,
    level_set,
    middle_third,
    thickness,
)
from .images import (
    disjoint_regime,
    image_exact,
    image_outer,
    outer_measure_sequence,
    quotient_closed_form,
    scaled_intersection,
)
from .numeric import (
    Interval,
    IntervalUnion,
    as_rational,
    root_enclosure,
    union_normalize,
    union_pointwise,
)


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    computed: object
    passed: bool


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, expected, computed, passed: bool) -> bool:
        self.checks.append(Check(name, expected, computed, bool(passed)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _sum2() -> Expr:
    return parse_expr("x1 + x2", 2)


# ---------------------------------------------------------------------------


def verify_steinhaus() -> Report:
    """``C + C = [0, 2]`` and ``C - C = [-1, 1]`` from the two-set interval criterion."""
    rep = Report("steinhaus")
    C = middle_third()
    for label, text, target in (("sum", "x1 + x2", (0, 2)), ("difference", "x1 - x2", (-1, 1))):
        f = parse_expr(text, 2)
        v = check_cor_interval_two(f, C, C)
        want = IntervalUnion.of(target)
        rep.add(f"{label} criterion", "Proved", v.status, v.proved)
        got = v.conclusion if v.proved else None
        rep.add(f"{label} image", want, got, got == want)
        outer = image_outer(f, [C, C], 4).set
        rep.add(f"{label} depth-4 cover inside image", want, outer, outer.issubset(want) and want.issubset(outer))
    return rep


def verify_examples_3() -> Report:
    """The two worked sum examples: K + K and J + C."""
    rep = Report("examples")
    K = quarter_pair()
    t = thickness(K, 2)
    rep.add("tau(K) = 1/2", "1/2 exact", f"{t.lower_bound} {'exact' if t.exact else 'bound'}",
            t.exact and t.lower_bound == Fraction(1, 2))

    f = _sum2()
    claim = IntervalUnion.of((0, 2))
    v = check_thm_arithmetic_sss(f, [K, K])
    if v.proved:
        got = v.conclusion
    else:
        # any outer cover contains K + K, so a cover with gaps refutes [0, 2]
        got = image_outer(f, [K, K], 2).set
        rep.notes.append(
            f"K + K: {v.status} ({'; '.join(v.notes)}); computed value is the depth-2 outer cover, "
            f"which contains K + K and has gaps {got.gaps()}"
        )
    rep.add("K + K = [0, 2]", claim, got, got == claim)

    C = middle_third()
    J = cylinder(C, [1, 1])  # [0, 1/9] n C
    v = check_thm_ratio_two(f, J, C)
    want = IntervalUnion.of((0, Fraction(4, 9)), (Fraction(2, 3), Fraction(10, 9)))
    rep.add("J + C criterion", "Proved", v.status, v.proved)
    got = image_exact(f, [J, C], v).set if v.proved and v.conclusion is not None else None
    rep.add("J + C image", want, got, got == want)
    bound = v.witness.get("interval_bound")
    parts = len(got) if got is not None else None
    rep.add("interval count within bound", f"{parts} <= bound", bound,
            bound is not None and parts is not None and parts <= bound)
    rep.data["interval_bound"] = bound
    rep.data["h_1"] = v.witness.get("h_1")
    rep.data["v_1"] = v.witness.get("v_1")
    return rep


def division_formula_union(N: int) -> IntervalUnion:
    """``U_{|n| <= N} 3^-n [2/3, 3/2]``."""
    third = Fraction(1, 3)
    return union_normalize(
        Interval(third**n * Fraction(2, 3), third**n * Fraction(3, 2)) for n in range(-N, N + 1)
    )


def verify_division_set(N: int = 4) -> Report:
    """Truncated ``C / C`` over scale windows ``3^-a C_2 / 3^-b C_2``.

    ``C \\ {0}`` is the union of the windows ``3^-a ([2/3, 1] n C)``.  Each
    window quotient is computed exactly from first-level pieces; it equals
    the hull quotient ``3^(b-a) [2/3, 3/2]``, which bounds the true set from
    above.  The reverse inclusion is the known division formula; the worst
    case criteria here are exactly borderline for it at ratio 1/3.
    """
    if N < 0:
        raise DomainError("N must be nonnegative")
    rep = Report("division")
    C = middle_third()
    windows = []
    for a in range(N + 1):
        windows.append(cylinder(C, [1] * a + [2]))
    pieces = []
    for a, wa in enumerate(windows):
        for b, wb in enumerate(windows):
            q = union_pointwise(level_set(wa, 1), level_set(wb, 1), "quotient")
            pieces.append(q)
    computed = union_normalize(p for q in pieces for p in q)
    # pairs with |a - b| <= N cover every n in [-N, N]; larger |n| never appear
    target = division_formula_union(N)
    rep.add(f"C/C truncated at |n| <= {N}", target, computed, computed == target)
    rep.add("piece count", 2 * N + 1, len(computed), len(computed) == 2 * N + 1)
    disjoint = all(p.hi < q.lo for p, q in zip(computed.parts, computed.parts[1:]))
    rep.add("pieces pairwise disjoint", True, disjoint, disjoint)
    third = Fraction(1, 3)
    scaled = all(
        Interval(third**n * Fraction(2, 3), third**n * Fraction(3, 2)).scale(third)
        == Interval(third ** (n + 1) * Fraction(2, 3), third ** (n + 1) * Fraction(3, 2))
        for n in range(-N, N)
    )
    rep.add("scaling closure (1/3) piece(n) = piece(n+1)", True, scaled, scaled)
    closed, flag = quotient_closed_form(third, -N, N)
    rep.add("closed form at lambda = 1/3", target, closed, closed == target and flag)
    f = parse_expr("x1 / x2", 2)
    w = windows[0]
    cover = image_outer(f, [w, w], 3).set
    rep.add("depth-3 cover of window quotient", IntervalUnion.of((Fraction(2, 3), Fraction(3, 2))), cover,
            cover == IntervalUnion.of((Fraction(2, 3), Fraction(3, 2))))
    v = check_thm_cantor(f, [w, w])
    rep.notes.append(
        f"window quotient criterion: {v.status}; inclusion [2/3, 3/2] in C_2/C_2 rests on the division formula"
    )
    return rep


# ---------------------------------------------------------------------------
# reciprocal sums on C


@dataclass(frozen=True)
class WindowSpec:
    words: tuple[tuple[int, ...], ...]
    claim: Interval
    relation: str  # "equals" or "superset"


M_INTERVAL = Interval(
    Fraction(81, 19) + 1 + Fraction(18, 7), 3 + Fraction(9, 8) + Fraction(81, 18)
)

ERDOS_STRAUS_WINDOWS = (
    WindowSpec(((2,), (2,), (2,), (2,)), Interval(4, 6), "equals"),
    WindowSpec(((1, 2), (1, 2), (1, 2), (2,)), Interval(10, 15), "equals"),
    WindowSpec(((1, 2, 1), (1, 2, 2), (2,), (2,)), Interval(Fraction(62, 7), 10), "superset"),
    WindowSpec(((1, 2, 2), (1, 2, 2), (2, 2), (2, 2)), Interval(8, 9), "superset"),
    WindowSpec(((1, 2, 1), (2,), (2,), (2,)), M_INTERVAL, "superset"),
    WindowSpec(((1, 2, 2), (2,), (2,), (2,)), Interval(6, Fraction(63, 8)), "superset"),
)


def _halfline_sum(a: list, b: list) -> list:
    """Sum of unions of intervals whose ``hi`` may be None (unbounded)."""
    out = []
    for p in a:
        for q in b:
            hi = None if p[1] is None or q[1] is None else p[1] + q[1]
            out.append((p[0] + q[0], hi))
    out.sort(key=lambda t: t[0])
    merged = [out[0]]
    for lo, hi in out[1:]:
        plo, phi = merged[-1]
        if phi is None or lo <= phi:
            merged[-1] = (plo, None if phi is None or hi is None else max(phi, hi))
        else:
            merged.append((lo, hi))
    return merged


def _avoids(u: list, gap: tuple) -> bool:
    lo, hi = gap
    return all(not (p_lo < hi and (p_hi is None or p_hi > lo)) for p_lo, p_hi in u)


def erdos_straus_cover(m: int = 2) -> Report:
    """``1/C + 1/C + 1/C + 1/C`` contains ``[4, 6 * 3^m]``; fewer terms leave gaps."""
    if m < 1:
        raise DomainError("m must be at least 1")
    rep = Report("erdos-straus")
    C = middle_third()
    f = parse_expr("-1/x1 - 1/x2 - 1/x3 - 1/x4", 4)
    images = []
    for idx, w in enumerate(ERDOS_STRAUS_WINDOWS, 1):
        systems = [cylinder(C, list(word)) for word in w.words]
        v = check_thm_cantor(f, systems)
        rep.add(f"window {idx} criterion", "Proved", v.status, v.proved)
        if not v.proved:
            continue
        img = v.conclusion.negate()
        images.append(img)
        claim = IntervalUnion.of(w.claim)
        if w.relation == "equals":
            rep.add(f"window {idx} image", claim, img, img == claim)
        else:
            rep.add(f"window {idx} image contains {w.claim}", claim, img, img.contains_interval(w.claim))
    base = union_normalize(p for img in images for p in img)
    rep.data["windows_union"] = base
    # x in C implies x/3 in C, so every value v of the sum gives 3v
    scaling = AffineMap(Fraction(1, 3), 0) in C.maps
    rep.add("x/3 maps C into C", True, scaling, scaling)
    chain = union_normalize(p for k in range(m + 1) for p in base.scale(3**k))
    rep.data["assembled"] = chain
    for top in sorted({Fraction(18), Fraction(6 * 3**m)}):
        if top > 6 * 3**m:
            continue
        target = Interval(4, top)
        clipped = chain.intersection(IntervalUnion.of(target))
        rep.add(f"assembled union contains [4, {top}] as one interval", IntervalUnion.of(target), clipped,
                len(clipped) == 1 and clipped.parts[0] == target)
    # sharpness from level one: C n (0, 1] lies in (0, 1/3] u [2/3, 1]
    near = _reciprocal(Interval(Fraction(2, 3), 1))
    far_lo = 1 / Fraction(1, 3)  # 1/x >= 3 on (0, 1/3]
    recip = [(near.lo, near.hi), (far_lo, None)]
    rep.add("1/C in [1, 3/2] u [3, inf)", "[1, 3/2] u [3, inf)", _fmt_halflines(recip),
            near == Interval(1, Fraction(3, 2)) and far_lo == 3)
    two = _halfline_sum(recip, recip)
    three = _halfline_sum(two, recip)
    rep.add("1/C + 1/C avoids (3, 4)", "[2, 3] u [4, inf)", _fmt_halflines(two), _avoids(two, (3, 4)))
    rep.add("1/C + 1/C + 1/C avoids (9/2, 5)", "[3, 9/2] u [5, inf)", _fmt_halflines(three),
            _avoids(three, (Fraction(9, 2), 5)))
    return rep


def _reciprocal(iv: Interval) -> Interval:
    return Interval(1 / iv.hi, 1 / iv.lo)


def _fmt_halflines(u: list) -> str:
    return " u ".join(f"[{lo}, {'inf' if hi is None else hi}]" for lo, hi in u)


# ---------------------------------------------------------------------------
# power equations on K_lambda


THRESHOLD_NOTE = "lambda must satisfy 1/3 <= lambda and lambda^2 - 3 lambda + 1 > 0"


def _check_lambda(lam) -> Fraction:
    lam = as_rational(lam)
    if lam < Fraction(1, 3) or not disjoint_regime(lam):
        raise DomainError(f"lambda {lam} out of range: {THRESHOLD_NOTE}")
    return lam


@dataclass(frozen=True)
class AlphaRange:
    """``lower <= alpha <= upper`` with enclosures; ``upper`` None means unbounded."""

    empty: bool
    lower: Interval | None = None
    upper: Interval | None = None


@dataclass(frozen=True)
class FermatBracket:
    lam: Fraction
    n: int
    k: int
    alpha_range_line1: AlphaRange
    alpha_range_line2: AlphaRange


def _root_minus_one(x: Fraction, n: int, bits: int) -> Interval:
    return root_enclosure(x, n, bits).value.shift(-1)


def fermat_alpha_ranges(lam, n: int, k: int, precision_bits: int = 128) -> FermatBracket:
    """Admissible ``alpha >= 0`` for ``z/x = (1 + (1 + alpha)^n)^(1/n)`` (line 1)
    and ``z/y = (1 + (1 + alpha)^-n)^(1/n)`` (line 2) in the k-th piece of K/K.
    """
    lam = _check_lambda(lam)
    if n < 2:
        raise DomainError("n must be at least 2")
    base = lam ** (k * n)
    rho_lo = base * (1 - lam) ** n - 1
    rho_hi = base / (1 - lam) ** n - 1
    zero = Interval(0, 0)

    # line 1: (1 + alpha)^n in [rho_lo, rho_hi]
    if rho_hi < 1:
        line1 = AlphaRange(True)
    else:
        upper = _root_minus_one(rho_hi, n, precision_bits)
        if rho_lo <= 1:
            lower = zero
        else:
            lower = _root_minus_one(rho_lo, n, precision_bits)
        line1 = AlphaRange(False, lower, upper)

    # line 2: (1 + alpha)^-n in [rho_lo, rho_hi]
    if rho_hi <= 0 or rho_lo > 1:
        line2 = AlphaRange(True)
    else:
        upper2 = None if rho_lo <= 0 else _root_minus_one(1 / rho_lo, n, precision_bits)
        lower2 = zero if rho_hi >= 1 else _root_minus_one(1 / rho_hi, n, precision_bits)
        line2 = AlphaRange(False, lower2, upper2)
    return FermatBracket(lam, n, k, line1, line2)


def homogeneous_degree(e: Expr) -> int | None:
    """Degree d with ``e(t x) = t^d e(x)``, or None if not homogeneous."""
    from .expr import Add, Const, Div, Mul, Neg, Pow, Sub, Var

    if isinstance(e, Var):
        return 1
    if isinstance(e, Const):
        return 0
    if isinstance(e, Neg):
        return homogeneous_degree(e.arg)
    if isinstance(e, Pow):
        d = homogeneous_degree(e.base)
        return None if d is None else d * e.exp
    dl, dr = homogeneous_degree(e.left), homogeneous_degree(e.right)
    if dl is None or dr is None:
        return None
    if isinstance(e, (Add, Sub)):
        # a constant summand is degree 0 and breaks homogeneity unless both are
        return dl if dl == dr else None
    if isinstance(e, Mul):
        return dl + dr
    if isinstance(e, Div):
        return dl - dr
    return None


def fermat_solution_family(lam=Fraction(1, 3), n_max: int = 10, m_max: int = 3, precision_bits: int = 128) -> Report:
    """``2 x^n = z^n`` has solutions in K_lambda for every n, closed under ``x -> lam x``."""
    lam = _check_lambda(lam)
    rep = Report("fermat")
    piece = Interval(1 - lam, 1 / (1 - lam))
    for n in range(2, n_max + 1):
        enc = root_enclosure(2, n, precision_bits).value
        rep.add(f"2^(1/{n}) in [1 - lambda, 1/(1 - lambda)]", piece, enc, enc.issubset(piece))
    ratio = parse_expr("x3 / x1", 3)
    ok_eq = all(homogeneous_degree(parse_expr(f"x1^{n} + x2^{n} - x3^{n}", 3)) == n for n in range(2, n_max + 1))
    rep.add("equations homogeneous of degree n", True, ok_eq, ok_eq)
    rdeg = homogeneous_degree(ratio)
    rep.add("z/x homogeneous of degree 0", 0, rdeg, rdeg == 0)
    K = lambda_system(lam)
    shrink = AffineMap(lam, 0) in K.maps
    rep.add("x -> lambda x maps K into K", True, shrink, shrink)
    for m in range(1, m_max + 1):
        c = lam**m
        # (c x)^n + (c y)^n - (c z)^n = c^n (x^n + y^n - z^n) and (c z)/(c x) = z/x
        x, z = Fraction(2, 3), Fraction(3, 4)
        same = (c * z) / (c * x) == z / x
        rep.add(f"ratio invariance at m = {m}", z / x, (c * z) / (c * x), same and rdeg == 0)
    return rep


def constants_intersections(lam=Fraction(1, 3), precision_bits: int = 128, max_bits: int = 4096) -> Report:
    """``eK n piK``, ``eK n K``, ``piK n K`` and ``sqrt2 K n K`` are nonempty."""
    lam = _check_lambda(lam)
    rep = Report("constants")
    K = lambda_system(lam)
    for a, b in (("e", "pi"), ("e", 1), ("pi", 1), ("sqrt2", 1)):
        bits = precision_bits
        while True:
            ans = scaled_intersection(K, K, a, b, precision_bits=bits)
            if ans != "unknown" or bits >= max_bits:
                break
            bits *= 2
        rep.add(f"{a} K n {b} K nonempty", "intersect", f"{ans} ({bits} bits)", ans == "intersect")
    return rep


# ---------------------------------------------------------------------------
# C * C measure

CC_FLOOR = Fraction(80855, 100000)


def load_cc_golden() -> dict[int, Fraction]:
    raw = resources.files("cantorkit").joinpath("data/cc_measure_golden.json").read_text()
    doc = json.loads(raw)
    return {int(k): Fraction(v) for k, v in doc["measures"].items()}


def cc_measure_experiment(max_depth: int = 8) -> Report:
    """Outer measures of ``C * C`` at depths ``0..max_depth``."""
    rep = Report("cc-measure")
    C = middle_third()
    f = parse_expr("x1 * x2", 2)
    seq = outer_measure_sequence(f, [C, C], range(max_depth + 1))
    rep.data["sequence"] = seq
    rep.add("depth 0 measure", 1, seq[0], seq[0] == 1)
    if max_depth >= 1:
        rep.add("depth 1 measure", Fraction(8, 9), seq[1], seq[1] == Fraction(8, 9))
    mono = all(b <= a for a, b in zip(seq, seq[1:]))
    rep.add("nonincreasing", True, mono, mono)
    floor_ok = all(x >= CC_FLOOR for x in seq)
    rep.add(f"every term >= {CC_FLOOR}", True, floor_ok, floor_ok)
    golden = load_cc_golden()
    common = [k for k in range(max_depth + 1) if k in golden]
    match = all(golden[k] == seq[k] for k in common)
    rep.add("matches golden values", [golden[k] for k in common], [seq[k] for k in common], match)
    return rep


APPLICATIONS = {
    "steinhaus": verify_steinhaus,
    "examples": verify_examples_3,
    "division": verify_division_set,
    "erdos-straus": erdos_straus_cover,
    "fermat": fermat_solution_family,
    "constants": constants_intersections,
    "cc-measure": cc_measure_experiment,
}
