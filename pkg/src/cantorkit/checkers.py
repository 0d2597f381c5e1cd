"""Verifiers for sufficient conditions on images of Cantor sets.

Each checker evaluates the hypotheses of one criterion in worst-case form:
wherever a condition is stated pointwise over the hull box, the partial
derivatives are replaced by certified bounds ``S_i <= |df/dx_i| <= L_i``
taken from interval enclosures.  A Proved verdict is therefore sound; an
Inconclusive one says nothing about the image.

Variables whose partial derivative is negative are handled by reflecting
the corresponding system (``x -> A + B - x``), which flips the sign and
leaves every gap and bridge ratio unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Sequence

from .errors import DomainError, check_budget
from .expr import BoxBounds, Expr, Var, add, partial_bounds, reflect_variable
from .fractal import (
    SelfSimilarSystem,
    System,
    bridges,
    cylinder,
    first_level_gaps,
    gaps_at_least,
    kappa,
    level_set,
    reflect,
    s_min,
    thickness,
)
from .images import fixed_point_image, tuple_image
from .numeric import IntervalUnion, as_rational, union_pointwise

PROVED = "Proved"
INCONCLUSIVE = "Inconclusive"

THEOREM_IDS = (
    "cantor",
    "cor_sum",
    "cor_interval_two",
    "intersection",
    "arithmetic",
    "cor_arithmetic_two",
    "cor_multiplication",
    "ratio_two",
    "main",
    "cor_astels_ext",
)


@dataclass(frozen=True)
class Verdict:
    theorem_id: str
    status: str
    witness: dict = field(default_factory=dict)
    conclusion: object = None
    notes: tuple[str, ...] = ()

    @property
    def proved(self) -> bool:
        return self.status == PROVED


def _verdict(tid: str, ok: bool, witness: dict, conclusion=None, notes=()) -> Verdict:
    return Verdict(tid, PROVED if ok else INCONCLUSIVE, dict(witness), conclusion if ok else None, tuple(notes))


def sum_expr(d: int) -> Expr:
    e: Expr = Var(1)
    for i in range(2, d + 1):
        e = add(e, Var(i))
    return e


@dataclass
class _Oriented:
    f: Expr
    systems: list
    bounds: BoxBounds
    reflected: list[int]


def orient(f: Expr, systems: Sequence[System]) -> _Oriented | None:
    """Make every partial positive by reflecting systems; None if a sign is indefinite."""
    box = [s.hull for s in systems]
    b = partial_bounds(f, box)
    if not b.definite:
        return None
    g, out, flipped = f, [], []
    for i, (s, sign) in enumerate(zip(systems, b.signs), 1):
        if sign == "-":
            g = reflect_variable(g, i, s.hull.lo, s.hull.hi)
            out.append(reflect(s))
            flipped.append(i)
        else:
            out.append(s)
    # |dg/dx_i| over the box equals |df/dx_i| over the mirrored (same) box
    encs = tuple(-e if sg == "-" else e for e, sg in zip(b.enclosures, b.signs))
    pos = BoxBounds(encs, b.L, b.S, tuple("+" for _ in b.signs))
    return _Oriented(g, out, pos, flipped)


def _indefinite(tid: str) -> Verdict:
    return _verdict(tid, False, {}, notes=["a partial derivative changes sign on the hull box"])


def _widths(systems) -> list[Fraction]:
    return [s.hull.width for s in systems]


def _first_level_image(f: Expr, systems) -> IntervalUnion:
    u, exact = tuple_image(f, systems, 1)
    assert exact
    return u


# ---------------------------------------------------------------------------


def check_thm_cantor(f: Expr, systems: Sequence[System], theorem_id: str = "cantor") -> Verdict:
    """``s_min sum_{j!=i} w_j S_j - kappa w_i L_i >= 0`` for every i.

    Proved means ``f(K_1, ..., K_d) = f(F_1, ..., F_d)``; the conclusion is
    that first-level image.
    """
    systems = list(systems)
    if len(systems) < 2:
        raise DomainError("need at least two sets")
    o = orient(f, systems)
    if o is None:
        return _indefinite(theorem_id)
    try:
        kap = kappa(o.systems, plus=False)
    except DomainError as exc:
        return _verdict(theorem_id, False, {}, notes=[str(exc)])
    sm = s_min(o.systems)
    w = _widths(o.systems)
    L, S = o.bounds.L, o.bounds.S
    witness = {"s_min": sm, "kappa": kap}
    ok = True
    for i in range(len(systems)):
        slack = sm * sum(w[j] * S[j] for j in range(len(systems)) if j != i) - kap * w[i] * L[i]
        witness[f"slack_{i + 1}"] = slack
        ok = ok and slack >= 0
    notes = [f"reflected x{i}" for i in o.reflected]
    conclusion = _first_level_image(f, systems) if ok else None
    return _verdict(theorem_id, ok, witness, conclusion, notes)


def check_cor_sum(systems: Sequence[System]) -> Verdict:
    """The sum ``K_1 + ... + K_d`` is the first-level Minkowski sum."""
    systems = list(systems)
    return check_thm_cantor(sum_expr(len(systems)), systems, theorem_id="cor_sum")


def check_cor_interval_two(f: Expr, sys1: System, sys2: System) -> Verdict:
    """Two sets with the image a single closed interval.

    On top of the two conditions of :func:`check_thm_cantor` this needs
    ``S_y w_2 >= L_x max|G^(1)|`` and ``S_x min|B^(1)| >= L_y max|G^(2)|``
    over first-level gaps ``G`` and bridges ``B``.
    """
    tid = "cor_interval_two"
    o = orient(f, [sys1, sys2])
    if o is None:
        return _indefinite(tid)
    k1, k2 = o.systems
    try:
        kap = kappa([k1, k2], plus=False)
        g1 = max((g.width for g in first_level_gaps(k1)), default=Fraction(0))
        g2 = max((g.width for g in first_level_gaps(k2)), default=Fraction(0))
    except DomainError as exc:
        return _verdict(tid, False, {}, notes=[str(exc)])
    sm = s_min([k1, k2])
    w1, w2 = k1.hull.width, k2.hull.width
    b1 = min(b.width for b in bridges(k1, 1))
    (Lx, Ly), (Sx, Sy) = o.bounds.L, o.bounds.S
    witness = {
        "s_min": sm,
        "kappa": kap,
        "slack_1": sm * w2 * Sy - kap * w1 * Lx,
        "slack_2": sm * w1 * Sx - kap * w2 * Ly,
        "slack_3": Sy * w2 - Lx * g1,
        "slack_4": Sx * b1 - Ly * g2,
    }
    ok = all(v >= 0 for k, v in witness.items() if k.startswith("slack"))
    conclusion = None
    notes = [f"reflected x{i}" for i in o.reflected]
    if ok:
        conclusion = _first_level_image(f, [sys1, sys2])
        if len(conclusion) != 1:
            ok = False
            notes.append("first-level image is not a single interval")
    return _verdict(tid, ok, witness, conclusion, notes)


def check_thm_intersection(sys1: System, sys2: System, a, b) -> Verdict:
    """Decide ``a K_1 n b K_2 != {}`` by ``b/a in F_1^(1) / F_1^(2)``.

    Hypotheses: ``A_1 s_min w_2 - B_2 kappa w_1 >= 0`` and the symmetric one.
    """
    tid = "intersection"
    a, b = as_rational(a), as_rational(b)
    if a == 0 or b == 0:
        raise DomainError("scale factors must be nonzero")
    A1, B1, A2, B2 = sys1.hull.lo, sys1.hull.hi, sys2.hull.lo, sys2.hull.hi
    if A1 <= 0 or A2 <= 0:
        raise DomainError("both hulls must lie in (0, inf)")
    try:
        kap = kappa([sys1, sys2], plus=False)
    except DomainError as exc:
        return _verdict(tid, False, {}, notes=[str(exc)])
    sm = s_min([sys1, sys2])
    w1, w2 = B1 - A1, B2 - A2
    witness = {
        "s_min": sm,
        "kappa": kap,
        "slack_1": A1 * sm * w2 - B2 * kap * w1,
        "slack_2": A2 * sm * w1 - B1 * kap * w2,
    }
    ok = witness["slack_1"] >= 0 and witness["slack_2"] >= 0
    answer = None
    if ok:
        quotient = union_pointwise(level_set(sys1, 1), level_set(sys2, 1), "quotient")
        answer = quotient.contains(b / a)
        witness["ratio"] = b / a
    return _verdict(tid, ok, witness, answer)


def _overlap_slacks(o: _Oriented, sm: Fraction, prefix: str = "slack") -> tuple[dict, bool]:
    w = _widths(o.systems)
    L, S = o.bounds.L, o.bounds.S
    d = len(o.systems)
    witness, ok = {}, True
    for i, s in enumerate(o.systems):
        base = sm * sum(w[j] * S[j] for j in range(d) if j != i)
        for k, gap in enumerate(s.overlap_terms(), 1):
            # gap < 0 is a real gap: the worst case uses the largest derivative
            slack = base + gap * (L[i] if gap < 0 else S[i])
            witness[f"{prefix}_{i + 1}_{k}"] = slack
            ok = ok and slack >= 0
    return witness, ok


def check_thm_arithmetic_sss(f: Expr, systems: Sequence[System], theorem_id: str = "arithmetic") -> Verdict:
    """Self-similar sets, no separation needed.

    For every i and consecutive maps k, k+1 of system i:
    ``s_min sum_{j!=i} w_j S_j + (phi_k(B_i) - phi_{k+1}(A_i)) |df/dx_i| >= 0``.
    """
    systems = list(systems)
    if any(not isinstance(s, SelfSimilarSystem) for s in systems):
        return _verdict(theorem_id, False, {}, notes=["requires self-similar systems"])
    o = orient(f, systems)
    if o is None:
        return _indefinite(theorem_id)
    sm = s_min(o.systems)
    slacks, ok = _overlap_slacks(o, sm)
    witness = {"s_min": sm, **slacks}
    conclusion = _first_level_image(f, systems) if ok else None
    notes = [f"reflected x{i}" for i in o.reflected]
    return _verdict(theorem_id, ok, witness, conclusion, notes)


def check_cor_arithmetic_two(
    f: Expr, sys1: System, sys2: System, mode: str = "interval", words=((), ())
) -> Verdict:
    """Two self-similar sets.

    ``interval`` mode: hypotheses of :func:`check_thm_arithmetic_sss`, and the
    first-level image is a single interval.  ``interior`` mode: the same
    inequalities with partials bounded over the box of the cylinders named by
    ``words``; Proved means the image has nonempty interior.
    """
    tid = "cor_arithmetic_two"
    if mode == "interval":
        v = check_thm_arithmetic_sss(f, [sys1, sys2], theorem_id=tid)
        if v.proved and len(v.conclusion) != 1:
            return _verdict(tid, False, v.witness, notes=v.notes + ("first-level image is not one interval",))
        return v
    if mode != "interior":
        raise DomainError(f"unknown mode {mode!r}")
    systems = [sys1, sys2]
    if any(not isinstance(s, SelfSimilarSystem) for s in systems):
        return _verdict(tid, False, {}, notes=["requires self-similar systems"])
    # a cylinder box always meets the product of the attractors
    box = [cylinder(s, list(w)).hull for s, w in zip(systems, words)]
    b = partial_bounds(f, box)
    if not b.definite:
        return _indefinite(tid)
    flipped = [i for i, sg in enumerate(b.signs, 1) if sg == "-"]
    oriented = [reflect(s) if sg == "-" else s for s, sg in zip(systems, b.signs)]
    o = _Oriented(f, oriented, b, flipped)
    sm = s_min(oriented)
    slacks, ok = _overlap_slacks(o, sm)
    witness = {"s_min": sm, **slacks}
    notes = [f"partials bounded over {box[0]} x {box[1]}"]
    return _verdict(tid, ok, witness, True if ok else None, notes)


def _corner_points(system: SelfSimilarSystem, depth: int) -> list[Fraction]:
    pts = set()
    for k in range(depth + 1):
        for br in bridges(system, k):
            pts.add(br.lo)
            pts.add(br.hi)
    return sorted(pts, reverse=True)


def check_cor_multiplication(sys1: System, sys2: System, depth: int = 3) -> Verdict:
    """``K_1 K_2`` has interior if some ``(x0, y0)`` in ``K_1 x K_2`` satisfies

    ``s_min w_2 x0 + (phi_i(B_1) - phi_{i+1}(A_1)) y0 > 0`` for all i and the
    symmetric inequalities.  Candidates are cylinder endpoints up to
    ``depth`` (they lie in the attractors), tried in decreasing order.
    """
    tid = "cor_multiplication"
    systems = [sys1, sys2]
    if any(not isinstance(s, SelfSimilarSystem) for s in systems):
        return _verdict(tid, False, {}, notes=["requires self-similar systems"])
    if sys1.hull.lo < 0 or sys2.hull.lo < 0:
        raise DomainError("both hulls must lie in [0, inf)")
    sm = s_min(systems)
    w1, w2 = sys1.hull.width, sys2.hull.width
    o1, o2 = sys1.overlap_terms(), sys2.overlap_terms()
    xs, ys = _corner_points(sys1, depth), _corner_points(sys2, depth)
    check_budget(len(xs) * len(ys), "candidate points")
    for x0, y0 in cartesian(xs, ys):
        first = [sm * w2 * x0 + g * y0 for g in o1]
        second = [sm * w1 * y0 + g * x0 for g in o2]
        if all(v > 0 for v in first + second):
            witness = {"s_min": sm, "x0": x0, "y0": y0}
            witness.update({f"slack_1_{k}": v for k, v in enumerate(first, 1)})
            witness.update({f"slack_2_{k}": v for k, v in enumerate(second, 1)})
            return _verdict(tid, True, witness, True)
    x0, y0 = xs[0], ys[0]
    witness = {"s_min": sm, "x0": x0, "y0": y0}
    witness.update({f"slack_1_{k}": sm * w2 * x0 + g * y0 for k, g in enumerate(o1, 1)})
    witness.update({f"slack_2_{k}": sm * w1 * y0 + g * x0 for k, g in enumerate(o2, 1)})
    return _verdict(tid, False, witness, notes=[f"no candidate up to depth {depth} satisfies the strict inequalities"])


def _thickness_inputs(systems) -> tuple[list[Fraction], list[str]]:
    taus, notes = [], []
    for i, s in enumerate(systems, 1):
        rep = thickness(s, 1)
        taus.append(rep.lower_bound)
        notes.append(f"tau_{i} {'exact' if rep.exact else 'lower bound'} (depth {rep.depth_used})")
    return taus, notes


def _attach_fixed_point(f, systems, witness, notes, max_boxes):
    image, depth = fixed_point_image(f, systems, max_boxes=max_boxes)
    if image is None:
        notes.append("structure-only: no fixed point of the outer covers within budget")
        return None
    witness["fixed_point_depth"] = Fraction(depth)
    notes.append(f"conclusion is the outer cover fixed point reached at depth {depth}")
    return image


def check_thm_ratio_two(f: Expr, sys1: System, sys2: System, max_boxes: int = 2**16) -> Verdict:
    """``1/tau_1 <= |f_x / f_y| <= tau_2`` on the hull box.

    Certified form ``1/tau_1 <= S_x / L_y`` and ``L_x / S_y <= tau_2``.  The
    witness counts ``h_1`` gaps of ``K_1`` with ``w_2 / |O| <= max ratio`` and
    ``v_1`` gaps of ``K_2`` with ``|O| / w_1 >= min ratio``; the image has at
    most ``h_1 + v_1 + 1`` intervals.
    """
    tid = "ratio_two"
    o = orient(f, [sys1, sys2])
    if o is None:
        return _indefinite(tid)
    try:
        (t1, t2), notes = _thickness_inputs(o.systems)
    except DomainError as exc:
        return _verdict(tid, False, {}, notes=[str(exc)])
    if t1 == 0 or t2 == 0:
        return _verdict(tid, False, {"tau_1": t1, "tau_2": t2}, notes=notes + ["thickness bound is 0"])
    (Lx, Ly), (Sx, Sy) = o.bounds.L, o.bounds.S
    lo_ratio, hi_ratio = Sx / Ly, Lx / Sy
    witness = {
        "tau_1": t1,
        "tau_2": t2,
        "ratio_lo": lo_ratio,
        "ratio_hi": hi_ratio,
        "slack_1": lo_ratio - 1 / t1,
        "slack_2": t2 - hi_ratio,
    }
    ok = witness["slack_1"] >= 0 and witness["slack_2"] >= 0
    notes = notes + [f"reflected x{i}" for i in o.reflected]
    conclusion = None
    if ok:
        k1, k2 = o.systems
        h1 = len(gaps_at_least(k1, k2.hull.width / hi_ratio))
        v1 = len(gaps_at_least(k2, k1.hull.width * lo_ratio))
        witness.update({"h_1": Fraction(h1), "v_1": Fraction(v1), "interval_bound": Fraction(h1 + v1 + 1)})
        conclusion = _attach_fixed_point(f, [sys1, sys2], witness, notes, max_boxes)
    return _verdict(tid, ok, witness, conclusion, notes)


def check_thm_main(f: Expr, systems: Sequence[System], theorem_id: str = "main", max_boxes: int = 2**16) -> Verdict:
    """Either (1) ``L_i <= sum_{j!=i} S_j tau_j`` for all i, or
    (2) ``sum_i tau_i / (tau_i + r_i) >= 1`` with ``r_i = L_i / S_i``."""
    systems = list(systems)
    o = orient(f, systems)
    if o is None:
        return _indefinite(theorem_id)
    try:
        taus, notes = _thickness_inputs(o.systems)
    except DomainError as exc:
        return _verdict(theorem_id, False, {}, notes=[str(exc)])
    L, S = o.bounds.L, o.bounds.S
    d = len(systems)
    witness = {f"tau_{i + 1}": t for i, t in enumerate(taus)}
    cond1 = True
    for i in range(d):
        slack = sum(S[j] * taus[j] for j in range(d) if j != i) - L[i]
        witness[f"cond1_slack_{i + 1}"] = slack
        cond1 = cond1 and slack >= 0
    total = Fraction(0)
    for i in range(d):
        r = L[i] / S[i]
        witness[f"r_{i + 1}"] = r
        total += taus[i] / (taus[i] + r)
    witness["cond2_sum"] = total
    witness["cond2_slack"] = total - 1
    cond2 = total >= 1
    ok = cond1 or cond2
    notes = notes + [f"reflected x{i}" for i in o.reflected]
    if ok:
        notes.append("condition (1) holds" if cond1 else "condition (2) holds")
    conclusion = _attach_fixed_point(f, systems, witness, notes, max_boxes) if ok else None
    return _verdict(theorem_id, ok, witness, conclusion, notes)


def check_cor_astels_ext(systems: Sequence[System], max_boxes: int = 2**16) -> Verdict:
    """``sum_i tau_i / (tau_i + 1) >= 1`` gives a finite union for the sum."""
    systems = list(systems)
    return check_thm_main(sum_expr(len(systems)), systems, theorem_id="cor_astels_ext", max_boxes=max_boxes)
