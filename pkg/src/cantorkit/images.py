"""Images ``f(K_1, ..., K_d)``: exact first-level images, outer covers, K/K.

An outer cover at depth k evaluates ``f`` on every tuple of level-k pieces.
When every partial derivative has a fixed sign on a box the image of that
box is exactly the interval between two corner values; otherwise the
natural interval extension gives an enclosure.  Either way the union
contains the true image, and deeper covers are contained in shallower ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from math import prod
from typing import Sequence

from .errors import BudgetExceeded, DomainError, check_budget
from .expr import Expr, corner_image, eval_interval, partial_bounds
from .fractal import SelfSimilarSystem, System, level_set
from .numeric import (
    Interval,
    IntervalUnion,
    as_rational,
    enclosure_of,
    union_measure,
    union_normalize,
)

EXACT = "exact"
OUTER = "outer"


@dataclass(frozen=True)
class ImageResult:
    set: IntervalUnion
    exactness: str
    depth: int
    theorem_id: str | None = None


def tuple_image(f: Expr, systems: Sequence[System], depth: int) -> tuple[IntervalUnion, bool]:
    """Union of ``f`` over all tuples of level-``depth`` pieces.

    Returns the union and whether every box image was exact (monotone).
    Pieces are the merged components of each level set, so overlapping
    systems are handled and the box count stays small.
    """
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    pieces = [level_set(s, depth).parts for s in systems]
    check_budget(prod(len(p) for p in pieces), "box tuples")
    hull_box = [s.hull for s in systems]
    hb = partial_bounds(f, hull_box)
    out: list[Interval] = []
    exact = True
    if hb.definite:
        signs = hb.signs
        for box in cartesian(*pieces):
            out.append(corner_image(f, box, signs))
    else:
        ifn = f.interval_fn
        for box in cartesian(*pieces):
            b = partial_bounds(f, box)
            if b.definite:
                out.append(corner_image(f, box, b.signs))
            else:
                out.append(ifn(box))
                exact = False
    return union_normalize(out), exact


def image_outer(f: Expr, systems: Sequence[System], depth: int) -> ImageResult:
    """Certified cover of ``f(K_1, ..., K_d)`` from level-``depth`` pieces."""
    u, _ = tuple_image(f, systems, depth)
    return ImageResult(u, OUTER, depth)


def fixed_point_image(
    f: Expr, systems: Sequence[System], max_depth: int = 12, max_boxes: int = 2**16
) -> tuple[IntervalUnion | None, int]:
    """First depth at which two consecutive outer covers coincide.

    Heuristic: a theorem guaranteeing finitely many intervals does not say
    at which depth the covers stop changing.  Returns ``(None, depth)`` when
    no fixed point appears within the limits.
    """
    prev = None
    for k in range(1, max_depth + 1):
        count = prod(len(level_set(s, k).parts) for s in systems)
        if count > max_boxes:
            return None, k - 1
        try:
            cur, _ = tuple_image(f, systems, k)
        except BudgetExceeded:
            return None, k - 1
        if prev is not None and cur == prev:
            return cur, k
        prev = cur
    return None, max_depth


FIRST_LEVEL_THEOREMS = {"cantor", "cor_sum", "cor_interval_two", "arithmetic", "cor_arithmetic_two"}
FIXED_POINT_THEOREMS = {"ratio_two", "main", "cor_astels_ext"}


def image_exact(f: Expr, systems: Sequence[System], verdict) -> ImageResult:
    """The image certified by a proved verdict.

    For the partial-derivative theorems the image equals the first-level
    tuple image.  For the thickness theorems it is the fixed-point set the
    checker recorded.
    """
    if not verdict.proved:
        raise DomainError(f"verdict for {verdict.theorem_id} is not Proved")
    tid = verdict.theorem_id
    if tid in FIRST_LEVEL_THEOREMS:
        u, exact = tuple_image(f, systems, 1)
        if not exact:
            raise DomainError("first-level image needs definite partial signs")
        return ImageResult(u, EXACT, 1, tid)
    if tid in FIXED_POINT_THEOREMS:
        if not isinstance(verdict.conclusion, IntervalUnion):
            raise DomainError(f"{tid} verdict is structure-only; no certified set recorded")
        depth = int(verdict.witness.get("fixed_point_depth", 0))
        return ImageResult(verdict.conclusion, EXACT, depth, tid)
    raise DomainError(f"theorem {tid} does not yield an image")


def outer_measure_sequence(f: Expr, systems: Sequence[System], depths: Sequence[int]) -> list[Fraction]:
    depths = list(depths)
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise DomainError("depths must be increasing")
    return [union_measure(image_outer(f, systems, k).set) for k in depths]


# ---------------------------------------------------------------------------
# quotient sets of the two-map lambda systems


def disjoint_regime(lam) -> bool:
    """True when the pieces of K/K are pairwise disjoint (lam^2 - 3 lam + 1 > 0)."""
    lam = as_rational(lam)
    return lam * lam - 3 * lam + 1 > 0


def quotient_piece(lam, k: int) -> Interval:
    lam = as_rational(lam)
    s = lam**k
    return Interval(s * (1 - lam), s / (1 - lam))


def quotient_closed_form(lam, k_min: int, k_max: int) -> tuple[IntervalUnion, bool]:
    """Union of ``lam^k [1 - lam, 1/(1 - lam)]`` for ``k_min <= k <= k_max``.

    The second value is the disjointness flag.
    """
    lam = as_rational(lam)
    if not Fraction(1, 3) <= lam < Fraction(1, 2):
        raise DomainError(f"lambda {lam} outside [1/3, 1/2)")
    if k_min > k_max:
        raise DomainError("empty k range")
    pieces = [quotient_piece(lam, k) for k in range(k_min, k_max + 1)]
    return union_normalize(pieces), disjoint_regime(lam)


def two_map_lambda(system: System) -> Fraction | None:
    """``lam`` when ``system`` is exactly ``{lam x, lam x + 1 - lam}``."""
    if not isinstance(system, SelfSimilarSystem) or len(system.maps) != 2:
        return None
    m1, m2 = system.maps
    if m1.r == m2.r and m1.a == 0 and m2.a == 1 - m1.r:
        return m1.r
    return None


def _locate_gap(lam: Fraction, q: Interval) -> str:
    """Place a positive enclosure among the disjoint pieces of K/K."""
    k = 0
    while quotient_piece(lam, k).lo > q.hi:
        k += 1
    while quotient_piece(lam, k - 1).lo <= q.hi:
        k -= 1
    # piece(k).lo <= q.hi < piece(k-1).lo
    cur, upper = quotient_piece(lam, k), quotient_piece(lam, k - 1)
    if q.issubset(cur):
        return "intersect"
    if cur.hi < q.lo and q.hi < upper.lo:
        return "disjoint"
    return "unknown"


def scaled_intersection(sys1: System, sys2: System, a, b, depth: int = 4, precision_bits: int = 128) -> str:
    """Decide whether ``a K_1`` and ``b K_2`` meet away from 0.

    ``a`` and ``b`` may be rationals, enclosures, intervals, or the names
    ``e``, ``pi``, ``sqrt2``.  Returns ``"intersect"``, ``"disjoint"`` or
    ``"unknown"``.  Nonzero points ``a x = b y`` exist exactly when
    ``b / a`` lies in ``K_1 / K_2`` (with ``y != 0``).
    """
    from .checkers import check_thm_intersection

    ea, eb = enclosure_of(a, precision_bits), enclosure_of(b, precision_bits)
    if ea.contains_zero() or eb.contains_zero():
        raise DomainError("scale factors must be nonzero (enclosure contains 0)")
    q = eb / ea

    # 1. the intersection theorem, for exact rational scales
    if ea.width == 0 and eb.width == 0:
        try:
            v = check_thm_intersection(sys1, sys2, ea.lo, eb.lo)
        except DomainError:
            v = None
        if v is not None and v.proved:
            return "intersect" if v.conclusion else "disjoint"

    # 2. the closed form for equal lambda systems in the disjoint regime
    lam = two_map_lambda(sys1)
    if lam is not None and lam == two_map_lambda(sys2) and Fraction(1, 3) <= lam < Fraction(1, 2):
        if q.hi < 0:
            # K lies in [0, 1]; a negative ratio needs x/y < 0, impossible off 0
            return "disjoint"
        if q.lo > 0 and disjoint_regime(lam):
            return _locate_gap(lam, q)

    # 3. outer covers of the quotient only ever certify disjointness
    u1, u2 = level_set(sys1, depth), level_set(sys2, depth)
    if any(p.contains_zero() for p in u2):
        # x/y with y near 0 is unbounded; only the sign can be ruled out
        return "unknown"
    from .numeric import union_pointwise

    cover = union_pointwise(u1, u2, "quotient")
    if not any(part.intersects(q) for part in cover):
        return "disjoint"
    return "unknown"
