"""Generators of Cantor sets on the line and their structural constants.

Two kinds of generator are supported:

* :class:`SelfSimilarSystem`, a finite list of increasing affine contractions;
* :class:`MoranSystem`, a hull plus a per-level refinement pattern (the last
  pattern repeats forever) or an arbitrary refinement rule.

Both expose ``hull`` and ``children(bridge, level)``, which is all the level
machinery needs.  Bridges are closed intervals, gaps are reported as the
closures of the removed open intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import DomainError, check_budget
from .numeric import Interval, IntervalUnion, as_rational, union_normalize


@dataclass(frozen=True)
class AffineMap:
    """``x -> r x + a`` with ``0 < r < 1``."""

    r: Fraction
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", as_rational(self.r))
        object.__setattr__(self, "a", as_rational(self.a))
        if not 0 < self.r < 1:
            raise DomainError(f"contraction ratio {self.r} not in (0, 1)")

    def __call__(self, x: Fraction) -> Fraction:
        return self.r * x + self.a

    @property
    def fixed_point(self) -> Fraction:
        return self.a / (1 - self.r)

    def image(self, iv: Interval) -> Interval:
        return Interval(self(iv.lo), self(iv.hi))

    def __repr__(self) -> str:
        return f"AffineMap({self.r}, {self.a})"


# relative placement of a child inside its father, as a subinterval of [0, 1]
Pattern = tuple[Interval, ...]


def _place(bridge: Interval, pattern: Pattern) -> list[Interval]:
    lo, w = bridge.lo, bridge.hi - bridge.lo
    return [Interval(lo + p.lo * w, lo + p.hi * w) for p in pattern]


def _pattern_gaps(pattern: Pattern) -> list[Fraction]:
    return [q.lo - p.hi for p, q in zip(pattern, pattern[1:])]


@dataclass(frozen=True)
class SelfSimilarSystem:
    """IFS of increasing similarities, sorted by the left end of each image."""

    maps: tuple[AffineMap, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 2:
            raise DomainError("a self-similar system needs at least two maps")
        fps = [m.fixed_point for m in maps]
        A, B = min(fps), max(fps)
        if A == B:
            raise DomainError("all maps share one fixed point; the attractor is a single point")
        maps = tuple(sorted(maps, key=lambda m: (m(A), m(B))))
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "_hull", Interval(A, B))
        H = B - A
        pattern = tuple(Interval((m(A) - A) / H, (m(B) - A) / H) for m in maps)
        object.__setattr__(self, "_pattern", pattern)

    @property
    def hull(self) -> Interval:
        return self._hull

    @property
    def pattern(self) -> Pattern:
        return self._pattern

    def children(self, bridge: Interval, level: int = 0) -> list[Interval]:
        return _place(bridge, self._pattern)

    def first_level(self) -> list[Interval]:
        return [m.image(self.hull) for m in self.maps]

    def overlap_terms(self) -> list[Fraction]:
        """``phi_k(B) - phi_{k+1}(A)`` for consecutive maps (negative for gaps)."""
        A, B = self.hull.lo, self.hull.hi
        return [p(B) - q(A) for p, q in zip(self.maps, self.maps[1:])]

    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"SelfSimilarSystem({label}{list(self.maps)})"


@dataclass(frozen=True)
class MoranSystem:
    """Cantor set built by refining every bridge at level k with ``patterns[k]``.

    Levels beyond the supplied list reuse the last pattern.  ``rule`` may be
    given instead of patterns; it maps ``(bridge, level)`` to the ordered
    sub-bridges, and its output is validated against the declared constants
    every time a bridge is expanded.
    """

    hull_interval: Interval
    patterns: tuple[Pattern, ...] = ()
    declared_s_min: Fraction | None = None
    declared_kappa: Fraction | None = None
    rule: Callable[[Interval, int], Sequence[Interval]] | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.hull_interval.width <= 0:
            raise DomainError("Moran hull must have positive length")
        if self.rule is None and not self.patterns:
            raise DomainError("MoranSystem needs patterns or a rule")
        pats = tuple(tuple(p) for p in self.patterns)
        for pat in pats:
            _validate_pattern(pat)
        object.__setattr__(self, "patterns", pats)
        if pats:
            smin = min(p.width for pat in pats for p in pat)
            refining = pats[1:] if len(pats) > 1 else pats
            kap = max((g for pat in refining for g in _pattern_gaps(pat)), default=Fraction(0))
            if self.declared_s_min is None:
                object.__setattr__(self, "declared_s_min", smin)
            elif as_rational(self.declared_s_min) > smin:
                raise DomainError(f"declared s_min {self.declared_s_min} exceeds actual {smin}")
            if self.declared_kappa is None:
                object.__setattr__(self, "declared_kappa", kap)
            elif as_rational(self.declared_kappa) < kap:
                raise DomainError(f"declared kappa {self.declared_kappa} below actual {kap}")
        elif self.declared_s_min is None or self.declared_kappa is None:
            raise DomainError("rule-based Moran systems must declare s_min and kappa")
        object.__setattr__(self, "declared_s_min", as_rational(self.declared_s_min))
        object.__setattr__(self, "declared_kappa", as_rational(self.declared_kappa))

    @property
    def hull(self) -> Interval:
        return self.hull_interval

    def pattern_at(self, level: int) -> Pattern:
        return self.patterns[min(level, len(self.patterns) - 1)]

    def children(self, bridge: Interval, level: int = 0) -> list[Interval]:
        if self.rule is None:
            return _place(bridge, self.pattern_at(level))
        kids = list(self.rule(bridge, level))
        self._validate_rule_output(bridge, level, kids)
        return kids

    def _validate_rule_output(self, bridge: Interval, level: int, kids: list[Interval]) -> None:
        w = bridge.width
        if len(kids) < 2:
            raise DomainError(f"refinement of {bridge} produced fewer than two sub-bridges")
        for k in kids:
            if not k.issubset(bridge):
                raise DomainError(f"sub-bridge {k} escapes {bridge}")
            if k.width < self.declared_s_min * w:
                raise DomainError(f"sub-bridge {k} violates declared s_min {self.declared_s_min}")
        for p, q in zip(kids, kids[1:]):
            if not p.hi < q.lo:
                raise DomainError(f"sub-bridges {p} and {q} are not separated by a gap")
            if level >= 1 and q.lo - p.hi > self.declared_kappa * w:
                raise DomainError(f"gap ({p.hi}, {q.lo}) violates declared kappa {self.declared_kappa}")

    def __repr__(self) -> str:
        label = self.name or "MoranSystem"
        return f"<{label} hull={self.hull}>"


def _validate_pattern(pat: Pattern) -> None:
    if len(pat) < 2:
        raise DomainError("each refinement pattern needs at least two sub-bridges")
    for p in pat:
        if p.lo < 0 or p.hi > 1 or p.width <= 0:
            raise DomainError(f"pattern piece {p} must be a nondegenerate subinterval of [0, 1]")
    for p, q in zip(pat, pat[1:]):
        if not p.hi < q.lo:
            raise DomainError("pattern pieces must be sorted and separated by gaps")


System = Union[SelfSimilarSystem, MoranSystem]


# ---------------------------------------------------------------------------
# constructors


def lambda_system(lam) -> SelfSimilarSystem:
    """``{lam x, lam x + 1 - lam}``, whose attractor has hull [0, 1]."""
    lam = as_rational(lam)
    return SelfSimilarSystem((AffineMap(lam, 0), AffineMap(lam, 1 - lam)), name=f"K_{lam}")


def middle_third() -> SelfSimilarSystem:
    return SelfSimilarSystem(
        (AffineMap(Fraction(1, 3), 0), AffineMap(Fraction(1, 3), Fraction(2, 3))), name="C"
    )


def moran_two_branch(hull: Interval, ratios: Sequence[tuple], name: str = "") -> MoranSystem:
    """Two sub-bridges per bridge, flush with the father's ends.

    ``ratios[k] = (left, right)`` are the relative lengths used at level k;
    the last pair repeats.
    """
    pats = []
    for left, right in ratios:
        left, right = as_rational(left), as_rational(right)
        if left <= 0 or right <= 0 or left + right >= 1:
            raise DomainError(f"two-branch ratios ({left}, {right}) must be positive with sum < 1")
        pats.append((Interval(0, left), Interval(1 - right, 1)))
    return MoranSystem(hull, tuple(pats), name=name)


def quarter_system() -> SelfSimilarSystem:
    """IFS ``{x/4, x/4 + 3/10}``."""
    return SelfSimilarSystem(
        (AffineMap(Fraction(1, 4), 0), AffineMap(Fraction(1, 4), Fraction(3, 10))), name="K1"
    )


def quarter_pair() -> MoranSystem:
    """``K1 u (K1 + 3/5)`` with K1 from :func:`quarter_system`: one 2/5-split, then the K1 pattern forever."""
    return moran_two_branch(
        Interval(0, 1), [(Fraction(2, 5), Fraction(2, 5)), (Fraction(1, 4), Fraction(1, 4))], name="K"
    )


# ---------------------------------------------------------------------------
# operations


def hull(system: System) -> Interval:
    return system.hull


def bridges(system: System, k: int) -> list[Interval]:
    """Level-k bridges in left-to-right construction order (not merged)."""
    if k < 0:
        raise DomainError("level must be nonnegative")
    level = [system.hull]
    for lvl in range(k):
        nxt: list[Interval] = []
        for b in level:
            nxt.extend(system.children(b, lvl))
            check_budget(len(nxt), "bridges")
        level = nxt
    return level


def level_set(system: System, k: int) -> IntervalUnion:
    """F_k as a normalized union (overlapping images merge)."""
    return union_normalize(bridges(system, k))


def cylinder(system: SelfSimilarSystem, word: Sequence[int]) -> SelfSimilarSystem:
    """System whose attractor is ``phi_word(K)``; indices are 1-based.

    ``word = [w1, ..., wn]`` denotes ``phi_w1 o ... o phi_wn``.  The maps are
    conjugated by that composition, so ratios (hence s_min and kappa) are
    unchanged.
    """
    if not word:
        return system
    R, T = Fraction(1), Fraction(0)
    for w in word:
        if not 1 <= w <= len(system.maps):
            raise DomainError(f"map index {w} out of range 1..{len(system.maps)}")
        m = system.maps[w - 1]
        # (R, T) o m
        R, T = R * m.r, R * m.a + T
    maps = tuple(AffineMap(m.r, R * m.a + T * (1 - m.r)) for m in system.maps)
    label = f"{system.name}[{','.join(map(str, word))}]" if system.name else ""
    return SelfSimilarSystem(maps, name=label)


def reflect(system: System) -> System:
    """Mirror image ``A + B - K`` of the attractor."""
    A, B = system.hull.lo, system.hull.hi
    if isinstance(system, SelfSimilarSystem):
        maps = tuple(AffineMap(m.r, (A + B) * (1 - m.r) - m.a) for m in system.maps)
        return SelfSimilarSystem(maps, name=f"-{system.name}" if system.name else "")
    if system.rule is not None:
        rule = system.rule

        def mirrored(bridge: Interval, level: int) -> list[Interval]:
            flipped = Interval(A + B - bridge.hi, A + B - bridge.lo)
            return [Interval(A + B - k.hi, A + B - k.lo) for k in reversed(rule(flipped, level))]

        return MoranSystem(system.hull, (), system.declared_s_min, system.declared_kappa, mirrored)
    pats = tuple(tuple(Interval(1 - p.hi, 1 - p.lo) for p in reversed(pat)) for pat in system.patterns)
    return MoranSystem(system.hull, pats, system.declared_s_min, system.declared_kappa)


def s_min(systems: Iterable[System]) -> Fraction:
    vals = []
    for s in systems:
        if isinstance(s, SelfSimilarSystem):
            vals.extend(m.r for m in s.maps)
        else:
            vals.append(s.declared_s_min)
    if not vals:
        raise DomainError("s_min of an empty family")
    return min(vals)


def first_level_gaps(system: System) -> list[Interval]:
    """Closures of the gaps removed in the first step; errors on overlaps."""
    kids = system.children(system.hull, 0)
    gaps = []
    for p, q in zip(kids, kids[1:]):
        if p.hi > q.lo:
            raise DomainError(f"first-level images {p} and {q} overlap; gap structure undefined")
        if p.hi < q.lo:
            gaps.append(Interval(p.hi, q.lo))
    return gaps


def _kappa_one(system: System, plus: bool) -> Fraction:
    H = system.hull.width
    first = max((g.width / H for g in first_level_gaps(system)), default=Fraction(0))
    if isinstance(system, SelfSimilarSystem):
        # every deeper gap is a scaled copy of a first-level gap inside a scaled hull
        return first
    return max(system.declared_kappa, first) if plus else system.declared_kappa


def kappa(systems: Iterable[System], plus: bool = False) -> Fraction:
    """Largest gap-to-father ratio; ``plus`` also admits first-step gaps."""
    vals = [_kappa_one(s, plus) for s in systems]
    if not vals:
        raise DomainError("kappa of an empty family")
    return max(vals)


# ---------------------------------------------------------------------------
# thickness


@dataclass(frozen=True)
class ThicknessReport:
    lower_bound: Fraction
    exact: bool
    depth_used: int


@dataclass(frozen=True)
class _Gap:
    iv: Interval
    level: int

    @property
    def length(self) -> Fraction:
        return self.iv.hi - self.iv.lo


def gaps_by_level(system: System, depth: int) -> tuple[list[_Gap], list[Interval]]:
    """All construction gaps at levels 1..depth plus the level-depth bridges."""
    out: list[_Gap] = []
    level = [system.hull]
    for lvl in range(depth):
        nxt: list[Interval] = []
        for b in level:
            kids = system.children(b, lvl)
            for p, q in zip(kids, kids[1:]):
                if p.hi > q.lo:
                    raise DomainError(f"bridges {p} and {q} overlap; gaps undefined")
                if p.hi == q.lo:
                    raise DomainError("touching sub-bridges give a zero-length gap; thickness undefined")
                out.append(_Gap(Interval(p.hi, q.lo), lvl + 1))
            nxt.extend(kids)
        check_budget(len(nxt), "bridges")
        level = nxt
    return out, level


def newhouse_bridges(gaps: Sequence[Interval], hull_iv: Interval) -> list[tuple[Fraction, Fraction]]:
    """Left and right bridge lengths of each gap under size ordering.

    Gaps are removed longest first, ties left to right, so the left bridge of
    a gap runs to the nearest gap on its left of at least equal length, and
    the right bridge to the nearest strictly longer gap on its right.
    ``gaps`` must be sorted by position.
    """
    n = len(gaps)
    lens = [g.hi - g.lo for g in gaps]
    left = [Fraction(0)] * n
    right = [Fraction(0)] * n
    stack: list[int] = []
    for i in range(n):
        while stack and lens[stack[-1]] < lens[i]:
            stack.pop()
        edge = gaps[stack[-1]].hi if stack else hull_iv.lo
        left[i] = gaps[i].lo - edge
        stack.append(i)
    stack = []
    for i in range(n - 1, -1, -1):
        while stack and lens[stack[-1]] <= lens[i]:
            stack.pop()
        edge = gaps[stack[-1]].lo if stack else hull_iv.hi
        right[i] = edge - gaps[i].hi
        stack.append(i)
    return list(zip(left, right))


def _exact_ratios(system: System, min_len: Fraction, depth: int, max_depth: int = 64):
    """Newhouse ratios of every gap whose bridges are fully determined.

    Expands levels until every unexpanded gap is strictly shorter than
    ``min_len``; returns ``(ratios by gap, depth used, rest bound)`` where only
    gaps longer than the rest bound are included.
    """
    kap_plus = kappa([system], plus=True)
    d = max(depth, 1)
    while True:
        gaps, last = gaps_by_level(system, d)
        rest = kap_plus * max(b.width for b in last)
        if rest < min_len or d >= max_depth:
            break
        d += 1
    gaps.sort(key=lambda g: g.iv.lo)
    sides = newhouse_bridges([g.iv for g in gaps], system.hull)
    ratios = [
        (g, min(l, r) / g.length) for g, (l, r) in zip(gaps, sides) if g.length > rest
    ]
    return ratios, d, rest


def thickness(system: System, depth: int = 1) -> ThicknessReport:
    """Newhouse thickness with an exactness certificate.

    For a self-similar system with separated first-level images the value is
    always exact: a gap inside a copy ``phi_w([A, B])`` has ratio at least that
    of the corresponding first-level gap, so the infimum is attained among the
    first-level gaps, whose bridges are determined once every deeper gap is
    shorter than the shortest first-level gap.

    For Moran systems the certified lower bound is ``s_min / kappa_plus``
    (valid for any Moran set), improved by the tail argument above when the
    refinement is pattern based; the report is exact when some fully
    determined gap attains the bound.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    first = first_level_gaps(system)
    if len(first) != len(system.children(system.hull, 0)) - 1:
        raise DomainError("touching first-level images give a zero-length gap; thickness undefined")
    if isinstance(system, SelfSimilarSystem):
        gmin = min(g.width for g in first)
        ratios, d, _ = _exact_ratios(system, gmin, depth)
        return ThicknessReport(min(r for _, r in ratios), True, d)

    # Moran: certified lower bound, then look for a determined gap attaining it
    generic = s_min([system]) / kappa([system], plus=True)
    lower = generic
    probe = depth
    if system.rule is None:
        p = len(system.patterns)
        tail = system.patterns[-1]
        tail_ss = SelfSimilarSystem(tuple(AffineMap(q.width, q.lo) for q in tail))
        tau_tail = thickness(tail_ss).lower_bound
        prefix, _ = gaps_by_level(system, p)
        min_len = min(g.length for g in prefix)
        ratios, probe, rest = _exact_ratios(system, min_len, max(depth, p))
        prefix_exact = [r for g, r in ratios if g.level < p]
        pattern_bound = min(prefix_exact + [tau_tail])
        lower = max(generic, pattern_bound)
    else:
        gaps, last = gaps_by_level(system, depth)
        rest = kappa([system], plus=True) * max(b.width for b in last)
        gaps.sort(key=lambda g: g.iv.lo)
        sides = newhouse_bridges([g.iv for g in gaps], system.hull)
        ratios = [(g, min(l, r) / g.length) for g, (l, r) in zip(gaps, sides) if g.length > rest]
    upper = min((r for _, r in ratios), default=None)
    exact = upper is not None and upper == lower
    return ThicknessReport(lower, exact, probe)


def gaps_at_least(system: System, threshold: Fraction, max_depth: int = 64) -> list[Interval]:
    """Every construction gap of length >= ``threshold``.

    Terminates because a gap at level m+1 is at most kappa_plus times the
    longest level-m bridge, and bridges shrink geometrically.
    """
    if threshold <= 0:
        raise DomainError("threshold must be positive")
    kap_plus = kappa([system], plus=True)
    out: list[Interval] = []
    level = [system.hull]
    lvl = 0
    while level and kap_plus * max(b.width for b in level) >= threshold:
        if lvl >= max_depth:
            raise DomainError("gap enumeration did not terminate within max_depth")
        nxt = []
        for b in level:
            kids = system.children(b, lvl)
            for p, q in zip(kids, kids[1:]):
                if q.lo - p.hi >= threshold:
                    out.append(Interval(p.hi, q.lo))
            nxt.extend(kids)
        check_budget(len(nxt), "bridges")
        level = nxt
        lvl += 1
    return sorted(out, key=lambda g: g.lo)
