"""Set-specification documents and deterministic report serialization.

A set specification is a JSON object, for example::

    {"type": "self_similar", "maps": [{"r": "1/3", "a": "0"}, {"r": "1/3", "a": "2/3"}]}
    {"type": "moran_two_branch", "hull": ["0", "1"], "ratios": [["2/5", "2/5"], ["1/4", "1/4"]]}
    {"type": "lambda", "lambda": "1/3"}

Numbers may be strings (``"1/3"``, ``"0.3"``) or JSON numbers; both are read
exactly.  A self-similar document may carry ``"hull"`` (checked against the
computed hull) and ``"cylinder"`` (a word selecting a sub-copy).
"""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction

from .errors import DomainError, SpecFileError
from .fractal import AffineMap, MoranSystem, SelfSimilarSystem, System, cylinder, lambda_system, moran_two_branch
from .numeric import Enclosure, Interval, IntervalUnion, as_rational, decimal_str, rational_str


def _position(text: str, needle: str, occurrence: int = 0) -> tuple[int | None, int | None]:
    idx = -1
    for _ in range(occurrence + 1):
        idx = text.find(needle, idx + 1)
        if idx < 0:
            return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


class _Doc:
    def __init__(self, text: str):
        self.text = text

    def fail(self, msg: str, key: str | None = None, occurrence: int = 0):
        line, col = _position(self.text, f'"{key}"', occurrence) if key else (None, None)
        raise SpecFileError(msg, line, col)

    def rational(self, value, key: str, occurrence: int = 0) -> Fraction:
        if isinstance(value, bool) or not isinstance(value, (str, int, Fraction)):
            self.fail(f"{key}: expected an exact rational, got {value!r}", key, occurrence)
        try:
            return as_rational(value)
        except (ValueError, TypeError) as exc:
            self.fail(f"{key}: {exc}", key, occurrence)


def parse_set_spec(text: str) -> System:
    try:
        obj = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SpecFileError(exc.msg, exc.lineno, exc.colno) from None
    doc = _Doc(text)
    if not isinstance(obj, dict):
        raise SpecFileError("set specification must be a JSON object", 1, 1)
    kind = obj.get("type")
    name = str(obj.get("name", ""))
    try:
        if kind == "self_similar":
            return _self_similar(doc, obj, name)
        if kind == "moran_two_branch":
            return _moran(doc, obj, name)
        if kind == "lambda":
            lam = doc.rational(obj.get("lambda"), "lambda")
            return lambda_system(lam)
    except DomainError as exc:
        doc.fail(str(exc), "type")
    doc.fail(f"unknown set type {kind!r}", "type")


def _self_similar(doc: _Doc, obj: dict, name: str) -> SelfSimilarSystem:
    maps = obj.get("maps")
    if not isinstance(maps, list) or len(maps) < 2:
        doc.fail("self_similar needs a list of at least two maps", "maps")
    out = []
    for i, m in enumerate(maps):
        if not isinstance(m, dict) or "r" not in m or "a" not in m:
            doc.fail(f"map {i + 1} must be an object with keys r and a", "maps")
        r = doc.rational(m["r"], "r", i)
        a = doc.rational(m["a"], "a", i)
        if not 0 < r < 1:
            doc.fail(f"map {i + 1}: ratio {r} not in (0, 1)", "r", i)
        out.append(AffineMap(r, a))
    system = SelfSimilarSystem(tuple(out), name=name)
    if "cylinder" in obj:
        word = obj["cylinder"]
        if not isinstance(word, list) or not all(isinstance(w, int) and not isinstance(w, bool) for w in word):
            doc.fail("cylinder must be a list of 1-based map indices", "cylinder")
        try:
            system = cylinder(system, word)
        except DomainError as exc:
            doc.fail(str(exc), "cylinder")
    if "hull" in obj:
        hull = _interval(doc, obj["hull"], "hull")
        if hull != system.hull:
            doc.fail(f"declared hull {hull} differs from the computed hull {system.hull}", "hull")
    return system


def _interval(doc: _Doc, raw, key: str) -> Interval:
    if not isinstance(raw, list) or len(raw) != 2:
        doc.fail(f"{key} must be a pair [lo, hi]", key)
    lo, hi = doc.rational(raw[0], key), doc.rational(raw[1], key)
    if lo > hi:
        doc.fail(f"{key}: lo > hi", key)
    return Interval(lo, hi)


def _moran(doc: _Doc, obj: dict, name: str) -> MoranSystem:
    hull = _interval(doc, obj.get("hull"), "hull")
    ratios = obj.get("ratios")
    if not isinstance(ratios, list) or not ratios:
        doc.fail("moran_two_branch needs a nonempty list of [left, right] ratio pairs", "ratios")
    pairs = []
    for pair in ratios:
        if not isinstance(pair, list) or len(pair) != 2:
            doc.fail("each ratios entry must be a pair [left, right]", "ratios")
        pairs.append((doc.rational(pair[0], "ratios"), doc.rational(pair[1], "ratios")))
    try:
        return moran_two_branch(hull, pairs, name=name)
    except DomainError as exc:
        doc.fail(str(exc), "ratios")


def load_set_spec(path: str) -> System:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_set_spec(text)
    except SpecFileError as exc:
        wrapped = SpecFileError(f"{path}: {exc}")
        wrapped.line, wrapped.column = exc.line, exc.column
        raise wrapped from None


# ---------------------------------------------------------------------------
# serialization


def to_document(obj, decimals: bool = False):
    """Plain JSON-ready structure; every rational becomes an exact ``p/q`` string.

    Integers (depths, counts, bit widths) stay JSON integers.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, Interval):
        out = [rational_str(obj.lo), rational_str(obj.hi)]
        return out
    if isinstance(obj, IntervalUnion):
        doc = {"parts": [to_document(p) for p in obj]}
        if decimals:
            doc["decimal_parts_display_only"] = [[decimal_str(p.lo), decimal_str(p.hi)] for p in obj]
        return doc
    if isinstance(obj, Enclosure):
        return {"value": to_document(obj.value), "precision_bits": obj.precision_bits}
    if isinstance(obj, dict):
        return {str(k): to_document(v, decimals) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_document(v, decimals) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_document(getattr(obj, f.name), decimals) for f in fields(obj)}
    if hasattr(obj, "passed") and hasattr(obj, "checks"):
        return to_document(vars(obj), decimals)
    return str(obj)


def dumps(obj, decimals: bool = False) -> str:
    return json.dumps(to_document(obj, decimals), indent=2, sort_keys=True) + "\n"
