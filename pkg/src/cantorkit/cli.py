"""Command-line front end.

Exit status: 0 when the run passes (or a verdict matches ``--expect``),
1 when a check fails or a verdict is Inconclusive, 2 on usage or input
errors (bad flags, malformed set files, syntax errors, exhausted budget).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import checkers
from .applications import APPLICATIONS, fermat_alpha_ranges
from .errors import BudgetExceeded, DomainError, ExprSyntaxError, SpecFileError
from .expr import parse_expr
from .fractal import quarter_pair, quarter_system, lambda_system, middle_third
from .images import image_exact, image_outer, outer_measure_sequence, scaled_intersection
from .numeric import IntervalUnion, as_rational, decimal_str, rational_str
from .specfile import dumps, load_set_spec, to_document

MAX_DEPTH = 24
MAX_BITS = 4096

BUILTIN_SETS = {
    "@middle-third": middle_third,
    "@k1": quarter_system,
    "@k": quarter_pair,
}


class UsageError(Exception):
    pass


def resolve_set(ref: str):
    """A set-spec path, or a builtin: ``@middle-third``, ``@k1``, ``@k``, ``@lambda:<r>``."""
    if ref.startswith("@lambda:"):
        return lambda_system(as_rational(ref.split(":", 1)[1]))
    if ref.startswith("@"):
        if ref not in BUILTIN_SETS:
            raise UsageError(f"unknown builtin set {ref!r}; known: {', '.join(sorted(BUILTIN_SETS))}, @lambda:<r>")
        return BUILTIN_SETS[ref]()
    try:
        return load_set_spec(ref)
    except OSError as exc:
        raise UsageError(f"cannot read set file {ref!r}: {exc.strerror}") from None


def _systems(args, count: int | None = None):
    refs = args.set or []
    if count is not None and len(refs) != count:
        raise UsageError(f"expected {count} --set arguments, got {len(refs)}")
    if not refs:
        raise UsageError("at least one --set is required")
    return [resolve_set(r) for r in refs]


def _expr(args, d: int):
    if not args.f:
        raise UsageError("--f is required")
    return parse_expr(args.f, d)


def _depth(value: str) -> int:
    k = int(value)
    if not 0 <= k <= MAX_DEPTH:
        raise argparse.ArgumentTypeError(f"depth must be in 0..{MAX_DEPTH}")
    return k


def _bits(value: str) -> int:
    b = int(value)
    if not 1 <= b <= MAX_BITS:
        raise argparse.ArgumentTypeError(f"precision must be in 1..{MAX_BITS} bits")
    return b


# ---------------------------------------------------------------------------
# rendering


def _text_union(u: IntervalUnion) -> str:
    if not u.parts:
        return "empty"
    return " U ".join(f"[{rational_str(p.lo)}, {rational_str(p.hi)}]" for p in u)


def _text_value(v) -> str:
    if isinstance(v, IntervalUnion):
        return _text_union(v)
    if isinstance(v, Fraction):
        return rational_str(v)
    return str(v)


def render_svg(rows: list[tuple[str, IntervalUnion]], width: int = 800, row_height: int = 24) -> str:
    """One horizontal bar per union, sharing a common x scale (display aid only)."""
    parts = [p for _, u in rows for p in u]
    lo = min((p.lo for p in parts), default=Fraction(0))
    hi = max((p.hi for p in parts), default=Fraction(1))
    span = hi - lo or Fraction(1)
    margin, label_w = 10, 120
    plot_w = width - label_w - 2 * margin
    height = row_height * len(rows) + 2 * margin

    def x(v: Fraction) -> str:
        return f"{float(label_w + margin + (v - lo) / span * plot_w):.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    for i, (label, u) in enumerate(rows):
        y = margin + i * row_height
        out.append(f'  <text x="{margin}" y="{y + row_height * 0.7:.1f}" font-size="12">{label}</text>')
        for p in u:
            w = max(float((p.hi - p.lo) / span * plot_w), 0.5)
            out.append(
                f'  <rect x="{x(p.lo)}" y="{y + 4}" width="{w:.3f}" height="{row_height - 8}" fill="black">'
                f"<title>[{rational_str(p.lo)}, {rational_str(p.hi)}]</title></rect>"
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _emit(doc: dict, fmt: str, rows=None) -> str:
    if fmt == "json":
        return dumps(doc, decimals=True)
    if fmt == "svg":
        return render_svg(rows or [])
    return "\n".join(_text_lines(to_document(doc))) + "\n"


def _text_lines(doc, prefix: str = "") -> list[str]:
    if isinstance(doc, dict) and set(doc) >= {"parts"}:
        pieces = [f"[{lo}, {hi}]" for lo, hi in doc["parts"]]
        return [f"{prefix}: {' U '.join(pieces) or 'empty'}"]
    if isinstance(doc, dict):
        lines = []
        for key in sorted(doc):
            lines += _text_lines(doc[key], f"{prefix}.{key}" if prefix else key)
        return lines
    if isinstance(doc, list) and all(isinstance(v, str) for v in doc) and len(doc) == 2 and prefix.endswith(("lower", "upper")):
        return [f"{prefix}: [{doc[0]}, {doc[1]}]"]
    if isinstance(doc, list):
        return [f"{prefix}: {'; '.join(str(v) for v in doc)}"]
    return [f"{prefix}: {doc}"]


# ---------------------------------------------------------------------------
# subcommands


def _status_code(ok: bool, expect: str | None, status: str) -> int:
    if expect is not None:
        return 0 if expect.lower() == status.lower() else 1
    return 0 if ok else 1


def cmd_check(args, out) -> int:
    tid = args.theorem_id.replace("-", "_")
    if tid not in checkers.THEOREM_IDS:
        raise UsageError(f"unknown theorem id {args.theorem_id!r}; known: {', '.join(checkers.THEOREM_IDS)}")
    systems = _systems(args)
    d = len(systems)
    two = d == 2
    if tid == "cor_sum":
        v = checkers.check_cor_sum(systems)
    elif tid == "cor_astels_ext":
        v = checkers.check_cor_astels_ext(systems)
    elif tid == "intersection":
        if not two or args.a is None or args.b is None:
            raise UsageError("intersection needs two --set and both --a and --b")
        v = checkers.check_thm_intersection(systems[0], systems[1], as_rational(args.a), as_rational(args.b))
    elif tid == "cor_multiplication":
        if not two:
            raise UsageError("cor_multiplication needs two --set")
        v = checkers.check_cor_multiplication(systems[0], systems[1])
    else:
        f = _expr(args, d)
        if tid == "cantor":
            v = checkers.check_thm_cantor(f, systems)
        elif tid == "arithmetic":
            v = checkers.check_thm_arithmetic_sss(f, systems)
        elif tid == "main":
            v = checkers.check_thm_main(f, systems)
        else:
            if not two:
                raise UsageError(f"{tid} needs exactly two --set")
            if tid == "cor_interval_two":
                v = checkers.check_cor_interval_two(f, *systems)
            elif tid == "cor_arithmetic_two":
                v = checkers.check_cor_arithmetic_two(f, *systems, mode=args.mode)
            else:
                v = checkers.check_thm_ratio_two(f, *systems)
    doc = {"theorem_id": v.theorem_id, "status": v.status, "witness": v.witness, "conclusion": v.conclusion, "notes": list(v.notes)}
    out.write(_emit(doc, args.format, _verdict_rows(v)))
    return _status_code(v.proved, args.expect, v.status)


def _verdict_rows(v):
    if isinstance(v.conclusion, IntervalUnion):
        return [(v.theorem_id, v.conclusion)]
    return []


def cmd_image(args, out) -> int:
    systems = _systems(args)
    f = _expr(args, len(systems))
    if args.theorem:
        tid = args.theorem.replace("-", "_")
        check = {
            "cantor": lambda: checkers.check_thm_cantor(f, systems),
            "arithmetic": lambda: checkers.check_thm_arithmetic_sss(f, systems),
            "main": lambda: checkers.check_thm_main(f, systems),
            "ratio_two": lambda: checkers.check_thm_ratio_two(f, *systems),
            "cor_interval_two": lambda: checkers.check_cor_interval_two(f, *systems),
        }.get(tid)
        if check is None:
            raise UsageError(f"--theorem {args.theorem!r} does not certify images")
        v = check()
        if not v.proved:
            out.write(_emit({"status": v.status, "theorem_id": tid, "notes": list(v.notes)}, "json"))
            return 1
        res = image_exact(f, systems, v)
    else:
        res = image_outer(f, systems, args.depth)
    doc = {"set": res.set, "exactness": res.exactness, "depth": res.depth, "theorem_id": res.theorem_id}
    if args.format == "svg":
        rows = [(f"depth {k}", image_outer(f, systems, k).set) for k in range(args.depth + 1)]
        if res.exactness == "exact":
            rows.append(("exact", res.set))
        return _write(out, render_svg(rows))
    return _write(out, _emit(doc, args.format))


def _write(out, text: str) -> int:
    out.write(text)
    return 0


def cmd_measure(args, out) -> int:
    systems = _systems(args)
    f = _expr(args, len(systems))
    depths = list(range(args.depth + 1))
    seq = outer_measure_sequence(f, systems, depths)
    if args.format == "svg":
        return _write(out, render_svg([(f"depth {k}", image_outer(f, systems, k).set) for k in depths]))
    doc = {"depths": depths, "measures": seq}
    if args.format == "json":
        doc["measures_decimal_display_only"] = [decimal_str(m) for m in seq]
        return _write(out, dumps(doc))
    lines = [f"depth {k}: {rational_str(m)}  (~{decimal_str(m)})" for k, m in zip(depths, seq)]
    return _write(out, "\n".join(lines) + "\n")


def cmd_intersect(args, out) -> int:
    if args.a is None or args.b is None:
        raise UsageError("intersect needs --a and --b")
    refs = args.set or ["@middle-third"]
    if len(refs) == 1:
        refs = refs * 2
    if len(refs) != 2:
        raise UsageError("intersect takes one or two --set arguments")
    s1, s2 = (resolve_set(r) for r in refs)
    a = args.a if args.a in ("e", "pi", "sqrt2") else as_rational(args.a)
    b = args.b if args.b in ("e", "pi", "sqrt2") else as_rational(args.b)
    result = scaled_intersection(s1, s2, a, b, precision_bits=args.bits)
    doc = {"a": args.a, "b": args.b, "precision_bits": args.bits, "result": result}
    out.write(_emit(doc, "text" if args.format == "svg" else args.format))
    if args.expect is not None:
        return 0 if args.expect == result else 1
    return 0 if result != "unknown" else 1


def cmd_verify(args, out) -> int:
    app = APPLICATIONS.get(args.app_id)
    if app is None:
        raise UsageError(f"unknown application {args.app_id!r}; known: {', '.join(APPLICATIONS)}")
    kwargs = {}
    if args.app_id == "erdos-straus" and args.m is not None:
        kwargs["m"] = args.m
    if args.app_id == "division" and args.N is not None:
        kwargs["N"] = args.N
    if args.app_id == "cc-measure" and args.max_depth is not None:
        kwargs["max_depth"] = args.max_depth
    if args.app_id in ("fermat", "constants") and args.lam is not None:
        kwargs["lam"] = as_rational(args.lam)
    rep = app(**kwargs)
    if args.format == "text":
        lines = [f"{rep.name}: {'pass' if rep.passed else 'FAIL'}"]
        for c in rep.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {_text_value(c.computed)}")
        lines += [f"  note: {n}" for n in rep.notes]
        out.write("\n".join(lines) + "\n")
    else:
        doc = to_document(rep, decimals=True)
        doc["passed"] = rep.passed
        out.write(dumps(doc))
    return 0 if rep.passed else 1


def cmd_fermat(args, out) -> int:
    br = fermat_alpha_ranges(as_rational(args.lam), args.n, args.k, args.bits)
    return _write(out, _emit(to_document(br), args.format))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cantorkit", description="Exact arithmetic on Cantor sets.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_choices=("json", "text", "svg"), default="json"):
        sp.add_argument("--set", action="append", metavar="SPEC", help="set-spec file or builtin (@middle-third, @k1, @k, @lambda:R)")
        sp.add_argument("--format", choices=fmt_choices, default=default)

    c = sub.add_parser("check", help="check a theorem's hypotheses")
    c.add_argument("theorem_id")
    c.add_argument("--f", help="expression in x1..xd")
    c.add_argument("--a")
    c.add_argument("--b")
    c.add_argument("--mode", choices=("interval", "interior"), default="interval")
    c.add_argument("--expect", choices=("proved", "inconclusive"))
    common(c)

    i = sub.add_parser("image", help="outer cover or certified image of f(K1..Kd)")
    i.add_argument("--f")
    i.add_argument("--depth", type=_depth, default=1)
    i.add_argument("--theorem", help="certify an exact image with this theorem")
    common(i)

    m = sub.add_parser("measure", help="outer measures at depths 0..DEPTH")
    m.add_argument("--f")
    m.add_argument("--depth", type=_depth, default=4)
    common(m, default="text")

    x = sub.add_parser("intersect", help="decide whether aK1 and bK2 meet away from 0")
    x.add_argument("--a", help="rational or e, pi, sqrt2")
    x.add_argument("--b", help="rational or e, pi, sqrt2")
    x.add_argument("--bits", type=_bits, default=128)
    x.add_argument("--expect", choices=("intersect", "disjoint", "unknown"))
    common(x, default="text")

    v = sub.add_parser("verify", help="run a scripted application")
    v.add_argument("app_id")
    v.add_argument("--m", type=int)
    v.add_argument("--N", type=int)
    v.add_argument("--max-depth", type=int, dest="max_depth")
    v.add_argument("--lam")
    v.add_argument("--format", choices=("json", "text"), default="text")

    fm = sub.add_parser("fermat", help="alpha ranges for x^n + y^n = z^n with x, y in K_lambda")
    fm.add_argument("--lam", default="1/3")
    fm.add_argument("--n", type=int, required=True)
    fm.add_argument("--k", type=int, default=0)
    fm.add_argument("--bits", type=_bits, default=128)
    fm.add_argument("--format", choices=("json", "text"), default="json")
    return p


COMMANDS = {
    "check": cmd_check,
    "image": cmd_image,
    "measure": cmd_measure,
    "intersect": cmd_intersect,
    "verify": cmd_verify,
    "fermat": cmd_fermat,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except SpecFileError as exc:
        err.write(f"error: malformed set specification: {exc}\n")
    except ExprSyntaxError as exc:
        err.write(f"error: {exc}\n")
    except BudgetExceeded as exc:
        err.write(f"error: budget exceeded: {exc}\n")
    except (UsageError, DomainError, ValueError, TypeError) as exc:
        err.write(f"error: {exc}\n")
    return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
