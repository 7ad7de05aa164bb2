"""Command line front end.

Field arguments accept `Q` (the rationals), `quad:<d>` for a quadratic
field, or a path to a field-data JSON file.  Bounds and tolerances are
rational strings ("200", "1/100"); no binary floating point crosses this
boundary.  Exit codes: 0 success, 2 usage, 3 invalid field data,
4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .arith import rat_from_str, rat_to_str
from .baseline import (
    BenchReport,
    CSV_COLUMNS,
    pipeline_report,
    scan_report,
)
from .field import FieldData, FieldDataError, rationals_field
from .fio import (
    dump_field,
    field_document,
    load_field,
    result_document,
    write_result_document,
)
from .quadratic import quadratic_field
from .search import (
    CapacityError,
    SearchOutput,
    bounded_height_elements,
    bounded_height_iq,
    refine_real_quadratic,
    units_of_bounded_height,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FIELD = 3
EXIT_CAPACITY = 4


class UsageError(ValueError):
    pass


def resolve_field(spec: str) -> FieldData:
    if spec in ("Q", "q", "rationals"):
        return rationals_field()
    if spec.startswith("quad:"):
        try:
            d = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad quadratic field spec {spec!r}")
        try:
            return quadratic_field(d)
        except ValueError as exc:
            raise UsageError(str(exc))
    return load_field(spec)


def _rat_arg(s: str, name: str) -> Fraction:
    try:
        return rat_from_str(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{name} must be a rational string like '200' or '1/100'")


def _emit(doc: dict, path: str | None):
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_compute(args) -> int:
    field = resolve_field(args.field)
    bound = _rat_arg(args.bound, "--bound")
    theta = _rat_arg(args.tolerance, "--tolerance")
    if bound < 1:
        raise UsageError("--bound must be at least 1")
    if not (0 < theta <= 1):
        raise UsageError("--tolerance must lie in (0, 1]")
    t0 = time.monotonic()
    if field.n == 2 and field.r2 == 1:
        out = bounded_height_iq(field, bound)
    else:
        out = bounded_height_elements(field, bound, theta)
        if field.n == 2 and field.r1 == 2 and theta < Fraction(1, 2):
            out = refine_real_quadratic(out, field, theta)
    elapsed = time.monotonic() - t0
    if args.out:
        write_result_document(out, args.field, args.out)
    elif args.print_elements:
        _emit(result_document(out, args.field), None)
    print(f"field={args.field} B={rat_to_str(bound)} "
          f"theta={rat_to_str(theta)}")
    print(f"|L|={len(out.L)} |L'|={len(out.Lprime)} "
          f"total={len(out.L) + len(out.Lprime)}")
    print(f"elapsed={elapsed:.2f}s counters={out.counters}")
    return EXIT_OK


def cmd_units(args) -> int:
    field = resolve_field(args.field)
    bound = _rat_arg(args.bound, "--bound")
    if bound < 1:
        raise UsageError("--bound must be at least 1")
    t0 = time.monotonic()
    res = units_of_bounded_height(field, bound)
    elapsed = time.monotonic() - t0
    doc = {
        "field": args.field,
        "D": rat_to_str(bound),
        "units": [[rat_to_str(c) for c in u.coords] for u in res.units],
        "borderline": [[rat_to_str(c) for c in u.coords]
                       for u in res.borderline],
    }
    if args.out:
        _emit(doc, args.out)
    print(f"units={len(res.units)} borderline={len(res.borderline)} "
          f"elapsed={elapsed:.2f}s")
    return EXIT_OK


def cmd_ps(args) -> int:
    field = resolve_field(args.field)
    bound = _rat_arg(args.bound, "--bound")
    if bound < 1:
        raise UsageError("--bound must be at least 1")
    out, rep = scan_report(field, bound, cap=args.ps_cap)
    doc = {
        "field": args.field,
        "B": rat_to_str(bound),
        "elements": [[rat_to_str(c) for c in e.coords] for e in out.elements],
        "borderline": [[rat_to_str(c) for c in e.coords]
                       for e in out.borderline],
        "search_space": out.search_space,
    }
    if args.out:
        _emit(doc, args.out)
    print(f"found={len(out.elements)} borderline={len(out.borderline)} "
          f"search_space={rep.search_space} ratio={rat_to_str(rep.ratio)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    field = resolve_field(args.field)
    bound = _rat_arg(args.bound, "--bound")
    theta = _rat_arg(args.tolerance, "--tolerance")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    reports: list[BenchReport] = []
    for m in methods:
        if m == "a":
            t0 = time.monotonic()
            if field.n == 2 and field.r2 == 1:
                out = bounded_height_iq(field, bound)
            else:
                out = bounded_height_elements(field, bound, theta)
            ms = int((time.monotonic() - t0) * 1000)
            reports.append(pipeline_report(field, out, ms, theta))
        elif m == "ps":
            _out, rep = scan_report(field, bound, cap=args.ps_cap)
            reports.append(rep)
        else:
            raise UsageError(f"unknown method {m!r} (expected 'a' or 'ps')")
    rows = [r.row() for r in reports]
    if args.format == "csv" or args.out:
        lines = [",".join(CSV_COLUMNS)]
        for row in rows:
            lines.append(",".join(str(row[c]) for c in CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if args.format != "csv":
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows))
                  for c in CSV_COLUMNS}
        print("  ".join(c.ljust(widths[c]) for c in CSV_COLUMNS))
        for row in rows:
            print("  ".join(str(row[c]).ljust(widths[c])
                            for c in CSV_COLUMNS))
    return EXIT_OK


def cmd_field_info(args) -> int:
    field = resolve_field(args.field)
    info = {
        "label": field.label,
        "degree": field.n,
        "signature": [field.r1, field.r2],
        "unit_rank": field.r,
        "disc": field.disc,
        "class_number": len(field.class_reps),
        "torsion_order": len(field.mu),
    }
    _emit(info, args.out)
    return EXIT_OK


def cmd_field_verify(args) -> int:
    field = load_field(args.field)
    print(f"ok: {field.label} degree={field.n} r1={field.r1} r2={field.r2} "
          f"h={len(field.class_reps)} w={len(field.mu)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bheight",
        description="Enumerate number field elements of bounded height "
                    "with certified error control.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, tolerance=True, pscap=False):
        p.add_argument("field", help="Q | quad:<d> | path to field JSON")
        p.add_argument("--bound", required=True,
                       help="height bound (rational string)")
        if tolerance:
            p.add_argument("--tolerance", default="1/100",
                           help="borderline tolerance theta (default 1/100)")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for the scan baseline")
        if pscap:
            p.add_argument("--ps-cap", dest="ps_cap", type=int,
                           default=50_000_000,
                           help="refuse scans beyond this candidate count")

    p = sub.add_parser("compute", help="two-list bounded height enumeration")
    add_common(p)
    p.add_argument("--print-elements", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("units", help="units of bounded height")
    add_common(p, tolerance=False)
    p.set_defaults(func=cmd_units)

    p = sub.add_parser("ps", help="direct box-scan enumeration")
    add_common(p, tolerance=False, pscap=True)
    p.set_defaults(func=cmd_ps)

    p = sub.add_parser("bench", help="search-space comparison")
    add_common(p, pscap=True)
    p.add_argument("--methods", default="a,ps")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("field-info", help="print field invariants")
    p.add_argument("field")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("field-verify", help="verify a field-data file")
    p.add_argument("field", help="path to field JSON")
    p.set_defaults(func=cmd_field_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FieldDataError as exc:
        print(f"invalid field data: {exc}", file=sys.stderr)
        return EXIT_FIELD
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
