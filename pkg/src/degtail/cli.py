"""Command-line interface.

Subcommands::

    degtail eval     --what exp --lambda 1/2 --x 1 --y 1
    degtail table    --kind stirling2-deg --lambda 1/2 --nmax 5 --format csv
    degtail verify   --identity thm2.1b --lambda 1/2 --y 1 --mode both
    degtail converge --identity cor2.2c --lambda 1/3 --terms 60
    degtail suite    [--config cases.json]

Rationals cross the boundary as "p/q" strings.  Exit codes: 0 success or
all checks passed, 1 a mathematical check failed, 2 usage, parse or domain
error (including non-convergence).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
import time
from dataclasses import replace
from fractions import Fraction

from . import exact, identities, numeric
from .errors import DomainError, SeriesError
from .exact import format_rational, parse_rational, terminating_degree
from .powerseries import degen_exp_series

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# lets "-2/5" parse as a value rather than an option
_NEGATIVE_VALUE = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+([eE][-+]?\d+)?$")

EVAL_WHAT = ("exp", "exp-partial", "tail", "cosh", "bell", "fallfact")


class UsageError(Exception):
    pass


def _fmt_float(v: float) -> str:
    return repr(float(v))


# ----------------------------------------------------------------- config


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("_", "-"): v for k, v in data.items()}


def _merged(args, config, key, default=None):
    """Flag value if given, else config value, else default."""
    attr = "lam" if key == "lambda" else key.replace("-", "_")
    v = getattr(args, attr, None)
    if v is not None:
        return v
    return config.get(key, default)


def _rational_opt(value, name):
    if value is None:
        return None
    try:
        return parse_rational(value if isinstance(value, str) else value)
    except DomainError as exc:
        raise UsageError(f"--{name}: {exc}") from exc


def _int_opt(value, name):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise UsageError(f"--{name}: expected an integer, got {value!r}")
    try:
        return int(value)
    except ValueError as exc:
        raise UsageError(f"--{name}: expected an integer, got {value!r}") from exc


def _float_opt(value, name):
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{name}: expected a number, got {value!r}") from exc


def case_from_mapping(get) -> identities.IdentityCase:
    """Build an IdentityCase from a key lookup mirroring the verify flags."""
    ident = get("identity")
    if ident is None:
        raise UsageError("--identity is required")
    lam = _rational_opt(get("lambda"), "lambda")
    if lam is None:
        raise UsageError("--lambda is required")
    kw = {}
    y = _rational_opt(get("y"), "y")
    if y is not None:
        kw["y"] = y
    x = _rational_opt(get("x"), "x")
    if x is not None:
        kw["x"] = x
    for name in ("p", "k", "order", "max-terms"):
        v = _int_opt(get(name), name)
        if v is not None:
            kw[name.replace("-", "_")] = v
    tol = _float_opt(get("tol"), "tol")
    if tol is not None:
        kw["tol"] = tol
    mode = get("mode")
    if mode is not None:
        kw["mode"] = mode
    expected = get("expected")
    if expected is not None:
        try:
            kw["expected"] = Fraction(str(expected))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"expected: malformed value {expected!r}") from exc
    try:
        return identities.IdentityCase(ident, lam, **kw)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# ----------------------------------------------------------------- output


def _emit(rows, header, fmt, out, meta=None):
    """Write a list of dict rows as text, csv or json."""
    if fmt == "json":
        payload = dict(meta or {})
        payload["rows"] = rows
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        w = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    else:
        for r in rows:
            out.write(" ".join(str(r[h]) for h in header) + "\n")


# ----------------------------------------------------------------- eval


def _eval_value(what, lam, x, y, n, tol, max_terms):
    """Return (value_string, exact, extras)."""
    if what == "fallfact":
        return format_rational(exact.gen_falling_factorial(x, n, lam)), True, {}
    if what == "bell":
        return format_rational(exact.bell_degenerate(n, lam, x)), True, {}
    if what == "exp-partial":
        return format_rational(degen_exp_series(x, lam, n).evaluate(y)), True, {}
    if what == "exp":
        try:
            return format_rational(exact.degen_exp_exact(x, lam, y)), True, {}
        except DomainError:
            return _fmt_float(numeric.degen_exp(x, lam, y)), False, {}
    if what == "cosh":
        try:
            v = (exact.degen_exp_exact(1, lam, -y) + exact.degen_exp_exact(1, lam, y)) / 2
            return format_rational(v), True, {}
        except DomainError:
            return _fmt_float(numeric.cosh_deg(lam, y)), False, {}
    if what == "tail":
        m = terminating_degree(lam)
        if m is not None or y == 0:
            e = exact.degen_exp_exact(1, lam, y) if y != 0 else Fraction(1)
            partial = degen_exp_series(1, lam, n).evaluate(y)
            return format_rational(e - partial), True, {}
        res = numeric.tail(lam, y, n, tol=tol, max_terms=max_terms)
        return _fmt_float(res.value), False, {
            "terms_used": res.terms_used,
            "tail_bound": _fmt_float(res.tail_bound),
        }
    raise UsageError(f"unknown --what {what!r}")


def cmd_eval(args, out) -> int:
    lam = _rational_opt(args.lam, "lambda") if args.lam is not None else Fraction(0)
    x = _rational_opt(args.x, "x") if args.x is not None else Fraction(1)
    y = _rational_opt(args.y, "y") if args.y is not None else Fraction(1)
    n = args.n if args.n is not None else 0
    if n < 0:
        raise UsageError("--n must be non-negative")
    value, is_exact, extras = _eval_value(args.what, lam, x, y, n, args.tol, args.max_terms)
    if args.format == "text":
        line = value
        if extras:
            line += " " + " ".join(f"{k}={v}" for k, v in extras.items())
        out.write(line + "\n")
        return EXIT_OK
    row = {
        "what": args.what,
        "lambda": format_rational(lam),
        "x": format_rational(x),
        "y": format_rational(y),
        "n": n,
        "value": value,
        "exact": is_exact,
        "terms_used": extras.get("terms_used", ""),
        "tail_bound": extras.get("tail_bound", ""),
    }
    if args.format == "json":
        out.write(json.dumps(row, indent=2) + "\n")
    else:
        _emit([row], list(row), "csv", out)
    return EXIT_OK


# ----------------------------------------------------------------- table


def cmd_table(args, out) -> int:
    if args.nmax < 0:
        raise UsageError("--nmax must be non-negative")
    if args.kind == "stirling2":
        lam = Fraction(0)
        rows = [
            {"n": n, "k": k, "value": format_rational(exact.stirling2_classical(n, k))}
            for n in range(args.nmax + 1)
            for k in range(n + 1)
        ]
    else:
        if args.lam is None:
            raise UsageError("--lambda is required for stirling2-deg")
        lam = _rational_opt(args.lam, "lambda")
        table = exact.stirling2_degenerate_recurrence(args.nmax, lam)
        rows = [{"n": n, "k": k, "value": format_rational(v)} for n, k, v in table.rows()]
    meta = {"kind": args.kind, "lambda": format_rational(lam), "nmax": args.nmax}
    _emit(rows, ["n", "k", "value"], args.format, out, meta)
    return EXIT_OK


# ----------------------------------------------------------------- verify


def _case_from_args(args):
    config = _load_config(getattr(args, "config", None))
    return case_from_mapping(lambda key: _merged(args, config, key))


def _report_text(report) -> str:
    c = report.case
    status = "PASS" if report.passed else "FAIL"
    lines = [f"{status} {c.identity_id} " + " ".join(f"{k}={v}" for k, v in c.params().items())]
    for r in report.mode_results:
        d = r.to_dict()
        extra = f"order={d['order']}" if r.mode == "exact" else f"terms_used={d['terms_used']} tail_bound={d['tail_bound']}"
        lines.append(
            f"  {r.mode}: {'pass' if r.passed else 'fail'} lhs={d['lhs']} rhs={d['rhs']} "
            f"residual={d['residual']} {extra}"
        )
    for note in report.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


def cmd_verify(args, out) -> int:
    case = _case_from_args(args)
    report = identities.verify(case)
    if args.format == "json":
        out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    elif args.format == "csv":
        d = report.to_dict()
        row = {k: d[k] for k in ("identity_id", "mode", "passed", "residual", "terms_used", "order")}
        _emit([row], list(row), "csv", out)
    else:
        out.write(_report_text(report))
    return EXIT_OK if report.passed else EXIT_FAIL


# ----------------------------------------------------------------- converge


def _outer_terms(case, count):
    """First ``count`` terms w_n T_n(y) of the left-hand side, exact when lam = 1/m."""
    entry = identities._IDENTITIES[case.identity_id]
    weight = entry.weight(case)
    numeric._check_convergence(case.lam, case.y, weight.growth())
    m = terminating_degree(case.lam)
    out = []
    n = weight.start
    if m is not None:
        e_y = exact.degen_exp_exact(1, case.lam, case.y)
        series = degen_exp_series(1, case.lam, m)
        while len(out) < count:
            t = e_y - (series.truncate(min(n, m)).evaluate(case.y) if n <= m else e_y)
            out.append(weight.value(n) * t)
            n += 1
        return out, True
    while len(out) < count:
        t = numeric.tail(case.lam, case.y, n, tol=1e-16, max_terms=case.max_terms)
        out.append(float(weight.value(n)) * t.value)
        n += 1
    return out, False


def cmd_converge(args, out) -> int:
    case = _case_from_args(args)
    case = replace(case, mode="numeric")
    if case.identity_id == "thm2.1a":
        raise UsageError("thm2.1a has two free variables; converge needs a single series")
    if args.terms is None or args.terms < 1:
        raise UsageError("--terms must be a positive integer")
    entry = identities._IDENTITIES[case.identity_id]
    terms, is_exact = _outer_terms(case, args.terms)
    if entry.rhs is None:
        target = identities.explore_degenerate_stirling_sum(
            case.lam, case.y, case.k, tol=case.tol * 1e-2, max_terms=case.max_terms
        ).value
    elif is_exact:
        target = entry.rhs(identities._ExactBackend(case.lam), case)
    else:
        target = float(entry.rhs(identities._FloatBackend(case.lam), case))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m", "partial_sum", "target", "abs_error"])
    partial = Fraction(0) if is_exact and entry.rhs is not None else 0.0
    acc = []
    for m, t in enumerate(terms, start=1):
        if isinstance(partial, Fraction):
            partial += t
            err = abs(partial - target)
        else:
            acc.append(float(t))
            partial = math.fsum(acc)
            err = abs(partial - float(target))
        w.writerow([m, _fmt_float(partial), _fmt_float(target), _fmt_float(err)])
    return EXIT_OK


# ----------------------------------------------------------------- suite


def _suite_cases(config):
    if "cases" in config:
        raw = config["cases"]
        if not isinstance(raw, list):
            raise UsageError("config 'cases' must be a list")
        cases = []
        for i, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise UsageError(f"case {i}: expected an object")
            entry = {k.replace("_", "-"): v for k, v in entry.items()}
            try:
                cases.append(case_from_mapping(entry.get))
            except UsageError as exc:
                raise UsageError(f"case {i}: {exc}") from exc
    else:
        cases = identities.default_grid()
    wanted = config.get("identity")
    if wanted is not None:
        wanted = [wanted] if isinstance(wanted, str) else list(wanted)
        unknown = [w for w in wanted if w not in identities.IDENTITY_IDS]
        if unknown:
            raise UsageError(f"unknown identity in config: {unknown}")
        cases = [c for c in cases if c.identity_id in wanted]
    return cases


def cmd_suite(args, out) -> int:
    config = _load_config(args.config)
    cases = _suite_cases(config)
    t0 = time.perf_counter()
    reports = identities.run_suite(cases, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    summary = identities.summarize(reports)
    payload = {"summary": summary, "reports": [r.to_dict() for r in reports]}
    if not args.no_metadata:
        payload["metadata"] = {"elapsed_seconds": round(elapsed, 3), "jobs": args.jobs}
    if args.format == "csv":
        rows = []
        for r in reports:
            d = r.to_dict()
            rows.append(
                {
                    "identity_id": d["identity_id"],
                    "params": json.dumps(d["params"], sort_keys=True),
                    "mode": d["mode"],
                    "passed": d["passed"],
                    "residual": d["residual"],
                    "error": d["error"] or "",
                }
            )
        _emit(rows, ["identity_id", "params", "mode", "passed", "residual", "error"], "csv", out)
    else:
        out.write(json.dumps(payload, indent=2) + "\n")
    if summary["failed"]:
        return EXIT_FAIL
    if summary["errors"]:
        return EXIT_USAGE
    return EXIT_OK


# ----------------------------------------------------------------- parser


def _add_case_flags(p):
    p.add_argument("--identity", choices=identities.IDENTITY_IDS)
    p.add_argument("--lambda", dest="lam", metavar="P/Q")
    p.add_argument("--y", metavar="P/Q")
    p.add_argument("--x", metavar="P/Q")
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-terms", type=int)
    p.add_argument("--config", metavar="PATH", help="flat JSON object with the same keys as the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degtail",
        description="Degenerate exponentials, degenerate Stirling numbers and truncated-tail series identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a single quantity")
    p.add_argument("--what", required=True, choices=EVAL_WHAT)
    p.add_argument("--lambda", dest="lam", metavar="P/Q")
    p.add_argument("--x", metavar="P/Q")
    p.add_argument("--y", metavar="P/Q")
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int, default=numeric.DEFAULT_MAX_TERMS)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("table", help="Stirling number triangles")
    p.add_argument("--kind", required=True, choices=("stirling2", "stirling2-deg"))
    p.add_argument("--lambda", dest="lam", metavar="P/Q")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json", "text"), default="csv")

    p = sub.add_parser("verify", help="check one identity case")
    _add_case_flags(p)
    p.add_argument("--mode", choices=identities.MODES)
    p.add_argument("--order", type=int)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("converge", help="partial sums of an identity's left side (CSV)")
    _add_case_flags(p)
    p.add_argument("--terms", type=int, default=20)

    p = sub.add_parser("suite", help="run the default grid or a config of cases")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-metadata", action="store_true", help="omit wall-clock metadata")
    for p in [parser, *sub.choices.values()]:
        p._negative_number_matcher = _NEGATIVE_VALUE
    return parser


COMMANDS = {
    "eval": cmd_eval,
    "table": cmd_table,
    "verify": cmd_verify,
    "converge": cmd_converge,
    "suite": cmd_suite,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (UsageError, SeriesError, ValueError, ZeroDivisionError, OverflowError) as exc:
        err.write(f"degtail {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
