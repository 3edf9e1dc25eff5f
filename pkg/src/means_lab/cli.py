"""Command-line interface: ``means-lab <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 parse error,
3 domain or numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

from means_lab import palette, verify
from means_lab.charfun import ExpansionWarning, compare_means, estimate_charfun, expansion_coeffs
from means_lab.errors import ConstructionError, DomainError, NumericalError, SpecParseError
from means_lab.quadrature import approx_integral
from means_lab.specparse import parse_mean_spec

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3

DEFAULT_COMPARE_XS = (0.5, 1.0, 2.0, 5.0, 10.0)


def fmt(v) -> str:
    """15 significant digits, or a placeholder for missing values."""
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class _Emitter:
    def __init__(self, mode: str, out):
        self.mode = mode
        self.out = out

    def record(self, rec: dict, title: str | None = None):
        if self.mode == "json":
            self.out.write(json.dumps(_jsonable(rec)) + "\n")
        elif self.mode == "csv":
            self.table([rec], list(rec))
        else:
            if title:
                self.out.write(title + "\n")
            width = max(len(k) for k in rec)
            for k, v in rec.items():
                self.out.write(f"{k.ljust(width)}  {fmt(v)}\n")

    def table(self, rows: list[dict], columns: list[str], extra: dict | None = None):
        if self.mode == "json":
            payload = dict(extra or {})
            payload["rows"] = rows
            self.out.write(json.dumps(_jsonable(payload)) + "\n")
        elif self.mode == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow(["" if r.get(c) is None else fmt(r.get(c)) for c in columns])
            self.out.write(buf.getvalue())
        else:
            cells = [[fmt(r.get(c)) for c in columns] for r in rows]
            widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
            self.out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
            for row in cells:
                self.out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return v


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_eval(args, em: _Emitter) -> int:
    M = parse_mean_spec(args.spec)
    value = M(args.x, args.y)
    em.record({"spec": args.spec, "x": args.x, "y": args.y, "value": value})
    return EXIT_OK


def cmd_charfun(args, em: _Emitter) -> int:
    M = parse_mean_spec(args.spec)
    rows = []
    for x in args.xs:
        if not x > 0:
            raise DomainError(f"charfun sample points must be positive, got {x}")
        row = {"x": x, "q_analytic": None, "q_fd": None, "abs_diff": None, "flag": ""}
        if args.method in ("analytic", "both"):
            if M.charfun is not None:
                row["q_analytic"] = M.charfun(x)
            else:
                row["flag"] = "no_closed_form"
        if args.method in ("fd", "both"):
            try:
                row["q_fd"] = estimate_charfun(M, x)
            except (NumericalError, DomainError) as exc:
                row["flag"] = f"fd_failed: {exc}"
        if row["q_analytic"] is not None and row["q_fd"] is not None:
            row["abs_diff"] = abs(row["q_analytic"] - row["q_fd"])
        rows.append(row)
    cols = ["x", "q_analytic", "q_fd", "abs_diff", "flag"]
    em.table(rows, cols, {"spec": args.spec, "method": args.method})
    return EXIT_OK


def cmd_compare(args, em: _Emitter) -> int:
    A = parse_mean_spec(args.spec_a)
    B = parse_mean_spec(args.spec_b)
    rep = compare_means(A, B, args.xs or DEFAULT_COMPARE_XS, seed=verify.seed_from_env())
    d = rep.to_dict()
    if em.mode == "json":
        em.record(d)
        return EXIT_OK
    if rep.relation == "M1>=M2":
        verdict = f"{A.label} >= {B.label} ({rep.scope})"
    elif rep.relation == "M2>=M1":
        verdict = f"{B.label} >= {A.label} ({rep.scope})"
    else:
        verdict = "incomparable"
    flat = {
        "verdict": verdict,
        "relation": rep.relation,
        "scope": rep.scope,
        "equal_charfuns": rep.equal_charfuns,
        "near_diagonal_checked": rep.near_diagonal_checked,
        "near_diagonal_violations": rep.near_diagonal_violations,
        "global_checked": rep.global_checked,
        "global_violations": rep.global_violations,
    }
    if em.mode == "csv":
        em.record(flat)
        return EXIT_OK
    em.record(flat)
    em.out.write("\n")
    em.table(
        [{"x": x, "q_gap": g} for x, g in zip(rep.sample_xs, rep.q_gaps)],
        ["x", "q_gap"],
    )
    for note in rep.notes:
        em.out.write(f"note: {note}\n")
    return EXIT_OK


def cmd_expand(args, em: _Emitter) -> int:
    M = parse_mean_spec(args.spec)
    a = 0.5 * (args.x + args.y)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ExpansionWarning)
        c = expansion_coeffs(M, a)
    approx = c.evaluate(args.x - args.y)
    exact = M(args.x, args.y)
    em.record(
        {
            "spec": args.spec,
            "x": args.x,
            "y": args.y,
            "a": a,
            "f1": c.f1,
            "f2": c.f2,
            "f2_uncertainty": c.f2_uncertainty,
            "approx": approx,
            "exact": exact,
            "abs_error": abs(approx - exact),
        }
    )
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    return EXIT_OK


def cmd_quad(args, em: _Emitter) -> int:
    f = palette.get_function(args.function)
    r = approx_integral(args.rule, f, args.x, args.y)
    rec = {"function": args.function}
    rec.update(r.to_dict())
    em.record(rec)
    return EXIT_OK


def cmd_verify(args, em: _Emitter) -> int:
    seed = verify.seed_from_env()
    checks = verify.run_suite(args.suite, seed)
    failed = [c for c in checks if not c.passed]
    if em.mode == "json":
        em.out.write(
            json.dumps(
                _jsonable(
                    {
                        "suite": args.suite,
                        "seed": seed,
                        "passed": not failed,
                        "checks": [c.to_dict() for c in checks],
                    }
                )
            )
            + "\n"
        )
    else:
        rows = [
            {
                "status": "PASS" if c.passed else "FAIL",
                "suite": c.suite,
                "check": c.name,
                "value": c.residual,
                "bound": f"{c.sense} {c.tolerance:.3g}",
                "detail": c.detail,
            }
            for c in checks
        ]
        em.table(rows, ["status", "suite", "check", "value", "bound", "detail"])
        if em.mode == "human":
            em.out.write(f"\n{len(checks) - len(failed)}/{len(checks)} checks passed (seed {seed})\n")
    for c in failed:
        sys.stderr.write(f"FAILED: {c.suite}: {c.name}\n")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _add_format(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="mode", action="store_const", const="json", help="emit JSON")
    g.add_argument("--csv", dest="mode", action="store_const", const="csv", help="emit CSV")
    p.set_defaults(mode="human")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="means-lab",
        description="Evaluate, compare and verify bivariate means.",
        epilog="Means are named like 'agm', 'power:r=3', 'int1:f=pow(2),g=arcsine' "
        "or 'shift:c=1.5,inner=geometric'.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="evaluate M(x, y)")
    s.add_argument("spec")
    s.add_argument("x", type=_real)
    s.add_argument("y", type=_real)
    _add_format(s)
    s.set_defaults(handler=cmd_eval)

    s = sub.add_parser("charfun", help="tabulate the characteristic function")
    s.add_argument("spec")
    s.add_argument("xs", type=_real, nargs="+", metavar="x")
    s.add_argument("--method", choices=("analytic", "fd", "both"), default="both")
    _add_format(s)
    s.set_defaults(handler=cmd_charfun)

    s = sub.add_parser("compare", help="decide dominance between two means")
    s.add_argument("spec_a")
    s.add_argument("spec_b")
    s.add_argument("--xs", type=_real, nargs="+", metavar="x", help="charfun sample points")
    _add_format(s)
    s.set_defaults(handler=cmd_compare)

    s = sub.add_parser("expand", help="near-diagonal expansion at (x, y)")
    s.add_argument("spec")
    s.add_argument("x", type=_real)
    s.add_argument("y", type=_real)
    _add_format(s)
    s.set_defaults(handler=cmd_expand)

    s = sub.add_parser("quad", help="two-point quadrature of a palette function")
    s.add_argument("--rule", choices=("first", "second"), default="first")
    s.add_argument("function", help=f"one of: {', '.join(palette.FUNCTION_NAMES)}")
    s.add_argument("x", type=float)
    s.add_argument("y", type=float)
    _add_format(s)
    s.set_defaults(handler=cmd_quad)

    s = sub.add_parser("verify", help="run the self-verification suites")
    s.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    _add_format(s)
    s.set_defaults(handler=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    em = _Emitter(args.mode, out or sys.stdout)
    try:
        return args.handler(args, em)
    except SpecParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (DomainError, ConstructionError, NumericalError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ValueError as exc:
        # Malformed MEANS_LAB_SEED and similar environment problems.
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
