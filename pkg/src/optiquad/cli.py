"""Command-line front end.

Subcommands: ``integrate``, ``derive``, ``compare`` and ``study``.  Exit codes:
0 success, 1 internal error, 2 parse/usage error, 3 evaluation error, 4 no
applicable bound.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

from . import composite, optimizer
from . import constants as C
from .analysis import SamplingConfig
from .bounds import NoApplicableBoundError
from .composite import STUDY_BOUNDS, CompositeConfig
from .errors import DomainError, EvaluationError, IntegrationError, ParseError
from .expr import parse
from .rules import Interval

EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_EVAL, EXIT_NO_BOUND = 0, 1, 2, 3, 4

STUDY_COLUMNS = [
    "n",
    "h",
    "estimate",
    "corrected",
    "abs_error",
    "abs_corrected_error",
    *(col for col, _, _ in STUDY_BOUNDS),
    "slope_error",
    "slope_corrected",
]
REPORT_COLUMNS = ["quantity", "value", "applies_to", "rigorous"]
COMPARE_COLUMNS = ["rule", "estimate", "abs_error", "bound_second_sup"]

OVERRIDES = (
    ("gamma1", "gamma1"),
    ("Gamma1", "Gamma1"),
    ("gamma2", "gamma2"),
    ("Gamma2", "Gamma2"),
    ("l2-fprime", "l2_fprime"),
    ("l2-fsecond", "l2_fsecond"),
)


def _n_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("panel counts must be positive")
    return values


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("n must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optiquad", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_type=_positive_int, n_default=1):
        p.add_argument("--expr", required=True, help="integrand in t, e.g. 'cbrt(sin(t^2))'")
        p.add_argument("--a", type=float, default=0.0)
        p.add_argument("--b", type=float, default=1.0)
        p.add_argument("--n", type=n_type, default=n_default, help="number of panels")
        for flag, dest in OVERRIDES:
            p.add_argument(f"--{flag}", dest=dest, type=float, default=None)
        p.add_argument("--reference", type=float, default=None, help="trusted value of the integral")

    def output(p):
        p.add_argument("--format", choices=("human", "csv", "json-lines"), default="human")
        p.add_argument("--output", default="-", help="file path, or - for standard output")

    p = sub.add_parser("integrate", help="composite estimate with every applicable error bound", allow_abbrev=False)
    common(p)
    output(p)
    p = sub.add_parser("derive", help="re-derive the optimal knot", allow_abbrev=False)
    output(p)
    p = sub.add_parser("compare", help="optimal rule against Simpson's rule", allow_abbrev=False)
    common(p)
    output(p)
    p = sub.add_parser("study", help="convergence table over several panel counts", allow_abbrev=False)
    common(p, n_type=_n_list, n_default=[1, 2, 4, 8, 16, 32])
    output(p)
    return parser


# -- formatting ---------------------------------------------------------------


def _clean(v):
    # negative zero (e.g. a correction on a linear integrand) prints as 0
    return 0.0 if isinstance(v, float) and v == 0.0 else v


def _human(v) -> str:
    v = _clean(v)
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _exact(v) -> str:
    # shortest round-trip representation; absent values are empty fields
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json-lines":
        return "".join(json.dumps({c: _clean(r.get(c)) for c in columns}) + "\n" for r in rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_exact(r.get(c)) for c in columns])
        return buf.getvalue()
    cells = [[_human(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------


def _overrides(args) -> dict:
    return {dest: getattr(args, dest) for _, dest in OVERRIDES if getattr(args, dest) is not None}


def _reference(args, ast, iv) -> float:
    return args.reference if args.reference is not None else composite.reference_integral(ast, iv)


def run_integrate(args) -> list[dict]:
    ast = parse(args.expr)
    iv = Interval(args.a, args.b)
    cfg = CompositeConfig(iv, args.n)
    rep = composite.composite_report(ast, cfg, _overrides(args), SamplingConfig.from_env())
    if not rep.bounds:
        raise NoApplicableBoundError("no error bound applies; supply derivative information with --gamma1 etc.")
    ref = _reference(args, ast, iv)
    rows = [
        {"quantity": "n", "value": cfg.n},
        {"quantity": "estimate", "value": rep.estimate},
        {"quantity": "correction", "value": rep.correction},
        {"quantity": "corrected", "value": rep.corrected},
        {"quantity": "reference", "value": ref},
        {"quantity": "abs_error", "value": abs(ref - rep.estimate)},
        {"quantity": "abs_corrected_error", "value": None if rep.corrected is None else abs(ref - rep.corrected)},
    ]
    for b in rep.bounds:
        name = f"bound_{b.theorem_tag.value}" + (f"_{b.variant}" if b.variant else "")
        rows.append({"quantity": name, "value": b.value, "applies_to": b.applies_to.value, "rigorous": b.rigorous})
    for w in rep.info.warnings:
        rows.append({"quantity": "warning", "value": w})
    return rows


def run_derive(args) -> list[dict]:
    res = optimizer.minimize_g()
    g_opt, g_simp = optimizer.compare_simpson()
    tr = res.case_trace
    return [
        {"quantity": "beta_star", "value": res.beta_star},
        {"quantity": "g_star", "value": res.g_star},
        {"quantity": "case", "value": tr.selected},
        {"quantity": "g_case_i_lower", "value": tr.case_i_min},
        {"quantity": "g_case_iii_lower", "value": tr.case_iii_min},
        {"quantity": "g_second_derivative", "value": tr.second_derivative},
        {"quantity": "oracle_beta", "value": res.oracle_beta},
        {"quantity": "oracle_gap", "value": res.oracle_gap},
        {"quantity": "g_optimal", "value": g_opt},
        {"quantity": "g_simpson", "value": g_simp},
        {"quantity": "ratio", "value": g_opt / g_simp},
    ]


def run_compare(args) -> list[dict]:
    ast = parse(args.expr)
    iv = Interval(args.a, args.b)
    cfg = CompositeConfig(iv, args.n)
    ref = _reference(args, ast, iv)
    info = composite.build_info(ast, iv, _overrides(args), SamplingConfig.from_env())
    M2 = info.sup_fsecond
    scale = iv.length**3 / cfg.n**2
    opt = composite.composite_estimate(ast, cfg)
    simp = composite.composite_simpson(ast, cfg)
    return [
        {
            "rule": "optimal",
            "estimate": opt,
            "abs_error": abs(ref - opt),
            "bound_second_sup": None if M2 is None else C.G_STAR * M2 * scale,
        },
        {
            "rule": "simpson",
            "estimate": simp,
            "abs_error": abs(ref - simp),
            "bound_second_sup": None if M2 is None else C.G_SIMPSON * M2 * scale,
        },
    ]


def run_study(args) -> list[dict]:
    ast = parse(args.expr)
    iv = Interval(args.a, args.b)
    ref = _reference(args, ast, iv)
    res = composite.convergence_study(ast, iv, args.n, ref, _overrides(args), SamplingConfig.from_env())
    rows = [dict(r, slope_error=None, slope_corrected=None) for r in res.rows]
    rows[-1]["slope_error"] = res.slope_error
    rows[-1]["slope_corrected"] = res.slope_corrected
    return rows


COMMANDS = {
    "integrate": (run_integrate, REPORT_COLUMNS),
    "derive": (run_derive, REPORT_COLUMNS[:2]),
    "compare": (run_compare, COMPARE_COLUMNS),
    "study": (run_study, STUDY_COLUMNS),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    run, columns = COMMANDS[args.command]
    try:
        rows = run(args)
    except ParseError as exc:
        print(f"optiquad: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoApplicableBoundError as exc:
        print(f"optiquad: {exc}", file=sys.stderr)
        return EXIT_NO_BOUND
    except (EvaluationError, DomainError, IntegrationError) as exc:
        print(f"optiquad: evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except Exception as exc:  # noqa: BLE001
        print(f"optiquad: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = render(rows, columns, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
