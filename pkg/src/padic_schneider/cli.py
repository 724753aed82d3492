"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error (reported as one line of
JSON on stderr), 3 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import acceptance, montecarlo, schneider, thermo
from .errors import DomainError
from .padic_core import PadicInt, Prime

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# -- argument types ------------------------------------------------------------


def _prime(text: str) -> int:
    try:
        return int(Prime(int(text)))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational(text: str) -> Fraction:
    try:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected m/n or m, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


# -- output --------------------------------------------------------------------


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, np.generic):
        return _json_value(v.item())
    return v


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return f"{v:.15g}"
    return str(v)


def _emit(args, payload, rows=None, fields=None):
    """Write ``payload`` as JSON, or ``rows`` as CSV, to --output or stdout."""
    if args.format == "csv":
        if rows is None:
            rows = [payload] if isinstance(payload, dict) else payload
        fields = fields or list(rows[0].keys())
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for r in rows:
            writer.writerow([_csv_value(r.get(f)) for f in fields])
        text = buf.getvalue()
    else:
        text = json.dumps(_json_value(payload), allow_nan=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------


def _input_point(args):
    if (args.rational is None) == (args.padic_digits is None):
        raise UsageError("give exactly one of --rational or --padic-digits")
    if args.rational is not None:
        return args.rational
    digits = args.padic_digits
    if args.precision is not None and args.precision != len(digits):
        raise UsageError("--precision must match the number of --padic-digits")
    try:
        return PadicInt.from_digits(args.prime, digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_expand(args):
    e = schneider.expand(_input_point(args), args.depth, args.prime)
    payload = {"pairs": [[d.a, d.b] for d in e.pairs], "status": e.status.value}
    if e.remaining_precision is not None:
        payload["remaining_precision"] = e.remaining_precision
    rows = [{"index": i + 1, "a": d.a, "b": d.b} for i, d in enumerate(e.pairs)]
    _emit(args, payload, rows or [{"index": "", "a": "", "b": ""}])


def cmd_convergents(args):
    e = schneider.expand(_input_point(args), args.depth, args.prime)
    cs = schneider.convergents(e)
    rows = [{"n": c.index, "A": c.A, "B": c.B} for c in cs]
    _emit(args, {"status": e.status.value, "convergents": rows}, rows)


def cmd_fixed_point(args):
    x = schneider.fixed_point(args.a, args.b, args.prime, args.precision or 32)
    _emit(args, {"p": args.prime, "a": args.a, "b": args.b, "precision": x.precision,
                 "value": x.value, "digits": list(x.digits)})


def cmd_pressure(args):
    if args.t is None:
        raise UsageError("pressure needs --t")
    p, t, n = args.prime, args.t, args.truncation
    if n is None:
        P = thermo.pressure_full(p, t)
        dP = thermo.dpressure_full(p, t) if t > 0 else math.nan
    else:
        P = thermo.pressure_truncated(p, n, t)
        dP = thermo.dpressure_truncated(p, n, t)
    _emit(args, {"p": p, "t": t, "n": n, "pressure": P, "dpressure": dP})


def _alpha_grid(args) -> list[float]:
    L = math.log(args.prime)
    single = [v for v in (args.alpha, args.alpha_hat) if v is not None]
    ranged = args.alpha_min is not None or args.alpha_max is not None
    if len(single) > 1 or (single and ranged):
        raise UsageError("give one of --alpha, --alpha-hat or an --alpha-min/--alpha-max range")
    if args.alpha is not None:
        return [args.alpha]
    if args.alpha_hat is not None:
        return [args.alpha_hat * L]
    if args.alpha_min is None or args.alpha_max is None:
        raise UsageError("spectrum needs --alpha, --alpha-hat or both --alpha-min and --alpha-max")
    if args.alpha_max < args.alpha_min or args.steps < 1:
        raise UsageError("need alpha-min <= alpha-max and steps >= 1")
    grid = list(np.linspace(args.alpha_min, args.alpha_max, args.steps)) if args.steps > 1 else [args.alpha_min]
    # the peak of the untruncated spectrum is always reported when it is in range
    peak = args.prime * L / (args.prime - 1)
    if args.truncation is None and args.alpha_min <= peak <= args.alpha_max and peak not in grid:
        grid.append(peak)
    return sorted(float(a) for a in grid)


SPECTRUM_FIELDS = ("p", "alpha", "alpha_hat", "t_alpha", "pressure", "dimension")


def cmd_spectrum(args):
    rows = []
    for a in _alpha_grid(args):
        sp = thermo.spectrum(args.prime, a, args.truncation)
        rows.append({"p": sp.p, "alpha": sp.alpha, "alpha_hat": sp.alpha_hat,
                     "t_alpha": sp.t_alpha, "pressure": sp.pressure, "dimension": sp.dimension})
    payload = rows[0] if len(rows) == 1 else rows
    _emit(args, payload, rows, SPECTRUM_FIELDS)


def cmd_dimension(args):
    if (args.digits is None) == (args.t is None):
        raise UsageError("dimension needs exactly one of --digits or --t")
    if args.digits is not None:
        if not args.digits or min(args.digits) < 1:
            raise UsageError("--digits must be a nonempty list of integers >= 1")
        d = thermo.bowen_dimension(args.prime, args.digits)
        _emit(args, {"p": args.prime, "digits": sorted(set(args.digits)), "dimension": d})
        return
    spec = thermo.gibbs_weights(args.prime, args.t, args.truncation)
    _emit(args, {"p": args.prime, "t": args.t, "n": args.truncation, "alpha": spec.lyapunov,
                 "entropy": spec.entropy, "dimension": thermo.dimension_from_measure(spec)})


def _mc(mode):
    def run(args):
        kw = {}
        if mode == "gibbs":
            if args.t is None:
                raise UsageError("mc-gibbs needs --t")
            kw = {"t": args.t, "truncation": args.truncation}
        elif args.t is not None or args.truncation is not None:
            raise UsageError(f"--t/--truncation do not apply to mc-{mode}")
        try:
            config = montecarlo.ExperimentConfig(
                args.prime, mode, args.samples, args.depth, args.seed,
                precision=args.precision, workers=args.workers, **kw,
            )
        except DomainError:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        report = montecarlo.run(config)
        _emit(args, report.to_dict(), [report.csv_row()], montecarlo.ExperimentReport.CSV_FIELDS)

    return run


def cmd_verify(args):
    only = [s for s in args.only.split(",") if s.strip()] if args.only else None
    try:
        results = acceptance.run_criteria(only, echo=lambda s: print(s, flush=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {', '.join(map(str, failed))}" if failed else ""))
    return EXIT_VERIFY if failed else EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prime", "-p", type=_prime, default=2)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write to this path instead of stdout")

    point = _Parser(add_help=False)
    point.add_argument("--rational", type=_rational, help="exact input m/n or m")
    point.add_argument("--padic-digits", type=_int_list, help="p-adic input as digits, least significant first")
    point.add_argument("--precision", type=_positive)
    point.add_argument("--depth", type=_positive, default=20)

    thermo_opts = _Parser(add_help=False)
    thermo_opts.add_argument("--t", type=float)
    thermo_opts.add_argument("--truncation", "-n", type=_positive)

    parser = _Parser(prog="padic-schneider", description="Schneider continued fractions on Z_p")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("expand", parents=[common, point], help="digit expansion")
    s.set_defaults(func=cmd_expand)
    s = sub.add_parser("convergents", parents=[common, point], help="convergents A_n/B_n")
    s.set_defaults(func=cmd_convergents)

    s = sub.add_parser("fixed-point", parents=[common], help="fixed point of T_p in a cylinder")
    s.add_argument("--a", type=_positive, required=True)
    s.add_argument("--b", type=_positive, required=True)
    s.add_argument("--precision", type=_positive)
    s.set_defaults(func=cmd_fixed_point)

    s = sub.add_parser("pressure", parents=[common, thermo_opts], help="pressure of -t log psi")
    s.set_defaults(func=cmd_pressure)

    s = sub.add_parser("spectrum", parents=[common], help="Lyapunov spectrum points")
    s.add_argument("--truncation", "-n", type=_positive)
    s.add_argument("--alpha", type=float)
    s.add_argument("--alpha-hat", type=float)
    s.add_argument("--alpha-min", type=float)
    s.add_argument("--alpha-max", type=float)
    s.add_argument("--steps", type=int, default=100)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("dimension", parents=[common, thermo_opts], help="Bowen root or Gibbs-state dimension")
    s.add_argument("--digits", type=_int_list)
    s.set_defaults(func=cmd_dimension)

    for mode in montecarlo.MODES:
        s = sub.add_parser(f"mc-{mode}", parents=[common, thermo_opts], help=f"{mode} Monte Carlo experiment")
        s.add_argument("--samples", type=_positive, default=1000)
        s.add_argument("--depth", type=_positive, default=100)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--precision", type=_positive)
        s.add_argument("--workers", type=_positive, default=1)
        s.set_defaults(func=_mc(mode))

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated groups (thermo, schneider, montecarlo) or criterion numbers")
    s.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = args.func(args)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
