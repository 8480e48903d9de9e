"""Command-line driver: ``bondi-charges {charges,kerr,verify}``.

Exit codes: 0 success, 1 usage or I/O error, 2 data outside the
center-of-mass frame, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .charges import DEFAULT_FRAME_TOL, charges
from .data import kerr_data, read_data
from .errors import DataFormatError
from .suites import SUITES, run_suite

REPORT_VERSION = "1"
EXIT_OK, EXIT_USAGE, EXIT_FRAME, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(text):
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not a finite number")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text!r} is negative")
    return value


def build_parser():
    parser = _Parser(prog="bondi-charges",
                     description="Charges at null infinity from Bondi-Sachs data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--output", metavar="PATH", help="write the JSON report here instead of stdout")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (makes reports non-reproducible)")

    p = sub.add_parser("charges", parents=[common], help="charges of a data file")
    p.add_argument("--input", metavar="PATH", required=True)
    p.add_argument("--bandlimit", type=_nonneg_int, help="expected band limit of the file")
    p.add_argument("--require-frame", action="store_true",
                   help="treat data outside the center-of-mass frame as an error (exit 1)")
    p.add_argument("--strict", action="store_true", help="reject l <= 1 shear content")
    p.add_argument("--tolerance", type=_finite, default=DEFAULT_FRAME_TOL,
                   help="frame-check tolerance (default %(default)g)")

    p = sub.add_parser("kerr", parents=[common], help="charges of a Kerr cut")
    p.add_argument("--mass", type=_finite, default=1.0)
    p.add_argument("--spin", type=_finite, default=0.0)
    p.add_argument("--bandlimit", type=_nonneg_int, default=32)

    p = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    p.add_argument("--suite", choices=SUITES, default="identities")
    p.add_argument("--seeds", type=_nonneg_int, default=20)
    p.add_argument("--bandlimit", type=_nonneg_int, default=32)
    p.add_argument("--tolerance", type=_finite,
                   help="residual threshold (default 1e-9 for identities and lemmas, 1e-8 for limits)")
    return parser


def _emit(report, path):
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _base(command, descriptor, band):
    return {"version": REPORT_VERSION, "tool": {"name": "bondi-charges", "version": __version__},
            "command": command, "input": descriptor, "bandlimit": band}


def cmd_charges(args):
    try:
        data = read_data(args.input, strict=args.strict)
    except (OSError, DataFormatError) as exc:
        field = getattr(exc, "field", None)
        where = f" (field {field})" if field else ""
        print(f"bondi-charges: cannot read {args.input}{where}: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    if args.bandlimit is not None and args.bandlimit != data.band_limit:
        print(f"bondi-charges: --bandlimit {args.bandlimit} does not match the file's "
              f"bandlimit {data.band_limit}", file=sys.stderr)
        return EXIT_USAGE, None
    start = time.perf_counter()
    result = charges(data, tol=args.tolerance)
    report = _base("charges", {"path": args.input}, data.band_limit)
    report["charges"] = result.as_dict()
    report["residuals"] = {k: v for k, v in result.diagnostics.items() if k != "frame"}
    if args.timings:
        report["timings"] = {"charges_seconds": time.perf_counter() - start}
    if result.center_of_mass is None:
        print(f"bondi-charges: {result.diagnostics['withheld']}", file=sys.stderr)
        return (EXIT_USAGE if args.require_frame else EXIT_FRAME), report
    return EXIT_OK, report


def cmd_kerr(args):
    try:
        data = kerr_data(args.mass, args.spin, args.bandlimit)
    except ValueError as exc:
        print(f"bondi-charges: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    start = time.perf_counter()
    result = charges(data)
    report = _base("kerr", {"mass": args.mass, "spin": args.spin}, args.bandlimit)
    report["charges"] = result.as_dict()
    report["residuals"] = {k: v for k, v in result.diagnostics.items() if k != "frame"}
    expected_J = [0.0, 0.0, -args.mass * args.spin]
    report["expected"] = {"energy": args.mass, "linear_momentum": [0.0, 0.0, 0.0],
                          "center_of_mass": [0.0, 0.0, 0.0], "angular_momentum": expected_J}
    if result.center_of_mass is None:
        report["deviation"] = {"energy": abs(result.energy - args.mass)}
        print(f"bondi-charges: {result.diagnostics['withheld']}", file=sys.stderr)
        return EXIT_FRAME, report
    report["deviation"] = {
        "energy": abs(result.energy - args.mass),
        "linear_momentum": max(abs(x) for x in result.linear_momentum),
        "center_of_mass": max(abs(x) for x in result.center_of_mass),
        "angular_momentum": max(abs(a - b) for a, b in zip(result.angular_momentum, expected_J)),
    }
    if args.timings:
        report["timings"] = {"charges_seconds": time.perf_counter() - start}
    return EXIT_OK, report


def cmd_verify(args):
    start = time.perf_counter()
    table = run_suite(args.suite, args.seeds, args.bandlimit, args.tolerance)
    report = _base("verify", {"suite": args.suite, "seeds": args.seeds}, args.bandlimit)
    report["residuals"] = table
    if args.timings:
        report["timings"] = {"suite_seconds": time.perf_counter() - start}
    if not table["passed"]:
        print(f"bondi-charges: suite {args.suite} exceeded tolerance "
              f"(max residual {table['max_residual']:.3e})", file=sys.stderr)
        return EXIT_VERIFY, report
    return EXIT_OK, report


_COMMANDS = {"charges": cmd_charges, "kerr": cmd_kerr, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    code, report = _COMMANDS[args.command](args)
    if report is not None:
        try:
            _emit(report, args.output)
        except OSError as exc:
            print(f"bondi-charges: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
