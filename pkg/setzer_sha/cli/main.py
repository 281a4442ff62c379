import argparse
import asyncio
import logging
import os
import sys
import warnings

import uvloop

from ..log import LOG_FORMAT, TRACE, install_trace_level
from ..version import __version__
from .common import classes_type, precision_type, primes_type

warnings.filterwarnings("ignore")

uvloop.install()


class ExitCode:
    SUCCESS = 0
    USAGE = 1
    DATA = 2
    MISMATCH = 3


class LogLevel:
    ERROR = "error"
    INFO = "info"
    DEBUG = "debug"
    TRACE = "trace"


def main():
    sys.exit(run(sys.argv[1:]))


def run(argv) -> int:
    from ..error import BadResidueError, RejectedCurveError, SetzerShaError

    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    setup_logging(args)

    try:
        if args.command == "scan":
            from .scan import scan_main

            return asyncio.run(scan_main(args))
        elif args.command == "curve":
            from .curve import curve_main

            return curve_main(args)
        elif args.command == "stats":
            from .stats import stats_main

            return stats_main(args)
        elif args.command == "hist":
            from .hist import hist_main

            return hist_main(args)
        elif args.command == "verify":
            from .verify import verify_main

            return verify_main(args)
        parser.print_help(sys.stderr)
        return ExitCode.USAGE
    except (BadResidueError, RejectedCurveError, ValueError) as e:
        logging.error("%s", e)
        return ExitCode.USAGE
    except (SetzerShaError, OSError) as e:
        logging.error("%s", e)
        return ExitCode.DATA


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.USAGE, f"{self.prog}: error: {message}\n")


def create_parser():
    parser = ArgumentParser(
        description="Analytic Tate-Shafarevich orders of the curve pairs E1(u), E2(u) of conductor u^2 + 64.",
        fromfile_prefix_chars="@",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    parser.add_argument(
        "--log-level",
        choices=[LogLevel.ERROR, LogLevel.INFO, LogLevel.DEBUG, LogLevel.TRACE],
        default=LogLevel.INFO,
        help="Log level (default: %(default)s).",
    )
    parser.add_argument(
        "-v",
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
        help="Show version and exit.",
    )

    subparsers = parser.add_subparsers(
        dest="command",
        title="subcommands",
        description="Provide one of the subcommands for more specific help.",
    )

    _add_scan_command(subparsers)
    _add_curve_command(subparsers)
    _add_stats_command(subparsers)
    _add_hist_command(subparsers)
    _add_verify_command(subparsers)

    return parser


def _add_precision_arguments(parser):
    parser.add_argument(
        "--precision-bits",
        default=96,
        help="Working precision in bits, at least 96 (default: %(default)d).",
        type=precision_type,
    )
    parser.add_argument(
        "--certify-bound",
        default=2,
        help="Also check odd primes up to this bound for certification (default: %(default)d).",
        type=int,
    )


def _add_scan_command(subparsers):
    parser = subparsers.add_parser(
        "scan",
        description="Scan a range of u, appending records to a checkpointed CSV file.",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    parser.add_argument(
        "--cache",
        "--no-cache",
        action=NegateAction,
        nargs=0,
        default=True,
        help="Whether to cache a_p by u mod p (default: %(default)s).",
    )
    parser.add_argument(
        "--checkpoint-every",
        default=1,
        help="Chunks between checkpoint rewrites (default: %(default)d).",
        type=int,
    )
    parser.add_argument(
        "--chunk-size",
        default=64,
        help="Values of u per work unit (default: %(default)d).",
        type=int,
    )
    parser.add_argument(
        "--classes",
        default="star,doublestar",
        help="Comma-separated classes to evaluate, of star, doublestar, evenk (default: %(default)s).",
        type=classes_type,
    )
    parser.add_argument(
        "-j",
        "--jobs",
        default=os.cpu_count() or 1,
        help="Number of worker processes (default: %(default)d).",
        type=int,
    )
    _add_precision_arguments(parser)
    parser.add_argument(
        "--verify-terms",
        "--no-verify-terms",
        action=NegateAction,
        nargs=0,
        default=False,
        help="Recompute with doubled terms, flagging rows that change (default: %(default)s).",
    )
    parser_required = parser.add_argument_group("required arguments")
    parser_required.add_argument(
        "--min", dest="u_min", help="Smallest u.", required=True, type=int
    )
    parser_required.add_argument(
        "--max", dest="u_max", help="Largest u.", required=True, type=int
    )
    parser_required.add_argument(
        "-o", "--out", help="Path to scan file.", required=True
    )


def _add_curve_command(subparsers):
    parser = subparsers.add_parser(
        "curve",
        description="Print a JSON report for E1(u) and E2(u).",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    _add_precision_arguments(parser)
    parser.add_argument(
        "--pretty",
        "--no-pretty",
        action=NegateAction,
        nargs=0,
        default=True,
        help="Whether to indent the report (default: %(default)s).",
    )
    parser.add_argument("u", help="Parameter u, 1 mod 4.", type=int)


def _add_stats_command(subparsers):
    parser = subparsers.add_parser(
        "stats",
        description="Write cumulative statistics of a scan file, one TSV file per series.",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    parser.add_argument(
        "--grid-min",
        default=1000,
        help="Smallest grid point (default: %(default)d).",
        type=float,
    )
    parser.add_argument(
        "--grid-points",
        default=50,
        help="Number of logarithmically spaced grid points (default: %(default)d).",
        type=int,
    )
    parser.add_argument(
        "--k-max",
        default=7,
        help="Largest k for the |Sha| = k^2 counts (default: %(default)d).",
        type=int,
    )
    parser.add_argument(
        "--primes",
        default="2,3,5,7,11",
        help="Comma-separated primes for divisibility (default: %(default)s).",
        type=primes_type,
    )
    parser_required = parser.add_argument_group("required arguments")
    parser_required.add_argument(
        "-i", "--in", dest="input", help="Path to scan file.", required=True
    )
    parser_required.add_argument(
        "-o", "--out", help="Output directory.", required=True
    )
    parser.add_argument(
        "kind",
        choices=["orders", "ratios", "divisibility", "growth", "rankone", "certified"],
        help="Statistic.",
    )


def _add_hist_command(subparsers):
    parser = subparsers.add_parser(
        "hist",
        description="Write a histogram of normalized values as TSV.",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    parser.add_argument(
        "-o",
        "--out",
        default="-",
        help="Path to output, or - for stdout (default: %(default)s).",
    )
    parser_required = parser.add_argument_group("required arguments")
    parser_required.add_argument(
        "-i", "--in", dest="input", help="Path to scan file.", required=True
    )
    parser.add_argument(
        "target", choices=["lvalue", "sha1", "sha2"], help="Normalized quantity."
    )


def _add_verify_command(subparsers):
    parser = subparsers.add_parser(
        "verify",
        description="Recompute random rows of a scan file with doubled terms and 32 more bits.",
        formatter_class=ArgumentFormatter,
    )
    update_help(parser)
    parser.add_argument(
        "--precision-bits",
        default=96,
        help="Precision of the scan, 32 bits are added (default: %(default)d).",
        type=precision_type,
    )
    parser.add_argument(
        "--sample",
        default=20,
        help="Number of rows to recompute (default: %(default)d).",
        type=int,
    )
    parser.add_argument(
        "--seed",
        default=0,
        help="Random seed of the sample (default: %(default)d).",
        type=int,
    )
    parser_required = parser.add_argument_group("required arguments")
    parser_required.add_argument(
        "-i", "--in", dest="input", help="Path to scan file.", required=True
    )


def setup_logging(args):
    install_trace_level()
    logging.basicConfig(format=LOG_FORMAT)
    if args.log_level == LogLevel.ERROR:
        logging.getLogger().setLevel(logging.ERROR)
    elif args.log_level == LogLevel.INFO:
        logging.getLogger().setLevel(logging.INFO)
    elif args.log_level == LogLevel.DEBUG:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.log_level == LogLevel.TRACE:
        logging.getLogger().setLevel(TRACE)


class ArgumentFormatter(argparse.RawDescriptionHelpFormatter):
    def __init__(self, prog):
        super().__init__(prog, max_help_position=100, width=100)


class NegateAction(argparse.Action):
    def __call__(self, parser, ns, values, option):
        setattr(ns, self.dest, option[2:4] != "no")


def update_help(parser):
    parser._actions[-1].help = "Show this help message and exit."
