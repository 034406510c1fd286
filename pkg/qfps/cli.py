"""
Command-line interface

    qfps qde EXPR [--max-index K] [--param SYM]...
    qfps qre EXPR
    qfps fps EXPR [--initial-values M]
    qfps taylor EXPR --order T [--oracle]
    qfps prove EXPR1 EXPR2
    qfps delta2 EXPR K

Exit codes: 0 success or equal, 1 not equal, 2 undecided or failure, 64 usage error.
"""
from typing import List, Optional
import argparse
import logging
import sys

from qfps import __version__
from qfps.config import settings
from qfps.engine.errors import DomainError, ExprSyntaxError, QFPSError
from qfps.engine.rep import VerdictKind
from qfps.models.schemas import OutputFormat
from qfps.services.series_service import SeriesService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_EQUAL = 1
EXIT_FAILURE = 2
EXIT_USAGE = 64

_VERDICT_EXIT = {
    VerdictKind.EQUAL: EXIT_OK,
    VerdictKind.NOT_EQUAL: EXIT_NOT_EQUAL,
    VerdictKind.UNDECIDED: EXIT_FAILURE,
}


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with the usage exit code"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value,
        help="Output rendering",
    )
    common.add_argument(
        "--max-index", type=_positive, default=None,
        help=f"delta_2 bound for the QDE search (default {settings.MAX_INDEX}, env QFPS_MAX_INDEX)",
    )
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging on stderr")

    with_params = argparse.ArgumentParser(add_help=False)
    with_params.add_argument(
        "--param", action="append", default=[], metavar="SYM", help="Declare a parameter (repeatable)",
    )

    p = _ArgumentParser(
        prog="qfps",
        description="Quadratic differential equations and normal forms of delta_2-finite power series",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    q = sub.add_parser("qde", parents=[common, with_params], help="least-index quadratic differential equation")
    q.add_argument("expr")

    q = sub.add_parser("qre", parents=[common, with_params], help="quadratic recurrence for the coefficients")
    q.add_argument("expr")

    q = sub.add_parser("fps", parents=[common], help="normal-form series representation")
    q.add_argument("expr")
    q.add_argument(
        "--initial-values", type=_non_negative, default=None, metavar="M",
        help="Keep at least M initial values",
    )

    q = sub.add_parser("taylor", parents=[common], help="truncated expansion from the normal form")
    q.add_argument("expr")
    q.add_argument("--order", type=_non_negative, required=True, help="Truncation order T")
    q.add_argument("--oracle", action="store_true", help="Show the direct series expansion alongside")

    q = sub.add_parser("prove", parents=[common, with_params], help="decide an identity")
    q.add_argument("left")
    q.add_argument("right")

    q = sub.add_parser("delta2", parents=[common, with_params], help="delta_2^K of an expression")
    q.add_argument("expr")
    q.add_argument("k", type=_positive, metavar="K")
    return p


def _configure_logging(verbose: int) -> None:
    level = {0: settings.LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )


def _run(ns: argparse.Namespace) -> int:
    """Execute one subcommand, print its document and return the exit code"""
    code = EXIT_OK
    if ns.command == "qde":
        document = SeriesService.get_qde(ns.expr, ns.param, ns.max_index)
    elif ns.command == "qre":
        document = SeriesService.get_qre(ns.expr, ns.param, ns.max_index)
    elif ns.command == "fps":
        document = SeriesService.get_fps(ns.expr, ns.max_index, ns.initial_values)
    elif ns.command == "taylor":
        document = SeriesService.get_taylor(ns.expr, ns.order, ns.oracle, ns.max_index)
    elif ns.command == "prove":
        document = SeriesService.prove_identity(ns.left, ns.right, ns.param, ns.max_index)
        code = _VERDICT_EXIT[document.verdict]
    else:
        document = SeriesService.get_delta2(ns.expr, ns.k, ns.param)
    print(SeriesService.render(document, OutputFormat(ns.format)))
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    _configure_logging(ns.verbose)
    try:
        return _run(ns)
    except (ExprSyntaxError, DomainError) as exc:
        print(f"qfps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QFPSError as exc:
        print(f"qfps: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except RecursionError:
        print("qfps: expression too deeply nested", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
