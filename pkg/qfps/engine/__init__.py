"""
Symbolic engine: expressions, differential towers, QDE/QRE computation and normal forms
"""
from qfps.engine.errors import QFPSError
from qfps.engine.expr import Expr
from qfps.engine.parser import parse
from qfps.engine.printer import latex_expr, print_expr
from qfps.engine.qde import QDE, delta2, find_qde, nu, parse_qde, verify_qde
from qfps.engine.qre import QRE, evaluate_qre, qde_to_qre
from qfps.engine.rep import SeriesRep, Verdict, VerdictKind, fps, prove, qtaylor
from qfps.engine.series import TruncSeries, series_of, valuation

__all__ = [
    "QFPSError", "Expr", "parse", "print_expr", "latex_expr",
    "QDE", "delta2", "find_qde", "nu", "parse_qde", "verify_qde",
    "QRE", "evaluate_qre", "qde_to_qre",
    "SeriesRep", "Verdict", "VerdictKind", "fps", "prove", "qtaylor",
    "TruncSeries", "series_of", "valuation",
]
