"""
Exception hierarchy shared by the engine, the CLI and the HTTP layer
"""
from typing import Optional


class QFPSError(Exception):
    """Base class for every engine failure"""


# Parsing

class ExprSyntaxError(QFPSError):
    """Input text outside the expression grammar"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownFunctionError(ExprSyntaxError):
    """Function name outside the catalog"""


class UnboundSymbolError(ExprSyntaxError):
    """Free symbol that is neither z nor a declared parameter"""


class InvalidExponentError(ExprSyntaxError):
    """Exponent that is not an integer or a parameter-linear form"""


class DomainError(QFPSError, ValueError):
    """Argument outside an operation's domain (e.g. nu(0))"""


# Differential tower

class TowerError(QFPSError):
    """Expression is not canonicalizable over a finite differential tower"""


class UngeneratedSubexpressionError(TowerError):
    """A transcendental subexpression is not generated by a frozen tower"""


# Differential and recurrence equations

class QDENotFoundError(QFPSError):
    """No QDE found up to the delta_2 bound; not a proof of non-finiteness"""

    def __init__(self, expr_text: str, max_index: int):
        self.max_index = max_index
        super().__init__(
            f"not detected delta_2-finite within bound: {expr_text} "
            f"(max index {max_index})"
        )


class IndeterminateVerificationError(TowerError):
    """QDE substitution could not be decided"""


# Series oracle

class SeriesError(QFPSError):
    """Series expansion failure"""


class UnsupportedExpansionError(SeriesError):
    """No Laurent expansion with rational coefficients at z = 0"""


class BranchError(SeriesError):
    """Logarithm or root taken at a branch point"""


class ParameterError(SeriesError):
    """Parameters are not allowed in exact series"""


class SeriesVanishesError(SeriesError):
    """Every coefficient examined up to the cap is zero"""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"series possibly identically zero (all coefficients vanish through z^{cap})")


# Normal forms

class InsufficientPrefixError(QFPSError):
    """Not enough known coefficients to evaluate a recurrence"""

    def __init__(self, needed: int, available: int):
        self.needed = needed
        self.available = available
        super().__init__(f"needs {needed} known coefficients, got {available}")


class RepresentationError(QFPSError):
    """A series representation failed its construction checks"""
