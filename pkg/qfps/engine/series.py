"""
Exact truncated Laurent series at z = 0

Independent oracle for initial values, valuations and cross-checks. Elementary
functions are expanded through the recurrences of the ODEs they satisfy;
working precision grows automatically when poles or cancellation eat it.
"""
from dataclasses import dataclass
from math import isqrt
from typing import Dict, List, Optional, Tuple
import logging

from sympy.polys.domains import QQ

from qfps.config import settings
from qfps.engine.errors import (
    BranchError, ParameterError, SeriesError, SeriesVanishesError,
    UnsupportedExpansionError,
)
from qfps.engine.expr import (
    Add, Const, Expr, Mul, Param, Pow, Rat, Z, add, format_rat,
    is_integer, mul, power, z,
)

logger = logging.getLogger(__name__)


class _PrecisionLost(Exception):
    """Raised when a result cannot be determined at the current precision"""


class _Dense:
    """Coefficients of exponents start .. prec-1; leading coefficient nonzero.

    A series with no known nonzero coefficient has start == prec and no coefficients.
    """

    __slots__ = ("start", "c", "prec")

    def __init__(self, start: int, c: List["Rat"], prec: int):
        c = c[:max(prec - start, 0)]
        lead = 0
        while lead < len(c) and c[lead] == 0:
            lead += 1
        if lead == len(c):
            self.start, self.c, self.prec = prec, [], prec
        else:
            self.start, self.c, self.prec = start + lead, c[lead:], prec

    def get(self, exponent: int) -> "Rat":
        if exponent < self.start:
            return QQ.zero
        if exponent >= self.prec:
            raise _PrecisionLost()
        index = exponent - self.start
        return self.c[index] if index < len(self.c) else QQ.zero

    def dense_from(self, begin: int) -> List["Rat"]:
        """Coefficients of exponents begin .. prec-1"""
        return [self.get(e) for e in range(begin, self.prec)]

    @property
    def known_zero(self) -> bool:
        return not self.c


def _constant(value: "Rat", prec: int) -> _Dense:
    return _Dense(0, [value], max(prec, 1))


def _add(a: _Dense, b: _Dense) -> _Dense:
    prec = min(a.prec, b.prec)
    start = min(a.start, b.start, prec)
    return _Dense(start, [a.get(e) + b.get(e) for e in range(start, prec)], prec)


def _scale(a: _Dense, factor: "Rat") -> _Dense:
    return _Dense(a.start, [factor * x for x in a.c], a.prec)


def _mul(a: _Dense, b: _Dense) -> _Dense:
    prec = min(a.start + b.prec, b.start + a.prec)
    if a.known_zero or b.known_zero:
        return _Dense(prec, [], prec)
    start = a.start + b.start
    ac, bc = a.c, b.c
    size = prec - start
    out = []
    for k in range(size):
        total = QQ.zero
        for i in range(max(0, k - len(bc) + 1), min(k, len(ac) - 1) + 1):
            total += ac[i] * bc[k - i]
        out.append(total)
    return _Dense(start, out, prec)


def _inv(a: _Dense) -> _Dense:
    if a.known_zero:
        raise _PrecisionLost()
    v, ac = a.start, a.c
    size = a.prec - v
    inv0 = 1 / ac[0]
    out = [inv0]
    for k in range(1, size):
        total = QQ.zero
        for i in range(1, min(k, len(ac) - 1) + 1):
            total += ac[i] * out[k - i]
        out.append(-inv0 * total)
    return _Dense(-v, out, -v + size)


def _pow_int(a: _Dense, n: int) -> _Dense:
    if n < 0:
        return _pow_int(_inv(a), -n)
    result: Optional[_Dense] = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else _mul(result, base)
        n >>= 1
        if n:
            base = _mul(base, base)
    return result if result is not None else _constant(QQ.one, a.prec)


def _derivative(a: _Dense) -> _Dense:
    return _Dense(a.start - 1, [(a.start + i) * x for i, x in enumerate(a.c)], a.prec - 1)


def _integrate(a: _Dense, constant: "Rat" = QQ.zero) -> _Dense:
    if a.start <= -1 < a.prec and a.get(-1) != 0:
        raise UnsupportedExpansionError("integral has a logarithmic term")
    start = min(a.start + 1, 0)
    out = []
    for e in range(start, a.prec + 1):
        if e == 0:
            out.append(constant)
        else:
            out.append(a.get(e - 1) / e if e - 1 >= a.start else QQ.zero)
    return _Dense(start, out, a.prec + 1)


def _power_series_argument(u: _Dense, func: str) -> List["Rat"]:
    """Coefficients u_0 .. u_{prec-1} of an argument that must vanish at 0"""
    if u.start < 0:
        raise UnsupportedExpansionError(f"{func} of a series with a pole (essential singularity)")
    coefficients = u.dense_from(0)
    if coefficients and coefficients[0] != 0:
        raise UnsupportedExpansionError(
            f"{func} at the non-zero rational point {format_rat(coefficients[0])}"
        )
    return coefficients


def _exp(u: _Dense) -> _Dense:
    uc = _power_series_argument(u, "exp")
    out = [QQ.one]
    for n in range(1, len(uc)):
        out.append(sum((k * uc[k] * out[n - k] for k in range(1, n + 1)), QQ.zero) / n)
    return _Dense(0, out, u.prec)


def _log(u: _Dense) -> _Dense:
    if u.known_zero:
        raise _PrecisionLost()
    if u.start != 0:
        raise BranchError(f"log of a series with valuation {u.start}")
    if u.c[0] != 1:
        if u.c[0] < 0:
            raise BranchError(f"log at the negative value {format_rat(u.c[0])}")
        raise UnsupportedExpansionError(f"log at the point {format_rat(u.c[0])} has an irrational value")
    uc = u.c + [QQ.zero] * (u.prec - len(u.c))
    out = [QQ.zero]
    for n in range(1, u.prec):
        total = n * uc[n]
        for k in range(1, n):
            total -= k * out[k] * uc[n - k]
        out.append(total / n)
    return _Dense(0, out, u.prec)


def _sin_cos(u: _Dense, hyperbolic: bool) -> Tuple[_Dense, _Dense]:
    uc = _power_series_argument(u, "sinh" if hyperbolic else "sin")
    sign = 1 if hyperbolic else -1
    s, c = [QQ.zero], [QQ.one]
    for n in range(1, len(uc)):
        s.append(sum((k * uc[k] * c[n - k] for k in range(1, n + 1)), QQ.zero) / n)
        c.append(sign * sum((k * uc[k] * s[n - k] for k in range(1, n + 1)), QQ.zero) / n)
    return _Dense(0, s, u.prec), _Dense(0, c, u.prec)


def _rational_sqrt(value: "Rat") -> Optional["Rat"]:
    if value < 0:
        return None
    p, q = value.numerator, value.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return QQ(rp, rq)
    return None


def _power_rational(a: _Dense, alpha: "Rat") -> _Dense:
    """a^alpha for a with constant term 1 (J.C.P. Miller recurrence)"""
    ac = a.dense_from(0)
    out = [QQ.one]
    for n in range(1, len(ac)):
        total = QQ.zero
        for k in range(1, n + 1):
            total += ((alpha + 1) * k - n) * ac[k] * out[n - k]
        out.append(total / n)
    return _Dense(0, out, a.prec)


def _sqrt(u: _Dense) -> _Dense:
    if u.known_zero:
        raise _PrecisionLost()
    v = u.start
    if v % 2:
        raise UnsupportedExpansionError("square root with an odd valuation is a Puiseux series")
    lead = u.c[0]
    root = _rational_sqrt(lead)
    if root is None:
        if lead < 0:
            raise BranchError(f"square root of the negative value {format_rat(lead)}")
        raise UnsupportedExpansionError(f"square root of {format_rat(lead)} is irrational")
    normalized = _Dense(0, [x / lead for x in u.c], u.prec - v)
    body = _power_rational(normalized, QQ(1, 2))
    return _Dense(v // 2, [root * x for x in body.c], v // 2 + body.prec)


def _one_plus_square(u: _Dense, sign: int) -> _Dense:
    """1 + sign*u^2"""
    return _add(_constant(QQ.one, u.prec), _scale(_mul(u, u), QQ(sign)))


class _Evaluator:
    """Series of expression nodes at a fixed working precision"""

    def __init__(self, precision: int):
        self.precision = precision
        self.memo: Dict[Expr, _Dense] = {}

    def eval(self, e: Expr) -> _Dense:
        cached = self.memo.get(e)
        if cached is None:
            cached = self._eval(e)
            self.memo[e] = cached
        return cached

    def _eval(self, e: Expr) -> _Dense:
        P = self.precision
        if isinstance(e, Const):
            return _constant(e.value, P)
        if isinstance(e, Z):
            return _Dense(0, [QQ.zero, QQ.one], P)
        if isinstance(e, Param):
            raise ParameterError(f"parameter '{e.name}' in series expansion")
        if isinstance(e, Add):
            result = self.eval(e.terms[0])
            for term in e.terms[1:]:
                result = _add(result, self.eval(term))
            return result
        if isinstance(e, Mul):
            result = self.eval(e.factors[0])
            for factor in e.factors[1:]:
                result = _mul(result, self.eval(factor))
            return result
        if isinstance(e, Pow):
            if not (isinstance(e.exponent, Const) and is_integer(e.exponent.value)):
                raise ParameterError("symbolic exponent in series expansion")
            return _pow_int(self.eval(e.base), e.exponent.value.numerator)
        return self._function(e.func, self.eval(e.arg))

    def _function(self, func: str, u: _Dense) -> _Dense:
        if func == "exp":
            return _exp(u)
        if func == "log":
            return _log(u)
        if func == "sqrt":
            return _sqrt(u)
        if func in ("sin", "cos", "tan", "sec", "csc", "cot"):
            s, c = _sin_cos(u, hyperbolic=False)
            return {
                "sin": lambda: s,
                "cos": lambda: c,
                "tan": lambda: _mul(s, _inv(c)),
                "sec": lambda: _inv(c),
                "csc": lambda: _inv(s),
                "cot": lambda: _mul(c, _inv(s)),
            }[func]()
        if func in ("sinh", "cosh", "tanh"):
            s, c = _sin_cos(u, hyperbolic=True)
            if func == "sinh":
                return s
            if func == "cosh":
                return c
            return _mul(s, _inv(c))
        _power_series_argument(u, func)
        du = _derivative(u)
        if func == "arctan":
            return _integrate(_mul(du, _inv(_one_plus_square(u, 1))))
        if func == "arctanh":
            return _integrate(_mul(du, _inv(_one_plus_square(u, -1))))
        if func == "arcsin":
            return _integrate(_mul(du, _power_rational(_one_plus_square(u, -1), QQ(-1, 2))))
        if func == "arcsinh":
            return _integrate(_mul(du, _power_rational(_one_plus_square(u, 1), QQ(-1, 2))))
        raise UnsupportedExpansionError(f"no series rule for '{func}'")


@dataclass(frozen=True)
class TruncSeries:
    """Coefficients of z^offset .. z^order; offset > order means zero through order"""
    offset: int
    coeffs: Tuple["Rat", ...]
    order: int

    @classmethod
    def _from_dense(cls, d: _Dense, order: int) -> "TruncSeries":
        if d.prec <= order:
            raise _PrecisionLost()
        if d.start > order:
            return cls(order + 1, (), order)
        return cls(d.start, tuple(d.get(e) for e in range(d.start, order + 1)), order)

    @classmethod
    def from_coefficients(cls, start: int, coeffs: List["Rat"], order: int) -> "TruncSeries":
        """Series with coeffs[e - start] at z^e, truncated after z^order"""
        return cls._from_dense(_Dense(start, list(coeffs), order + 1), order)

    def _to_dense(self) -> _Dense:
        return _Dense(self.offset, list(self.coeffs), self.order + 1)

    @property
    def is_zero(self) -> bool:
        """All coefficients through `order` vanish"""
        return not self.coeffs

    @property
    def valuation(self) -> Optional[int]:
        return self.offset if self.coeffs else None

    def coefficient(self, exponent: int) -> "Rat":
        if exponent > self.order:
            raise SeriesError(f"coefficient of z^{exponent} beyond truncation order {self.order}")
        if exponent < self.offset:
            return QQ.zero
        return self.coeffs[exponent - self.offset]

    def coefficients(self, start: int, count: int) -> List["Rat"]:
        return [self.coefficient(e) for e in range(start, start + count)]

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        d = _add(self._to_dense(), other._to_dense())
        return TruncSeries._from_dense(d, d.prec - 1)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        d = _mul(self._to_dense(), other._to_dense())
        return TruncSeries._from_dense(d, d.prec - 1)

    def derivative(self) -> "TruncSeries":
        d = _derivative(self._to_dense())
        return TruncSeries._from_dense(d, d.prec - 1)

    def as_expr(self) -> Expr:
        """The truncated polynomial, highest power first"""
        terms = [
            mul(Const(c), power(z, self.offset + i))
            for i, c in reversed(list(enumerate(self.coeffs))) if c != 0
        ]
        return add(*terms)

    def __str__(self) -> str:
        return str(self.as_expr())


def _evaluate(e: Expr, order: int) -> TruncSeries:
    if e.params:
        raise ParameterError(f"parameters {sorted(e.params)} are not allowed in series expansion")
    extra = 4
    while True:
        precision = max(order + 1 + extra, 2)
        try:
            return TruncSeries._from_dense(_Evaluator(precision).eval(e), order)
        except _PrecisionLost:
            pass
        except RecursionError:
            raise SeriesError("expression nested too deeply for series expansion") from None
        if extra >= settings.MAX_EXTRA_PRECISION:
            raise SeriesError(
                f"precision lost beyond {extra} extra terms (division by a series vanishing to high order?)"
            )
        extra *= 2
        logger.debug(f"Series precision retry with {extra} extra terms")


def series_of(e: Expr, order: int) -> TruncSeries:
    """Exact coefficients of e through z^order"""
    return _evaluate(e, order)


def valuation(e: Expr, cap: Optional[int] = None) -> int:
    """Least exponent with a nonzero coefficient, searching up to `cap`"""
    cap = cap or settings.VALUATION_CAP
    order = min(8, cap)
    while True:
        s = series_of(e, order)
        if not s.is_zero:
            return s.offset
        if order >= cap:
            raise SeriesVanishesError(cap)
        order = min(2 * order, cap)
