"""
Immutable expression trees for elementary functions of the series variable z

Trees are built through the smart constructors ``add``, ``mul`` and ``power``
which flatten nested sums/products and fold rational constants. Term order is
otherwise preserved, so printing and re-parsing reproduces the same tree.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Tuple, Union
import logging

from sympy.polys.domains import QQ

from qfps.engine.errors import DomainError, InvalidExponentError

logger = logging.getLogger(__name__)

Rat = type(QQ.one)
Number = Union[int, "Rat"]

SERIES_VARIABLE = "z"
RECURRENCE_INDEX = "n"

TRIG_FUNCTIONS = ("sin", "cos", "tan", "sec", "csc", "cot")
HYPERBOLIC_FUNCTIONS = ("sinh", "cosh", "tanh")
FUNCTION_CATALOG: FrozenSet[str] = frozenset((
    "exp", "log", "sqrt",
    *TRIG_FUNCTIONS,
    *HYPERBOLIC_FUNCTIONS,
    "arcsin", "arctan", "arcsinh", "arctanh",
))
RESERVED_NAMES: FrozenSet[str] = FUNCTION_CATALOG | {SERIES_VARIABLE, RECURRENCE_INDEX}


def rat(numerator: Number, denominator: int = 1) -> "Rat":
    """Exact rational from integers (or an existing rational)"""
    if denominator == 1:
        return QQ(numerator) if isinstance(numerator, int) else QQ.convert(numerator)
    return QQ(numerator, denominator)


def is_integer(value: "Rat") -> bool:
    return value.denominator == 1


def format_rat(value: "Rat") -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Expr:
    """Base class of all expression nodes"""

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return type(self) is type(other) and self._key() == other._key()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", cached)
        return cached

    # Operator sugar over the smart constructors

    def __add__(self, other: "ExprLike") -> "Expr":
        return add(self, as_expr(other))

    def __radd__(self, other: "ExprLike") -> "Expr":
        return add(as_expr(other), self)

    def __sub__(self, other: "ExprLike") -> "Expr":
        return sub(self, as_expr(other))

    def __rsub__(self, other: "ExprLike") -> "Expr":
        return sub(as_expr(other), self)

    def __mul__(self, other: "ExprLike") -> "Expr":
        return mul(self, as_expr(other))

    def __rmul__(self, other: "ExprLike") -> "Expr":
        return mul(as_expr(other), self)

    def __truediv__(self, other: "ExprLike") -> "Expr":
        return div(self, as_expr(other))

    def __rtruediv__(self, other: "ExprLike") -> "Expr":
        return div(as_expr(other), self)

    def __neg__(self) -> "Expr":
        return neg(self)

    def __pow__(self, exponent: "ExprLike") -> "Expr":
        return power(self, as_expr(exponent))

    def __str__(self) -> str:
        from qfps.engine.printer import print_expr
        return print_expr(self)

    @property
    def params(self) -> FrozenSet[str]:
        """Names of the parameters occurring in the tree"""
        return frozenset(_collect_params(self))


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: "Rat"

    def _key(self) -> tuple:
        return (self.value,)

    def __repr__(self) -> str:
        return f"Const({format_rat(self.value)})"


@dataclass(frozen=True, eq=False)
class Z(Expr):
    """The series variable"""

    def _key(self) -> tuple:
        return ()

    def __repr__(self) -> str:
        return "Z()"


@dataclass(frozen=True, eq=False)
class Param(Expr):
    name: str

    def _key(self) -> tuple:
        return (self.name,)


@dataclass(frozen=True, eq=False)
class Add(Expr):
    terms: Tuple[Expr, ...]

    def _key(self) -> tuple:
        return self.terms


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    factors: Tuple[Expr, ...]

    def _key(self) -> tuple:
        return self.factors


@dataclass(frozen=True, eq=False)
class Pow(Expr):
    base: Expr
    exponent: Expr

    def _key(self) -> tuple:
        return (self.base, self.exponent)


@dataclass(frozen=True, eq=False)
class App(Expr):
    func: str
    arg: Expr

    def _key(self) -> tuple:
        return (self.func, self.arg)


ExprLike = Union[Expr, int, "Rat"]

ZERO = Const(QQ.zero)
ONE = Const(QQ.one)
MINUS_ONE = Const(-QQ.one)
z = Z()


def as_expr(value: ExprLike) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(rat(value))


def const(numerator: Number, denominator: int = 1) -> Const:
    return Const(rat(numerator, denominator))


def param(name: str) -> Param:
    return Param(name)


def apply(func: str, arg: ExprLike) -> App:
    if func not in FUNCTION_CATALOG:
        from qfps.engine.errors import UnknownFunctionError
        raise UnknownFunctionError(f"unknown function '{func}'")
    return App(func, as_expr(arg))


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 1


def add(*terms: ExprLike) -> Expr:
    """n-ary sum: flattened, constants folded and placed last"""
    flat = []
    total = QQ.zero
    for term in map(as_expr, terms):
        parts = term.terms if isinstance(term, Add) else (term,)
        for part in parts:
            if isinstance(part, Const):
                total += part.value
            else:
                flat.append(part)
    if total != 0:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: ExprLike) -> Expr:
    """n-ary product: flattened, constants folded and placed first"""
    flat = []
    coeff = QQ.one
    for factor in map(as_expr, factors):
        parts = factor.factors if isinstance(factor, Mul) else (factor,)
        for part in parts:
            if isinstance(part, Const):
                coeff *= part.value
            else:
                flat.append(part)
    if coeff == 0:
        return ZERO
    if coeff != 1:
        flat.insert(0, Const(coeff))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def power(base: ExprLike, exponent: ExprLike) -> Expr:
    """base^exponent for integer or parameter-linear exponents"""
    base, exponent = as_expr(base), as_expr(exponent)
    if isinstance(exponent, Const):
        value = exponent.value
        if not is_integer(value):
            raise InvalidExponentError(f"exponent {format_rat(value)} is not an integer")
        n = value.numerator
        if n == 0:
            return ONE
        if n == 1:
            return base
        if isinstance(base, Const):
            if base.value == 0 and n < 0:
                raise DomainError("division by zero")
            return Const(base.value ** n)
        if isinstance(base, Pow):
            return power(base.base, mul(base.exponent, exponent))
        return Pow(base, exponent)
    if parameter_linear_form(exponent) is None:
        raise InvalidExponentError(
            "exponent must be an integer or parameter-linear with an integer constant part"
        )
    if is_one(base):
        return ONE
    return Pow(base, exponent)


def neg(e: ExprLike) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a: ExprLike, b: ExprLike) -> Expr:
    return add(a, neg(b))


def div(a: ExprLike, b: ExprLike) -> Expr:
    return mul(a, power(b, MINUS_ONE))


def parameter_linear_form(e: Expr) -> Optional[Tuple[Dict[str, "Rat"], "Rat"]]:
    """Split e into ({param: coefficient}, constant) or None if not of that shape.

    The constant part must be an integer.
    """
    coefficients: Dict[str, Rat] = {}
    constant = QQ.zero
    for term in (e.terms if isinstance(e, Add) else (e,)):
        if isinstance(term, Const):
            constant += term.value
        elif isinstance(term, Param):
            coefficients[term.name] = coefficients.get(term.name, QQ.zero) + 1
        elif (isinstance(term, Mul) and len(term.factors) == 2
              and isinstance(term.factors[0], Const) and isinstance(term.factors[1], Param)):
            name = term.factors[1].name
            coefficients[name] = coefficients.get(name, QQ.zero) + term.factors[0].value
        else:
            return None
    if not is_integer(constant):
        return None
    return {k: v for k, v in coefficients.items() if v != 0}, constant


def _collect_params(e: Expr) -> Iterable[str]:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Param):
            yield node.name
        elif isinstance(node, Add):
            stack.extend(node.terms)
        elif isinstance(node, Mul):
            stack.extend(node.factors)
        elif isinstance(node, Pow):
            stack.append(node.base)
            stack.append(node.exponent)
        elif isinstance(node, App):
            stack.append(node.arg)


def depends_on_z(e: Expr) -> bool:
    if isinstance(e, Z):
        return True
    if isinstance(e, (Const, Param)):
        return False
    if isinstance(e, Add):
        return any(depends_on_z(t) for t in e.terms)
    if isinstance(e, Mul):
        return any(depends_on_z(f) for f in e.factors)
    if isinstance(e, Pow):
        return depends_on_z(e.base)
    return depends_on_z(e.arg)


# Differentiation

def _sqrt(u: Expr) -> Expr:
    return App("sqrt", u)


def _outer_derivative(func: str, u: Expr) -> Expr:
    """d/du func(u)"""
    f = App(func, u)
    if func == "exp":
        return f
    if func == "log":
        return power(u, -1)
    if func == "sqrt":
        return mul(const(1, 2), power(f, -1))
    if func == "sin":
        return App("cos", u)
    if func == "cos":
        return neg(App("sin", u))
    if func == "tan":
        return add(ONE, power(f, 2))
    if func == "sec":
        return mul(f, App("tan", u))
    if func == "csc":
        return neg(mul(f, App("cot", u)))
    if func == "cot":
        return neg(add(ONE, power(f, 2)))
    if func == "sinh":
        return App("cosh", u)
    if func == "cosh":
        return App("sinh", u)
    if func == "tanh":
        return sub(ONE, power(f, 2))
    if func == "arcsin":
        return power(_sqrt(sub(ONE, power(u, 2))), -1)
    if func == "arctan":
        return power(add(ONE, power(u, 2)), -1)
    if func == "arcsinh":
        return power(_sqrt(add(power(u, 2), ONE)), -1)
    if func == "arctanh":
        return power(sub(ONE, power(u, 2)), -1)
    raise DomainError(f"no derivative rule for '{func}'")


def _derivative(e: Expr, memo: Dict[Expr, Expr]) -> Expr:
    cached = memo.get(e)
    if cached is not None:
        return cached
    if isinstance(e, (Const, Param)):
        result = ZERO
    elif isinstance(e, Z):
        result = ONE
    elif isinstance(e, Add):
        result = add(*(_derivative(t, memo) for t in e.terms))
    elif isinstance(e, Mul):
        summands = []
        for i, factor in enumerate(e.factors):
            d = _derivative(factor, memo)
            if not is_zero(d):
                summands.append(mul(*e.factors[:i], d, *e.factors[i + 1:]))
        result = add(*summands)
    elif isinstance(e, Pow):
        d = _derivative(e.base, memo)
        if is_zero(d):
            result = ZERO
        else:
            result = mul(e.exponent, power(e.base, add(e.exponent, MINUS_ONE)), d)
    elif isinstance(e, App):
        d = _derivative(e.arg, memo)
        result = ZERO if is_zero(d) else mul(_outer_derivative(e.func, e.arg), d)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    memo[e] = result
    return result


def differentiate(e: Expr, n: int = 1) -> Expr:
    """n-th derivative with respect to z, unsimplified beyond flattening"""
    if n < 0:
        raise DomainError(f"derivative order must be non-negative, got {n}")
    memo: Dict[Expr, Expr] = {}
    for _ in range(n):
        e = _derivative(e, memo)
    return e


def substitute(e: Expr, target: str, value: ExprLike) -> Expr:
    """Replace every occurrence of z (target 'z') or of the parameter `target`"""
    value = as_expr(value)
    memo: Dict[Expr, Expr] = {}

    def walk(node: Expr) -> Expr:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Z):
            result = value if target == SERIES_VARIABLE else node
        elif isinstance(node, Param):
            result = value if node.name == target else node
        elif isinstance(node, Const):
            result = node
        elif isinstance(node, Add):
            result = add(*map(walk, node.terms))
        elif isinstance(node, Mul):
            result = mul(*map(walk, node.factors))
        elif isinstance(node, Pow):
            result = power(walk(node.base), walk(node.exponent))
        else:
            result = App(node.func, walk(node.arg))
        memo[node] = result
        return result

    return walk(e)
