"""
The delta_2 operator and the search for homogeneous quadratic differential equations

delta_2^k(f) = f^(i-2) * f^(j-2) with (i, j) = nu(k) and f^(-1) = 1, f^(0) = f.
The index map enumerates the pairs i >= j >= 1 row by row:

    k:      1      2      3      4      5      6      7 ...
    (i,j):  (1,1)  (2,1)  (2,2)  (3,1)  (3,2)  (3,3)  (4,1) ...
"""
from dataclasses import dataclass
from functools import reduce
from math import isqrt
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyRing

from qfps.config import settings
from qfps.engine.errors import (
    DomainError, ExprSyntaxError, IndeterminateVerificationError, QDENotFoundError, TowerError,
)
from qfps.engine.expr import (
    ONE, Expr, Param, add, differentiate, mul, power,
)
from qfps.engine.field import (
    MPoly, RatFunc, normalize_coefficients, poly_to_expr, polynomial_ring,
    solve_linear,
)
from qfps.engine.parser import parse
from qfps.engine.printer import latex_expr, print_expr
from qfps.engine.tower import CanonicalForm, Tower, build_tower

logger = logging.getLogger(__name__)


def nu(k: int) -> Tuple[int, int]:
    """Index map k -> (i, j), i >= j >= 1"""
    if k < 1:
        raise DomainError(f"delta_2 index must be positive, got {k}")
    l = (isqrt(8 * k + 1) - 1) // 2
    n = l * (l + 1) // 2
    if n == k:
        return l, l
    return l + 1, k - n


def delta2_index(i: int, j: int) -> int:
    """Inverse of nu"""
    if not 1 <= j <= i:
        raise DomainError(f"no delta_2 index for the pair ({i}, {j})")
    return (i - 1) * i // 2 + j


@dataclass(frozen=True)
class Delta2Index:
    k: int
    i: int
    j: int

    @classmethod
    def from_index(cls, k: int) -> "Delta2Index":
        i, j = nu(k)
        return cls(k, i, j)

    @property
    def derivative_orders(self) -> Tuple[int, int]:
        """Orders of the two factors, -1 standing for the constant 1"""
        return self.i - 2, self.j - 2


def delta2(f: Expr, k: int) -> Expr:
    """delta_2^k(f) as an expression"""
    a, b = Delta2Index.from_index(k).derivative_orders
    if a == b:
        return power(differentiate(f, a), 2) if a >= 0 else ONE
    factors = [differentiate(f, order) for order in (b, a) if order >= 0]
    return mul(*factors)


# Equations

@dataclass(frozen=True)
class Linear:
    """y^(order)"""
    order: int

    @property
    def index(self) -> int:
        return delta2_index(self.order + 2, 1)

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class Quadratic:
    """y^(first) * y^(second), first >= second"""
    first: int
    second: int

    def __post_init__(self):
        if self.first < self.second:
            first, second = self.second, self.first
            object.__setattr__(self, "first", first)
            object.__setattr__(self, "second", second)

    @property
    def index(self) -> int:
        return delta2_index(self.first + 2, self.second + 2)

    @property
    def degree(self) -> int:
        return 2


Monomial = Union[Linear, Quadratic]


def monomial_of_index(k: int) -> Monomial:
    a, b = Delta2Index.from_index(k).derivative_orders
    if a < 0:
        raise DomainError("delta_2^1 is the constant 1, not a differential monomial")
    return Linear(a) if b < 0 else Quadratic(a, b)


@dataclass(frozen=True)
class QDETerm:
    coefficient: MPoly
    monomial: Monomial


def _unknown_names(unknown: str, order: int) -> List[str]:
    return [unknown if d == 0 else f"{unknown}{d}" for d in range(order + 1)]


@dataclass(frozen=True)
class QDE:
    """sum of coefficient(z, params) * monomial = 0, terms by decreasing delta_2 index"""
    terms: Tuple[QDETerm, ...]
    params: Tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return max(
            t.monomial.order if isinstance(t.monomial, Linear) else t.monomial.first
            for t in self.terms
        )

    @property
    def leading_index(self) -> int:
        return max(t.monomial.index for t in self.terms)

    @property
    def is_linear(self) -> bool:
        return all(isinstance(t.monomial, Linear) for t in self.terms)

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.params)

    def coefficient(self, monomial: Monomial) -> MPoly:
        for term in self.terms:
            if term.monomial == monomial:
                return term.coefficient
        return self.ring.zero

    @property
    def unknown(self) -> str:
        """Name for y in renderings, avoiding parameter names"""
        for candidate in ("y", "w", "u", "v"):
            if not any(p == candidate or p.startswith(candidate) for p in self.params):
                return candidate
        return "y_"

    def _render(self, names: Sequence[str]) -> Expr:
        summands = []
        for term in self.terms:
            m = term.monomial
            if isinstance(m, Linear):
                y = Param(names[m.order])
            elif m.first == m.second:
                y = power(Param(names[m.first]), 2)
            else:
                y = mul(Param(names[m.second]), Param(names[m.first]))
            summands.append(mul(poly_to_expr(term.coefficient), y))
        return add(*summands)

    def to_expr(self) -> Expr:
        return self._render(_unknown_names(self.unknown, self.order))

    def __str__(self) -> str:
        return f"{print_expr(self.to_expr())} = 0"

    def latex(self) -> str:
        names = ["y", "y'", "y''", "y'''"] + [f"{{y^{{({d})}}}}" for d in range(4, self.order + 1)]
        return f"{latex_expr(self._render(names))} = 0"


def qde_from_coefficients(coefficients: Dict[int, MPoly], params: Sequence[str]) -> QDE:
    """QDE from {delta_2 index: coefficient}, normalized"""
    indices = sorted((k for k, c in coefficients.items() if c), reverse=True)
    if not indices:
        raise DomainError("a QDE needs at least one nonzero coefficient")
    normalized = normalize_coefficients([coefficients[k] for k in indices], 0)
    terms = tuple(QDETerm(c, monomial_of_index(k)) for k, c in zip(indices, normalized))
    return QDE(terms, tuple(sorted(params)))


def parse_qde(text: str, params: Iterable[str] = (), unknown: str = "y", max_order: int = 9) -> QDE:
    """Read a QDE written with unknown, unknown1, unknown2, ... (optionally '= 0')"""
    params = tuple(sorted(params))
    lhs, _, rhs = text.partition("=")
    if rhs and rhs.strip() != "0":
        raise ExprSyntaxError("a QDE must be of the form '... = 0'")
    names = _unknown_names(unknown, max_order)
    e = parse(lhs, set(params) | set(names))
    tower = Tower(set(params) | set(names))
    form = tower.canonicalize(e)
    if tower.kernels or not tower.lift(form.den).is_ground:
        raise ExprSyntaxError("QDE coefficients must be polynomials in z and the parameters")
    symbols = [str(s) for s in tower.ring.symbols]
    base = polynomial_ring(params)
    base_names = [str(s) for s in base.symbols]
    coefficients: Dict[int, Dict[tuple, object]] = {}
    for monom, coeff in tower.lift(form.num).terms():
        exps = dict(zip(symbols, monom))
        orders: List[int] = []
        for d, name in enumerate(names):
            orders.extend([d] * exps.get(name, 0))
        if not 1 <= len(orders) <= 2:
            raise ExprSyntaxError("every QDE term must be linear or quadratic in the unknown")
        monomial = Linear(orders[0]) if len(orders) == 1 else Quadratic(orders[1], orders[0])
        key = tuple(exps[name] for name in base_names)
        coefficients.setdefault(monomial.index, {})[key] = coeff * QQ.one / tower.lift(form.den).const()
    polys = {k: base.from_dict(v) for k, v in coefficients.items()}
    return qde_from_coefficients(polys, params)


# Algorithm

class _DifferentialForms:
    """Derivatives and delta_2 products of one canonical form, cached"""

    def __init__(self, tower: Tower, form: CanonicalForm):
        self.tower = tower
        self._derivatives: List[CanonicalForm] = [form]
        self._products: Dict[int, CanonicalForm] = {}

    def derivative(self, order: int) -> CanonicalForm:
        if order < 0:
            return self.tower.one
        while len(self._derivatives) <= order:
            self._derivatives.append(self.tower.diff(self._derivatives[-1]))
        return self._derivatives[order]

    def delta2(self, k: int) -> CanonicalForm:
        cached = self._products.get(k)
        if cached is None:
            a, b = Delta2Index.from_index(k).derivative_orders
            cached = self.tower.mul(self.derivative(a), self.derivative(b))
            self._products[k] = cached
        return cached

    def combination(self, coefficients: Dict[int, MPoly]) -> CanonicalForm:
        return self.tower.sum(
            self.tower.form(self.tower.lift(c)) * self.delta2(k)
            for k, c in coefficients.items() if c
        )

    def solve(self, n: int) -> Optional[List[RatFunc]]:
        """Ansatz delta_2^(n+2) + sum_{m<n} C_m delta_2^(m+2) = 0 over Q(z, params)"""
        tower = self.tower
        forms = [self.delta2(m + 2) for m in range(n + 1)]
        dens = [tower.lift(f.den) for f in forms]
        common = reduce(lambda acc, d: acc.lcm(d), dens[1:], dens[0])
        rows = [tower.split_monomials(tower.lift(f.num) * common.exquo(d)) for f, d in zip(forms, dens)]
        monomials = sorted(set().union(*(r.keys() for r in rows)), reverse=True)
        field = tower.base_field
        zero = tower.base_ring.zero
        A = [[field(rows[m].get(mono, zero)) for m in range(n)] for mono in monomials]
        b = [-field(rows[n].get(mono, zero)) for mono in monomials]
        logger.debug(f"ansatz N={n}: {len(monomials)} equations in {n} unknowns")
        return solve_linear(A, b, field, ncols=n)


def _forms(f: Expr, params: Iterable[str]) -> _DifferentialForms:
    tower = build_tower(f, params)
    return _DifferentialForms(tower, tower.canonicalize(f))


def solve_ansatz(f: Expr, n: int, params: Iterable[str] = ()) -> Optional[List[RatFunc]]:
    """One step of the search: coefficients C_0..C_{n-1}, or None"""
    if n < 1:
        raise DomainError(f"ansatz size must be positive, got {n}")
    return _forms(f, params).solve(n)


def _clear_denominators(values: Sequence[RatFunc]) -> List[MPoly]:
    common = reduce(lambda acc, v: acc.lcm(v.denom), values[1:], values[0].denom)
    return [v.numer * common.exquo(v.denom) for v in values]


def find_qde(f: Expr, max_index: Optional[int] = None, params: Iterable[str] = ()) -> QDE:
    """Least-index homogeneous quadratic differential equation satisfied by f"""
    max_index = settings.MAX_INDEX if max_index is None else max_index
    if max_index < 3:
        raise DomainError(f"max_index must be at least 3, got {max_index}")
    params = tuple(sorted(set(params) | f.params))
    forms = _forms(f, params)
    tower = forms.tower
    form = forms.derivative(0)
    base = tower.base_ring

    if form.is_zero():
        logger.info(f"{print_expr(f)} is zero: QDE y = 0")
        return qde_from_coefficients({2: base.one}, params)

    value = tower.base_fraction(form)
    if value is not None:
        # y^2 - (P/Q) y = 0
        qde = qde_from_coefficients({3: value.denom, 2: -value.numer}, params)
        logger.info(f"QDE for rational {print_expr(f)}: {qde}")
        return qde

    n = 2
    while n + 2 <= max_index:
        solution = forms.solve(n)
        if solution is not None:
            polys = _clear_denominators(solution + [tower.base_field.one])
            coefficients = {m + 2: p for m, p in enumerate(polys)}
            if not forms.combination(coefficients).is_zero():
                raise TowerError(f"ansatz solution for {print_expr(f)} failed re-substitution")
            qde = qde_from_coefficients(coefficients, params)
            logger.info(f"QDE of order {qde.order} (index {qde.leading_index}) for {print_expr(f)}: {qde}")
            return qde
        n += 1
    raise QDENotFoundError(print_expr(f), max_index)


def verify_qde(f: Expr, q: QDE, params: Iterable[str] = ()) -> bool:
    """Substitute f into q and decide whether the result is exactly zero"""
    try:
        forms = _forms(f, set(params) | set(q.params))
        residual = forms.combination({t.monomial.index: t.coefficient for t in q.terms})
    except TowerError as exc:
        raise IndeterminateVerificationError(f"cannot decide {q} for {print_expr(f)}: {exc}") from exc
    return residual.is_zero()
