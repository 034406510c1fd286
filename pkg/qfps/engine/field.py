"""
Exact arithmetic over Q[z, params] and its fraction field

Polynomials are sympy ``PolyElement``s (MPoly), rational functions are
``FracElement``s (RatFunc), rationals are ``QQ`` elements (Rat).
"""
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from qfps.config import settings
from qfps.engine.errors import DomainError, ParameterError
from qfps.engine.expr import (
    Const, Expr, Param, Rat, SERIES_VARIABLE, add, mul, power, z,
)

logger = logging.getLogger(__name__)

MPoly = PolyElement
RatFunc = FracElement


def polynomial_ring(params: Iterable[str] = (), variable: str = SERIES_VARIABLE) -> PolyRing:
    """Q[variable, params...] with lex order, variable first and params sorted"""
    return PolyRing([variable, *sorted(params)], QQ, lex)


def fraction_field(ring: PolyRing) -> FracField:
    return ring.to_field()


def pochhammer(x, k: int):
    """Rising factorial (x)_k = x (x+1) ... (x+k-1); (x)_0 = 1"""
    if k < 0:
        raise DomainError(f"pochhammer order must be non-negative, got {k}")
    if isinstance(x, PolyElement):
        result = x.ring.one
    elif isinstance(x, FracElement):
        result = x.field.one
    else:
        result = QQ.one if not isinstance(x, int) else 1
    for i in range(k):
        result = result * (x + i)
    return result


def total_degree(p: MPoly) -> int:
    if not p:
        return -1
    return max(sum(monom) for monom in p.monoms())


def _to_poly_row(row: Sequence[RatFunc], rhs: RatFunc) -> List[MPoly]:
    """Clear the denominators of one augmented row"""
    entries = list(row) + [rhs]
    common = reduce(lambda acc, e: acc.lcm(e.denom), entries, entries[0].denom.ring.one)
    return [e.numer * common.exquo(e.denom) for e in entries]


def solve_linear(
    A: Sequence[Sequence[RatFunc]],
    b: Sequence[RatFunc],
    field: FracField,
    ncols: Optional[int] = None,
) -> Optional[List[RatFunc]]:
    """
    Solve A x = b over a fraction field by fraction-free (Bareiss) elimination

    Pivots are chosen by smallest total degree, ties by row order; free
    unknowns are set to 0.

    Returns:
        One solution, or None when the system is inconsistent
    """
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    m = len(A)
    if m == 0:
        return [field.zero] * n
    M = [_to_poly_row([field(e) for e in A[i]], field(b[i])) for i in range(m)]
    ring = M[0][0].ring
    previous = ring.one
    pivots: List[int] = []
    r = 0
    for c in range(n):
        candidates = [i for i in range(r, m) if M[i][c]]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (total_degree(M[i][c]), i))
        M[r], M[p] = M[p], M[r]
        pivot = M[r][c]
        for i in range(r + 1, m):
            factor = M[i][c]
            for j in range(c + 1, n + 1):
                M[i][j] = (pivot * M[i][j] - factor * M[r][j]).exquo(previous)
            M[i][c] = ring.zero
        previous = pivot
        pivots.append(c)
        r += 1
        if r == m:
            break

    for i in range(r, m):
        if M[i][n]:
            return None

    x = [field.zero] * n
    for k in reversed(range(r)):
        c = pivots[k]
        s = field(M[k][n])
        for j in range(c + 1, n):
            if M[k][j] and x[j]:
                s -= field(M[k][j]) * x[j]
        x[c] = s / field(M[k][c])

    if settings.VERIFY_SOLUTIONS:
        for i in range(m):
            lhs = sum((field(A[i][j]) * x[j] for j in range(n)), field.zero)
            if lhs != field(b[i]):
                raise ArithmeticError("linear solution failed re-substitution")
    return x


def primitive_part(p: MPoly) -> Tuple["Rat", MPoly]:
    """p = c * q with q having coprime integer coefficients and a positive leading one"""
    if not p:
        return QQ.one, p
    content, q = p.primitive()
    if q.LC < 0:
        content, q = -content, -q
    return content, q


def normalize_coefficients(polys: Sequence[MPoly], leading: int) -> List[MPoly]:
    """Divide by the polynomial gcd and the integer content; polys[leading] gets a positive
    leading coefficient"""
    nonzero = [p for p in polys if p]
    if not nonzero:
        return list(polys)
    g = reduce(lambda acc, p: acc.gcd(p), nonzero[1:], nonzero[0])
    reduced = [p.exquo(g) if p else p for p in polys]
    content = reduce(QQ.gcd, (p.content() for p in reduced if p), QQ.zero)
    scaled = [p.quo_ground(content) for p in reduced]
    lead = scaled[leading] if scaled[leading] else next(p for p in scaled if p)
    if lead.LC < 0:
        scaled = [-p for p in scaled]
    return scaled


def poly_to_expr(p: MPoly, rename: Optional[Dict[str, str]] = None) -> Expr:
    """Expand p into an expression tree, highest monomial first"""
    rename = rename or {}
    names = [rename.get(str(s), str(s)) for s in p.ring.symbols]
    symbols = [z if name == SERIES_VARIABLE else Param(name) for name in names]
    terms = []
    for monom, coeff in p.terms():
        factors = [power(sym, e) for sym, e in zip(symbols, monom) if e]
        terms.append(mul(Const(coeff), *factors))
    return add(*terms)


def factored_expr(p: MPoly, rename: Optional[Dict[str, str]] = None) -> Expr:
    """p as a product of irreducible factors (display only)"""
    if not p or p.is_ground:
        return poly_to_expr(p, rename)
    coeff, factors = p.factor_list()
    parts = [power(poly_to_expr(f, rename), mult) for f, mult in factors]
    return mul(Const(coeff), *parts)


def value_at(p: MPoly, value: Union[int, "Rat"]) -> "Rat":
    """p at its first generator = value; no other generator may occur"""
    result = p.evaluate(p.ring.gens[0], value)
    if p.ring.ngens == 1:
        return result
    if not result.is_ground:
        raise ParameterError(f"{p} depends on parameters")
    return result.const()
