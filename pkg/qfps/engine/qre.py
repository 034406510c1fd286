"""
Quadratic recurrence equations for series coefficients

Rewrite rules, for the coefficient stream y = sum a_n z^n:

    z^p * y^(j)          ->  (n+1-p)_j * a[n+j-p]
    z^p * y^(i) * y^(j)  ->  sum_{k=0}^{n-p} (k+1)_i (n-p-k+1)_j a[k+i] a[n-p-k+j]

The recurrence holds for every n >= 0 with a[m] = 0 for m < 0.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyRing

from qfps.engine.errors import InsufficientPrefixError
from qfps.engine.expr import (
    ONE, RECURRENCE_INDEX, Add, Expr, Param, Rat, add, const, mul, neg,
)
from qfps.engine.field import (
    MPoly, factored_expr, pochhammer, poly_to_expr, polynomial_ring, value_at,
)
from qfps.engine.printer import is_negative_term, latex_expr, print_expr
from qfps.engine.qde import QDE, Linear

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvolutionTerm:
    """coefficient * sum_{k=0}^{n-p} (k+1)_i (n-p-k+1)_j a[k+i] a[n-p-k+j], i >= j"""
    coefficient: MPoly
    i: int
    j: int
    p: int

    @property
    def offset(self) -> int:
        return max(self.i, self.j) - self.p


@dataclass(frozen=True)
class LinearForm:
    """gamma * x^2 + alpha * x + beta = 0 for x = a[index]"""
    index: int
    alpha: "Rat"
    beta: "Rat"
    gamma: "Rat" = QQ.zero

    @property
    def is_linear(self) -> bool:
        return self.gamma == 0

    def solve(self) -> Optional["Rat"]:
        """The unknown when the equation is linear with alpha != 0"""
        if self.gamma != 0 or self.alpha == 0:
            return None
        return -self.beta / self.alpha

    def is_satisfied_by(self, x: "Rat") -> bool:
        return self.gamma * x * x + self.alpha * x + self.beta == 0


@dataclass(frozen=True)
class QRE:
    """sum of linear[s](n) * a[n+s] + convolution terms = 0"""
    linear: Tuple[Tuple[int, MPoly], ...]
    convolutions: Tuple[ConvolutionTerm, ...]
    params: Tuple[str, ...] = ()

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.params, variable=RECURRENCE_INDEX)

    def max_offset(self) -> int:
        """M: the highest index is a[n+M]"""
        offsets = [s for s, _ in self.linear] + [c.offset for c in self.convolutions]
        return max(offsets)

    def linear_coefficient(self, shift: int) -> MPoly:
        for s, poly in self.linear:
            if s == shift:
                return poly
        return self.ring.zero

    def contributions(self, n: int):
        """(weight, indices) for every summand at n; indices has one or two entries"""
        for shift, poly in self.linear:
            m = n + shift
            if m >= 0:
                weight = value_at(poly, n)
                if weight:
                    yield weight, (m,)
        for term in self.convolutions:
            c = value_at(term.coefficient, n)
            if not c:
                continue
            for k in range(n - term.p + 1):
                weight = c * pochhammer(QQ(k + 1), term.i) * pochhammer(QQ(n - term.p - k + 1), term.j)
                if weight:
                    yield weight, (k + term.i, n - term.p - k + term.j)

    def residual(self, coeffs: Sequence["Rat"], n: int) -> "Rat":
        """Left-hand side at n with every coefficient known"""
        total = QQ.zero
        for weight, indices in self.contributions(n):
            if max(indices) >= len(coeffs):
                raise InsufficientPrefixError(max(indices) + 1, len(coeffs))
            term = weight
            for m in indices:
                term *= coeffs[m]
            total += term
        return total

    def __str__(self) -> str:
        return render_qre(self, latex=False)

    def latex(self) -> str:
        return render_qre(self, latex=True)


def qde_to_qre(q: QDE) -> QRE:
    """Apply the rewrite rules to every monomial z^p * (params) of every coefficient"""
    ring = polynomial_ring(q.params, variable=RECURRENCE_INDEX)
    n = ring.gens[0]
    linear: Dict[int, MPoly] = {}
    convolutions: Dict[Tuple[int, int, int], MPoly] = {}
    for term in q.terms:
        for monom, coeff in term.coefficient.terms():
            p, rest = monom[0], monom[1:]
            c = ring.from_dict({(0,) + tuple(rest): coeff})
            m = term.monomial
            if isinstance(m, Linear):
                shift = m.order - p
                linear[shift] = linear.get(shift, ring.zero) + c * pochhammer(n + 1 - p, m.order)
            else:
                key = (m.first, m.second, p)
                convolutions[key] = convolutions.get(key, ring.zero) + c
    qre = QRE(
        tuple((s, poly) for s, poly in sorted(linear.items(), reverse=True) if poly),
        tuple(
            ConvolutionTerm(c, i, j, p)
            for (i, j, p), c in sorted(convolutions.items(), reverse=True) if c
        ),
        q.params,
    )
    logger.debug(f"QRE from {q}: {qre}")
    return qre


def evaluate_qre(r: QRE, coeffs: Sequence["Rat"], n: int) -> LinearForm:
    """The recurrence at n as an equation in its highest-index coefficient.

    Raises InsufficientPrefixError when a coefficient below that index is unknown.
    """
    contributions = list(r.contributions(n))
    if not contributions:
        return LinearForm(-1, QQ.zero, QQ.zero)
    top = max(max(indices) for _, indices in contributions)
    if top > len(coeffs):
        raise InsufficientPrefixError(top, len(coeffs))
    alpha = beta = gamma = QQ.zero
    for weight, indices in contributions:
        unknown = [m for m in indices if m == top]
        known = QQ.one
        for m in indices:
            if m != top:
                known *= coeffs[m]
        if len(unknown) == 2:
            gamma += weight
        elif unknown:
            alpha += weight * known
        else:
            beta += weight * known
    return LinearForm(top, alpha, beta, gamma)


# Rendering

def dummy_name(params: Sequence[str]) -> str:
    """Summation variable not clashing with a parameter"""
    for candidate in ("k", "m", "l", "i"):
        if candidate not in params:
            return candidate
    return "k_"


def _index(e: Expr) -> str:
    return print_expr(e)


def _factor(e: Expr, latex: bool) -> str:
    text = latex_expr(e) if latex else print_expr(e)
    if len(getattr(e, "terms", ())) > 1:
        return rf"\left({text}\right)" if latex else f"({text})"
    return text


def _coefficient_prefix(coefficient: MPoly, latex: bool) -> Tuple[bool, str]:
    """(negative, text) for a scalar multiplying a sum"""
    e = factored_expr(coefficient)
    negative = is_negative_term(e)
    if negative:
        e = neg(e)
    if e == ONE:
        return negative, ""
    text = latex_expr(e) if latex else print_expr(e)
    if isinstance(e, Add):
        text = rf"\left({text}\right)" if latex else f"({text})"
    return negative, text + (r" \, " if latex else "*")


def convolution_text(
    term: ConvolutionTerm, k: str, latex: bool, lower: int = 0, upper_offset: Optional[int] = None,
) -> Tuple[bool, str]:
    """sum over k = lower .. n + upper_offset (upper_offset defaults to -p)"""
    N, K = Param(RECURRENCE_INDEX), Param(k)
    factors = [_factor(add(K, m), latex) for m in range(1, term.i + 1)]
    factors += [_factor(add(N, neg(K), const(m - term.p)), latex) for m in range(1, term.j + 1)]
    first = _index(add(K, term.i))
    second = _index(add(N, neg(K), const(term.j - term.p)))
    upper = add(N, const(-term.p if upper_offset is None else upper_offset))
    negative, prefix = _coefficient_prefix(term.coefficient, latex)
    if latex:
        body = r" \, ".join(factors + [f"a_{{{first}}}", f"a_{{{second}}}"])
        text = rf"{prefix}\sum_{{{k}={lower}}}^{{{latex_expr(upper)}}} {body}"
    else:
        body = "*".join(factors + [f"a[{first}]", f"a[{second}]"])
        text = f"{prefix}sum({body}, {k} = {lower} .. {print_expr(upper)})"
    return negative, text


def linear_text(shift: int, poly: MPoly, latex: bool) -> Tuple[bool, str]:
    index = _index(add(Param(RECURRENCE_INDEX), shift))
    a = Param(f"a_{{{index}}}" if latex else f"a[{index}]")
    e = mul(factored_expr(poly), a)
    negative = is_negative_term(e)
    if negative:
        e = neg(e)
    return negative, latex_expr(e) if latex else print_expr(e)


def join_signed(parts: Sequence[Tuple[bool, str]]) -> str:
    """Join (negative, text) summands with explicit signs"""
    out: List[str] = []
    for position, (negative, text) in enumerate(parts):
        if position == 0:
            out.append(("-" if negative else "") + text)
        else:
            out.append((" - " if negative else " + ") + text)
    return "".join(out)


def render_qre(r: QRE, latex: bool = False) -> str:
    k = dummy_name(r.params)
    parts = [linear_text(s, poly, latex) for s, poly in r.linear]
    parts += [convolution_text(c, k, latex) for c in r.convolutions]
    return join_signed(parts) + " = 0"


def qre_to_dict(r: QRE) -> dict:
    """Plain JSON-ready structure"""
    return {
        "linear_terms": [
            {"shift": s, "coefficient": print_expr(poly_to_expr(poly))} for s, poly in r.linear
        ],
        "convolution_terms": [
            {
                "coefficient": print_expr(poly_to_expr(c.coefficient)),
                "i": c.i,
                "j": c.j,
                "p": c.p,
            }
            for c in r.convolutions
        ],
        "max_offset": r.max_offset(),
        "text": render_qre(r),
    }
