"""
Normal forms of delta_2-finite power series

A representation writes f = sum_{n>=0} a_n z^(n+shift) with

    a[n + L] = -(sum_s c_s(n) a[n+s] + convolution remainders) / d(n)    for n >= n0

and the initial values a_0 .. a_{m-1}, m = n0 + L. The recurrence is read off
the QRE: every convolution summand whose index reaches n + L is peeled off and
its partner coefficient, a fixed low-index value, substituted.
"""
from dataclasses import dataclass
from enum import Enum
from math import comb, factorial
from typing import List, Optional, Sequence, Tuple
import logging

from sympy.polys.domains import QQ

from qfps.config import settings
from qfps.engine.errors import (
    DomainError, InsufficientPrefixError, ParameterError, QDENotFoundError, QFPSError,
    RepresentationError, SeriesError, SeriesVanishesError, TowerError,
)
from qfps.engine.expr import (
    RECURRENCE_INDEX, Expr, Param, Rat, add, format_rat, mul, power, sub, z,
)
from qfps.engine.field import MPoly, factored_expr, pochhammer, value_at
from qfps.engine.printer import latex_expr, print_expr
from qfps.engine.qde import QDE, find_qde
from qfps.engine.qre import (
    QRE, ConvolutionTerm, convolution_text, dummy_name, evaluate_qre, join_signed, linear_text,
    qde_to_qre, render_qre,
)
from qfps.engine.series import TruncSeries, series_of, valuation

logger = logging.getLogger(__name__)

PREFIX_SLACK = 8
PREFIX_ATTEMPTS = 6


@dataclass(frozen=True)
class QuadraticChoice:
    """At n the recurrence is quadratic in a[index]; the series picks `value`"""
    n: int
    index: int
    value: "Rat"
    alternative: "Rat"


@dataclass(frozen=True)
class ConvolutionRemainder:
    """The summands k = lower .. n + upper_offset left after peeling"""
    term: ConvolutionTerm
    lower: int
    upper_offset: int


def _at(poly: MPoly, n: int) -> "Rat":
    return value_at(poly, n)


def _coefficient(values: Sequence["Rat"], index: int) -> "Rat":
    return values[index] if index >= 0 else QQ.zero


@dataclass(frozen=True)
class SolvedRecurrence:
    """The QRE solved for a[n + lead]; implicit when no index could be isolated"""
    qre: QRE
    lead: int
    denominator: Optional[MPoly]
    linear: Tuple[Tuple[int, MPoly], ...]
    convolutions: Tuple[ConvolutionRemainder, ...]
    initial_values: Tuple["Rat", ...]
    valid_from: int
    quadratic_choices: Tuple[QuadraticChoice, ...] = ()

    @property
    def is_implicit(self) -> bool:
        return self.denominator is None

    def next_value(self, values: Sequence["Rat"]) -> "Rat":
        """a[len(values)] from all lower coefficients"""
        if self.is_implicit:
            value = _determine(self.qre, values)
            if value is None:
                raise RepresentationError(f"a[{len(values)}] is not determined by the recurrence")
            return value
        n = len(values) - self.lead
        if n < self.valid_from:
            raise RepresentationError(f"recurrence used at n = {n} below its threshold {self.valid_from}")
        total = QQ.zero
        for shift, poly in self.linear:
            total += _at(poly, n) * _coefficient(values, n + shift)
        for rem in self.convolutions:
            t = rem.term
            c = _at(t.coefficient, n)
            if not c:
                continue
            for k in range(rem.lower, n + rem.upper_offset + 1):
                total += (
                    c * pochhammer(QQ(k + 1), t.i) * pochhammer(QQ(n - t.p - k + 1), t.j)
                    * values[k + t.i] * values[n - t.p - k + t.j]
                )
        return -total / _at(self.denominator, n)

    def coefficients(self, count: int) -> List["Rat"]:
        values = list(self.initial_values[:count])
        while len(values) < count:
            values.append(self.next_value(values))
        return values

    def render(self, latex: bool = False) -> str:
        if self.is_implicit:
            return render_qre(self.qre, latex)
        index = print_expr(add(Param(RECURRENCE_INDEX), self.lead))
        lhs = f"a_{{{index}}}" if latex else f"a[{index}]"
        k = dummy_name(self.qre.params)
        parts = [linear_text(s, poly, latex) for s, poly in self.linear]
        parts += [
            convolution_text(rem.term, k, latex, rem.lower, rem.upper_offset)
            for rem in self.convolutions
        ]
        if not parts:
            return f"{lhs} = 0"
        numerator = join_signed(parts)
        den = factored_expr(self.denominator)
        if self.denominator == 1:
            return rf"{lhs} = -\left({numerator}\right)" if latex else f"{lhs} = -({numerator})"
        if latex:
            return rf"{lhs} = -\frac{{{numerator}}}{{{latex_expr(den)}}}"
        den_text = print_expr(den)
        if not den_text.replace("_", "").isalnum():
            den_text = f"({den_text})"
        return f"{lhs} = -({numerator})/{den_text}"

    def __str__(self) -> str:
        return self.render()


def _known(prefix: Sequence["Rat"], index: int) -> "Rat":
    if index >= len(prefix):
        raise InsufficientPrefixError(index + 1, len(prefix))
    return prefix[index]


def _boundary(term: ConvolutionTerm, lead: int, prefix: Sequence["Rat"], n: MPoly,
              bounds: List[int]) -> MPoly:
    """Coefficient of a[n + lead] contributed by the summands of `term` reaching that index"""
    i, j, p = term.i, term.j, term.p
    q = i + j - p - lead
    total = n.ring.zero
    if i - p >= lead:
        # k = n + lead - i, partner a[q]
        total += (
            term.coefficient * pochhammer(n + lead - i + 1, i)
            * pochhammer(QQ(i - p - lead + 1), j) * _known(prefix, q)
        )
        bounds += [i - lead, q - lead + 1]
    if j - p >= lead:
        # k = j - p - lead, partner a[q]
        total += (
            term.coefficient * pochhammer(QQ(j - p - lead + 1), i)
            * pochhammer(n + lead - j + 1, j) * _known(prefix, q)
        )
        bounds += [j - lead, q - lead + 1]
    return total


def _largest_root(den: MPoly) -> Optional[int]:
    """Largest nonnegative integer root of a univariate polynomial"""
    _, factors = den.factor_list()
    roots = []
    for factor, _ in factors:
        if factor.degree() != 1:
            continue
        terms = dict(factor.terms())
        root = -terms.get((0,), QQ.zero) / terms[(1,)]
        if root.denominator == 1 and root >= 0:
            roots.append(int(root.numerator))
    return max(roots) if roots else None


def _normalize(den: MPoly, linear, convolutions):
    """Make the denominator monic"""
    scale = QQ.one / den.LC
    return (
        den * scale,
        tuple((s, poly * scale) for s, poly in linear),
        tuple(
            ConvolutionRemainder(
                ConvolutionTerm(rem.term.coefficient * scale, rem.term.i, rem.term.j, rem.term.p),
                rem.lower,
                rem.upper_offset,
            )
            for rem in convolutions
        ),
    )


def _initial_segment(r: QRE, values: Sequence["Rat"]) -> Tuple[QuadraticChoice, ...]:
    """Check every equation that only involves known values and record quadratic ones"""
    choices = []
    for n in range(len(values)):
        try:
            form = evaluate_qre(r, values, n)
        except InsufficientPrefixError:
            break
        if not 0 <= form.index < len(values):
            continue
        value = values[form.index]
        if not form.is_satisfied_by(value):
            raise RepresentationError(f"initial values violate the recurrence at n = {n}")
        if not form.is_linear:
            choices.append(QuadraticChoice(n, form.index, value, -form.alpha / form.gamma - value))
    return tuple(choices)


def _lowest_offset(r: QRE) -> int:
    return min([s for s, _ in r.linear] + [c.j - c.p for c in r.convolutions], default=0)


def _lowest_lead(r: QRE, prefix: Sequence["Rat"]) -> int:
    """Deepest index a[n + lead] worth peeling down to before giving up"""
    first = next((k for k, a in enumerate(prefix) if a), 0)
    return min(_lowest_offset(r), 0) - first - settings.CHECK_DEPTH


def _determine(r: QRE, values: Sequence["Rat"]) -> Optional["Rat"]:
    """a[len(values)] from the first equation that is linear in it, if any"""
    m = len(values)
    lowest = _lowest_offset(r)
    for n in range(max(m - lowest, 0) + 2):
        try:
            form = evaluate_qre(r, values, n)
        except InsufficientPrefixError:
            break
        if form.index == m:
            value = form.solve()
            if value is not None:
                return value
    return None


def _implicit(r: QRE, prefix: Sequence["Rat"]) -> SolvedRecurrence:
    depth = settings.CHECK_DEPTH + 1
    if len(prefix) < depth:
        raise InsufficientPrefixError(depth, len(prefix))
    m = 0
    for index in range(depth):
        if _determine(r, prefix[:index]) is None:
            m = index + 1
    values = tuple(prefix[:m])
    logger.warning(f"no index of {r} can be isolated, keeping it implicit with {m} initial values")
    return SolvedRecurrence(
        qre=r, lead=r.max_offset(), denominator=None, linear=(), convolutions=(),
        initial_values=values, valid_from=0, quadratic_choices=_initial_segment(r, values),
    )


def _check_unrolling(recurrence: SolvedRecurrence, prefix: Sequence["Rat"]) -> None:
    count = max(settings.CHECK_DEPTH, len(recurrence.initial_values)) + 1
    if len(prefix) < count:
        raise InsufficientPrefixError(count, len(prefix))
    for index, (got, expected) in enumerate(zip(recurrence.coefficients(count), prefix)):
        if got != expected:
            raise RepresentationError(
                f"unrolled a[{index}] = {format_rat(got)} differs from the series value {format_rat(expected)}"
            )


def solve_recurrence(r: QRE, prefix: Sequence["Rat"], initial_values: Optional[int] = None) -> SolvedRecurrence:
    """
    Solve the QRE for its highest index that has a nonvanishing coefficient

    Args:
        r: recurrence without parameters
        prefix: a_0, a_1, ... of the series, used for the peeled partners and
            the initial values, and to check the result
        initial_values: keep at least this many initial values

    Raises:
        InsufficientPrefixError: prefix too short; retry with a longer one
        RepresentationError: the result disagrees with the prefix
    """
    if r.params:
        raise ParameterError("a recurrence with parameters cannot be solved numerically")
    M = r.max_offset()
    n = r.ring.gens[0]
    bounds = [0]
    floor = _lowest_lead(r, prefix)
    t = 0
    while True:
        lead = M - t
        den = r.linear_coefficient(lead)
        for term in r.convolutions:
            den += _boundary(term, lead, prefix, n, bounds)
        if den:
            break
        t += 1
        if M - t < floor:
            recurrence = _implicit(r, prefix)
            _check_unrolling(recurrence, prefix)
            return recurrence

    bounds.append(-lead)
    root = _largest_root(den)
    if root is not None:
        bounds.append(root + 1)
    if initial_values is not None:
        bounds.append(initial_values - lead)
    n0 = max(bounds)
    m = n0 + lead
    if m > len(prefix):
        raise InsufficientPrefixError(m, len(prefix))
    values = tuple(prefix[:m])

    linear = tuple((s, poly) for s, poly in r.linear if s < lead)
    remainders = tuple(
        ConvolutionRemainder(term, max(0, term.j - term.p - lead + 1), min(-term.p, lead - term.i - 1))
        for term in r.convolutions
    )
    den, linear, remainders = _normalize(den, linear, remainders)
    recurrence = SolvedRecurrence(
        qre=r, lead=lead, denominator=den, linear=linear, convolutions=remainders,
        initial_values=values, valid_from=n0, quadratic_choices=_initial_segment(r, values),
    )
    _check_unrolling(recurrence, prefix)
    logger.debug(f"solved {r} as {recurrence} for n >= {n0}")
    return recurrence


@dataclass(frozen=True)
class SeriesRep:
    """f = sum_{n>=0} a_n z^(n+shift) as a solved recurrence plus initial values

    The shift is the pole order at z = 0 (0 for power series); `valuation` is
    the exponent of the first nonzero coefficient, None when none was found.
    """
    expr: Expr
    shift: int
    qde: QDE
    recurrence: SolvedRecurrence
    valuation: Optional[int] = None
    proven_zero: bool = False

    @property
    def qre(self) -> QRE:
        return self.recurrence.qre

    @property
    def initial_values(self) -> Tuple["Rat", ...]:
        return self.recurrence.initial_values

    @property
    def valid_from(self) -> int:
        return self.recurrence.valid_from

    @property
    def quadratic_choices(self) -> Tuple[QuadraticChoice, ...]:
        return self.recurrence.quadratic_choices

    @property
    def is_implicit(self) -> bool:
        return self.recurrence.is_implicit

    @property
    def induction_bound(self) -> Optional[int]:
        """n from which the vanishing of every coefficient follows by induction"""
        return self.valid_from if self.proven_zero else None

    def coefficients(self, count: int) -> List["Rat"]:
        """a_0 .. a_{count-1}"""
        return self.recurrence.coefficients(count)

    def signature(self) -> tuple:
        return self.shift, str(self.qde), str(self.recurrence), self.initial_values

    def series_text(self, latex: bool = False) -> str:
        monomial = power(z, add(Param(RECURRENCE_INDEX), self.shift))
        if latex:
            return rf"\sum_{{n=0}}^{{\infty}} a_{{n}} {latex_expr(monomial)}"
        return f"sum(a[n]*{print_expr(monomial)}, n = 0 .. infinity)"

    def lines(self) -> List[str]:
        condition = "implicit" if self.is_implicit else f"n >= {self.valid_from}"
        out = [
            f"{print_expr(self.expr)} = {self.series_text()}",
            f"{self.recurrence}  ({condition})",
        ]
        out += [f"a[{m}] = {format_rat(v)}" for m, v in enumerate(self.initial_values)]
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def fps(f: Expr, max_index: Optional[int] = None, initial_values: Optional[int] = None) -> SeriesRep:
    """Normal form of f"""
    if f.params:
        raise ParameterError(f"parameters {sorted(f.params)} are not allowed in a series representation")
    try:
        v = valuation(f)
    except SeriesVanishesError:
        v = None
    shift = min(v, 0) if v is not None else 0
    g = mul(power(z, -shift), f)
    qde = find_qde(g, max_index)
    qre = qde_to_qre(qde)

    length = settings.CHECK_DEPTH + 1 + PREFIX_SLACK
    for _ in range(PREFIX_ATTEMPTS):
        prefix = series_of(f, shift + length - 1).coefficients(shift, length)
        try:
            recurrence = solve_recurrence(qre, prefix, initial_values)
            break
        except InsufficientPrefixError as exc:
            logger.debug(f"prefix of {length} coefficients too short ({exc})")
            length = max(2 * length, exc.needed + 1)
    else:
        raise RepresentationError(f"no recurrence prefix long enough for {print_expr(f)}")

    proven_zero = v is None and not recurrence.is_implicit and not any(recurrence.initial_values)
    rep = SeriesRep(f, shift, qde, recurrence, v, proven_zero)
    logger.info(
        f"representation of {print_expr(f)}: shift {shift}, {len(rep.initial_values)} initial values, "
        f"valid from n = {rep.valid_from}"
    )
    return rep


def qtaylor(f: Expr, order: int, max_index: Optional[int] = None) -> TruncSeries:
    """Truncated expansion through z^order by unrolling the representation"""
    rep = fps(f, max_index)
    count = max(order - rep.shift + 1, 0)
    result = TruncSeries.from_coefficients(rep.shift, rep.coefficients(count), order)
    expected = series_of(f, order)
    if result != expected:
        raise RepresentationError(f"unrolled expansion of {print_expr(f)} disagrees with the series oracle")
    return result


# Identities

class VerdictKind(str, Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Witness:
    """Coefficient of z^exponent on both sides"""
    exponent: int
    left: Optional["Rat"]
    right: Optional["Rat"]


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    reason: str
    witness: Optional[Witness] = None
    certificate: Optional[SeriesRep] = None


def _coefficient_of(e: Expr, exponent: int) -> Optional["Rat"]:
    try:
        return series_of(e, exponent).coefficient(exponent)
    except SeriesError:
        return None


def _not_equal(a: Expr, b: Expr, exponent: int, reason: str) -> Verdict:
    witness = Witness(exponent, _coefficient_of(a, exponent), _coefficient_of(b, exponent))
    return Verdict(VerdictKind.NOT_EQUAL, reason, witness=witness)


def _prove_with_parameters(h: Expr, max_index: Optional[int]) -> Verdict:
    try:
        qde = find_qde(h, max_index)
    except (QDENotFoundError, TowerError) as exc:
        return Verdict(VerdictKind.UNDECIDED, f"no normal form for the difference: {exc}")
    if qde.leading_index == 2:
        return Verdict(VerdictKind.EQUAL, "the difference is zero in the differential tower")
    return Verdict(VerdictKind.UNDECIDED, f"parametric difference satisfies {qde}, not y = 0")


def _compare_normal_forms(a: Expr, b: Expr, max_index: Optional[int], cause: Exception) -> Verdict:
    try:
        left, right = fps(a, max_index), fps(b, max_index)
    except QFPSError as exc:
        return Verdict(VerdictKind.UNDECIDED, f"{cause}; no normal forms either: {exc}")
    if left.signature() == right.signature():
        return Verdict(VerdictKind.EQUAL, "both sides have the same normal form", certificate=left)
    return Verdict(VerdictKind.UNDECIDED, f"{cause}; the normal forms of both sides differ")


def prove(a: Expr, b: Expr, max_index: Optional[int] = None) -> Verdict:
    """Decide a = b through the normal form of a - b"""
    h = sub(a, b)
    if h.params:
        verdict = _prove_with_parameters(h, max_index)
        logger.info(f"prove {print_expr(a)} = {print_expr(b)}: {verdict.kind.value}")
        return verdict

    try:
        v = valuation(h)
    except SeriesVanishesError:
        v = None
    except SeriesError as exc:
        return Verdict(VerdictKind.UNDECIDED, f"series expansion failed: {exc}")
    if v is not None:
        verdict = _not_equal(a, b, v, f"the coefficient of z^{v} of the difference is nonzero")
        logger.info(f"prove {print_expr(a)} = {print_expr(b)}: not equal at z^{v}")
        return verdict

    try:
        rep = fps(h, max_index)
    except (QDENotFoundError, TowerError, RepresentationError) as exc:
        verdict = _compare_normal_forms(a, b, max_index, exc)
    except QFPSError as exc:
        verdict = Verdict(VerdictKind.UNDECIDED, str(exc))
    else:
        verdict = _from_difference(a, b, rep)
    logger.info(f"prove {print_expr(a)} = {print_expr(b)}: {verdict.kind.value}")
    return verdict


def _from_difference(a: Expr, b: Expr, rep: SeriesRep) -> Verdict:
    if rep.proven_zero:
        return Verdict(
            VerdictKind.EQUAL,
            f"{rep.qde} with {len(rep.initial_values)} zero initial values forces every coefficient to vanish",
            certificate=rep,
        )
    for index, value in enumerate(rep.initial_values):
        if value:
            exponent = index + rep.shift
            return _not_equal(a, b, exponent, f"initial value a[{index}] of the difference is nonzero")
    return Verdict(VerdictKind.UNDECIDED, "implicit representation of the difference")


# Bernoulli numbers

def bernoulli_numbers(count: int) -> List["Rat"]:
    """B_0 .. B_{count-1} from sum_{k=0}^{m} binomial(m+1, k) B_k = 0"""
    numbers: List["Rat"] = []
    for m in range(count):
        if m == 0:
            numbers.append(QQ.one)
            continue
        total = sum((comb(m + 1, k) * numbers[k] for k in range(m)), QQ.zero)
        numbers.append(-total / (m + 1))
    return numbers


def bernoulli_from_representation(rep: SeriesRep, count: int) -> List["Rat"]:
    """n! a_n, the Bernoulli numbers when rep is the representation of z/(exp(z) - 1)"""
    return [factorial(n) * a for n, a in enumerate(rep.coefficients(count))]


def ramanujan_convolution(bernoulli: Sequence["Rat"], n: int) -> "Rat":
    """-(1/(2n+3)) sum_{k=1}^{n} binomial(2n+2, 2k) B_{2k} B_{2n+2-2k}, which is B_{2n+2} for n >= 1"""
    if n < 1:
        raise DomainError(f"the convolution identity starts at n = 1, got {n}")
    total = sum(
        (comb(2 * n + 2, 2 * k) * bernoulli[2 * k] * bernoulli[2 * n + 2 - 2 * k] for k in range(1, n + 1)),
        QQ.zero,
    )
    return -total / (2 * n + 3)
