"""
Series services - orchestrate the engine and build the output documents
"""
from typing import Iterable, List, Optional, Tuple
import logging

from qfps.config import settings
from qfps.engine.errors import IndeterminateVerificationError
from qfps.engine.expr import Const, Expr, format_rat
from qfps.engine.field import MPoly, poly_to_expr
from qfps.engine.parser import parse
from qfps.engine.printer import latex_expr, print_expr
from qfps.engine.qde import QDE, Delta2Index, Linear, delta2, find_qde, verify_qde
from qfps.engine.qre import QRE, qde_to_qre
from qfps.engine.rep import SeriesRep, SolvedRecurrence, Verdict, VerdictKind, fps, prove, qtaylor
from qfps.engine.series import series_of
from qfps.models.schemas import (
    CoefficientDocument,
    ConvolutionTermDocument,
    Delta2Document,
    Document,
    LinearTermDocument,
    OutputFormat,
    QDEDocument,
    QDETermDocument,
    QREDocument,
    QuadraticChoiceDocument,
    RecurrenceDocument,
    SeriesRepDocument,
    TruncSeriesDocument,
    VerdictDocument,
    WitnessDocument,
)

logger = logging.getLogger(__name__)


def _poly_text(poly: MPoly) -> str:
    return print_expr(poly_to_expr(poly))


def _monomial_text(qde: QDE, monomial) -> str:
    y = qde.unknown

    def name(order: int) -> str:
        return y if order == 0 else f"{y}{order}"

    if isinstance(monomial, Linear):
        return name(monomial.order)
    if monomial.first == monomial.second:
        return f"{name(monomial.first)}^2"
    return f"{name(monomial.second)}*{name(monomial.first)}"


def _linear_terms(terms: Iterable[Tuple[int, MPoly]]) -> List[LinearTermDocument]:
    return [LinearTermDocument(shift=s, coefficient=_poly_text(poly)) for s, poly in terms]


def _recurrence_document(recurrence: SolvedRecurrence) -> RecurrenceDocument:
    if recurrence.is_implicit:
        qre = recurrence.qre
        linear = _linear_terms(qre.linear)
        convolutions = [
            ConvolutionTermDocument(coefficient=_poly_text(t.coefficient), i=t.i, j=t.j, p=t.p, upper_offset=-t.p)
            for t in qre.convolutions
        ]
        denominator = None
    else:
        linear = _linear_terms(recurrence.linear)
        convolutions = [
            ConvolutionTermDocument(
                coefficient=_poly_text(rem.term.coefficient),
                i=rem.term.i,
                j=rem.term.j,
                p=rem.term.p,
                lower=rem.lower,
                upper_offset=rem.upper_offset,
            )
            for rem in recurrence.convolutions
        ]
        denominator = _poly_text(recurrence.denominator)
    return RecurrenceDocument(
        lhs_index_offset=recurrence.lead,
        denominator_poly=denominator,
        linear_terms=linear,
        convolution_terms=convolutions,
        implicit=recurrence.is_implicit,
        text=recurrence.render(),
        latex=recurrence.render(latex=True),
    )


def _rep_latex(rep: SeriesRep) -> str:
    condition = r"\text{implicit}" if rep.is_implicit else rf"n \geq {rep.valid_from}"
    lines = [
        f"{latex_expr(rep.expr)} = {rep.series_text(latex=True)}",
        rf"{rep.recurrence.render(latex=True)} \quad ({condition})",
    ]
    lines += [f"a_{{{m}}} = {latex_expr(Const(v))}" for m, v in enumerate(rep.initial_values)]
    return r" \\ ".join(lines)


class SeriesService:
    """Service for equations, normal forms, expansions and identities"""

    @staticmethod
    def parse(text: str, params: Optional[Iterable[str]] = None) -> Expr:
        return parse(text, params or ())

    @staticmethod
    def get_qde(text: str, params: Optional[List[str]] = None, max_index: Optional[int] = None) -> QDEDocument:
        """
        Least-index QDE of an expression

        Args:
            text: expression in the input grammar
            params: declared parameter names
            max_index: delta_2 bound (settings.MAX_INDEX when omitted)

        Returns:
            QDE document, with the substitution check when enabled
        """
        f = SeriesService.parse(text, params)
        qde = find_qde(f, max_index, params or ())
        verified: Optional[bool] = None
        if settings.VERIFY_SOLUTIONS:
            try:
                verified = verify_qde(f, qde)
            except IndeterminateVerificationError as exc:
                logger.warning(f"verification of {qde} undecided: {exc}")
        return SeriesService.qde_document(f, qde, verified)

    @staticmethod
    def qde_document(f: Expr, qde: QDE, verified: Optional[bool] = None) -> QDEDocument:
        return QDEDocument(
            expr=print_expr(f),
            params=list(qde.params),
            order=qde.order,
            leading_index=qde.leading_index,
            is_linear=qde.is_linear,
            terms=[
                QDETermDocument(
                    index=t.monomial.index,
                    monomial=_monomial_text(qde, t.monomial),
                    coefficient=_poly_text(t.coefficient),
                )
                for t in qde.terms
            ],
            verified=verified,
            text=str(qde),
            latex=qde.latex(),
        )

    @staticmethod
    def get_qre(text: str, params: Optional[List[str]] = None, max_index: Optional[int] = None) -> QREDocument:
        """QRE of the coefficient stream of an expression"""
        f = SeriesService.parse(text, params)
        qre = qde_to_qre(find_qde(f, max_index, params or ()))
        return SeriesService.qre_document(f, qre)

    @staticmethod
    def qre_document(f: Expr, qre: QRE) -> QREDocument:
        return QREDocument(
            expr=print_expr(f),
            params=list(qre.params),
            max_offset=qre.max_offset(),
            linear_terms=_linear_terms(qre.linear),
            convolution_terms=[
                ConvolutionTermDocument(coefficient=_poly_text(t.coefficient), i=t.i, j=t.j, p=t.p, upper_offset=-t.p)
                for t in qre.convolutions
            ],
            text=str(qre),
            latex=qre.latex(),
        )

    @staticmethod
    def get_delta2(text: str, k: int, params: Optional[List[str]] = None) -> Delta2Document:
        """delta_2^k of an expression"""
        f = SeriesService.parse(text, params)
        index = Delta2Index.from_index(k)
        result = delta2(f, k)
        return Delta2Document(
            expr=print_expr(f),
            k=k,
            i=index.i,
            j=index.j,
            derivative_orders=list(index.derivative_orders),
            result=print_expr(result),
            text=print_expr(result),
            latex=latex_expr(result),
        )

    @staticmethod
    def get_fps(text: str, max_index: Optional[int] = None, initial_values: Optional[int] = None) -> SeriesRepDocument:
        """Normal-form representation of an expression"""
        f = SeriesService.parse(text)
        rep = fps(f, max_index, initial_values)
        return SeriesService.rep_document(rep)

    @staticmethod
    def rep_document(rep: SeriesRep) -> SeriesRepDocument:
        return SeriesRepDocument(
            expr=print_expr(rep.expr),
            shift=rep.shift,
            valuation=rep.valuation,
            qde=str(rep.qde),
            qre=str(rep.qre),
            recurrence=_recurrence_document(rep.recurrence),
            initial_values=[format_rat(v) for v in rep.initial_values],
            valid_from=rep.valid_from,
            proven_zero=rep.proven_zero,
            induction_bound=rep.induction_bound,
            quadratic_choices=[
                QuadraticChoiceDocument(
                    n=c.n, index=c.index, value=format_rat(c.value), alternative=format_rat(c.alternative),
                )
                for c in rep.quadratic_choices
            ],
            text=str(rep),
            latex=_rep_latex(rep),
        )

    @staticmethod
    def get_taylor(
        text: str, order: int, oracle: bool = False, max_index: Optional[int] = None,
    ) -> TruncSeriesDocument:
        """
        Truncated expansion through z^order from the normal form

        With `oracle` the expansion is also shown next to the direct series
        expansion; qtaylor already refuses to return a disagreeing result.
        """
        f = SeriesService.parse(text)
        series = qtaylor(f, order, max_index)
        polynomial = series.as_expr()
        lines = [print_expr(polynomial)]
        if oracle:
            expected = series_of(f, order)
            lines.append(f"oracle: {print_expr(expected.as_expr())}")
            lines.append("oracle agrees" if expected == series else "oracle DISAGREES")
        return TruncSeriesDocument(
            expr=print_expr(f),
            order=order,
            valuation=series.valuation,
            coefficients=[
                CoefficientDocument(exponent=series.offset + i, value=format_rat(c))
                for i, c in enumerate(series.coeffs) if c
            ],
            oracle_checked=oracle,
            text="\n".join(lines),
            latex=latex_expr(polynomial),
        )

    @staticmethod
    def prove_identity(left: str, right: str, params: Optional[List[str]] = None,
                       max_index: Optional[int] = None) -> VerdictDocument:
        """Decide left = right"""
        a = SeriesService.parse(left, params)
        b = SeriesService.parse(right, params)
        verdict = prove(a, b, max_index)
        return SeriesService.verdict_document(a, b, verdict)

    @staticmethod
    def verdict_document(a: Expr, b: Expr, verdict: Verdict) -> VerdictDocument:
        lines = [verdict.kind.value, f"reason: {verdict.reason}"]
        witness = None
        if verdict.witness is not None:
            w = verdict.witness
            left = format_rat(w.left) if w.left is not None else None
            right = format_rat(w.right) if w.right is not None else None
            witness = WitnessDocument(exponent=w.exponent, left=left, right=right)
            lines.append(f"witness: coefficient of z^{w.exponent}: {left or '?'} vs {right or '?'}")
        if verdict.certificate is not None:
            lines += ["certificate:"] + [f"  {line}" for line in verdict.certificate.lines()]
        relation = {
            VerdictKind.EQUAL: "=",
            VerdictKind.NOT_EQUAL: r"\neq",
            VerdictKind.UNDECIDED: r"\stackrel{?}{=}",
        }[verdict.kind]
        return VerdictDocument(
            left=print_expr(a),
            right=print_expr(b),
            verdict=verdict.kind,
            reason=verdict.reason,
            witness=witness,
            certificate=SeriesService.rep_document(verdict.certificate) if verdict.certificate else None,
            text="\n".join(lines),
            latex=f"{latex_expr(a)} {relation} {latex_expr(b)}",
        )

    @staticmethod
    def render(document: Document, output_format: OutputFormat) -> str:
        """Text, LaTeX or JSON rendering of a document"""
        if output_format == OutputFormat.JSON:
            return document.model_dump_json(indent=2)
        if output_format == OutputFormat.LATEX:
            return document.latex
        return document.text
