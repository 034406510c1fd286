"""
Pydantic documents for CLI and API output

Exact rationals travel as strings ("-1/12"); polynomials and equations as
expression-grammar text.
"""
from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional, Union
from datetime import datetime
from enum import Enum

from qfps.engine.rep import VerdictKind


class OutputFormat(str, Enum):
    """Rendering of a document"""
    TEXT = "text"
    JSON = "json"
    LATEX = "latex"


class HealthCheckResponse(BaseModel):
    """Health check response"""
    status: str
    timestamp: datetime
    corpus_loaded: bool
    corpus_info: Optional[Dict[str, Any]] = None


# Equations

class QDETermDocument(BaseModel):
    index: int = Field(..., description="delta_2 index of the monomial")
    monomial: str = Field(..., description="Differential monomial, y1 standing for y'")
    coefficient: str = Field(..., description="Polynomial in z and the parameters")


class QDEDocument(BaseModel):
    """Homogeneous quadratic differential equation"""
    expr: str
    params: List[str] = []
    order: int
    leading_index: int = Field(..., description="Largest delta_2 index with a nonzero coefficient")
    is_linear: bool
    terms: List[QDETermDocument]
    verified: Optional[bool] = Field(None, description="Substitution check, when it was run")
    text: str
    latex: str


class LinearTermDocument(BaseModel):
    shift: int = Field(..., description="s in coefficient(n) * a[n+s]")
    coefficient: str


class ConvolutionTermDocument(BaseModel):
    coefficient: str
    i: int
    j: int
    p: int
    lower: int = Field(0, description="Lower summation bound")
    upper_offset: int = Field(..., description="Upper summation bound is n + upper_offset")


class QREDocument(BaseModel):
    """Quadratic recurrence equation for the series coefficients"""
    expr: str
    params: List[str] = []
    max_offset: int
    linear_terms: List[LinearTermDocument]
    convolution_terms: List[ConvolutionTermDocument]
    text: str
    latex: str


class Delta2Document(BaseModel):
    """delta_2^k of an expression"""
    expr: str
    k: int
    i: int
    j: int
    derivative_orders: List[int] = Field(..., description="Orders of both factors, -1 for the constant 1")
    result: str
    text: str
    latex: str


# Series

class QuadraticChoiceDocument(BaseModel):
    n: int
    index: int
    value: str
    alternative: str


class RecurrenceDocument(BaseModel):
    """Recurrence solved for a[n + lhs_index_offset]"""
    lhs_index_offset: int
    denominator_poly: Optional[str] = Field(None, description="None for an implicit recurrence")
    linear_terms: List[LinearTermDocument]
    convolution_terms: List[ConvolutionTermDocument]
    implicit: bool
    text: str
    latex: str


class SeriesRepDocument(BaseModel):
    """Normal form sum_{n>=0} a_n z^(n+shift)"""
    expr: str
    shift: int
    valuation: Optional[int] = None
    qde: str
    qre: str
    recurrence: RecurrenceDocument
    initial_values: List[str]
    valid_from: int = Field(..., description="Recurrence holds for n >= valid_from")
    proven_zero: bool
    induction_bound: Optional[int] = None
    quadratic_choices: List[QuadraticChoiceDocument] = []
    text: str
    latex: str


class CoefficientDocument(BaseModel):
    exponent: int
    value: str


class TruncSeriesDocument(BaseModel):
    """Truncated expansion through z^order"""
    expr: str
    order: int
    valuation: Optional[int] = None
    coefficients: List[CoefficientDocument] = Field(..., description="Nonzero coefficients")
    oracle_checked: bool = False
    text: str
    latex: str


# Identities

class WitnessDocument(BaseModel):
    exponent: int
    left: Optional[str] = None
    right: Optional[str] = None


class VerdictDocument(BaseModel):
    left: str
    right: str
    verdict: VerdictKind
    reason: str
    witness: Optional[WitnessDocument] = None
    certificate: Optional[SeriesRepDocument] = None
    text: str
    latex: str


# Corpus

class CorpusEntry(BaseModel):
    """A worked input with its published results"""
    name: str
    expr: str
    params: List[str] = []
    published_qde: Optional[str] = Field(None, description="Published QDE in y, y1, y2, ...")
    shift: int = Field(0, description="Pole order shift of the published representation")
    published_initial_values: Optional[List[str]] = Field(
        None, description="Published coefficients of z^shift, z^(shift+1), ..."
    )
    max_order: Optional[int] = Field(None, description="Bound on the order of an acceptable QDE")
    slow: bool = False
    note: str = ""


class IdentityEntry(BaseModel):
    name: str
    left: str
    right: str
    equal: bool


class CorpusResponse(BaseModel):
    entries: List[CorpusEntry]
    identities: List[IdentityEntry]
    total_entries: int


Document = Union[
    QDEDocument, QREDocument, Delta2Document, SeriesRepDocument, TruncSeriesDocument, VerdictDocument,
]


class OutputDoc(BaseModel):
    """One rendered result"""
    format: OutputFormat
    payload: Union[str, Dict[str, Any]]
