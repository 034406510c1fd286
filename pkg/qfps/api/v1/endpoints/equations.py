"""
Equation endpoints - QDE search, coefficient recurrences and delta_2 derivatives

The handlers are plain functions: the computations are CPU bound and run in
the threadpool.
"""
from fastapi import APIRouter, HTTPException, Query
from typing import List, Optional
import logging

from qfps.engine.errors import QFPSError
from qfps.models.schemas import Delta2Document, QDEDocument, QREDocument
from qfps.services.series_service import SeriesService

logger = logging.getLogger(__name__)
router = APIRouter()


@router.get("/qde", response_model=QDEDocument)
def get_qde(
    expr: str = Query(..., description="Expression, e.g. sec(z)^k", max_length=2000),
    param: List[str] = Query([], description="Declared parameter (repeatable)"),
    max_index: Optional[int] = Query(None, description="delta_2 bound", ge=3, le=45),
):
    """
    **Least-index QDE** - Homogeneous quadratic differential equation with
    polynomial coefficients, normalized and checked by substitution
    """
    try:
        return SeriesService.get_qde(expr, param, max_index)
    except QFPSError as e:
        logger.warning(f"No QDE for {expr!r}: {str(e)}")
        raise HTTPException(status_code=422, detail=str(e))


@router.get("/qre", response_model=QREDocument)
def get_qre(
    expr: str = Query(..., description="Expression", max_length=2000),
    param: List[str] = Query([], description="Declared parameter (repeatable)"),
    max_index: Optional[int] = Query(None, description="delta_2 bound", ge=3, le=45),
):
    """
    **Quadratic recurrence** - The QDE rewritten for the power series coefficients
    """
    try:
        return SeriesService.get_qre(expr, param, max_index)
    except QFPSError as e:
        logger.warning(f"No QRE for {expr!r}: {str(e)}")
        raise HTTPException(status_code=422, detail=str(e))


@router.get("/delta2", response_model=Delta2Document)
def get_delta2(
    expr: str = Query(..., description="Expression", max_length=2000),
    k: int = Query(..., description="delta_2 index", ge=1, le=500),
    param: List[str] = Query([], description="Declared parameter (repeatable)"),
):
    """
    **delta_2^k** - Product of the two derivatives selected by the index map
    """
    try:
        return SeriesService.get_delta2(expr, k, param)
    except QFPSError as e:
        raise HTTPException(status_code=422, detail=str(e))
