"""
Series endpoints - normal forms and truncated expansions
"""
from fastapi import APIRouter, HTTPException, Query
from typing import Optional
import logging

from qfps.engine.errors import QFPSError
from qfps.models.schemas import SeriesRepDocument, TruncSeriesDocument
from qfps.services.series_service import SeriesService

logger = logging.getLogger(__name__)
router = APIRouter()


@router.get("/fps", response_model=SeriesRepDocument)
def get_fps(
    expr: str = Query(..., description="Expression without parameters", max_length=2000),
    initial_values: Optional[int] = Query(None, description="Keep at least this many initial values", ge=0, le=64),
    max_index: Optional[int] = Query(None, description="delta_2 bound", ge=3, le=45),
):
    """
    **Normal form** - sum a_n z^(n+shift) with a solved recurrence, initial
    values and the index from which the recurrence holds
    """
    try:
        return SeriesService.get_fps(expr, max_index, initial_values)
    except QFPSError as e:
        logger.warning(f"No representation for {expr!r}: {str(e)}")
        raise HTTPException(status_code=422, detail=str(e))


@router.get("/taylor", response_model=TruncSeriesDocument)
def get_taylor(
    expr: str = Query(..., description="Expression without parameters", max_length=2000),
    order: int = Query(..., description="Truncation order", ge=0, le=200),
    oracle: bool = Query(False, description="Show the direct series expansion alongside"),
    max_index: Optional[int] = Query(None, description="delta_2 bound", ge=3, le=45),
):
    """
    **Truncated expansion** - Unrolls the normal form through z^order
    """
    try:
        return SeriesService.get_taylor(expr, order, oracle, max_index)
    except QFPSError as e:
        logger.warning(f"No expansion for {expr!r}: {str(e)}")
        raise HTTPException(status_code=422, detail=str(e))
