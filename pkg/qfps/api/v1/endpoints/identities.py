"""
Identity endpoints - zero-equivalence decisions
"""
from fastapi import APIRouter, HTTPException, Query
from typing import List, Optional
import logging

from qfps.engine.errors import QFPSError
from qfps.models.schemas import VerdictDocument
from qfps.services.series_service import SeriesService

logger = logging.getLogger(__name__)
router = APIRouter()


@router.get("/prove", response_model=VerdictDocument)
def prove_identity(
    left: str = Query(..., description="Left-hand side", max_length=2000),
    right: str = Query(..., description="Right-hand side", max_length=2000),
    param: List[str] = Query([], description="Declared parameter (repeatable)"),
    max_index: Optional[int] = Query(None, description="delta_2 bound", ge=3, le=45),
):
    """
    **Prove an identity** - equal (with a certificate), not-equal (with the
    first differing coefficient) or undecided (with the reason)
    """
    try:
        return SeriesService.prove_identity(left, right, param, max_index)
    except QFPSError as e:
        raise HTTPException(status_code=422, detail=str(e))
