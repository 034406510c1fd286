"""
Corpus and schema endpoints
"""
from fastapi import APIRouter, HTTPException, Query
from typing import Any, Dict
import logging

from qfps.data.corpus import corpus_loader
from qfps.models.schemas import (
    CorpusEntry,
    CorpusResponse,
    Delta2Document,
    OutputDoc,
    QDEDocument,
    QREDocument,
    SeriesRepDocument,
    TruncSeriesDocument,
    VerdictDocument,
)

logger = logging.getLogger(__name__)
router = APIRouter()

_DOCUMENTS = (
    QDEDocument, QREDocument, Delta2Document, SeriesRepDocument, TruncSeriesDocument, VerdictDocument, OutputDoc,
)


@router.get("/corpus", response_model=CorpusResponse)
def get_corpus(
    include_slow: bool = Query(True, description="Include entries that take minutes"),
):
    """
    **Worked examples** - Inputs with their published QDEs and initial values,
    and the identities with their expected verdicts
    """
    entries = corpus_loader.entries(include_slow=include_slow)
    return CorpusResponse(
        entries=entries,
        identities=corpus_loader.identities(),
        total_entries=len(entries),
    )


@router.get("/corpus/{name}", response_model=CorpusEntry)
def get_corpus_entry(name: str):
    """One worked example by name"""
    try:
        return corpus_loader.get(name)
    except KeyError as e:
        raise HTTPException(status_code=404, detail=str(e.args[0]))


@router.get("/schemas")
def get_schemas() -> Dict[str, Any]:
    """**JSON schemas** of every output document"""
    return {model.__name__: model.model_json_schema() for model in _DOCUMENTS}
