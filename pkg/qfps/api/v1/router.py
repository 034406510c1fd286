"""
API v1 router - Combines all endpoint routers
"""
from fastapi import APIRouter

from qfps.api.v1.endpoints import corpus, equations, identities, series

api_router = APIRouter()

api_router.include_router(
    equations.router,
    prefix="/equations",
    tags=["Differential & Recurrence Equations"]
)

api_router.include_router(
    series.router,
    prefix="/series",
    tags=["Series Representations & Expansions"]
)

api_router.include_router(
    identities.router,
    prefix="/identities",
    tags=["Identity Proving"]
)

api_router.include_router(
    corpus.router,
    tags=["Corpus & Schemas"]
)
