from fastapi import APIRouter, HTTPException, status
from ccpareto.schemas import KruskalRequest
from ccpareto.services.statistics import kruskal_wallis, SIGNIFICANCE
import logging
import math

logger = logging.getLogger(__name__)
router = APIRouter(prefix="/api/v1/stats", tags=["stats"])

@router.post("/kruskal")
async def kruskal(request: KruskalRequest):
    try:
        h, p = kruskal_wallis(request.groups)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    return {
        "success": True,
        "h": None if math.isnan(h) else h,
        "p_value": p,
        "significant": p < SIGNIFICANCE,
        "sizes": [len(g) for g in request.groups],
    }
