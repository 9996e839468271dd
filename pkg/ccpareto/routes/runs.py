from fastapi import APIRouter, HTTPException, Header, status
from ccpareto.config import settings
from ccpareto.exceptions import CCParetoError
from ccpareto.models.results import RunResult
from ccpareto.schemas import ExperimentConfig, RunRequest
from ccpareto.services.experiment import experiment_runner
import logging
import os

logger = logging.getLogger(__name__)
router = APIRouter(prefix="/api/v1", tags=["runs"])

@router.get("/health")
async def health():
    return {"status": "ok", "data_dir": settings.DATA_DIR, "max_tmax": settings.MAX_API_TMAX}

@router.post("/runs", response_model=RunResult)
def submit_run(request: RunRequest, x_api_key: str = Header(None)):
    """Execute one seeded run synchronously and return its result."""
    if settings.API_SECRET_KEY and x_api_key != settings.API_SECRET_KEY:
        logger.warning(f"Invalid API key attempt for run on {request.graph}")
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="Invalid API key"
        )

    if request.tmax > settings.MAX_API_TMAX:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"tmax {request.tmax} exceeds the limit of {settings.MAX_API_TMAX}"
        )

    path = os.path.join(settings.DATA_DIR, request.graph)
    if not os.path.isfile(path):
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Graph {request.graph} not found")

    try:
        config = ExperimentConfig(
            **dict(request.model_dump(), graph=path, runs=1, out=settings.OUTPUT_DIR)
        )
        instance = experiment_runner.build_instance(config)
        result, _ = experiment_runner.run_once(instance, config, config.seed)
    except (CCParetoError, ValueError) as e:
        logger.error(f"Run on {request.graph} failed: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    return result
