from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager
from ccpareto.routes import runs
from ccpareto.routes import stats
from ccpareto.config import settings, LOG_FORMAT
import logging

# Setup logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format=LOG_FORMAT
)

logger = logging.getLogger(__name__)

@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"Starting ccpareto API (data dir: {settings.DATA_DIR}, max tmax: {settings.MAX_API_TMAX})")
    if not settings.API_SECRET_KEY:
        logger.warning("CCP_API_SECRET_KEY is empty; run submission is unauthenticated")
    yield
    logger.info("Shutdown complete")

app = FastAPI(
    title="ccpareto",
    description="Chance-constrained maximum coverage with Pareto-based evolutionary algorithms",
    version="1.0.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(runs.router)
app.include_router(stats.router)

@app.get("/")
async def root():
    return {
        "message": "ccpareto",
        "version": "1.0.0",
        "algorithms": ["gsemo", "sw", "asw"],
        "evaluators": ["cheb", "chen", "sample"],
    }
