import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.api import experiments, front
from app.core.settings import configure_logging, get_settings

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="NSGA-III OJZJ Experiments API",
    description="Pareto fronts, seeded NSGA-III trials and crossover speedup reports on m-OJZJ_k",
    version="1.0.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=[
        "http://localhost:3000",
        "http://localhost:5173",
    ],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(front.router, prefix="/api/front", tags=["front"])
app.include_router(experiments.router, prefix="/api/experiments", tags=["experiments"])


@app.get("/")
async def root():
    return {"message": "NSGA-III OJZJ Experiments API", "version": "1.0.0"}


@app.get("/health")
async def health():
    settings = get_settings()
    return {
        "status": "healthy",
        "output_dir": settings.output_dir,
        "workers": settings.workers,
    }
