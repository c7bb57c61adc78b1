import logging
from typing import Optional

from fastapi import APIRouter, HTTPException, Query

from app.core.analytics import bounds
from app.core.errors import UsageError
from app.core.evolution.ojzj import OjzjInstance
from app.core.experiments.harness import compare_crossover, run_suite, run_trial
from app.models.experiment import (
    BoundsResponse,
    CompareRequest,
    SpeedupReport,
    SuiteRequest,
    SuiteSummary,
    TrialRequest,
    TrialResult,
)

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/trial", response_model=TrialResult)
def post_trial(request: TrialRequest):
    """Run one seeded trial of the given config."""
    try:
        return run_trial(request.config, request.trial_index)
    except UsageError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Trial {request.trial_index} of {request.config.config_id} failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/suite", response_model=SuiteSummary)
def post_suite(request: SuiteRequest):
    """Run every trial of every config and write the CSV files."""
    try:
        return run_suite(request.configs, out_dir=request.out)
    except UsageError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Suite of {len(request.configs)} configs failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/compare", response_model=SpeedupReport)
def post_compare(request: CompareRequest):
    try:
        return compare_crossover(request.a, request.b)
    except UsageError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.get("/bounds", response_model=BoundsResponse)
def get_bounds(
    n: int = Query(...),
    m: int = Query(...),
    k: int = Query(...),
    mu: int = Query(..., ge=2, description="Population size"),
    pc: float = Query(0.0, description="Crossover probability"),
):
    """Leading terms of the runtime bounds for one configuration."""
    try:
        instance = OjzjInstance(n, m, k)
        crossover: Optional[float] = bounds.crossover_bound(instance, mu, pc) if pc > 0 else None
        return BoundsResponse(
            f_max=instance.f_max,
            front_size=instance.front_size() if instance.front_regime else None,
            max_incomparable=bounds.max_incomparable_bound(instance),
            cover_cap=bounds.cover_cap(instance, mu),
            default_lattice_p=bounds.default_lattice_p(instance),
            population_bound=bounds.population_bound_holds(instance, mu),
            mutation_only_bound=bounds.mutation_only_bound(instance, mu, pc),
            crossover_bound=crossover,
            lower_bound_m4=bounds.lower_bound_m4(instance, mu) if m == 4 else None,
        )
    except UsageError as e:
        raise HTTPException(status_code=422, detail=str(e))
