import logging

from fastapi import APIRouter, HTTPException, Query

from app.core.errors import UsageError
from app.core.evolution.ojzj import OjzjInstance, brute_force_front, pareto_front, sorted_front
from app.models.experiment import FrontResponse

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("", response_model=FrontResponse)
def get_front(
    n: int = Query(..., description="Bit-string length"),
    m: int = Query(..., description="Number of objectives (even)"),
    k: int = Query(..., description="Gap size"),
    brute_force: bool = Query(False, description="Enumerate all 2^n genomes instead of the closed form"),
):
    """Pareto front of m-OJZJ_k as sorted objective vectors."""
    try:
        instance = OjzjInstance(n, m, k)
        front = brute_force_front(instance) if brute_force else pareto_front(instance)
    except UsageError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Front computation failed for n={n}, m={m}, k={k}: {e}")
        raise HTTPException(status_code=500, detail=str(e))

    return FrontResponse(
        n=n,
        m=m,
        k=k,
        method="brute_force" if brute_force else "closed_form",
        size=len(front),
        vectors=[list(v) for v in sorted_front(front)],
    )
