"""Data models for experiment configuration, trial results and summaries."""
import math
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.analytics.bounds import default_lattice_p
from app.core.errors import RegimeError
from app.core.evolution.nsga3 import AlgorithmParams
from app.core.evolution.ojzj import OjzjInstance
from app.core.settings import get_settings


class ExperimentConfig(BaseModel):
    """One benchmark instance + algorithm setting, run for ``trials`` seeded trials."""
    config_id: str = "default"
    n: int
    m: int
    k: int
    mu: int
    pc: float = Field(0.0, ge=0.0, lt=1.0)

    # None -> regime defaults: ceil(2 m^{3/2} f_max) and f_max
    lattice_p: Optional[int] = None
    eps_nad: Optional[float] = None

    budget: int = Field(default_factory=lambda: get_settings().default_budget, ge=0)  # evaluations
    trials: int = Field(1, ge=1)
    master_seed: int = Field(0, ge=0, lt=2**64)
    out: Optional[str] = None
    trajectories: bool = False

    @model_validator(mode="after")
    def _resolve_and_validate(self):
        instance = OjzjInstance(self.n, self.m, self.k)
        if not instance.front_regime:
            raise RegimeError(f"Coverage runs need k <= n/m to know the front; got k={self.k}, n/m={self.n / self.m:g}")
        if self.lattice_p is None:
            self.lattice_p = default_lattice_p(instance)
        if self.eps_nad is None:
            self.eps_nad = float(instance.f_max)
        self.params()
        return self

    def instance(self) -> OjzjInstance:
        return OjzjInstance(self.n, self.m, self.k)

    @property
    def max_generations(self) -> int:
        return math.ceil(self.budget / self.mu)

    def params(self) -> AlgorithmParams:
        return AlgorithmParams(
            mu=self.mu,
            p_c=self.pc,
            lattice_p=self.lattice_p,
            eps_nad=self.eps_nad,
            max_generations=self.max_generations,
        )


class TrajectoryRow(BaseModel):
    t: int
    covered_front_count: int
    min_cover: int
    capped_min_cover: int
    num_r_classes: int
    jump_events: int
    k_jump_events: int


class ClassDiscovery(BaseModel):
    r_class: List[int]
    generation: int  # first generation whose population held the class


class TrialResult(BaseModel):
    """Outcome of one seeded trial. Budget-exhausted trials carry the generation budget."""
    config_id: str
    trial: int
    seed: int
    n: int
    m: int
    k: int
    mu: int
    pc: float
    lattice_p: int
    eps_nad: float
    generations: int
    evaluations: int
    covered: int  # covered front vectors in the final population
    front_size: int
    budget: int  # evaluation budget as configured
    success: bool
    trajectory: Optional[List[TrajectoryRow]] = None
    class_discovery: Optional[List[ClassDiscovery]] = None

    @property
    def generations_to_cover(self) -> Optional[int]:
        return self.generations if self.success else None


class ConfigSummary(BaseModel):
    """Per-config statistics over successful trials only."""
    config_id: str
    n: int
    m: int
    k: int
    mu: int
    pc: float
    lattice_p: int
    eps_nad: float
    trials: int
    successes: int
    median_generations: Optional[float] = None
    mean_generations: Optional[float] = None
    min_generations: Optional[int] = None
    max_generations: Optional[int] = None
    median_evaluations: Optional[float] = None
    regime: bool
    population_bound: bool
    predicted_bound: float


class SuiteSummary(BaseModel):
    configs: List[ConfigSummary]
    files: List[str] = []


class SpeedupReport(BaseModel):
    """Mutation-only median divided by crossover median."""
    config_a: str
    config_b: str
    median_mutation_only: float
    median_crossover: float
    ratio: float


# === API Request/Response Models ===

class FrontResponse(BaseModel):
    n: int
    m: int
    k: int
    method: str  # "closed_form" or "brute_force"
    size: int
    vectors: List[List[int]]


class TrialRequest(BaseModel):
    config: ExperimentConfig
    trial_index: int = Field(0, ge=0)


class SuiteRequest(BaseModel):
    configs: List[ExperimentConfig]
    out: Optional[str] = None


class CompareRequest(BaseModel):
    a: ConfigSummary
    b: ConfigSummary


class BoundsResponse(BaseModel):
    f_max: int
    front_size: Optional[int]
    max_incomparable: int
    cover_cap: int
    default_lattice_p: int
    population_bound: bool
    mutation_only_bound: float
    crossover_bound: Optional[float]
    lower_bound_m4: Optional[float]
