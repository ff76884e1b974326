from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hotspot.config import get_config
from hotspot.models.domain_models import DomainSpec
from hotspot.models.young_models import NormSpec, YoungSpec
from hotspot.services.bounds_service import BOUND_REGISTRY


class ProblemKind(str, Enum):
    """PDE problems an experiment can solve."""
    TORSION = "torsion"
    EIGEN = "eigen"
    HEAT = "heat"
    SMALL_DIFFUSION = "small_diffusion"
    P_TORSION = "p_torsion"
    ANISO = "aniso"
    LANE_EMDEN = "lane_emden"
    SEMILINEAR = "semilinear"
    P_EIGEN = "p_eigen"


class _Problem(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: Optional[str] = Field(default=None, description="Report label; derived from the kind if omitted")
    h: Optional[float] = Field(default=None, gt=0, description="Grid spacing overriding the experiment default")
    bounds: List[str] = Field(default_factory=list, description="Registered bound names to certify")

    @property
    def label(self) -> str:
        return self.id or self.kind


class TorsionProblem(_Problem):
    kind: Literal["torsion"] = "torsion"


class EigenProblem(_Problem):
    kind: Literal["eigen"] = "eigen"


class HeatProblem(_Problem):
    kind: Literal["heat"] = "heat"
    g: Literal["phi1", "one", "torsion"]
    times: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_times(self):
        if any(t < 0 for t in self.times) or len(set(self.times)) != len(self.times):
            raise ValueError("heat times must be distinct and nonnegative")
        return self


class SmallDiffusionProblem(_Problem):
    kind: Literal["small_diffusion"] = "small_diffusion"
    eps: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_eps(self):
        if any(e <= 0 for e in self.eps):
            raise ValueError("eps values must be positive")
        return self


class PTorsionProblem(_Problem):
    kind: Literal["p_torsion"] = "p_torsion"
    p: List[float] = Field(default_factory=lambda: [2.0], min_length=1)
    young: Optional[YoungSpec] = Field(default=None, description="General Young pair; replaces the p list")

    @model_validator(mode="after")
    def _check_p(self):
        if any(p <= 1 for p in self.p):
            raise ValueError("p values must exceed 1")
        return self


class AnisoProblem(_Problem):
    kind: Literal["aniso"] = "aniso"
    norm: NormSpec
    young: YoungSpec = Field(default_factory=YoungSpec)


class LaneEmdenProblem(_Problem):
    kind: Literal["lane_emden"] = "lane_emden"
    q: float = Field(..., gt=1, le=2)


class SemilinearProblem(_Problem):
    kind: Literal["semilinear"] = "semilinear"
    source: Literal["constant", "linear", "small_diffusion"]
    params: Dict[str, float] = Field(default_factory=dict)


class PEigenProblem(_Problem):
    kind: Literal["p_eigen"] = "p_eigen"
    p: float = Field(..., gt=1)


ProblemSpec = Annotated[
    Union[TorsionProblem, EigenProblem, HeatProblem, SmallDiffusionProblem, PTorsionProblem,
          AnisoProblem, LaneEmdenProblem, SemilinearProblem, PEigenProblem],
    Field(discriminator="kind"),
]


class GeometryOverrides(BaseModel):
    """Geometric quantities supplied instead of computed."""
    model_config = ConfigDict(extra="forbid")

    r_e: Optional[float] = Field(default=None, gt=0)
    john_axes: Optional[List[float]] = None


class Experiment(BaseModel):
    """One domain with the problems solved on it."""
    model_config = ConfigDict(extra="forbid")

    domain: DomainSpec
    problems: List[ProblemSpec] = Field(..., min_length=1)
    overrides: GeometryOverrides = Field(default_factory=GeometryOverrides)


class OutputSpec(BaseModel):
    """Where reports go when the CLI does not say."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    report: Optional[Path] = None
    json_report: Optional[Path] = Field(default=None, alias="json")
    fields: bool = Field(default=False, description="Dump solved fields into the JSON report")


class ExperimentConfig(BaseModel):
    """
    A validated experiment file.

    Bounds listed at the top level apply to every compatible problem; bounds
    listed on a problem must be compatible with it.
    """
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    h: float = Field(default_factory=lambda: get_config().DEFAULT_H, gt=0)
    tolerance: float = Field(default_factory=lambda: get_config().DEFAULT_TOLERANCE, ge=0, lt=1)
    bounds: List[str] = Field(default_factory=list)
    experiments: List[Experiment] = Field(..., min_length=1)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _check_bounds(self):
        kinds = set()
        for i, experiment in enumerate(self.experiments):
            for j, problem in enumerate(experiment.problems):
                kinds.add(problem.kind)
                for name in problem.bounds:
                    entry = BOUND_REGISTRY.get(name)
                    if entry is None:
                        raise ValueError(f"experiments.{i}.problems.{j}.bounds: unknown bound '{name}'")
                    if problem.kind not in entry.problems:
                        raise ValueError(f"experiments.{i}.problems.{j}.bounds: '{name}' does not apply "
                                         f"to {problem.kind} problems")
        for name in self.bounds:
            entry = BOUND_REGISTRY.get(name)
            if entry is None:
                raise ValueError(f"bounds: unknown bound '{name}'")
            if not kinds.intersection(entry.problems):
                raise ValueError(f"bounds: '{name}' applies to none of the configured problems")
        ids = [e.domain.id for e in self.experiments]
        if len(set(ids)) != len(ids):
            raise ValueError("domain ids must be unique")
        return self

    def bounds_for(self, problem: _Problem) -> List[str]:
        """Bounds to certify on a problem, in registry order of first mention."""
        names = list(problem.bounds)
        names += [b for b in self.bounds if b not in names and problem.kind in BOUND_REGISTRY[b].problems]
        return names


class ReportRow(BaseModel):
    """One certified (domain, problem, bound) triple."""
    model_config = ConfigDict(extra="ignore")

    domain: str
    problem: str
    N: int
    r_in: Optional[float] = None
    d_measured: Optional[float] = None
    bound: str
    bound_value: Optional[float] = None
    slack: Optional[float] = None
    status: str
    runtime_s: float = 0.0
    message: Optional[str] = None

    @property
    def sort_key(self):
        return (self.domain, self.problem, self.bound)


class PropertyResult(BaseModel):
    """Outcome of one pointwise inequality or trend check."""
    model_config = ConfigDict(extra="ignore")

    name: str
    domain: str
    problem: str
    margin: Optional[float] = Field(default=None, description="Smallest slack of the inequality; negative means violated")
    passed: bool
    detail: Dict[str, Any] = Field(default_factory=dict)
