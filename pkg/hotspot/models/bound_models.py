from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BoundStatus(str, Enum):
    """Outcome of certifying a bound."""
    PASS = "pass"
    FAIL = "fail"
    INAPPLICABLE = "inapplicable"
    ERROR = "error"

    @property
    def fails_run(self) -> bool:
        return self in (BoundStatus.FAIL, BoundStatus.ERROR)


class BoundKind(str, Enum):
    """Whether a bound is a length or a ratio to the inradius."""
    LENGTH = "length"
    RATIO = "ratio"


class BoundSense(str, Enum):
    """Lower bounds on distances, or upper bounds on field quantities."""
    LOWER = "lower"
    UPPER = "upper"


class BoundValue(BaseModel):
    """A bound evaluator result."""
    model_config = ConfigDict(extra="ignore")

    value: float
    kind: BoundKind = BoundKind.LENGTH
    sense: BoundSense = BoundSense.LOWER

    def as_length(self, r_in: float) -> float:
        return self.value * r_in if self.kind == BoundKind.RATIO else self.value


class BoundCheck(BaseModel):
    """Measured quantity tied to a bound value and its verdict."""
    model_config = ConfigDict(extra="ignore", populate_by_name=True)

    bound_name: str = "bound"
    measured_d: float = Field(..., ge=0)
    bound_value: float
    relative_slack: float
    tolerance: float = Field(default=0.02, ge=0)
    sense: BoundSense = BoundSense.LOWER
    passed: bool = Field(..., alias="pass")
    inputs: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_verdict(self):
        if self.sense == BoundSense.LOWER:
            expected = self.measured_d >= self.bound_value * (1 - self.tolerance)
        else:
            expected = self.measured_d <= self.bound_value * (1 + self.tolerance)
        if expected != self.passed:
            raise ValueError("pass flag disagrees with measured value and tolerance")
        return self

    @property
    def status(self) -> BoundStatus:
        return BoundStatus.PASS if self.passed else BoundStatus.FAIL


class HeatBoundInputs(BaseModel):
    """Spectral and geometric inputs of the heat hot-spot bound."""
    model_config = ConfigDict(extra="ignore")

    lambda1: float = Field(..., gt=0)
    lambda1_ball: float = Field(..., gt=0)
    K: float = Field(..., gt=0)
    K_Omega: float = Field(..., gt=0)
    M_of_t: List[float] = Field(default_factory=list)
    r_in: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _check_scaling(self):
        if self.K_Omega > self.K * self.lambda1_ball ** 0.5 / self.r_in + 1e-9:
            raise ValueError("K_Omega exceeds the scaled constant K")
        return self
