from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class YoungKind(str, Enum):
    """Families of Young functions Phi."""
    POWER = "power"
    COSH = "cosh"
    SHIFTED_POWER = "shifted_power"
    TABULATED = "tabulated"

    @property
    def is_analytic(self) -> bool:
        return self != YoungKind.TABULATED


class GrowthConstants(BaseModel):
    """Constants (p, a, c, C) of c (a+s)^{p-1} <= phi(s) <= C (a+s)^{p-1}."""
    model_config = ConfigDict(extra="ignore")

    p: float = Field(..., gt=1)
    a: float = Field(default=0.0, ge=0)
    c: float = Field(default=1.0, gt=0)
    C: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check_order(self):
        if self.C < self.c:
            raise ValueError("upper growth constant C must be at least c")
        return self

    @property
    def p_conjugate(self) -> float:
        return self.p / (self.p - 1.0)


class YoungSpec(BaseModel):
    """Config-facing description of a Young pair."""
    model_config = ConfigDict(extra="ignore")

    kind: YoungKind = YoungKind.POWER
    p: float = Field(default=2.0, gt=1)
    a: float = Field(default=0.0, ge=0, description="Shift of the shifted power family")
    sigma: Optional[List[float]] = Field(default=None, description="Tabulated abscissae, increasing from 0")
    Phi: Optional[List[float]] = Field(default=None, description="Tabulated values of Phi")
    growth: Optional[GrowthConstants] = None

    @model_validator(mode="after")
    def _check_table(self):
        if self.kind == YoungKind.TABULATED:
            if not self.sigma or not self.Phi or len(self.sigma) != len(self.Phi) or len(self.sigma) < 4:
                raise ValueError("tabulated pairs need matching sigma and Phi lists of length >= 4")
            if self.sigma[0] != 0.0 or self.Phi[0] != 0.0:
                raise ValueError("tabulated Phi must start at Phi(0) = 0")
            if np.any(np.diff(self.sigma) <= 0):
                raise ValueError("tabulated sigma must be strictly increasing")
        if self.kind == YoungKind.SHIFTED_POWER and self.a <= 0:
            raise ValueError("shifted_power needs a > 0")
        return self


class NormKind(str, Enum):
    """Strictly convex norms on R^N."""
    EUCLIDEAN = "euclidean"
    ELLIPTIC = "elliptic"
    LS = "ls"


class NormSpec(BaseModel):
    """Config-facing description of a norm H."""
    model_config = ConfigDict(extra="ignore")

    kind: NormKind = NormKind.EUCLIDEAN
    A: Optional[List[List[float]]] = Field(default=None, description="SPD matrix of the elliptic norm")
    s: Optional[float] = Field(default=None, gt=1, description="Exponent of the l^s norm")

    @model_validator(mode="after")
    def _check_params(self):
        if self.kind == NormKind.ELLIPTIC:
            if self.A is None:
                raise ValueError("elliptic norm requires A")
            matrix = np.asarray(self.A, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError("A must be square")
            if not np.allclose(matrix, matrix.T):
                raise ValueError("A must be symmetric")
            if np.linalg.eigvalsh(matrix).min() <= 0:
                raise ValueError("A must be positive definite")
        if self.kind == NormKind.LS and (self.s is None or not np.isfinite(self.s)):
            raise ValueError("l^s norm requires a finite exponent s > 1")
        return self


class GrowthReport(BaseModel):
    """Sampled check of the growth envelope of phi; the eigenvalue envelope is reported alongside."""
    model_config = ConfigDict(extra="ignore")

    constants: GrowthConstants
    sigma_min: float
    sigma_max: float
    worst_violation: float = Field(..., ge=0, description="Largest relative envelope violation, 0 if none")
    worst_sigma: Optional[float] = None
    fitted_c: float
    fitted_C: float
    hessian_violation: float = Field(0.0, ge=0, description="Largest relative violation of the eigenvalue envelope")
    hessian_c: Optional[float] = None
    hessian_C: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.worst_violation <= 1e-9
