"""
Grid and field records produced by the PDE solvers.
"""

from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Grid(BaseModel):
    """
    Uniform node grid restricted to a domain.

    Nodes sit at origin + (i, j) * h. For axisymmetric grids the first
    coordinate is the distance rho to the axis and the second is z.

    Attributes:
        mask: (nx, ny) int8 array, 0 outside, 1 inside, 2 inside and next to the boundary
        index: (nx, ny) unknown number of each inside node, -1 elsewhere
        points: (n, 2) coordinates of the unknowns
        fractions: (n, 4) leg fractions towards E, W, N, S in (0, 1]
        distance: (n,) distance of each unknown to the boundary
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    h: float = Field(..., gt=0)
    origin: Tuple[float, float]
    shape: Tuple[int, int]
    axisymmetric: bool = False
    dimension: int = 2
    mask: np.ndarray
    index: np.ndarray
    points: np.ndarray
    fractions: np.ndarray
    distance: np.ndarray

    @model_validator(mode="after")
    def _check_fractions(self):
        if self.fractions.size and (self.fractions.min() <= 0 or self.fractions.max() > 1 + 1e-12):
            raise ValueError("edge fractions must lie in (0, 1]")
        return self

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def ij(self) -> np.ndarray:
        """(n, 2) integer node indices of the unknowns."""
        return np.rint((self.points - np.asarray(self.origin)) / self.h).astype(int)

    def to_array(self, values: np.ndarray) -> np.ndarray:
        """Scatter unknown values into a full (nx, ny) array with zero extension."""
        full = np.zeros(self.shape)
        ij = self.ij
        full[ij[:, 0], ij[:, 1]] = values
        return full

    def lift(self, pts: np.ndarray) -> np.ndarray:
        """Grid coordinates to domain coordinates; (rho, z) maps to (rho, 0, z)."""
        pts = np.atleast_2d(pts)
        if self.axisymmetric:
            return np.column_stack([pts[:, 0], np.zeros(len(pts)), pts[:, 1]])
        return pts

    def node_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = self.origin[0] + self.h * np.arange(self.shape[0])
        ys = self.origin[1] + self.h * np.arange(self.shape[1])
        return xs, ys


class ScalarField(BaseModel):
    """Values on the inside nodes of a grid, zero outside."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray
    problem: str = "field"
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_values(self):
        if self.values.shape != (self.grid.size,):
            raise ValueError("field values must match the grid unknowns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")
        return self

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    def to_array(self) -> np.ndarray:
        return self.grid.to_array(self.values)

    def triples(self) -> List[Tuple[float, float, float]]:
        """Plot-ready (x, y, value) rows for every inside node."""
        return [(float(x), float(y), float(v)) for (x, y), v in zip(self.grid.points, self.values)]

    def with_values(self, values: np.ndarray, problem: Optional[str] = None, **params) -> "ScalarField":
        merged = dict(self.params)
        merged.update(params)
        return ScalarField(grid=self.grid, values=np.asarray(values, dtype=float),
                           problem=problem or self.problem, params=merged)


class HeatTrajectory(BaseModel):
    """Snapshots of a heat evolution with maxima and near-max sets."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: List[float]
    fields: List[ScalarField]
    M: List[float]
    hotspots: List[np.ndarray]
    initial: Optional[ScalarField] = None

    @model_validator(mode="after")
    def _check_times(self):
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("trajectory times must be increasing")
        if not (len(self.times) == len(self.fields) == len(self.M) == len(self.hotspots)):
            raise ValueError("trajectory lists must have equal length")
        return self

    def ratio_series(self, lambda1: float) -> np.ndarray:
        """M(t) e^{lambda1 t} for every stored time."""
        return np.asarray(self.M) * np.exp(lambda1 * np.asarray(self.times))


class SemilinearSource(BaseModel):
    """A nonlinearity f with its primitive F (F(0) = 0) and derivative."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    fprime: Callable[[np.ndarray], np.ndarray]
    params: Dict[str, float] = Field(default_factory=dict)

    def primitive_error(self, upper: float = 1.0, samples: int = 64) -> float:
        """Largest |F' - f| by central differences on [0, upper]."""
        s = np.linspace(0.0, upper, samples)
        step = 1e-5 * max(upper, 1.0)
        derivative = (self.F(s + step) - self.F(s - step)) / (2 * step)
        scale = max(1.0, float(np.max(np.abs(self.f(s)))))
        return float(np.max(np.abs(derivative - self.f(s))) / scale)
