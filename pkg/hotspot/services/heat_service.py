"""
Heat flow u_t = Laplace u with zero boundary values.
"""

import logging
import time
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from hotspot.config import get_config
from hotspot.exceptions import DomainError
from hotspot.models.domain_models import DomainSpec
from hotspot.models.field_models import Grid, HeatTrajectory, ScalarField
from hotspot.services.elliptic_service import discretize, solve_eigen, solve_torsion
from hotspot.services.field_service import near_max_indices
from hotspot.services.grid_service import GridOperators, LinearSolver

logger = logging.getLogger(__name__)

InitialDatum = Union[str, Callable, np.ndarray, ScalarField]


def initial_datum(domain: DomainSpec, g: InitialDatum, grid: Grid, h: float) -> ScalarField:
    """
    Resolve the initial temperature on a grid.

    Args:
        g: "phi1" (first eigenfunction, max 1), "one" (g = 1, discontinuous
           at the boundary), "torsion", a callable of domain points, an array
           of node values or a field on the same grid

    Returns:
        ScalarField: g at the grid nodes
    """
    params: Dict = {"N": domain.dimension, "h": h}
    if isinstance(g, str):
        if g == "phi1":
            lam, _, phi1 = solve_eigen(domain, h)
            values = phi1.values
            params["lambda1"] = lam
        elif g == "one":
            values = np.ones(grid.size)
            params["discontinuous"] = True
        elif g == "torsion":
            values = solve_torsion(domain, h).values
        else:
            raise DomainError(f"Unknown initial datum '{g}'")
        name = g
    elif isinstance(g, ScalarField):
        values = g.values
        name = g.problem
        params.update(g.params)
    elif callable(g):
        values = np.asarray(g(grid.lift(grid.points)), dtype=float).reshape(-1)
        name = getattr(g, "__name__", "callable")
    else:
        values = np.asarray(g, dtype=float).reshape(-1)
        name = "array"
    if values.shape != (grid.size,):
        raise DomainError(f"Initial datum has {values.size} values for {grid.size} nodes")
    if np.min(values) < -1e-12:
        raise DomainError(f"Initial datum '{name}' is negative, min {np.min(values):.3e}")
    params["g"] = name
    return ScalarField(grid=grid, values=np.maximum(values, 0.0), problem="heat_initial", params=params)


class _Stepper:
    """Implicit Euler and Crank-Nicolson steps with factorizations cached per (scheme, dt)."""

    def __init__(self, ops: GridOperators):
        self.M = ops.mass()
        self.K = ops.stiffness()
        self._cache: Dict[Tuple[str, float], Tuple[LinearSolver, Optional[sp.spmatrix]]] = {}

    def step(self, u: np.ndarray, dt: float, scheme: str) -> np.ndarray:
        key = (scheme, round(dt, 15))
        if key not in self._cache:
            if scheme == "ie":
                self._cache[key] = (LinearSolver(self.M + dt * self.K, label=f"heat IE dt={dt:.3e}"), None)
            else:
                explicit = (self.M - 0.5 * dt * self.K).tocsr()
                self._cache[key] = (LinearSolver(self.M + 0.5 * dt * self.K, label=f"heat CN dt={dt:.3e}"), explicit)
        solver, explicit = self._cache[key]
        rhs = self.M @ u if explicit is None else explicit @ u
        return solver.solve(rhs)


def solve_heat(domain: DomainSpec, g: InitialDatum, times: Sequence[float], h: Optional[float] = None,
               dt_max: Optional[float] = None) -> HeatTrajectory:
    """
    Evolve g under the heat equation and record snapshots at the given times.

    Implicit Euler steps start at h^2 / 2 and double up to dt_max; after that
    Crank-Nicolson steps of dt_max are taken. Steps are shortened to land on
    every requested time.
    """
    settings = get_config()
    dt_max = dt_max or settings.HEAT_DT_MAX
    targets = sorted(float(t) for t in times)
    if not targets:
        raise DomainError("Heat solve needs at least one output time")
    if targets[0] < 0 or len(set(targets)) != len(targets):
        raise DomainError(f"Output times must be distinct and nonnegative, got {list(times)}")
    start = time.perf_counter()
    grid, ops = discretize(domain, h)
    g_field = initial_datum(domain, g, grid, grid.h)
    stepper = _Stepper(ops)

    u = g_field.values.copy()
    t = 0.0
    dt = min(grid.h ** 2 / 2, dt_max)
    ramping = dt < dt_max
    steps = 0
    fields, M, hotspots = [], [], []
    for target in targets:
        while target - t > 1e-14 * max(1.0, target):
            scheme = "ie" if ramping else "cn"
            step = min(dt, target - t)
            u = stepper.step(u, step, scheme)
            t += step
            steps += 1
            if ramping and step == dt:
                dt = min(2 * dt, dt_max)
                ramping = dt < dt_max
        t = target
        field = g_field.with_values(u, problem="heat", t=target)
        fields.append(field)
        M.append(field.max_value)
        hotspots.append(grid.lift(grid.points[near_max_indices(field)]) if field.max_value > 0
                        else np.empty((0, grid.lift(grid.points[:1]).shape[1])))
    logger.info(f"Solved heat on '{domain.id}' from g='{g_field.params['g']}': {len(targets)} snapshots, "
                f"{steps} steps in {time.perf_counter() - start:.2f}s")
    return HeatTrajectory(times=targets, fields=fields, M=M, hotspots=hotspots, initial=g_field)
