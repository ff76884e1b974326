"""
Linear and semilinear elliptic solvers on domain grids.
"""

import logging
import time
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from hotspot.config import get_config
from hotspot.exceptions import DomainError, SolverError, UnsupportedError
from hotspot.models.domain_models import DomainKind, DomainSpec
from hotspot.models.field_models import Grid, ScalarField, SemilinearSource
from hotspot.services.grid_service import GridOperators, LinearSolver, build_grid, build_operators

logger = logging.getLogger(__name__)

EIGEN_RTOL = 1e-10
EIGEN_MAX_ITER = 500


def discretize(domain: DomainSpec, h: Optional[float] = None) -> Tuple[Grid, GridOperators]:
    """Grid and quadrant operators for a domain at spacing h (config default if None)."""
    h = h or get_config().DEFAULT_H
    grid = build_grid(domain, h)
    depth = float(grid.distance.max())
    if depth < 30 * h:
        logger.warning(f"h={h:.4g} resolves '{domain.id}' with only {depth / h:.1f} cells across the inradius")
    return grid, build_operators(grid)


def solve_torsion(domain: DomainSpec, h: Optional[float] = None) -> ScalarField:
    """
    Torsion function: -Laplace u = N in the domain, u = 0 on the boundary.

    Domains of revolution are solved on their meridian section.
    """
    if domain.kind == DomainKind.REVOLUTION or domain.dimension == 3:
        return solve_torsion_axisymmetric(domain, h)
    return _solve_torsion(domain, h, "torsion")


def solve_torsion_axisymmetric(domain: DomainSpec, h: Optional[float] = None) -> ScalarField:
    """
    Torsion function of a solid of revolution.

    Solves -(u_rr + u_r / r + u_zz) = 3 on the half-plane section; the
    axis carries the symmetry condition u_r = 0 through its half cells.
    """
    grid_kind_ok = domain.kind == DomainKind.REVOLUTION or (domain.kind == DomainKind.BALL and domain.dimension == 3)
    if not grid_kind_ok:
        raise UnsupportedError(f"Axisymmetric torsion needs a domain of revolution, got {domain.kind.value}")
    return _solve_torsion(domain, h, "torsion")


def _solve_torsion(domain: DomainSpec, h: Optional[float], problem: str) -> ScalarField:
    start = time.perf_counter()
    grid, ops = discretize(domain, h)
    N = domain.dimension
    K = ops.stiffness()
    u = LinearSolver(K, label=f"{problem} on '{domain.id}'").solve(ops.V * N)
    logger.info(f"Solved {problem} on '{domain.id}': {grid.size} unknowns, max {u.max():.6f} "
                f"in {time.perf_counter() - start:.2f}s")
    return ScalarField(grid=grid, values=u, problem=problem, params={"N": N, "h": grid.h})


def solve_eigen(domain: DomainSpec, h: Optional[float] = None) -> Tuple[float, ScalarField, ScalarField]:
    """
    First Dirichlet eigenpair by inverse power iteration.

    Returns:
        (lambda1, psi1, phi1): psi1 has unit discrete L2 norm, phi1 has max 1
    """
    start = time.perf_counter()
    grid, ops = discretize(domain, h)
    K = ops.stiffness()
    V = ops.V
    solver = LinearSolver(K, label=f"eigen on '{domain.id}'")
    u = np.ones(grid.size)
    u /= np.sqrt(np.dot(V, u * u))
    lam = float(u @ (K @ u))
    for iteration in range(1, EIGEN_MAX_ITER + 1):
        w = solver.solve(V * u)
        u = w / np.sqrt(np.dot(V, w * w))
        new = float(u @ (K @ u))
        change = abs(new - lam) / abs(new)
        lam = new
        if change < EIGEN_RTOL:
            break
    else:
        raise SolverError(f"Inverse iteration on '{domain.id}' stagnated", residual=change, iterations=EIGEN_MAX_ITER)
    if u.sum() < 0:
        u = -u
    logger.info(f"Solved eigen on '{domain.id}': lambda1={lam:.8f} after {iteration} iterations "
                f"in {time.perf_counter() - start:.2f}s")
    params = {"N": domain.dimension, "h": grid.h, "lambda1": lam}
    psi1 = ScalarField(grid=grid, values=u, problem="eigen", params=params)
    phi1 = psi1.with_values(u / u.max(), problem="eigen_normalized")
    return lam, psi1, phi1


def solve_small_diffusion(domain: DomainSpec, eps: float, h: Optional[float] = None) -> Tuple[ScalarField, ScalarField]:
    """
    -Laplace u + u / eps = N with zero boundary values, and v = 1 - u / (N eps).

    Returns:
        (u, v) as fields
    """
    if eps <= 0:
        raise DomainError(f"Diffusion parameter must be positive, got {eps}")
    grid, ops = discretize(domain, h)
    N = domain.dimension
    A = ops.stiffness() + sp.diags(ops.V / eps)
    u = LinearSolver(A, label=f"small diffusion eps={eps:g}").solve(ops.V * N)
    v = 1.0 - u / (N * eps)
    logger.info(f"Solved small diffusion on '{domain.id}' for eps={eps:g}: max u {u.max():.6g}")
    params = {"N": N, "h": grid.h, "eps": eps}
    field = ScalarField(grid=grid, values=u, problem="small_diffusion", params=params)
    return field, field.with_values(v, problem="small_diffusion_v")


def constant_source(value: float) -> SemilinearSource:
    return SemilinearSource(name="constant", f=lambda s: np.full_like(np.asarray(s, dtype=float), value),
                            F=lambda s: value * np.asarray(s, dtype=float),
                            fprime=lambda s: np.zeros_like(np.asarray(s, dtype=float)), params={"value": value})


def linear_source(lam: float) -> SemilinearSource:
    return SemilinearSource(name="linear", f=lambda s: lam * np.asarray(s, dtype=float),
                            F=lambda s: lam * np.asarray(s, dtype=float) ** 2 / 2,
                            fprime=lambda s: np.full_like(np.asarray(s, dtype=float), lam), params={"lambda": lam})


def small_diffusion_source(eps: float, N: int) -> SemilinearSource:
    """f(s) = N - s / eps."""
    return SemilinearSource(name="small_diffusion", f=lambda s: N - np.asarray(s, dtype=float) / eps,
                            F=lambda s: N * np.asarray(s, dtype=float) - np.asarray(s, dtype=float) ** 2 / (2 * eps),
                            fprime=lambda s: np.full_like(np.asarray(s, dtype=float), -1.0 / eps),
                            params={"eps": eps, "N": N})


def lane_emden_source(q: float) -> SemilinearSource:
    """f(s) = s^(q-1) for the normalized Lane-Emden problem, 1 < q <= 2."""
    if not 1 < q <= 2:
        raise DomainError(f"Lane-Emden exponent must lie in (1, 2], got {q}")
    return SemilinearSource(name="lane_emden", f=lambda s: np.maximum(np.asarray(s, dtype=float), 0.0) ** (q - 1),
                            F=lambda s: np.maximum(np.asarray(s, dtype=float), 0.0) ** q / q,
                            fprime=lambda s: (q - 1) * np.maximum(np.asarray(s, dtype=float), 1e-300) ** (q - 2),
                            params={"q": q})


def solve_semilinear(domain: DomainSpec, source: SemilinearSource, h: Optional[float] = None,
                     mode: str = "fixed-point", max_iter: int = 2000, tol: float = 1e-10) -> ScalarField:
    """
    -Laplace u = f(u), u >= 0, u = 0 on the boundary.

    fixed-point: shifted Picard iteration (K + s M) u' = M (f(u) + s u) with
    s = max(0, -min f'(u)).
    normalized: Lane-Emden iteration w = K^-1 M u^(q-1), u = w / |w|_q;
    the field carries lambda_q = u.K u in its params.
    """
    if mode not in ("fixed-point", "normalized"):
        raise DomainError(f"Unknown semilinear mode '{mode}'")
    grid, ops = discretize(domain, h)
    K = ops.stiffness()
    V = ops.V
    if mode == "normalized":
        return _lane_emden_iteration(domain, grid, K, V, source, max_iter)

    u = np.zeros(grid.size)
    solvers = {}
    for iteration in range(1, max_iter + 1):
        shift = max(0.0, -float(np.min(source.fprime(u))))
        key = round(shift, 12)
        if key not in solvers:
            solvers[key] = LinearSolver(K + sp.diags(V * shift), label=f"semilinear shift {shift:.3g}")
        new = solvers[key].solve(V * (source.f(u) + shift * u))
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > 1e12:
            raise SolverError(f"Semilinear iteration for '{source.name}' diverged", iterations=iteration)
        change = float(np.max(np.abs(new - u)))
        u = new
        if change <= tol * max(1.0, float(np.max(np.abs(u)))):
            break
    else:
        raise SolverError(f"Semilinear iteration for '{source.name}' did not converge", residual=change,
                          iterations=max_iter)
    logger.info(f"Solved semilinear '{source.name}' on '{domain.id}' in {iteration} iterations")
    return ScalarField(grid=grid, values=np.maximum(u, 0.0) if np.min(u) > -1e-12 else u, problem="semilinear",
                       params={"N": domain.dimension, "h": grid.h, "source": source.name, **source.params})


def _lane_emden_iteration(domain: DomainSpec, grid: Grid, K, V: np.ndarray, source: SemilinearSource,
                          max_iter: int) -> ScalarField:
    q = float(source.params.get("q", 2.0))
    solver = LinearSolver(K, label=f"lane-emden q={q:g}")

    def normalize(w):
        return w / np.dot(V, np.abs(w) ** q) ** (1.0 / q)

    u = normalize(solver.solve(V * float(domain.dimension)))
    lam = float(u @ (K @ u))
    for iteration in range(1, max_iter + 1):
        u_new = normalize(solver.solve(V * source.f(u)))
        lam_new = float(u_new @ (K @ u_new))
        change = float(np.max(np.abs(u_new - u))) / float(np.max(u_new))
        u, lam_change, lam = u_new, abs(lam_new - lam) / lam_new, lam_new
        if change < 1e-10 and lam_change < 1e-12:
            break
    else:
        raise SolverError(f"Lane-Emden iteration q={q:g} did not converge", residual=change, iterations=max_iter)
    logger.info(f"Solved Lane-Emden q={q:g} on '{domain.id}': lambda_q={lam:.8f} after {iteration} iterations")
    return ScalarField(grid=grid, values=u, problem="lane_emden",
                       params={"N": domain.dimension, "h": grid.h, "q": q, "lambda_q": lam})


def solve_lane_emden(domain: DomainSpec, q: float, h: Optional[float] = None) -> Tuple[float, ScalarField]:
    """Lane-Emden constant lambda_q and its normalized minimizer."""
    field = solve_semilinear(domain, lane_emden_source(q), h, mode="normalized")
    return float(field.params["lambda_q"]), field
