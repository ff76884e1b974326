"""
Quasilinear and anisotropic torsion problems by energy minimization.

The discrete energy on the quadrant operators is

    E(u) = sum_q W_q [Phi(H_eps(g_q)) - Phi(H_eps(0))] - sum_i V_i b_i u_i

with g_q = (Gx u, Gy u)_q and H_eps a smoothed norm. Each step solves the
lagged-diffusivity system L(u) u' = V b, where L(u) freezes phi(H_eps)
times the Hessian-free metric of H_eps at u, and accepts u + alpha (u' - u)
through an Armijo line search. The smoothing eps is driven down over a
short continuation.
"""

import logging
import time
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from hotspot.exceptions import DomainError, SolverError, UnsupportedError
from hotspot.models.domain_models import DomainSpec
from hotspot.models.field_models import ScalarField
from hotspot.models.young_models import NormKind
from hotspot.services.anisotropy_service import AnisoNorm
from hotspot.services.elliptic_service import discretize
from hotspot.services.grid_service import GridOperators, LinearSolver
from hotspot.services.young_service import YoungPair, make_power_pair

logger = logging.getLogger(__name__)

STAGES = 6
EPS_START = 0.1
EPS_MIN = 1e-6
MAX_STEPS = 200
STEP_TOL = 1e-8
ENERGY_RTOL = 1e-10
ARMIJO = 1e-4
ALPHA_MIN = 1e-10
LINEAR_TOL = 1e-8


def eps_schedule(p: float) -> np.ndarray:
    """
    Smoothing levels of the continuation.

    For p > 2 the lagged coefficient phi(H)/H ~ eps^(p-2) at flat spots;
    the floor keeps it above 1e-10.
    """
    floor = EPS_MIN if p <= 2 else max(EPS_MIN, 1e-10 ** (1.0 / (p - 2.0)))
    return np.geomspace(max(EPS_START, floor), floor, STAGES)


class _SmoothedNorm:
    """H_eps and its metric D with grad H_eps(g) = D g on the quadrant gradients."""

    def __init__(self, norm: Optional[AnisoNorm]):
        if norm is None or norm.is_euclidean:
            self.A = np.eye(2)
            self.s = None
        elif norm.kind == NormKind.ELLIPTIC:
            if norm.A.shape != (2, 2):
                raise UnsupportedError("Anisotropic solves are planar")
            self.A = norm.A
            self.s = None
        else:
            self.A = None
            self.s = norm.s

    def value(self, gx: np.ndarray, gy: np.ndarray, eps: float) -> np.ndarray:
        if self.A is not None:
            A = self.A
            return np.sqrt(eps ** 2 + A[0, 0] * gx ** 2 + 2 * A[0, 1] * gx * gy + A[1, 1] * gy ** 2)
        s = self.s
        return ((gx ** 2 + eps ** 2) ** (s / 2) + (gy ** 2 + eps ** 2) ** (s / 2)) ** (1.0 / s)

    def metric(self, gx: np.ndarray, gy: np.ndarray, eps: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(H, Dxx, Dyy, Dxy) per quadrant."""
        H = self.value(gx, gy, eps)
        if self.A is not None:
            A = self.A
            return H, A[0, 0] / H, A[1, 1] / H, A[0, 1] / H
        s = self.s
        scale = H ** (1.0 - s)
        Dxx = (gx ** 2 + eps ** 2) ** ((s - 2) / 2) * scale
        Dyy = (gy ** 2 + eps ** 2) ** ((s - 2) / 2) * scale
        return H, Dxx, Dyy, np.zeros_like(H)


def _energy(ops: GridOperators, pair: YoungPair, metric: _SmoothedNorm, u: np.ndarray,
            rhs: np.ndarray, eps: float) -> float:
    gx, gy = ops.gradients(u)
    H = metric.value(gx, gy, eps)
    H0 = metric.value(np.zeros(1), np.zeros(1), eps)[0]
    return float(np.dot(ops.W, pair.Phi(H) - pair.Phi(H0)) - np.dot(rhs, u))


def _lagged_matrix(ops: GridOperators, pair: YoungPair, metric: _SmoothedNorm, u: np.ndarray, eps: float):
    gx, gy = ops.gradients(u)
    H, Dxx, Dyy, Dxy = metric.metric(gx, gy, eps)
    c = ops.W * pair.phi(H)
    Gx, Gy = ops.Gx, ops.Gy
    L = Gx.T @ sp.diags(c * Dxx) @ Gx + Gy.T @ sp.diags(c * Dyy) @ Gy
    if np.any(Dxy != 0):
        cross = sp.diags(c * Dxy)
        L = L + Gx.T @ cross @ Gy + Gy.T @ cross @ Gx
    return L.tocsc()


def minimize_energy(ops: GridOperators, pair: YoungPair, b: np.ndarray, norm: Optional[AnisoNorm] = None,
                    u0: Optional[np.ndarray] = None, schedule: Optional[np.ndarray] = None,
                    label: str = "energy") -> Tuple[np.ndarray, Dict]:
    """
    Minimize the smoothed discrete energy with source b.

    Args:
        ops: Quadrant operators of the grid
        pair: Young pair supplying Phi and phi
        b: Source value per node
        norm: Norm H; Euclidean when None
        u0: Starting iterate; the linear torsion-type solve when None
        schedule: Decreasing smoothing levels, eps_schedule(p) by default
        label: Name used in log and error messages

    Returns:
        (u, info): minimizer and a dict with energies, steps and eps levels
    """
    metric = _SmoothedNorm(norm)
    rhs = ops.V * b
    if schedule is None:
        schedule = eps_schedule(pair.p)
    if u0 is None:
        u = LinearSolver(ops.stiffness(), label=f"{label} start", tol=LINEAR_TOL).solve(rhs)
    else:
        u = np.array(u0, dtype=float)
    energies: List[float] = []
    steps = 0
    for stage, eps in enumerate(schedule):
        last = stage == len(schedule) - 1
        energy = _energy(ops, pair, metric, u, rhs, eps)
        converged = False
        for _ in range(MAX_STEPS):
            L = _lagged_matrix(ops, pair, metric, u, eps)
            d = LinearSolver(L, label=f"{label} eps={eps:.1e}", tol=LINEAR_TOL).solve(rhs) - u
            slope = -float(d @ (L @ d))
            alpha = 1.0
            while True:
                trial = u + alpha * d
                trial_energy = _energy(ops, pair, metric, trial, rhs, eps)
                if trial_energy <= energy + ARMIJO * alpha * slope:
                    break
                alpha /= 2
                if alpha < ALPHA_MIN:
                    break
            steps += 1
            scale = max(1.0, float(np.max(np.abs(u))))
            if alpha < ALPHA_MIN:
                # no decrease left at machine precision
                converged = float(np.max(np.abs(d))) < 1e-6 * scale
                logger.debug(f"{label}: line search exhausted at eps={eps:.1e}, |d|={np.max(np.abs(d)):.2e}")
                break
            decrease = energy - trial_energy
            u, energy = trial, trial_energy
            energies.append(energy)
            if float(np.max(np.abs(alpha * d))) < STEP_TOL * scale or decrease <= ENERGY_RTOL * abs(energy):
                converged = True
                break
        logger.debug(f"{label}: stage eps={eps:.1e} energy={energy:.10g} converged={converged}")
        if last and not converged:
            raise SolverError(f"Energy minimization for {label} did not converge", iterations=steps)
    return u, {"energies": energies, "steps": steps, "eps": [float(e) for e in schedule]}


def solve_aniso_torsion(domain: DomainSpec, norm: Optional[AnisoNorm], pair: YoungPair,
                        h: Optional[float] = None) -> ScalarField:
    """
    Minimizer of sum W Phi(H(grad u)) - N sum V u, zero on the boundary.

    The Euclidean norm gives the quasilinear torsion problem
    -div(phi(|grad u|) grad u / |grad u|) = N.
    """
    start = time.perf_counter()
    grid, ops = discretize(domain, h)
    euclidean = norm is None or norm.is_euclidean
    if grid.axisymmetric and not euclidean:
        raise UnsupportedError(f"Anisotropic torsion on the revolution domain '{domain.id}'")
    N = domain.dimension
    label = f"{pair.name} torsion on '{domain.id}'"
    u, info = minimize_energy(ops, pair, np.full(grid.size, float(N)), norm=norm, label=label)
    logger.info(f"Solved {label} ({norm if norm is not None else 'euclidean'}): max {u.max():.6f}, "
                f"{info['steps']} steps in {time.perf_counter() - start:.2f}s")
    params = {"N": N, "h": grid.h, "p": pair.p, "pair": pair.name, "energies": info["energies"]}
    problem = "p_torsion" if euclidean else "aniso"
    return ScalarField(grid=grid, values=u, problem=problem, params=params)


def solve_p_torsion(domain: DomainSpec, p: float, h: Optional[float] = None) -> ScalarField:
    """p-Laplace torsion: -div(|grad u|^(p-2) grad u) = N, u = 0 on the boundary."""
    if not p > 1:
        raise DomainError(f"p-torsion needs p > 1, got {p}")
    return solve_aniso_torsion(domain, None, make_power_pair(p), h)


def solve_p_eigen(domain: DomainSpec, p: float, h: Optional[float] = None,
                  max_iter: int = 100, rtol: float = 1e-8) -> Tuple[float, ScalarField]:
    """
    First p-Laplace Dirichlet eigenpair by nonlinear inverse iteration.

    Each step solves -Delta_p w = u^(p-1) and rescales w to unit L^p norm.

    Returns:
        (lambda_1p, u): Rayleigh quotient sum W |g|^p / sum V |u|^p and the
        normalized eigenfunction
    """
    pair = make_power_pair(p)
    grid, ops = discretize(domain, h)
    V = ops.V

    def normalize(w):
        return w / np.dot(V, np.abs(w) ** p) ** (1.0 / p)

    def rayleigh(w):
        gx, gy = ops.gradients(w)
        return float(np.dot(ops.W, np.hypot(gx, gy) ** p) / np.dot(V, np.abs(w) ** p))

    label = f"p-eigen p={p:g} on '{domain.id}'"
    full = eps_schedule(p)
    u, _ = minimize_energy(ops, pair, np.ones(grid.size), schedule=full, label=label)
    u = normalize(u)
    lam = rayleigh(u)
    for iteration in range(1, max_iter + 1):
        w, _ = minimize_energy(ops, pair, np.abs(u) ** (p - 1), u0=u, schedule=full[-1:], label=label)
        u = normalize(w)
        new = rayleigh(u)
        change = abs(new - lam) / new
        lam = new
        if change < rtol:
            break
    else:
        raise SolverError(f"Inverse iteration for {label} did not converge", residual=change, iterations=max_iter)
    logger.info(f"Solved {label}: lambda={lam:.8f} after {iteration} iterations")
    return lam, ScalarField(grid=grid, values=u, problem="p_eigen",
                            params={"N": domain.dimension, "h": grid.h, "p": p, "lambda_1p": lam})
