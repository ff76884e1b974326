"""
One-dimensional radial oracles on balls.

The small-diffusion ball value comes from nested quadrature, the
Lane-Emden and p-Laplace eigenvalues of balls from shooting.
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import special
from scipy.integrate import quad, solve_ivp

from hotspot.exceptions import DomainError, SolverError
from hotspot.services.special_functions import ball_volume

logger = logging.getLogger(__name__)

QUAD_RTOL = 1e-10
SHOOT_START = 1e-6


def _h_zero(N: int) -> float:
    """Integral of sin^(N-2) over [0, pi]."""
    return float(np.sqrt(np.pi) * special.gamma((N - 1) / 2.0) / special.gamma(N / 2.0))


def _h_scaled(x: float, N: int) -> float:
    """h(x) e^{-x} with h(x) = int_0^pi e^{x cos t} sin^(N-2) t dt."""
    if N == 2:
        return float(np.pi * special.i0e(x))
    if N == 3:
        return 2.0 if x == 0 else float(-np.expm1(-2 * x) / x)
    value, _ = quad(lambda t: np.exp(x * (np.cos(t) - 1)) * np.sin(t) ** (N - 2), 0, np.pi,
                    epsabs=0, epsrel=QUAD_RTOL, limit=200)
    return float(value)


def h_eps(sigma: float, eps: float, N: int, method: str = "closed") -> float:
    """
    h(sigma) = int_0^pi exp(sigma cos t / sqrt(eps)) sin^(N-2) t dt.

    method "closed" uses the Bessel (N = 2) and sinh (N = 3) forms,
    "quad" integrates directly.
    """
    if N < 2:
        raise DomainError(f"Dimension must be at least 2, got {N}")
    x = sigma / np.sqrt(eps)
    if method == "quad":
        value, _ = quad(lambda t: np.exp(x * np.cos(t)) * np.sin(t) ** (N - 2), 0, np.pi,
                        epsabs=0, epsrel=QUAD_RTOL, limit=200)
        return float(value)
    if method != "closed":
        raise DomainError(f"Unknown method '{method}'")
    return _h_scaled(x, N) * float(np.exp(x))


@lru_cache(maxsize=256)
def radial_q_eps(eps: float, r: float, N: int) -> float:
    """
    Center value of the solution of -Laplace w + w / eps = N on the ball of radius r.

    Computed as
        N h(0) int_0^r (int_0^s sigma^(N-1) h(sigma) dsigma) / (s^(N-1) h(s)^2) ds
    with the exponential growth of h factored out of both integrals.
    """
    if eps <= 0 or r < 0:
        raise DomainError(f"radial_q_eps needs eps > 0 and r >= 0, got eps={eps}, r={r}")
    if N < 2:
        raise DomainError(f"Dimension must be at least 2, got {N}")
    if r == 0:
        return 0.0
    root = np.sqrt(eps)
    # h(t) = h_scaled(t) e^{t/root}; the 1/h(s)^2 factor contributes e^{-2s/root}
    peak = [root] if root < r else None

    def inner(s: float) -> float:
        value, _ = quad(lambda t: t ** (N - 1) * _h_scaled(t / root, N) * np.exp((t - 2.0 * s) / root), 0, s,
                        epsabs=0, epsrel=QUAD_RTOL, limit=200)
        return value

    def outer(s: float) -> float:
        if s == 0:
            return 0.0
        return inner(s) / (s ** (N - 1) * _h_scaled(s / root, N) ** 2)

    value, _ = quad(outer, 0, r, epsabs=0, epsrel=QUAD_RTOL, limit=200, points=peak)
    return float(N * _h_zero(N) * value)


def radial_q_eps_disk(eps: float, r: float) -> float:
    """Closed form 2 eps (1 - 1 / I0(r / sqrt(eps))) of radial_q_eps for N = 2."""
    x = r / np.sqrt(eps)
    return float(2 * eps * (1 - np.exp(-x) / special.i0e(x)))


def _shoot(rhs, y0, event, label: str) -> Tuple[float, np.ndarray]:
    event.terminal = True
    event.direction = -1
    sol = solve_ivp(rhs, (SHOOT_START, 100.0), y0, method="DOP853", events=event, rtol=1e-12, atol=1e-14)
    if sol.status != 1 or not len(sol.t_events[0]):
        raise SolverError(f"Shooting for {label} found no first zero: {sol.message}")
    return float(sol.t_events[0][0]), sol.y_events[0][0]


@lru_cache(maxsize=64)
def radial_lane_emden(q: float, N: int, R: float = 1.0) -> float:
    """
    lambda_q of the ball of radius R: the minimum of |grad u|_2^2 over |u|_q = 1.

    Shoots -w'' - (N-1) w' / rho = w^(q-1) from w(0) = 1 to its first zero
    R0, then rescales.
    """
    if not 1 < q <= 2:
        raise DomainError(f"Lane-Emden exponent must lie in (1, 2], got {q}")
    if R <= 0:
        raise DomainError(f"Ball radius must be positive, got {R}")

    def rhs(rho, y):
        w, dw, _ = y
        wq = max(w, 0.0)
        return [dw, -wq ** (q - 1) - (N - 1) / rho * dw, N * ball_volume(N) * wq ** q * rho ** (N - 1)]

    def zero(rho, y):
        return y[0]

    r0 = SHOOT_START
    R0, state = _shoot(rhs, [1 - r0 ** 2 / (2 * N), -r0 / N, 0.0], zero, f"Lane-Emden q={q:g}")
    mass = state[2]
    A = (R0 ** N / mass) ** (1.0 / q)
    lam_unit = A ** (2 - q) * R0 ** 2
    logger.debug(f"Lane-Emden q={q:g}, N={N}: first zero {R0:.10f}, lambda_q(B1)={lam_unit:.10f}")
    return float(R ** (-2 + N * (1 - 2.0 / q)) * lam_unit)


@lru_cache(maxsize=64)
def radial_p_eigen(p: float, N: int, R: float = 1.0) -> float:
    """
    First eigenvalue of the p-Laplacian on the ball of radius R.

    Shoots (rho^(N-1) |w'|^(p-2) w')' = -rho^(N-1) |w|^(p-2) w from w(0) = 1;
    the first zero R0 gives lambda(B_R) = (R0 / R)^p.
    """
    if not p > 1:
        raise DomainError(f"p-eigen needs p > 1, got {p}")
    if R <= 0:
        raise DomainError(f"Ball radius must be positive, got {R}")

    def rhs(rho, y):
        w, v = y
        dw = np.sign(v) * (abs(v) / rho ** (N - 1)) ** (1.0 / (p - 1))
        return [dw, -rho ** (N - 1) * np.sign(w) * abs(w) ** (p - 1)]

    def zero(rho, y):
        return y[0]

    r0 = SHOOT_START
    w0 = 1 - (p - 1) / p * N ** (-1.0 / (p - 1)) * r0 ** (p / (p - 1))
    R0, _ = _shoot(rhs, [w0, -r0 ** N / N], zero, f"p-eigen p={p:g}")
    return float((R0 / R) ** p)
