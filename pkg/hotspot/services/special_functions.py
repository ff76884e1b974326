"""
Special functions used by the bound evaluators.
"""

import logging
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.optimize import brentq

from hotspot.exceptions import DomainError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def bessel_first_zero(nu: float) -> float:
    """
    First positive zero j_{nu,1} of the Bessel function J_nu.

    The zero is bracketed by scanning J_nu on a uniform grid and then
    polished with Brent's method to absolute 1e-12.

    Args:
        nu: Order, 0 <= nu <= 10

    Returns:
        float: j_{nu,1}
    """
    if nu < 0:
        raise DomainError(f"Bessel order must be nonnegative, got {nu}")
    if nu > 10:
        raise DomainError(f"Bessel order {nu} outside the supported range [0, 10]")
    # j_{nu,1} > nu, and the first zero lies below nu + 2 nu^{1/3} + 3
    grid = np.linspace(max(nu, 1e-3), nu + 2.0 * max(nu, 1.0) ** (1.0 / 3.0) + 4.0, 2000)
    values = special.jv(nu, grid)
    crossings = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    if crossings.size == 0:
        raise DomainError(f"No sign change of J_{nu} found in the scan range")
    k = int(crossings[0])
    return float(brentq(lambda x: special.jv(nu, x), grid[k], grid[k + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))


def lambda1_ball(N: int) -> float:
    """First Dirichlet eigenvalue of the unit ball in R^N."""
    if N < 1:
        raise DomainError(f"Dimension must be positive, got {N}")
    return bessel_first_zero(N / 2.0 - 1.0) ** 2


def gamma_beta(a: float, b: float) -> float:
    """Euler's beta function through log-Gamma."""
    if a <= 0 or b <= 0:
        raise DomainError(f"Beta function needs positive arguments, got ({a}, {b})")
    return float(np.exp(special.betaln(a, b)))


def ball_volume(k: int) -> float:
    """Volume of the unit ball in R^k."""
    if k < 1:
        raise DomainError(f"Dimension must be positive, got {k}")
    return float(np.pi ** (k / 2.0) / special.gamma(k / 2.0 + 1.0))


def arccosh(x: float) -> float:
    """Inverse hyperbolic cosine on [1, inf)."""
    if x < 1:
        raise DomainError(f"arccosh is defined on [1, inf), got {x}")
    return float(np.arccosh(x))
