"""
Young function pairs (Phi, Psi) with derivatives and inverses.
"""

import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from hotspot.exceptions import ConsistencyError, DomainError
from hotspot.models.young_models import GrowthConstants, GrowthReport, YoungKind, YoungSpec

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

TABLE_POINTS = 2048
CHI_RTOL = 1e-5
CHI_FAIL = 1e-4


def monotone_inverse(func: Callable[[np.ndarray], np.ndarray], values: ArrayLike,
                     rtol: float = 1e-13, upper: float = np.inf) -> np.ndarray:
    """
    Invert an increasing function with func(0) = 0 by vectorized bisection.

    The bracket [b/2, b] is found by doubling or halving b from 1.
    """
    target = np.atleast_1d(np.asarray(values, dtype=float))
    if np.any(target < 0):
        raise DomainError(f"Cannot invert at negative values {target[target < 0][:3]}")
    out = np.zeros_like(target)
    live = target > 0
    if not np.any(live):
        return out
    t = target[live]
    hi = np.ones_like(t)
    for _ in range(2100):
        low_mask = func(hi) < t
        if not np.any(low_mask):
            break
        if np.any(hi[low_mask] > upper):
            raise DomainError(f"Value {t[low_mask].max():.6g} is beyond the range of the function")
        hi = np.where(low_mask, hi * 2, hi)
    for _ in range(2100):
        shrink = func(hi / 2) >= t
        if not np.any(shrink):
            break
        hi = np.where(shrink, hi / 2, hi)
    lo = hi / 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = func(mid) >= t
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= rtol * hi):
            break
    out[live] = 0.5 * (lo + hi)
    return out


def _scalar_or_array(x, result: np.ndarray):
    return float(result[0]) if np.ndim(x) == 0 else result


class YoungPair:
    """
    A Young function Phi on [0, inf) with phi = Phi', its conjugate Psi and psi = Psi'.

    Missing inverses are computed numerically: psi inverts phi by
    bisection and Psi(tau) = tau psi(tau) - Phi(psi(tau)).
    """

    def __init__(self, kind: YoungKind, Phi: Callable, phi: Callable, dphi: Callable,
                 growth: GrowthConstants, Psi: Optional[Callable] = None,
                 psi: Optional[Callable] = None, name: Optional[str] = None,
                 phi_max: float = np.inf):
        self.kind = kind
        self._Phi = Phi
        self._phi = phi
        self._dphi = dphi
        self._Psi = Psi
        self._psi = psi
        self.growth = growth
        self.name = name or kind.value
        self.phi_max = phi_max

    def __repr__(self) -> str:
        return f"YoungPair({self.name}, p={self.p})"

    @property
    def p(self) -> float:
        return self.growth.p

    @property
    def p_conjugate(self) -> float:
        return self.growth.p_conjugate

    def Phi(self, sigma: ArrayLike) -> ArrayLike:
        return self._Phi(np.asarray(sigma, dtype=float))

    def phi(self, sigma: ArrayLike) -> ArrayLike:
        return self._phi(np.asarray(sigma, dtype=float))

    def dphi(self, sigma: ArrayLike) -> ArrayLike:
        return self._dphi(np.asarray(sigma, dtype=float))

    def psi(self, tau: ArrayLike) -> ArrayLike:
        if self._psi is not None:
            return self._psi(np.asarray(tau, dtype=float))
        return _scalar_or_array(tau, monotone_inverse(self._phi, tau))

    def Psi(self, tau: ArrayLike) -> ArrayLike:
        if self._Psi is not None:
            return self._Psi(np.asarray(tau, dtype=float))
        t = np.asarray(tau, dtype=float)
        s = np.asarray(self.psi(t))
        return t * s - self._Phi(s)

    def Psi_inverse(self, s: ArrayLike) -> ArrayLike:
        return _scalar_or_array(s, monotone_inverse(lambda t: np.asarray(self.Psi(t)), s))


def make_power_pair(p: float) -> YoungPair:
    """Phi = sigma^p / p with conjugate Psi = tau^p' / p'."""
    if not p > 1:
        raise DomainError(f"Power pair needs p > 1, got {p}")
    q = p / (p - 1.0)
    return YoungPair(
        kind=YoungKind.POWER,
        Phi=lambda s: s ** p / p,
        phi=lambda s: s ** (p - 1.0),
        dphi=lambda s: (p - 1.0) * s ** (p - 2.0),
        Psi=lambda t: t ** q / q,
        psi=lambda t: t ** (q - 1.0),
        growth=GrowthConstants(p=p, a=0.0, c=1.0, C=1.0),
        name=f"power(p={p:g})",
    )


def make_cosh_pair(growth: Optional[GrowthConstants] = None) -> YoungPair:
    """Phi = cosh - 1, phi = sinh; growth fitted on [0, 1] with p = 2 unless given."""
    pair = YoungPair(
        kind=YoungKind.COSH,
        Phi=lambda s: np.cosh(s) - 1.0,
        phi=np.sinh,
        dphi=np.cosh,
        Psi=lambda t: t * np.arcsinh(t) - np.sqrt(1.0 + t ** 2) + 1.0,
        psi=np.arcsinh,
        growth=GrowthConstants(p=2.0),
        name="cosh",
    )
    pair.growth = growth or fit_growth(pair, 2.0, 0.0, (0.0, 1.0))
    return pair


def make_shifted_power_pair(p: float, a: float, growth: Optional[GrowthConstants] = None) -> YoungPair:
    """phi(sigma) = (a + sigma)^(p-1) - a^(p-1) for a shift a > 0."""
    if not p > 1 or not a > 0:
        raise DomainError(f"Shifted power pair needs p > 1 and a > 0, got p={p}, a={a}")
    base = a ** (p - 1.0)
    pair = YoungPair(
        kind=YoungKind.SHIFTED_POWER,
        Phi=lambda s: ((a + s) ** p - a ** p) / p - base * s,
        phi=lambda s: (a + s) ** (p - 1.0) - base,
        dphi=lambda s: (p - 1.0) * (a + s) ** (p - 2.0),
        psi=lambda t: (t + base) ** (1.0 / (p - 1.0)) - a,
        growth=GrowthConstants(p=p, a=a, c=1.0, C=1.0),
        name=f"shifted_power(p={p:g}, a={a:g})",
    )
    pair.growth = growth or fit_growth(pair, p, a, (0.0, 1.0))
    return pair


def make_tabulated_pair(sigma, Phi, p: float = 2.0, growth: Optional[GrowthConstants] = None) -> YoungPair:
    """
    Pair interpolated from samples of Phi.

    The samples are interpolated monotonically and resampled on a
    log-spaced table; phi is the derivative of the table interpolant.
    """
    sigma = np.asarray(sigma, dtype=float)
    values = np.asarray(Phi, dtype=float)
    coarse = PchipInterpolator(sigma, values, extrapolate=False)
    fine = np.concatenate([[0.0], np.geomspace(max(sigma[1] * 1e-3, 1e-12), sigma[-1], TABLE_POINTS - 1)])
    table = PchipInterpolator(fine, coarse(fine), extrapolate=False)
    derivative = table.derivative()
    sigma_max = float(sigma[-1])

    def _in_range(s):
        if np.any(s > sigma_max * (1 + 1e-12)):
            raise DomainError(f"Tabulated Phi is only known on [0, {sigma_max}]")
        return np.clip(s, 0.0, sigma_max)

    second = table.derivative(2)
    phi_fn = lambda s: np.maximum(derivative(np.clip(s, 0.0, sigma_max)), 0.0)  # noqa: E731
    phi_top = float(phi_fn(np.array([sigma_max]))[0])
    phi_values = phi_fn(fine[1:])
    if np.any(np.diff(phi_values) < -1e-6 * max(1.0, phi_top)):
        raise DomainError("Tabulated Phi is not convex")

    def psi_fn(t):
        t = np.asarray(t, dtype=float)
        if np.any(t > phi_top):
            raise DomainError(f"Slope {float(np.max(t)):.6g} exceeds the tabulated range of phi")
        return monotone_inverse(phi_fn, t, upper=sigma_max).reshape(t.shape)

    pair = YoungPair(
        kind=YoungKind.TABULATED,
        Phi=lambda s: table(_in_range(s)),
        phi=phi_fn,
        dphi=lambda s: np.maximum(second(np.clip(s, 0.0, sigma_max)), 0.0),
        psi=psi_fn,
        growth=GrowthConstants(p=p),
        name="tabulated",
        phi_max=phi_top,
    )
    pair.growth = growth or fit_growth(pair, p, 0.0, (0.0, min(1.0, sigma_max)))
    return pair


def make_young_pair(spec: YoungSpec) -> YoungPair:
    """Build a pair from its config description."""
    if spec.kind == YoungKind.POWER:
        return make_power_pair(spec.p)
    if spec.kind == YoungKind.COSH:
        return make_cosh_pair(spec.growth)
    if spec.kind == YoungKind.SHIFTED_POWER:
        return make_shifted_power_pair(spec.p, spec.a, spec.growth)
    return make_tabulated_pair(spec.sigma, spec.Phi, spec.p, spec.growth)


def conjugate(pair_or_Phi: Union[YoungPair, Callable], tau: float) -> float:
    """
    Young conjugate Psi(tau) = max_{sigma >= 0} [tau sigma - Phi(sigma)].

    Power pairs use the closed form. Otherwise the maximum is bracketed in
    [0, sigma_max] with phi(sigma_max) > tau (or a secant slope above tau
    for a bare Phi) and located by bounded scalar minimization.
    """
    if tau < 0:
        raise DomainError(f"Conjugate needs tau >= 0, got {tau}")
    if isinstance(pair_or_Phi, YoungPair) and pair_or_Phi.kind == YoungKind.POWER:
        return float(pair_or_Phi.Psi(tau))
    if tau == 0:
        return 0.0
    if isinstance(pair_or_Phi, YoungPair):
        Phi = pair_or_Phi.Phi
        slope = lambda s: float(pair_or_Phi.phi(s))  # noqa: E731
        reach = 1.0
    else:
        Phi = pair_or_Phi
        # by convexity phi(2s) exceeds the secant slope on [s, 2s]
        slope = lambda s: (float(Phi(2 * s)) - float(Phi(s))) / s  # noqa: E731
        reach = 2.0
    sigma_max = 1.0
    for _ in range(200):
        if slope(sigma_max) > tau:
            break
        sigma_max *= 2.0
    else:
        raise DomainError(f"Phi grows too slowly to conjugate at tau={tau}")
    sigma_max *= reach
    result = minimize_scalar(lambda s: float(Phi(s)) - tau * s, bounds=(0.0, sigma_max), method="bounded",
                             options={"xatol": 1e-12 * sigma_max, "maxiter": 500})
    return float(-result.fun)


def psi_inverse(pair: YoungPair, s: float) -> float:
    """Psi^{-1}(s) by monotone bisection."""
    if s < 0:
        raise DomainError(f"Psi^-1 needs s >= 0, got {s}")
    return float(pair.Psi_inverse(s))


def zeta(pair: YoungPair, s: ArrayLike) -> ArrayLike:
    """zeta = psi o Psi^{-1}."""
    return pair.psi(pair.Psi_inverse(s))


def chi(pair: YoungPair, sigma: float, N: int) -> float:
    """
    chi(sigma) = Psi^{-1}(N sigma) / N, cross-checked by quadrature.

    The quadrature integrates 1/zeta(N s) over [0, sigma] after the
    substitution s = sigma u^2, which removes the endpoint singularity
    for p >= 2 and weakens it otherwise.

    Raises:
        ConsistencyError: closed form and quadrature differ by more than 1e-4
    """
    if sigma < 0:
        raise DomainError(f"chi needs sigma >= 0, got {sigma}")
    if N < 2:
        raise DomainError(f"chi needs N >= 2, got {N}")
    value = psi_inverse(pair, N * sigma) / N
    if sigma == 0:
        return 0.0

    def integrand(u):
        return 2.0 * sigma * u / float(zeta(pair, N * sigma * u * u)) if u > 0 else 0.0

    integral, _ = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
    mismatch = abs(integral - value) / max(abs(value), 1e-300)
    if mismatch > CHI_FAIL:
        raise ConsistencyError(f"chi identity failed for {pair}: {value:.10g} vs quadrature {integral:.10g}")
    if mismatch > CHI_RTOL:
        logger.warning(f"chi quadrature drift {mismatch:.2e} for {pair} at sigma={sigma}")
    return value


def young_inequality_gap(pair: YoungPair, sigma: ArrayLike, tau: ArrayLike) -> ArrayLike:
    """Phi(sigma) + Psi(tau) - sigma tau, nonnegative with equality at tau = phi(sigma)."""
    return pair.Phi(sigma) + pair.Psi(tau) - np.asarray(sigma) * np.asarray(tau)


def _envelopes(pair: YoungPair, sigma: np.ndarray, p: float, a: float) -> Tuple[np.ndarray, np.ndarray]:
    """phi / (a + s)^(p-1) and the Hessian eigenvalues over (a + s)^(p-2)."""
    phi = np.asarray(pair.phi(sigma))
    ratio = phi / (a + sigma) ** (p - 1.0)
    # eigenvalues of the Hessian of Phi(|xi|): phi' (radial) and phi/|xi| (tangential)
    radial = np.asarray(pair.dphi(sigma))
    tangential = phi / sigma
    base = (a + sigma) ** (p - 2.0)
    return ratio, np.stack([radial / base, tangential / base])


def _sample(sigma_range: Tuple[float, float], count: int = 256) -> np.ndarray:
    lo, hi = sigma_range
    if hi <= 0 or hi <= lo:
        raise DomainError(f"Bad sigma range {sigma_range}")
    return np.linspace(max(lo, hi / count), hi, count)


def fit_growth(pair: YoungPair, p: float, a: float, sigma_range: Tuple[float, float]) -> GrowthConstants:
    """Tightest (c, C) for the given (p, a) over sampled sigma."""
    sigma = _sample(sigma_range)
    ratio, eig = _envelopes(pair, sigma, p, a)
    c = float(min(ratio.min(), eig.min()))
    C = float(max(ratio.max(), eig.max()))
    if c <= 0:
        raise DomainError(f"No positive lower growth constant for {pair} on {sigma_range}")
    return GrowthConstants(p=p, a=a, c=c, C=C)


def _relative_violation(low: np.ndarray, high: np.ndarray, growth: GrowthConstants) -> np.ndarray:
    lower = np.maximum(growth.c / low - 1.0, 0.0)
    upper = np.maximum(high / growth.C - 1.0, 0.0)
    return np.maximum(lower, upper)


def verify_growth(pair: YoungPair, sigma_range: Tuple[float, float] = (0.0, 1.0),
                  constants: Optional[GrowthConstants] = None) -> GrowthReport:
    """
    Sample c (a+s)^(p-1) <= phi(s) <= C (a+s)^(p-1).

    The Hessian eigenvalue envelope c (a+s)^(p-2) <= eig <= C (a+s)^(p-2)
    is sampled too and reported in its own fields; it does not enter
    `worst_violation`.

    Returns:
        GrowthReport: worst relative violation of the phi envelope (0 when
        it holds) and the constants fitted for the same (p, a)
    """
    growth = constants or pair.growth
    sigma = _sample(sigma_range)
    ratio, eig = _envelopes(pair, sigma, growth.p, growth.a)
    violation = _relative_violation(ratio, ratio, growth)
    hessian = _relative_violation(eig.min(axis=0), eig.max(axis=0), growth)
    worst = int(np.argmax(violation))
    report = GrowthReport(
        constants=growth,
        sigma_min=float(sigma[0]),
        sigma_max=float(sigma[-1]),
        worst_violation=float(violation[worst]),
        worst_sigma=float(sigma[worst]) if violation[worst] > 0 else None,
        fitted_c=float(ratio.min()),
        fitted_C=float(ratio.max()),
        hessian_violation=float(hessian.max()),
        hessian_c=float(eig.min()),
        hessian_C=float(eig.max()),
    )
    if not report.holds:
        logger.info(f"Growth envelope of {pair} violated by {report.worst_violation:.3e} at sigma={report.worst_sigma}")
    return report
