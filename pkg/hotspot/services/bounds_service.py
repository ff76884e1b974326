"""
Closed-form lower bounds on the distance of maximum points to the boundary,
the upper estimates they rest on, and the certification check.

Every evaluator returns a BoundValue: a length, or a ratio to the inradius.
Hypothesis violations raise InapplicableError, never a failed check.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad
from scipy.optimize import brentq

from hotspot.config import get_config
from hotspot.exceptions import ConsistencyError, DomainError, InapplicableError
from hotspot.models.bound_models import BoundCheck, BoundKind, BoundSense, BoundValue, HeatBoundInputs
from hotspot.models.field_models import ScalarField, SemilinearSource
from hotspot.services.geometry_service import m_minus2
from hotspot.services.radial_service import radial_lane_emden, radial_p_eigen, radial_q_eps
from hotspot.services.special_functions import arccosh, ball_volume, gamma_beta, lambda1_ball
from hotspot.services.young_service import YoungPair, zeta

logger = logging.getLogger(__name__)

QUAD_RTOL = 1e-10
PHI1_FLOOR = 1e-6
RATIO_DIVERGENT = 1e6


def _ratio(value: float) -> BoundValue:
    return BoundValue(value=float(value), kind=BoundKind.RATIO)


def _length(value: float) -> BoundValue:
    return BoundValue(value=float(value), kind=BoundKind.LENGTH)


def _upper(value: float) -> BoundValue:
    return BoundValue(value=float(value), kind=BoundKind.LENGTH, sense=BoundSense.UPPER)


def _check_dimension(N: int):
    if N < 2:
        raise DomainError(f"Dimension must be at least 2, got {N}")


def gradient_constant(N: int) -> float:
    """c_N = 3/2 for N = 2 and N/2 for N >= 3."""
    _check_dimension(N)
    return 1.5 if N == 2 else N / 2.0


# torsion

def bound_torsion_meanconvex(N: int) -> BoundValue:
    """d(z) / r >= 1 / sqrt(N) on mean convex domains."""
    _check_dimension(N)
    return _ratio(1.0 / np.sqrt(N))


def torsion_max_upper(N: int, r_in: float) -> BoundValue:
    """max u <= N r^2 / 2."""
    if r_in <= 0:
        raise DomainError(f"Inradius must be positive, got {r_in}")
    return _upper(N * r_in ** 2 / 2)


def bound_torsion_john(axes: Sequence[float], r_in: float, N: int) -> BoundValue:
    """d(z) / r >= max(1, m_-2(axes) / r) / sqrt(N) for convex domains with John semi-axes."""
    _check_dimension(N)
    if r_in <= 0:
        raise DomainError(f"Inradius must be positive, got {r_in}")
    return _ratio(max(1.0, m_minus2(axes) / r_in) / np.sqrt(N))


def bound_torsion_curvature(N: int, M0_minus: float, r_in: float) -> BoundValue:
    """d(z) / r >= sqrt((1 - (N-1) M r) / N), M the negative part of the least mean curvature."""
    _check_dimension(N)
    if M0_minus < 0:
        raise DomainError(f"Negative part of the mean curvature must be >= 0, got {M0_minus}")
    product = (N - 1) * M0_minus * r_in
    if product >= 1:
        raise InapplicableError(f"(N-1) M r = {product:.4g} >= 1")
    return _ratio(np.sqrt((1 - product) / N))


def gradient_G_upper(N: int, diam: float, r_e: float) -> BoundValue:
    """max |grad u| on the boundary <= c_N diam (1 + diam / r_e)."""
    if diam <= 0 or r_e <= 0:
        raise DomainError(f"Diameter and exterior radius must be positive, got {diam}, {r_e}")
    return _upper(gradient_constant(N) * diam * (1 + diam / r_e))


def bound_torsion_exterior(N: int, diam: float, r_e: float, r_in: Optional[float] = None) -> BoundValue:
    """d(z) / r >= [N + (N-1) c_N (diam / r_e)(1 + diam / r_e)]^(-1/2)."""
    if diam <= 0 or r_e <= 0:
        raise DomainError(f"Diameter and exterior radius must be positive, got {diam}, {r_e}")
    t = diam / r_e
    return _ratio((N + (N - 1) * gradient_constant(N) * t * (1 + t)) ** -0.5)


# semilinear

def _drop_integral(integrand: Callable[[float], float], u_z: float, u_x: float) -> float:
    """
    int_0^{u_x} integrand(u_z - s) ds with s = u_z - t^2.

    The substitution absorbs the inverse square root at s = u_z.
    """
    if u_x <= 0:
        return 0.0
    t_lo = np.sqrt(max(u_z - u_x, 0.0))
    t_hi = np.sqrt(u_z)
    value, _ = quad(lambda t: 2 * t * integrand(t), t_lo, t_hi, epsabs=0, epsrel=QUAD_RTOL, limit=200)
    return float(value)


def _check_primitive(source: SemilinearSource, u_z: float) -> Callable[[float], float]:
    Fz = float(source.F(np.asarray(u_z)))
    s = np.linspace(0.0, u_z, 257)
    gaps = Fz - np.asarray(source.F(s), dtype=float)
    if np.min(gaps[:-1]) <= -1e-12 * max(1.0, abs(Fz)):
        raise InapplicableError(f"F({u_z:.6g}) is not the maximum of F on [0, u(z)]")
    return lambda t: max(Fz - float(source.F(np.asarray(u_z - t * t))), 1e-300)


def bound_semilinear_distance(source: SemilinearSource, u_z: float, u_x: float) -> BoundValue:
    """
    d(x) >= int_0^{u(x)} ds / sqrt(2 [F(u(z)) - F(s)]) for -Laplace u = f(u).
    """
    if not 0 <= u_x <= u_z * (1 + 1e-12):
        raise DomainError(f"Need 0 <= u(x) <= u(z), got {u_x}, {u_z}")
    gap = _check_primitive(source, u_z)
    return _length(_drop_integral(lambda t: 1.0 / np.sqrt(2 * gap(t)), u_z, min(u_x, u_z)))


def bound_quasilinear_semilinear(pair: YoungPair, source: SemilinearSource, u_z: float, u_x: float) -> BoundValue:
    """d(x) >= int_0^{u(x)} ds / zeta(F(u(z)) - F(s)), zeta = psi o Psi^-1."""
    if not 0 <= u_x <= u_z * (1 + 1e-12):
        raise DomainError(f"Need 0 <= u(x) <= u(z), got {u_x}, {u_z}")
    gap = _check_primitive(source, u_z)
    return _length(_drop_integral(lambda t: 1.0 / float(zeta(pair, gap(t))), u_z, min(u_x, u_z)))


def bound_small_diffusion(eps: float, N: int, u_z: Optional[float] = None, r_in: Optional[float] = None,
                          use_geometric: bool = False) -> BoundValue:
    """
    d(z) >= sqrt(eps) arccosh(N / (N - u(z) / eps)).

    The geometric variant replaces u(z) by the ball value radial_q_eps(eps, r).
    """
    if eps <= 0:
        raise DomainError(f"Diffusion parameter must be positive, got {eps}")
    if use_geometric:
        if r_in is None:
            raise DomainError("Geometric small-diffusion bound needs the inradius")
        u_z = radial_q_eps(float(eps), float(r_in), int(N))
    if u_z is None or u_z < 0:
        raise DomainError(f"Need u(z) >= 0, got {u_z}")
    if u_z / eps >= N:
        raise InapplicableError(f"u(z) / eps = {u_z / eps:.6g} >= N")
    return _length(np.sqrt(eps) * arccosh(N / (N - u_z / eps)))


# eigenfunctions

def bound_eigen(lambda1: Optional[float], N: int, r_in: Optional[float] = None, form: str = "absolute") -> BoundValue:
    """
    Hot spot of the first eigenfunction.

    absolute: d(z) >= pi / (2 sqrt(lambda1)); ratio: d(z) / r >= pi / (2 j),
    j the first zero of J_{N/2-1}.
    """
    if form == "ratio":
        return _ratio(np.pi / (2 * np.sqrt(lambda1_ball(N))))
    if form != "absolute":
        raise DomainError(f"Unknown form '{form}'")
    if lambda1 is None or lambda1 <= 0:
        raise DomainError(f"Eigenvalue must be positive, got {lambda1}")
    return _length(np.pi / (2 * np.sqrt(lambda1)))


def bms_bound(N: int, r_in: float, diam: float) -> BoundValue:
    """(N/2)^(N-1) w_(N-1) / (w_N lambda_B^N) (2 r / diam)^(N^2 - 1)."""
    _check_dimension(N)
    if r_in <= 0 or diam <= 0:
        raise DomainError(f"Inradius and diameter must be positive, got {r_in}, {diam}")
    lam = lambda1_ball(N)
    value = (N / 2) ** (N - 1) * ball_volume(N - 1) / (ball_volume(N) * lam ** N) * (2 * r_in / diam) ** (N * N - 1)
    return _ratio(value)


def bound_p_eigen(p: float, lambda_1p: Optional[float], N: int, form: str = "absolute",
                  lambda_ball: Optional[float] = None) -> BoundValue:
    """
    (1/p) ((p-1) / lambda)^(1/p) B(1/p, 1/p').

    The ratio form uses lambda_1p of the unit ball (radial shooting if not given).
    """
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    p_conj = p / (p - 1)
    if form == "ratio":
        lam = lambda_ball if lambda_ball is not None else radial_p_eigen(float(p), int(N))
    elif form == "absolute":
        lam = lambda_1p
    else:
        raise DomainError(f"Unknown form '{form}'")
    if lam is None or lam <= 0:
        raise DomainError(f"Eigenvalue must be positive, got {lam}")
    value = ((p - 1) / lam) ** (1 / p) * gamma_beta(1 / p, 1 / p_conj) / p
    return _ratio(value) if form == "ratio" else _length(value)


def lane_emden_integral(q: float) -> float:
    """
    int_0^1 (1 - s^q)^(-1/2) ds, cross-checked against B(1/q, 1/2) / q.
    """
    if not 1 < q <= 2:
        raise InapplicableError(f"Lane-Emden exponent must lie in (1, 2], got {q}")
    def smooth_part(s):
        # (1 - s) / (1 - s^q) -> 1 / q at s = 1
        if s <= 0:
            return 1.0
        if s >= 1:
            return 1 / np.sqrt(q)
        return np.sqrt((1 - s) / -np.expm1(q * np.log(s)))

    value, _ = quad(smooth_part, 0, 1, weight="alg", wvar=(0, -0.5), epsabs=0, epsrel=QUAD_RTOL)
    reference = gamma_beta(1 / q, 0.5) / q
    if abs(value - reference) > 1e-8 * reference:
        raise ConsistencyError(f"Lane-Emden integral {value:.12g} disagrees with the beta form {reference:.12g}")
    return float(value)


def bound_lane_emden(q: float, lambda_q: Optional[float] = None, max_u: Optional[float] = None, N: int = 2,
                     r_in: Optional[float] = None, vol: Optional[float] = None, form: str = "absolute",
                     lambda_ball: Optional[float] = None) -> BoundValue:
    """
    Lane-Emden maximum point, -Laplace u = lambda_q u^(q-1) with |u|_q = 1.

    absolute: sqrt(q / (2 lambda_q)) max_u^(1-q/2) I_q;
    ratio: sqrt(q / (2 lambda_q(B))) I_q (r^N / |Omega|)^(1/q - 1/2).
    """
    integral = lane_emden_integral(q)
    if form == "absolute":
        if lambda_q is None or lambda_q <= 0 or max_u is None or max_u <= 0:
            raise DomainError("Absolute Lane-Emden bound needs lambda_q > 0 and max u > 0")
        return _length(np.sqrt(q / (2 * lambda_q)) * max_u ** (1 - q / 2) * integral)
    if form != "ratio":
        raise DomainError(f"Unknown form '{form}'")
    if r_in is None or vol is None or r_in <= 0 or vol <= 0:
        raise DomainError("Ratio Lane-Emden bound needs the inradius and the volume")
    lam = lambda_ball if lambda_ball is not None else radial_lane_emden(float(q), int(N))
    return _ratio(np.sqrt(q / (2 * lam)) * integral * (r_in ** N / vol) ** (1 / q - 0.5))


# heat

def heat_inputs(g: ScalarField, phi1: ScalarField, grad_g: np.ndarray, lambda1: float, r_in: float,
                N: int, M_of_t: Sequence[float] = ()) -> HeatBoundInputs:
    """
    Constants of the heat bound for initial datum g.

    X = max(sup g / phi1, max sqrt(g^2 + |grad g|^2 / lambda1)), with the sup
    taken where phi1 > 1e-6 max phi1; K = sqrt(lambda_B) X, K_Omega = sqrt(lambda1) X.
    """
    if g.params.get("discontinuous"):
        raise InapplicableError("sup g / phi1 is infinite for data that do not vanish on the boundary")
    if np.min(g.values) < -1e-12:
        raise DomainError("Heat bound needs g >= 0")
    support = phi1.values > PHI1_FLOOR * phi1.max_value
    sup_ratio = float(np.max(g.values[support] / phi1.values[support]))
    if sup_ratio > RATIO_DIVERGENT:
        raise InapplicableError(f"sup g / phi1 = {sup_ratio:.3g} diverges")
    envelope = float(np.max(np.sqrt(g.values ** 2 + np.sum(np.asarray(grad_g) ** 2, axis=1) / lambda1)))
    X = max(sup_ratio, envelope)
    lam_ball = lambda1_ball(N)
    return HeatBoundInputs(lambda1=lambda1, lambda1_ball=lam_ball, K=np.sqrt(lam_ball) * X,
                           K_Omega=np.sqrt(lambda1) * X, M_of_t=list(M_of_t), r_in=r_in)


def heat_bound(inputs: HeatBoundInputs, t: float, M_t: float) -> Tuple[float, BoundValue]:
    """(K, d(z(t)) / r >= M(t) e^(lambda1 t) / K)."""
    if t < 0 or M_t < 0:
        raise DomainError(f"Need t >= 0 and M(t) >= 0, got {t}, {M_t}")
    return inputs.K, _ratio(M_t * np.exp(inputs.lambda1 * t) / inputs.K)


# quasilinear and anisotropic

def bound_quasilinear(pair: YoungPair, N: int, r_in: float, variant: str = "general") -> BoundValue:
    """
    Quasilinear torsion maximum point.

    general: d(z) >= Psi^-1(N Psi(r)) / N;
    power-ratio: d(z) / r >= (c / (N C))^(1/p);
    shift: d(z) / r >= mu, solved from the shifted growth inequality.
    """
    if r_in <= 0:
        raise DomainError(f"Inradius must be positive, got {r_in}")
    growth = pair.growth
    if variant == "general":
        return _length(float(pair.Psi_inverse(N * float(pair.Psi(r_in)))) / N)
    if variant == "power-ratio":
        if growth.a > 0:
            raise InapplicableError(f"Power-ratio bound needs a = 0, got a = {growth.a}")
        return _ratio((growth.c / (N * growth.C)) ** (1 / growth.p))
    if variant == "shift":
        return _ratio(shifted_growth_ratio(N, r_in, growth.p, growth.a, growth.c, growth.C))
    raise DomainError(f"Unknown variant '{variant}'")


def shifted_growth_ratio(N: int, r: float, p: float, a: float, c: float, C: float) -> float:
    """
    Least d / r compatible with lower(r) <= upper(d), where

        lower(r) = [N C^(1-p') r^p' - N p' a r + N (p'-1) C a^p']^+
        upper(d) = [N^p' c^(1-p') d^p' - N p' a d + N (p'-1) c a^p']^+

    upper is convex with minimum at d*; the ratio is 0 when upper(0) >= lower(r).
    """
    q = p / (p - 1)

    def upper(d):
        return max(N ** q * c ** (1 - q) * d ** q - N * q * a * d + N * (q - 1) * c * a ** q, 0.0)

    lower = max(N * C ** (1 - q) * r ** q - N * q * a * r + N * (q - 1) * C * a ** q, 0.0)
    if upper(0.0) >= lower:
        return 0.0
    d_star = (a * c ** (q - 1) * N ** (1 - q)) ** (1 / (q - 1)) if a > 0 else 0.0
    hi = max(d_star, r, 1e-12)
    while upper(hi) < lower:
        hi *= 2
    return float(brentq(lambda d: upper(d) - lower, d_star, hi, xtol=1e-14)) / r


def bound_aniso(pair: YoungPair, N: int, r_in_aniso: float) -> BoundValue:
    """Anisotropic distance of the maximum point: d°(z) >= Psi^-1(N Psi(r°)) / N."""
    return bound_quasilinear(pair, N, r_in_aniso, "general")


def check(measured_d: float, bound: float, tolerance: Optional[float] = None, name: str = "bound",
          sense: BoundSense = BoundSense.LOWER, inputs: Optional[Dict[str, Any]] = None) -> BoundCheck:
    """
    Certify a measured value against a bound.

    A lower bound passes when measured >= bound (1 - tol), an upper bound
    when measured <= bound (1 + tol).
    """
    if tolerance is None:
        tolerance = get_config().DEFAULT_TOLERANCE
    if measured_d < 0:
        raise DomainError(f"Measured value must be nonnegative, got {measured_d}")
    if sense == BoundSense.LOWER:
        passed = measured_d >= bound * (1 - tolerance)
        margin = measured_d - bound
    else:
        passed = measured_d <= bound * (1 + tolerance)
        margin = bound - measured_d
    # a zero lower bound holds with unbounded slack
    slack = margin / bound if bound != 0 else (float("inf") if margin > 0 else 0.0)
    return BoundCheck(bound_name=name, measured_d=measured_d, bound_value=bound, relative_slack=slack,
                      tolerance=tolerance, sense=sense, passed=passed, inputs=inputs or {})


# registry

class BoundEntry(BaseModel):
    """
    A registered bound.

    Attributes:
        requires: Pipeline quantities the evaluator reads from its inputs
        problems: Problem kinds whose solution the bound constrains
        measure: What the bound is compared with: "distance" (of the worst
            maximum point), "aniso_distance", "max_value" or "max_gradient"
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    kind: BoundKind
    sense: BoundSense = BoundSense.LOWER
    measure: str = "distance"
    requires: List[str] = Field(default_factory=list)
    problems: List[str] = Field(default_factory=list)
    evaluate: Callable[[Dict[str, Any]], BoundValue]


def _entry(name, kind, requires, problems, evaluate, sense=BoundSense.LOWER, measure="distance") -> BoundEntry:
    return BoundEntry(name=name, kind=kind, sense=sense, measure=measure, requires=requires,
                      problems=problems, evaluate=evaluate)


R, L = BoundKind.RATIO, BoundKind.LENGTH

BOUND_REGISTRY: Dict[str, BoundEntry] = {e.name: e for e in [
    _entry("torsion_meanconvex", R, ["N"], ["torsion"], lambda x: bound_torsion_meanconvex(x["N"])),
    _entry("torsion_max_upper", L, ["N", "r_in"], ["torsion"],
           lambda x: torsion_max_upper(x["N"], x["r_in"]), BoundSense.UPPER, "max_value"),
    _entry("torsion_john", R, ["N", "r_in", "john_axes"], ["torsion"],
           lambda x: bound_torsion_john(x["john_axes"], x["r_in"], x["N"])),
    _entry("torsion_curvature", R, ["N", "r_in", "M0_minus"], ["torsion"],
           lambda x: bound_torsion_curvature(x["N"], x["M0_minus"], x["r_in"])),
    _entry("gradient_G_upper", L, ["N", "diam", "r_e"], ["torsion"],
           lambda x: gradient_G_upper(x["N"], x["diam"], x["r_e"]), BoundSense.UPPER, "max_gradient"),
    _entry("torsion_exterior", R, ["N", "diam", "r_e"], ["torsion"],
           lambda x: bound_torsion_exterior(x["N"], x["diam"], x["r_e"])),
    _entry("semilinear_distance", L, ["source", "u_z"], ["torsion", "small_diffusion", "semilinear", "eigen"],
           lambda x: bound_semilinear_distance(x["source"], x["u_z"], x["u_z"])),
    _entry("quasilinear_semilinear", L, ["pair", "source", "u_z"], ["p_torsion"],
           lambda x: bound_quasilinear_semilinear(x["pair"], x["source"], x["u_z"], x["u_z"])),
    _entry("small_diffusion", L, ["N", "eps", "u_z"], ["small_diffusion"],
           lambda x: bound_small_diffusion(x["eps"], x["N"], u_z=x["u_z"])),
    _entry("small_diffusion_geometric", L, ["N", "eps", "r_in"], ["small_diffusion"],
           lambda x: bound_small_diffusion(x["eps"], x["N"], r_in=x["r_in"], use_geometric=True)),
    _entry("eigen", L, ["lambda1", "N"], ["eigen"], lambda x: bound_eigen(x["lambda1"], x["N"])),
    _entry("eigen_ratio", R, ["N"], ["eigen"], lambda x: bound_eigen(None, x["N"], form="ratio")),
    _entry("bms", R, ["N", "r_in", "diam"], ["eigen"], lambda x: bms_bound(x["N"], x["r_in"], x["diam"])),
    _entry("heat", R, ["heat_inputs", "t", "M_t"], ["heat"],
           lambda x: heat_bound(x["heat_inputs"], x["t"], x["M_t"])[1]),
    _entry("quasilinear", L, ["pair", "N", "r_in"], ["p_torsion"],
           lambda x: bound_quasilinear(x["pair"], x["N"], x["r_in"], "general")),
    _entry("quasilinear_power_ratio", R, ["pair", "N", "r_in"], ["p_torsion"],
           lambda x: bound_quasilinear(x["pair"], x["N"], x["r_in"], "power-ratio")),
    _entry("quasilinear_shift", R, ["pair", "N", "r_in"], ["p_torsion"],
           lambda x: bound_quasilinear(x["pair"], x["N"], x["r_in"], "shift")),
    _entry("p_eigen", L, ["p", "lambda_1p", "N"], ["p_eigen"],
           lambda x: bound_p_eigen(x["p"], x["lambda_1p"], x["N"])),
    _entry("p_eigen_ratio", R, ["p", "N"], ["p_eigen"],
           lambda x: bound_p_eigen(x["p"], None, x["N"], form="ratio")),
    _entry("lane_emden", L, ["q", "lambda_q", "u_z", "N"], ["lane_emden"],
           lambda x: bound_lane_emden(x["q"], x["lambda_q"], x["u_z"], x["N"])),
    _entry("lane_emden_ratio", R, ["q", "N", "r_in", "volume"], ["lane_emden"],
           lambda x: bound_lane_emden(x["q"], N=x["N"], r_in=x["r_in"], vol=x["volume"], form="ratio")),
    _entry("aniso", L, ["pair", "N", "r_aniso"], ["aniso"],
           lambda x: bound_aniso(x["pair"], x["N"], x["r_aniso"]), measure="aniso_distance"),
    _entry("aniso_power_ratio", R, ["pair", "N", "r_aniso"], ["aniso"],
           lambda x: bound_quasilinear(x["pair"], x["N"], x["r_aniso"], "power-ratio"), measure="aniso_distance"),
]}


def evaluate_bound(name: str, inputs: Dict[str, Any]) -> BoundValue:
    """
    Evaluate a registered bound.

    An input the pipeline could not derive (no John ellipsoid for a
    nonconvex domain, no exterior ball at a corner ...) makes the bound
    inapplicable; inputs["reasons"] may explain why a key is missing.
    """
    entry = BOUND_REGISTRY.get(name)
    if entry is None:
        raise DomainError(f"Unknown bound '{name}'")
    missing = [key for key in entry.requires if inputs.get(key) is None]
    if missing:
        reasons = inputs.get("reasons", {})
        detail = "; ".join(reasons[key] for key in missing if key in reasons)
        raise InapplicableError(f"Bound '{name}' lacks {', '.join(missing)}" + (f": {detail}" if detail else ""))
    value = entry.evaluate(inputs)
    logger.debug(f"Bound {name} = {value.value:.6g} ({value.kind.value})")
    return value
