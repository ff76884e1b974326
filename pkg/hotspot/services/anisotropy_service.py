"""
Norms H on R^N, their polars H° and the anisotropic geometry built on them.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.optimize import minimize, minimize_scalar

from hotspot.exceptions import DomainError, UnsupportedError
from hotspot.models.domain_models import CurveSpec, DomainKind, DomainSpec, ImplicitSpec
from hotspot.models.young_models import NormKind, NormSpec
from hotspot.services import geometry_service
from hotspot.services.young_service import YoungPair

logger = logging.getLogger(__name__)

POLAR_DIRECTIONS = 720
DISTANCE_SAMPLES = 4096
CHUNK = 256


class AnisoNorm:
    """
    A strictly convex norm with its polar.

    Elliptic norms H(xi) = sqrt(xi . A xi) have H°(eta) = sqrt(eta . A^-1 eta);
    l^s norms have the l^s' polar with 1/s + 1/s' = 1.
    """

    def __init__(self, kind: NormKind, dimension: int = 2, A: Optional[np.ndarray] = None,
                 s: Optional[float] = None):
        self.kind = kind
        self.dimension = dimension
        if kind == NormKind.EUCLIDEAN:
            A = np.eye(dimension)
        if kind in (NormKind.EUCLIDEAN, NormKind.ELLIPTIC):
            self.A = np.asarray(A, dtype=float)
            self.A_inv = np.linalg.inv(self.A)
            self.dimension = self.A.shape[0]
            self.s = None
        else:
            if s is None or not 1 < s < np.inf:
                raise DomainError(f"l^s norm needs 1 < s < inf, got {s}")
            self.A = None
            self.s = float(s)
            self.s_dual = self.s / (self.s - 1.0)

    def __repr__(self) -> str:
        if self.kind == NormKind.LS:
            return f"AnisoNorm(ls, s={self.s:g})"
        return f"AnisoNorm({self.kind.value})"

    @property
    def is_euclidean(self) -> bool:
        return self.kind == NormKind.EUCLIDEAN

    def H(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.A is not None:
            return np.sqrt(np.einsum("...i,ij,...j->...", xi, self.A, xi))
        return np.sum(np.abs(xi) ** self.s, axis=-1) ** (1.0 / self.s)

    def grad_H(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        value = self.H(xi)[..., None]
        if self.A is not None:
            return (xi @ self.A) / value
        return np.sign(xi) * np.abs(xi) ** (self.s - 1.0) / value ** (self.s - 1.0)

    def polar(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        if self.A is not None:
            return np.sqrt(np.einsum("...i,ij,...j->...", eta, self.A_inv, eta))
        return np.sum(np.abs(eta) ** self.s_dual, axis=-1) ** (1.0 / self.s_dual)

    def grad_polar(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        value = self.polar(eta)[..., None]
        if self.A is not None:
            return (eta @ self.A_inv) / value
        q = self.s_dual
        return np.sign(eta) * np.abs(eta) ** (q - 1.0) / value ** (q - 1.0)


def make_norm(kind, A=None, s: Optional[float] = None, dimension: int = 2) -> AnisoNorm:
    """
    Construct a norm from its kind and parameters.

    Raises:
        DomainError: the kind and parameters do not describe a strictly convex norm
    """
    try:
        spec = NormSpec(kind=kind, A=None if A is None else np.asarray(A, dtype=float).tolist(), s=s)
    except ValidationError as e:
        details = "; ".join(error["msg"] for error in e.errors())
        raise DomainError(f"Invalid {kind} norm: {details}") from e
    return norm_from_spec(spec, dimension=dimension)


def norm_from_spec(spec: NormSpec, dimension: int = 2) -> AnisoNorm:
    return AnisoNorm(spec.kind, dimension=dimension, A=None if spec.A is None else np.asarray(spec.A), s=spec.s)


def polar(norm: AnisoNorm, eta) -> float:
    """H°(eta) = sup_{xi != 0} <xi, eta> / H(xi), in closed form."""
    return float(norm.polar(np.asarray(eta, dtype=float)))


def _sphere_directions(dimension: int, count: int) -> np.ndarray:
    if dimension == 2:
        theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dimension == 3:
        # Fibonacci lattice
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (1 + 5 ** 0.5) * k
        r = np.sqrt(1 - z ** 2)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    raise UnsupportedError(f"Numeric polar supports N = 2, 3, got {dimension}")


def support_numeric(gauge, vector, directions: int = POLAR_DIRECTIONS) -> float:
    """sup over unit xi of <xi, vector> / gauge(xi), sampled then locally refined."""
    v = np.asarray(vector, dtype=float)
    dim = v.shape[0]
    if not np.any(v):
        return 0.0
    dirs = _sphere_directions(dim, directions)
    ratios = dirs @ v / gauge(dirs)
    k = int(np.argmax(ratios))
    if dim == 2:
        step = 2 * np.pi / directions
        theta0 = np.arctan2(dirs[k, 1], dirs[k, 0])

        def objective(theta):
            xi = np.array([np.cos(theta), np.sin(theta)])
            return -float(xi @ v / gauge(xi[None, :])[0])

        result = minimize_scalar(objective, bounds=(theta0 - step, theta0 + step), method="bounded",
                                 options={"xatol": 1e-12})
        return max(float(ratios[k]), -float(result.fun))

    def objective3(x):
        return -float(x @ v / gauge(x[None, :])[0])

    result = minimize(objective3, dirs[k], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return max(float(ratios[k]), -float(result.fun))


def polar_numeric(norm: AnisoNorm, eta) -> float:
    """Polar by sampled maximization over the sphere; cross-check of polar()."""
    return support_numeric(norm.H, eta)


def dual_norm_of_polar(norm: AnisoNorm, xi) -> float:
    """(H°)°(xi), which equals H(xi) for a norm."""
    return support_numeric(norm.polar, xi)


def _require_planar(domain: DomainSpec, what: str):
    if domain.dimension != 2:
        raise UnsupportedError(f"{what} is only supported on planar domains, '{domain.id}' has N={domain.dimension}")


def _segment_polar_min(norm: AnisoNorm, x: np.ndarray, a: np.ndarray, b: np.ndarray,
                       iterations: int = 60) -> np.ndarray:
    """min over t in [0, 1] of H°(x - a - t (b - a)), vectorized golden-section search."""
    ratio = (np.sqrt(5.0) - 1.0) / 2.0
    lo = np.zeros(len(x))
    hi = np.ones(len(x))
    d = b - a

    def f(t):
        return norm.polar(x - a - t[:, None] * d)

    c1 = hi - ratio * (hi - lo)
    c2 = lo + ratio * (hi - lo)
    f1, f2 = f(c1), f(c2)
    for _ in range(iterations):
        left = f1 < f2
        hi = np.where(left, c2, hi)
        lo = np.where(left, lo, c1)
        c1_new = hi - ratio * (hi - lo)
        c2_new = lo + ratio * (hi - lo)
        c1, c2 = c1_new, c2_new
        f1, f2 = f(c1), f(c2)
    return np.minimum(np.minimum(f1, f2), np.minimum(f(np.zeros(len(x))), f(np.ones(len(x)))))


def aniso_distance_field(domain: DomainSpec, norm: AnisoNorm, points) -> np.ndarray:
    """
    min over the boundary of H°(x - y) for many points, unsigned.

    The boundary is sampled densely; the best sample is refined on its two
    adjacent segments.
    """
    _require_planar(domain, "Anisotropic distance")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    boundary, _ = geometry_service.sample_boundary(domain, DISTANCE_SAMPLES)
    m = len(boundary)
    out = np.empty(len(pts))
    for start in range(0, len(pts), CHUNK):
        block = pts[start:start + CHUNK]
        values = norm.polar(block[:, None, :] - boundary[None, :, :])
        k = np.argmin(values, axis=1)
        best = values[np.arange(len(block)), k]
        for shift in (-1, 1):
            other = (k + shift) % m
            best = np.minimum(best, _segment_polar_min(norm, block, boundary[k], boundary[other]))
        out[start:start + CHUNK] = best
    return out


def aniso_distance(domain: DomainSpec, norm: AnisoNorm, x) -> float:
    """Anisotropic distance d°(x) = min_y H°(x - y) from x in the closure to the boundary."""
    x = np.asarray(x, dtype=float)
    if geometry_service.signed_distance(domain, x)[0] < -1e-9:
        raise DomainError(f"Point {x.tolist()} lies outside domain '{domain.id}'")
    if norm.is_euclidean:
        return geometry_service.distance_to_boundary(domain, x)
    return float(aniso_distance_field(domain, norm, x[None, :])[0])


def aniso_inradius(domain: DomainSpec, norm: AnisoNorm, cells: int = 128) -> Tuple[float, List[List[float]]]:
    """Anisotropic inradius and incenters, as inradius_incenter with d°."""
    if norm.is_euclidean:
        return geometry_service.inradius_incenter(domain)
    _require_planar(domain, "Anisotropic inradius")

    def signed(pts):
        inside = geometry_service.signed_distance(domain, pts) > 0
        field = np.zeros(len(pts))
        if np.any(inside):
            field[inside] = aniso_distance_field(domain, norm, pts[inside])
        return np.where(inside, field, -1.0)

    r, incenters = geometry_service.maximize_distance(domain, signed, cells)
    logger.debug(f"Anisotropic inradius of '{domain.id}' under {norm}: {r:.6f}")
    return r, incenters


def wulff_torsion_exact(norm: AnisoNorm, pair: YoungPair, r: float, x0, y) -> float:
    """Psi(r) - Psi(H°(y - x0)), the torsion function of the Wulff ball of radius r."""
    value = float(norm.polar(np.asarray(y, dtype=float) - np.asarray(x0, dtype=float)))
    if value > r * (1 + 1e-12):
        raise DomainError(f"Point {list(y)} lies outside the Wulff ball of radius {r}")
    return float(pair.Psi(r) - pair.Psi(min(value, r)))


def wulff_ball_domain(norm: AnisoNorm, r: float, center=(0.0, 0.0), domain_id: str = "wulff") -> DomainSpec:
    """The Wulff ball {H°(x - center) < r} as a domain."""
    center = [float(c) for c in center]
    if norm.dimension != 2:
        raise UnsupportedError("Wulff ball domains are built for N = 2")
    if norm.is_euclidean:
        return DomainSpec(id=domain_id, kind=DomainKind.BALL, center=center, radius=r)
    if norm.kind == NormKind.LS:
        return DomainSpec(id=domain_id, kind=DomainKind.SMOOTH_CURVE, center=center,
                          curve=CurveSpec(name="superellipse", params={"radius": r, "exponent": norm.s_dual}))
    if np.allclose(norm.A, np.diag(np.diag(norm.A))):
        return DomainSpec(id=domain_id, kind=DomainKind.ELLIPSE, center=center,
                          semi_axes=(r * np.sqrt(np.diag(norm.A))).tolist())
    reach = r * float(np.sqrt(np.linalg.eigvalsh(norm.A).max())) * 1.05
    c = np.asarray(center)
    return DomainSpec(
        id=domain_id, kind=DomainKind.IMPLICIT, center=center,
        implicit=ImplicitSpec(name="callback", bbox=[(c - reach).tolist(), (c + reach).tolist()]),
        sdf_callback=lambda p: 1.0 - norm.polar(p - c) / r,
    )


def aniso_mean_convexity(domain: DomainSpec, norm: AnisoNorm, samples: int = 2048,
                         tol: float = 1e-6) -> Tuple[float, bool]:
    """
    Minimum of the anisotropic mean curvature -div_T grad H(nu) along the boundary.

    nu is the inward unit normal of the parametrization; the tangential
    derivative is taken by central differences in the parameter with step 1e-4.

    Returns:
        (float, bool): minimum curvature and whether the boundary is H-mean convex
    """
    _require_planar(domain, "Anisotropic mean curvature")
    shape = domain.shape
    if not shape.parametric:
        raise UnsupportedError(f"Anisotropic mean curvature needs a parametrized boundary, kind {domain.kind.value}")
    step = 1e-4
    t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    forward = norm.grad_H(shape.inward_normal(t + step))
    backward = norm.grad_H(shape.inward_normal(t - step))
    tangent = shape.d1(t)
    speed = np.linalg.norm(tangent, axis=1)
    derivative = (forward - backward) / (2 * step)
    curvature = -np.einsum("ij,ij->i", derivative, tangent) / speed ** 2
    low = float(np.min(curvature))
    return low, low >= -tol
