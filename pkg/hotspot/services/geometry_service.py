"""
Geometric quantities consumed by the bounds.

All functions are pure given a DomainSpec; the geometric backend is
built once per domain and cached on it.
"""

import logging
from typing import List, Optional, Tuple

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

from hotspot.exceptions import DomainError, SolverError, UnsupportedError
from hotspot.models.domain_models import DomainKind, DomainSpec, ExteriorRadius, GeomSummary
from hotspot.services.shape_library import RevolutionShape

logger = logging.getLogger(__name__)

INRADIUS_CELLS = 256
INCENTER_TOLERANCE = 1e-3


def _section_points(domain: DomainSpec, points: np.ndarray) -> np.ndarray:
    """Map domain points onto the section the backend works on."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != domain.dimension:
        raise DomainError(f"Expected {domain.dimension}D points for domain '{domain.id}', got shape {pts.shape}")
    if isinstance(domain.shape, RevolutionShape):
        return np.column_stack([np.hypot(pts[:, 0], pts[:, 1]), pts[:, 2]])
    return pts


def _lift(domain: DomainSpec, section_pts: np.ndarray) -> np.ndarray:
    """Section points back to domain coordinates (meridian plane y = 0)."""
    if isinstance(domain.shape, RevolutionShape):
        return np.column_stack([section_pts[:, 0], np.zeros(len(section_pts)), section_pts[:, 1]])
    return section_pts


def signed_distance(domain: DomainSpec, points) -> np.ndarray:
    """Signed distance to the boundary, positive inside."""
    return domain.shape.section_sdf(_section_points(domain, points))


def is_inside(domain: DomainSpec, points) -> np.ndarray:
    return signed_distance(domain, points) > 0


def sample_boundary(domain: DomainSpec, n: int = 2048) -> Tuple[np.ndarray, np.ndarray]:
    """
    Boundary points and inward unit normals, counter-clockwise.

    For domains of revolution the meridian curve is sampled in (rho, z).
    """
    if n < 3:
        raise DomainError(f"Need at least 3 boundary samples, got {n}")
    return domain.shape.section_boundary(n)


def _scale(domain: DomainSpec) -> float:
    lo, hi = domain.shape.section_bbox()
    return float(np.max(hi - lo))


def distance_to_boundary(domain: DomainSpec, x) -> float:
    """
    Euclidean distance from x in the closure of the domain to its boundary.

    Args:
        domain: The domain
        x: A point of the closure

    Returns:
        float: d(x) >= 0
    """
    value = float(signed_distance(domain, x)[0])
    if value < -1e-9 * max(1.0, _scale(domain)):
        raise DomainError(f"Point {list(np.ravel(x))} lies outside domain '{domain.id}' (signed distance {value:.3e})")
    return max(value, 0.0)


def _anchored_axis(lo: float, hi: float, spacing: float) -> np.ndarray:
    start = np.floor(lo / spacing) * spacing
    count = int(np.ceil((hi - start) / spacing)) + 1
    return start + spacing * np.arange(count)


def section_grid(domain: DomainSpec, cells: int = INRADIUS_CELLS) -> Tuple[np.ndarray, float]:
    """Grid points covering the section, anchored at multiples of the spacing."""
    lo, hi = domain.shape.section_bbox()
    spacing = float(np.max(hi - lo)) / cells
    xs = _anchored_axis(lo[0], hi[0], spacing)
    ys = _anchored_axis(lo[1], hi[1], spacing)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()]), spacing


def maximize_distance(domain: DomainSpec, distance, cells: int = INRADIUS_CELLS) -> Tuple[float, List[List[float]]]:
    """
    Maximize a distance function over the section.

    The grid maximum is refined by local Nelder-Mead searches started from
    the best grid points. Incenters are all grid points within a relative
    1e-3 of the maximum; the refined optimum is added when no grid point
    qualifies.
    """
    pts, spacing = section_grid(domain, cells)
    values = distance(pts)
    if not np.any(values > 0):
        raise DomainError(f"Domain '{domain.id}' has empty interior at spacing {spacing:.3e}")
    order = np.argsort(-values)[:8]
    best_value, best_point = float(values[order[0]]), pts[order[0]]
    for k in order:
        result = minimize(lambda p: -float(distance(p[None, :])[0]), pts[k], method="Nelder-Mead",
                          options={"xatol": 1e-10 * spacing, "fatol": 1e-13, "maxiter": 400})
        if -result.fun > best_value:
            best_value, best_point = float(-result.fun), result.x
    near = pts[values >= best_value * (1 - INCENTER_TOLERANCE)]
    if len(near) == 0:
        near = best_point[None, :]
    if isinstance(domain.shape, RevolutionShape):
        near = near.copy()
        near[:, 0] = np.abs(near[:, 0])
    incenters = sorted(_lift(domain, near).tolist())
    return best_value, incenters


def inradius_incenter(domain: DomainSpec) -> Tuple[float, List[List[float]]]:
    """Inradius and every grid incenter within tolerance of it."""
    r_in, incenters = maximize_distance(domain, domain.shape.section_sdf)
    logger.debug(f"Inradius of '{domain.id}': {r_in:.6f} with {len(incenters)} incenters")
    return r_in, incenters


def diameter(domain: DomainSpec) -> float:
    return float(domain.shape.diameter())


def exterior_sphere_radius(domain: DomainSpec, supplied: Optional[float] = None,
                           samples: int = 1024) -> ExteriorRadius:
    """
    Largest r such that every boundary sample touches an exterior ball of radius r.

    Bisection on r in [0, diam] to 1e-3 diam. A ball of radius r tangent at y
    is centred at y + r n_out and is exterior when its centre keeps distance
    r from the domain. Unbounded radii are truncated to diam.

    Args:
        domain: The domain
        supplied: Caller-asserted radius, echoed if given
        samples: Number of boundary samples tested

    Returns:
        ExteriorRadius: radius with unbounded / degenerate / supplied flags
    """
    if supplied is not None:
        if supplied <= 0:
            raise DomainError(f"Supplied exterior radius must be positive, got {supplied}")
        return ExteriorRadius(radius=float(supplied), supplied=True)

    diam = diameter(domain)
    tol = 1e-3 * diam
    pts, normals = sample_boundary(domain, samples)
    shape = domain.shape

    def admits(r: float) -> bool:
        centers = pts - r * normals
        return bool(np.all(-shape.section_sdf(centers) >= r - 0.5 * tol))

    if admits(diam):
        return ExteriorRadius(radius=diam, unbounded=True)
    lo, hi = 0.0, diam
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admits(mid):
            lo = mid
        else:
            hi = mid
    if lo <= 0.0:
        logger.warning(f"No positive exterior sphere radius found for '{domain.id}'")
        return ExteriorRadius(radius=0.0, degenerate=True)
    return ExteriorRadius(radius=lo)


def min_mean_curvature(domain: DomainSpec, samples: int = 4096) -> Tuple[float, float]:
    """
    Minimum of the boundary mean curvature and the maximum of its negative part.

    Planar curves use the signed curvature; domains of revolution use the
    mean of the principal curvatures, so a sphere of radius R gives 1/R.
    """
    kind = domain.kind
    if kind == DomainKind.IMPLICIT:
        raise UnsupportedError(f"Curvature of implicit domain '{domain.id}' is not supported")
    if kind.is_polygonal:
        return 0.0, 0.0
    values = domain.shape.curvature_samples(samples)
    low = float(np.min(values))
    if kind.is_convex or getattr(domain.shape, "convex", False):
        return low, 0.0
    return low, max(0.0, -low)


def min_curvature_radius(domain: DomainSpec, samples: int = 4096) -> float:
    """Smallest interior osculating radius 1 / max curvature of a planar curve."""
    if not domain.shape.parametric:
        raise UnsupportedError(f"Osculating radii need a parametrized boundary, '{domain.id}' has none")
    kappa = domain.shape.curvature_samples(samples)
    return float(1.0 / np.max(kappa))


def _polygon_john(vertices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    hull = ConvexHull(vertices)
    A = hull.equations[:, :2]
    b = -hull.equations[:, 2]
    B = cp.Variable((2, 2), PSD=True)
    d = cp.Variable(2)
    constraints = [cp.norm(B @ A[i]) + A[i] @ d <= b[i] for i in range(len(b))]
    problem = cp.Problem(cp.Maximize(cp.log_det(B)), constraints)
    try:
        problem.solve()
    except Exception as e:
        raise SolverError(f"Error computing John ellipsoid: {str(e)}") from e
    if B.value is None:
        raise SolverError(f"John ellipsoid problem ended with status {problem.status}")
    return np.asarray(d.value), np.asarray(B.value)


def john_ellipsoid_matrix(domain: DomainSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Centre c and symmetric B with the John ellipsoid {c + B u : |u| <= 1}."""
    kind = domain.kind
    if kind == DomainKind.BALL:
        return np.asarray(domain.center, dtype=float), domain.radius * np.eye(domain.dimension)
    if kind == DomainKind.ELLIPSE:
        return np.asarray(domain.center, dtype=float), np.diag(domain.semi_axes)
    if kind == DomainKind.RECTANGLE:
        lower, upper = np.asarray(domain.lower), np.asarray(domain.upper)
        return (lower + upper) / 2, np.diag((upper - lower) / 2)
    if kind == DomainKind.CONVEX_POLYGON:
        return _polygon_john(domain.shape.vertices)
    raise UnsupportedError(f"John ellipsoid needs a convex domain, got kind {kind.value}")


def john_ellipsoid(domain: DomainSpec) -> Tuple[List[float], List[float]]:
    """Centre and ascending semi-axes of the maximum-volume inscribed ellipsoid."""
    center, B = john_ellipsoid_matrix(domain)
    axes = np.sort(np.linalg.eigvalsh(0.5 * (B + B.T)))
    return center.tolist(), axes.tolist()


def ellipsoid_samples(center, B, n: int = 10000, seed: int = 0) -> np.ndarray:
    """Points of the closed ellipsoid c + B u, |u| <= 1, including its boundary."""
    rng = np.random.default_rng(seed)
    dim = len(center)
    u = rng.normal(size=(n, dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    radii = rng.uniform(size=(n, 1)) ** (1.0 / dim)
    radii[: n // 2] = 1.0
    return np.asarray(center) + (radii * u) @ np.asarray(B).T


def m_minus2(axes) -> float:
    """(-2)-mean (N^-1 sum a_i^-2)^(-1/2) of positive semi-axes."""
    a = np.asarray(axes, dtype=float)
    if a.size == 0 or np.any(a <= 0):
        raise DomainError(f"m_minus2 needs positive axes, got {list(a)}")
    return float(np.mean(a ** -2.0) ** -0.5)


def summarize(domain: DomainSpec, r_e: Optional[float] = None,
              john_axes: Optional[List[float]] = None) -> GeomSummary:
    """Collect every geometric quantity the bounds may ask for."""
    r_in, incenters = inradius_incenter(domain)
    diam = diameter(domain)
    exterior = exterior_sphere_radius(domain, supplied=r_e)
    try:
        low, m0_minus = min_mean_curvature(domain)
    except UnsupportedError:
        low, m0_minus = None, None
    john_center = None
    if john_axes is None:
        try:
            john_center, john_axes = john_ellipsoid(domain)
        except UnsupportedError:
            john_axes = None
    else:
        john_axes = sorted(float(a) for a in john_axes)
    summary = GeomSummary(r_in=r_in, incenters=incenters, diam=diam,
                          r_e=exterior.radius if not exterior.degenerate else None,
                          r_e_unbounded=exterior.unbounded, M0_minus=m0_minus, min_mean_curvature=low,
                          john_center=john_center, john_axes=john_axes, volume=domain.shape.volume())
    logger.info(f"Geometry of '{domain.id}': r_in={r_in:.5f}, diam={diam:.5f}, r_e={summary.r_e}")
    return summary
