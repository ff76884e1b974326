"""
Geometric backends for the supported domain kinds.

Every shape answers signed-distance queries (positive inside) on its
section: the domain itself for planar kinds, the meridian half-plane
(rho, z) for domains of revolution.
"""

import logging
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial import ConvexHull, cKDTree

from hotspot.exceptions import DomainError, UnsupportedError
from hotspot.models.domain_models import DomainKind, DomainSpec

logger = logging.getLogger(__name__)

CURVE_SAMPLES = 8192


def _as_points(points: np.ndarray, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != dim:
        raise DomainError(f"Expected points of dimension {dim}, got shape {pts.shape}")
    return pts


def segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the segment [a_k, b_k] paired row by row."""
    ab = b - a
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    t = np.clip(np.einsum("ij,ij->i", points - a, ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(points - proj, axis=1)


def densify(vertices: np.ndarray, max_length: float, closed: bool) -> np.ndarray:
    """Insert points so that no polyline segment exceeds max_length."""
    ends = np.roll(vertices, -1, axis=0) if closed else vertices[1:]
    starts = vertices if closed else vertices[:-1]
    pieces = []
    for a, b in zip(starts, ends):
        count = max(1, int(np.ceil(np.linalg.norm(b - a) / max_length)))
        t = np.arange(count)[:, None] / count
        pieces.append(a + t * (b - a))
    if not closed:
        pieces.append(vertices[-1:])
    return np.vstack(pieces)


class Polyline:
    """Dense polyline with nearest-segment distance queries."""

    def __init__(self, vertices: np.ndarray, closed: bool):
        self.vertices = vertices
        self.closed = closed
        self.tree = cKDTree(vertices)

    def distance(self, points: np.ndarray) -> np.ndarray:
        _, idx = self.tree.query(points)
        m = len(self.vertices)
        best = np.full(len(points), np.inf)
        for shift in (-1, 1):
            other = idx + shift
            if self.closed:
                other = other % m
            else:
                other = np.clip(other, 0, m - 1)
            d = segment_distance(points, self.vertices[idx], self.vertices[other])
            best = np.minimum(best, d)
        return best


def polygon_signed_distance(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Exact signed distance to a simple polygon, positive inside."""
    dist = np.full(len(points), np.inf)
    inside = np.zeros(len(points), dtype=bool)
    x, y = points[:, 0], points[:, 1]
    for a, b in zip(vertices, np.roll(vertices, -1, axis=0)):
        dist = np.minimum(dist, segment_distance(points, np.broadcast_to(a, points.shape), np.broadcast_to(b, points.shape)))
        # ray casting towards +x
        crosses = (a[1] > y) != (b[1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
        inside ^= crosses & (x < x_cross)
    return np.where(inside, dist, -dist)


class Shape(ABC):
    """Common interface of the geometric backends."""

    dimension: int = 2
    convex: bool = False
    has_curvature: bool = False
    parametric: bool = False

    @abstractmethod
    def section_sdf(self, points: np.ndarray) -> np.ndarray:
        """Signed distance on the section, positive inside."""

    @abstractmethod
    def section_bbox(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners enclosing the section."""

    @abstractmethod
    def section_boundary(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Boundary samples of the section and their inward unit normals."""

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        return self.section_sdf(_as_points(points, self.dimension))

    def inside(self, points: np.ndarray) -> np.ndarray:
        return self.signed_distance(points) > 0

    def curvature_samples(self, n: int) -> np.ndarray:
        raise UnsupportedError(f"{type(self).__name__} carries no curvature data")

    def diameter(self) -> float:
        pts, _ = self.section_boundary(CURVE_SAMPLES)
        return _max_pairwise_distance(pts)

    def volume(self) -> float:
        """Area (planar) of the domain from its boundary samples."""
        pts, _ = self.section_boundary(CURVE_SAMPLES)
        x, y = pts[:, 0], pts[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _max_pairwise_distance(points: np.ndarray) -> float:
    hull_pts = points[ConvexHull(points).vertices]
    best = 0.0
    for start in range(0, len(hull_pts), 512):
        block = hull_pts[start:start + 512]
        diff = block[:, None, :] - hull_pts[None, :, :]
        best = max(best, float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff)))))
    return best


class ParametricCurve(Shape):
    """Closed counter-clockwise C^2 curve t -> gamma(t), t in [0, 2 pi)."""

    parametric = True
    has_curvature = True

    @abstractmethod
    def point(self, t: np.ndarray) -> np.ndarray:
        """(n, 2) curve points."""

    def d1(self, t: np.ndarray) -> np.ndarray:
        step = 1e-5
        return (self.point(t + step) - self.point(t - step)) / (2 * step)

    def d2(self, t: np.ndarray) -> np.ndarray:
        step = 1e-4
        return (self.point(t + step) - 2 * self.point(t) + self.point(t - step)) / step ** 2

    @cached_property
    def _samples(self):
        t = np.linspace(0.0, 2 * np.pi, CURVE_SAMPLES, endpoint=False)
        pts = self.point(t)
        return t, pts, cKDTree(pts)

    def inward_normal(self, t: np.ndarray) -> np.ndarray:
        tangent = self.d1(t)
        tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
        return np.column_stack([-tangent[:, 1], tangent[:, 0]])

    def project(self, points: np.ndarray) -> np.ndarray:
        """Parameter of the nearest boundary point, refined by Newton steps."""
        t_grid, _, tree = self._samples
        _, idx = tree.query(points)
        t = t_grid[idx].copy()
        dt = 2 * np.pi / CURVE_SAMPLES
        for _ in range(8):
            diff = self.point(t) - points
            g1 = self.d1(t)
            grad = np.einsum("ij,ij->i", diff, g1)
            hess = np.einsum("ij,ij->i", g1, g1) + np.einsum("ij,ij->i", diff, self.d2(t))
            step = np.where(hess > 0, -grad / np.where(hess > 0, hess, 1.0), 0.0)
            t = t + np.clip(step, -dt, dt)
        return t

    def section_sdf(self, points: np.ndarray) -> np.ndarray:
        t = self.project(points)
        diff = points - self.point(t)
        dist = np.linalg.norm(diff, axis=1)
        side = np.einsum("ij,ij->i", diff, self.inward_normal(t))
        return np.where(side >= 0, dist, -dist)

    def section_boundary(self, n: int):
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.point(t), self.inward_normal(t)

    def section_bbox(self):
        _, pts, _ = self._samples
        return pts.min(axis=0), pts.max(axis=0)

    def curvature_at(self, t: np.ndarray) -> np.ndarray:
        g1, g2 = self.d1(t), self.d2(t)
        cross = g1[:, 0] * g2[:, 1] - g1[:, 1] * g2[:, 0]
        return cross / np.linalg.norm(g1, axis=1) ** 3

    def curvature_samples(self, n: int) -> np.ndarray:
        return self.curvature_at(np.linspace(0.0, 2 * np.pi, n, endpoint=False))


class DiskShape(ParametricCurve):
    convex = True

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def point(self, t):
        return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def d1(self, t):
        return self.radius * np.column_stack([-np.sin(t), np.cos(t)])

    def d2(self, t):
        return -self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def section_sdf(self, points):
        return self.radius - np.linalg.norm(points - self.center, axis=1)

    def diameter(self):
        return 2 * self.radius

    def volume(self):
        return float(np.pi * self.radius ** 2)


class EllipseShape(ParametricCurve):
    convex = True

    def __init__(self, center, semi_axes):
        self.center = np.asarray(center, dtype=float)
        self.a, self.b = (float(v) for v in semi_axes)

    def point(self, t):
        return self.center + np.column_stack([self.a * np.cos(t), self.b * np.sin(t)])

    def d1(self, t):
        return np.column_stack([-self.a * np.sin(t), self.b * np.cos(t)])

    def d2(self, t):
        return -np.column_stack([self.a * np.cos(t), self.b * np.sin(t)])

    def diameter(self):
        return 2 * max(self.a, self.b)

    def volume(self):
        return float(np.pi * self.a * self.b)


class KiteShape(ParametricCurve):
    """Smooth nonconvex kite x = cos t + k cos 2t - k, y = s sin t."""

    def __init__(self, center, k: float = 0.65, s: float = 1.5):
        self.center = np.asarray(center, dtype=float)
        self.k, self.s = float(k), float(s)

    def point(self, t):
        return self.center + np.column_stack([np.cos(t) + self.k * np.cos(2 * t) - self.k, self.s * np.sin(t)])

    def d1(self, t):
        return np.column_stack([-np.sin(t) - 2 * self.k * np.sin(2 * t), self.s * np.cos(t)])

    def d2(self, t):
        return np.column_stack([-np.cos(t) - 4 * self.k * np.cos(2 * t), -self.s * np.sin(t)])


class SuperellipseShape(ParametricCurve):
    """Curve |x/r|^m + |y/r|^m = 1 in polar parametrization."""

    def __init__(self, center, radius: float, exponent: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.m = float(exponent)
        self.convex = self.m >= 1

    def point(self, t):
        c, s = np.cos(t), np.sin(t)
        r = self.radius / (np.abs(c) ** self.m + np.abs(s) ** self.m) ** (1.0 / self.m)
        return self.center + np.column_stack([r * c, r * s])


class PolygonShape(Shape):
    """Simple polygon with exact distance; rectangles are the axis-aligned case."""

    def __init__(self, vertices, convex: bool):
        verts = np.asarray(vertices, dtype=float)
        area2 = np.dot(verts[:, 0], np.roll(verts[:, 1], -1)) - np.dot(verts[:, 1], np.roll(verts[:, 0], -1))
        if area2 < 0:
            verts = verts[::-1]
        self.vertices = verts
        self.convex = convex

    def section_sdf(self, points):
        return polygon_signed_distance(points, self.vertices)

    def section_bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def section_boundary(self, n: int):
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        lengths = np.linalg.norm(b - a, axis=1)
        s = np.linspace(0.0, lengths.sum(), n, endpoint=False)
        edge = np.searchsorted(np.cumsum(lengths), s, side="right")
        offset = s - np.concatenate([[0.0], np.cumsum(lengths)[:-1]])[edge]
        direction = (b - a)[edge] / lengths[edge][:, None]
        pts = a[edge] + offset[:, None] * direction
        normals = np.column_stack([-direction[:, 1], direction[:, 0]])
        return pts, normals

    def curvature_samples(self, n: int) -> np.ndarray:
        if not self.convex:
            raise UnsupportedError("Curvature of nonconvex polygons is concentrated at reentrant corners")
        # flat sides, convex corners
        return np.zeros(n)

    def diameter(self):
        return _max_pairwise_distance(self.vertices) if len(self.vertices) > 3 else float(
            max(np.linalg.norm(a - b) for a in self.vertices for b in self.vertices))

    def volume(self):
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


class ImplicitShape(Shape):
    """
    Domain {L > 0} for a level function L.

    The zero level set is sampled by bisection along the edges of a fine
    grid; distances come from the samples with segment refinement.
    """

    def __init__(self, level: Callable[[np.ndarray], np.ndarray], bbox, resolution: int = 1024):
        self.level = level
        self.lo = np.asarray(bbox[0], dtype=float)
        self.hi = np.asarray(bbox[1], dtype=float)
        self.resolution = resolution

    @cached_property
    def _samples(self):
        xs = np.linspace(self.lo[0], self.hi[0], self.resolution + 1)
        ys = np.linspace(self.lo[1], self.hi[1], self.resolution + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        L = self.level(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
        found = []
        for axis in (0, 1):
            if axis == 0:
                sa, sb = L[:-1, :], L[1:, :]
                pa = np.stack([X[:-1, :], Y[:-1, :]], axis=-1)
                pb = np.stack([X[1:, :], Y[1:, :]], axis=-1)
            else:
                sa, sb = L[:, :-1], L[:, 1:]
                pa = np.stack([X[:, :-1], Y[:, :-1]], axis=-1)
                pb = np.stack([X[:, 1:], Y[:, 1:]], axis=-1)
            cross = np.sign(sa) * np.sign(sb) < 0
            found.append(_bisect_edges(self.level, pa[cross], pb[cross]))
        pts = np.vstack(found)
        if len(pts) < 16:
            raise DomainError("Implicit domain has no resolvable boundary inside its bbox")
        spacing = float(np.max((self.hi - self.lo) / self.resolution))
        return pts, cKDTree(pts), spacing

    def _gradient(self, points):
        step = 1e-6 * float(np.max(self.hi - self.lo))
        ex, ey = np.array([step, 0.0]), np.array([0.0, step])
        gx = (self.level(points + ex) - self.level(points - ex)) / (2 * step)
        gy = (self.level(points + ey) - self.level(points - ey)) / (2 * step)
        return np.column_stack([gx, gy])

    def section_sdf(self, points):
        pts, tree, spacing = self._samples
        dist, _ = tree.query(points)
        # refine with segments to nearby samples
        neighbors = tree.query(points, k=6)[1]
        refined = dist.copy()
        for j in range(1, 6):
            a, b = pts[neighbors[:, 0]], pts[neighbors[:, j]]
            close = np.linalg.norm(a - b, axis=1) <= 2.5 * spacing
            seg = segment_distance(points, a, b)
            refined = np.where(close, np.minimum(refined, seg), refined)
        return np.where(self.level(points) > 0, refined, -refined)

    def section_bbox(self):
        return self.lo.copy(), self.hi.copy()

    def section_boundary(self, n: int):
        pts, _, _ = self._samples
        centroid = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - centroid[1], pts[:, 0] - centroid[0]))
        pts = pts[order]
        if len(pts) > n:
            pts = pts[np.linspace(0, len(pts) - 1, n).astype(int)]
        grad = self._gradient(pts)
        return pts, grad / np.linalg.norm(grad, axis=1, keepdims=True)


def _bisect_edges(level, pa: np.ndarray, pb: np.ndarray, iterations: int = 48) -> np.ndarray:
    """Vectorized bisection for the zero of level on segments [pa, pb]."""
    if len(pa) == 0:
        return np.empty((0, 2))
    la = level(pa)
    lo, hi = np.zeros(len(pa)), np.ones(len(pa))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        lm = level(pa + mid[:, None] * (pb - pa))
        same = np.sign(lm) == np.sign(la)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    t = 0.5 * (lo + hi)
    return pa + t[:, None] * (pb - pa)


def _smax(a, b, delta):
    return 0.5 * (a + b + np.sqrt((a - b) ** 2 + delta ** 2))


def _smin(a, b, delta):
    return 0.5 * (a + b - np.sqrt((a - b) ** 2 + delta ** 2))


class RevolutionShape(Shape):
    """
    Solid {(x, y, z): z0 < z < z1, sqrt(x^2 + y^2) < rho(z)}.

    Queries work in the meridian half-plane (rho, z); points with a
    negative first coordinate are reflected onto it.
    """

    dimension = 3
    has_curvature = True

    def __init__(self, rho, z0: float, z1: float, drho=None, d2rho=None, convex: bool = False):
        self.rho = rho
        self.z0, self.z1 = float(z0), float(z1)
        self._drho = drho
        self._d2rho = d2rho
        self.convex = convex

    @cached_property
    def _meridian(self) -> Polyline:
        # cosine spacing clusters samples near the poles
        z = self.z0 + (self.z1 - self.z0) * 0.5 * (1 - np.cos(np.linspace(0.0, np.pi, CURVE_SAMPLES)))
        verts = np.column_stack([np.maximum(self.rho(z), 0.0), z])
        verts = np.vstack([[0.0, self.z0], verts, [0.0, self.z1]])
        verts = densify(verts, (self.z1 - self.z0) / CURVE_SAMPLES * 2, closed=False)
        return Polyline(verts, closed=False)

    def section_sdf(self, points):
        rho = np.abs(points[:, 0])
        z = points[:, 1]
        pts = np.column_stack([rho, z])
        dist = self._meridian.distance(pts)
        zc = np.clip(z, self.z0, self.z1)
        inside = (z > self.z0) & (z < self.z1) & (rho < self.rho(zc))
        return np.where(inside, dist, -dist)

    def signed_distance(self, points):
        pts = _as_points(points, 3)
        return self.section_sdf(np.column_stack([np.hypot(pts[:, 0], pts[:, 1]), pts[:, 2]]))

    def section_bbox(self):
        verts = self._meridian.vertices
        return np.array([0.0, self.z0]), np.array([verts[:, 0].max(), self.z1])

    def section_boundary(self, n: int):
        verts = self._meridian.vertices
        idx = np.linspace(1, len(verts) - 2, n).astype(int)
        tangent = verts[idx + 1] - verts[idx - 1]
        tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
        # traversal from the south pole to the north pole keeps the inside on the left
        normals = np.column_stack([-tangent[:, 1], tangent[:, 0]])
        return verts[idx], normals

    def derivatives(self, z: np.ndarray):
        if self._drho is not None and self._d2rho is not None:
            return self._drho(z), self._d2rho(z)
        step = 1e-5 * (self.z1 - self.z0)
        r_p, r_0, r_m = self.rho(z + step), self.rho(z), self.rho(z - step)
        return (r_p - r_m) / (2 * step), (r_p - 2 * r_0 + r_m) / step ** 2

    def mean_curvature_at(self, z: np.ndarray) -> np.ndarray:
        rho = self.rho(z)
        d1, d2 = self.derivatives(z)
        w = np.sqrt(1 + d1 ** 2)
        parallel = 1.0 / (rho * w)
        meridian = -d2 / w ** 3
        return 0.5 * (parallel + meridian)

    def curvature_samples(self, n: int) -> np.ndarray:
        margin = 1e-3 * (self.z1 - self.z0)
        z = np.linspace(self.z0 + margin, self.z1 - margin, n)
        keep = self.rho(z) > 1e-3 * (self.z1 - self.z0)
        return self.mean_curvature_at(z[keep])

    def diameter(self):
        verts = self._meridian.vertices
        mirrored = np.vstack([verts, verts * np.array([-1.0, 1.0])])
        return _max_pairwise_distance(mirrored)

    def volume(self):
        z = np.linspace(self.z0, self.z1, 20001)
        return float(trapezoid(np.pi * np.maximum(self.rho(z), 0.0) ** 2, z))


def _sphere_profile(radius: float, zc: float):
    def rho(z):
        return np.sqrt(np.maximum(radius ** 2 - (z - zc) ** 2, 0.0))

    def drho(z):
        return -(z - zc) / rho(z)

    def d2rho(z):
        return -radius ** 2 / rho(z) ** 3

    return rho, drho, d2rho


def dumbbell_profile(R: float = 1.0, r: float = 0.55, c: float = 0.3, waist: float = 1.05,
                     small_center: float = 1.45, cut_start: float = 0.5, cut_slope: float = 10.0,
                     delta: float = 0.02):
    """
    Meridian of a dumbbell: a big ball of radius R at z = 0 and a small end
    of radius r, joined by a catenoid neck, blended by smooth max/min.
    """
    def big(z):
        return np.where(np.abs(z) <= R, np.sqrt(np.abs(R ** 2 - z ** 2)), -np.sqrt(np.abs(z ** 2 - R ** 2)))

    def small(z):
        off = z - small_center
        cap = np.where(np.abs(off) <= r, np.sqrt(np.abs(r ** 2 - off ** 2)), -np.sqrt(np.abs(off ** 2 - r ** 2)))
        return np.where(off <= 0, r, cap)

    def neck(z):
        return c * np.cosh(np.clip((z - waist) / c, -30.0, 30.0))

    def rho(z):
        z = np.asarray(z, dtype=float)
        inner = _smin(_smin(neck(z), small(z), delta), cut_slope * (z - cut_start), delta)
        return _smax(big(z), inner, delta)

    return rho, -R, small_center + r


def build_shape(domain: DomainSpec) -> Shape:
    """Construct the geometric backend for a domain spec."""
    kind = domain.kind
    if kind == DomainKind.BALL:
        if domain.dimension == 2:
            return DiskShape(domain.center, domain.radius)
        if abs(domain.center[0]) > 0 or abs(domain.center[1]) > 0:
            raise UnsupportedError("3D balls must be centered on the z-axis")
        rho, d1, d2 = _sphere_profile(domain.radius, domain.center[2])
        return RevolutionShape(rho, domain.center[2] - domain.radius, domain.center[2] + domain.radius, d1, d2, convex=True)
    if kind == DomainKind.ELLIPSE:
        return EllipseShape(domain.center, domain.semi_axes)
    if kind == DomainKind.RECTANGLE:
        (x0, y0), (x1, y1) = domain.lower, domain.upper
        return PolygonShape([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], convex=True)
    if kind == DomainKind.CONVEX_POLYGON:
        return PolygonShape(domain.vertices, convex=True)
    if kind == DomainKind.SMOOTH_CURVE:
        params = domain.curve.params
        if domain.curve.name == "kite":
            return KiteShape(domain.center, params.get("k", 0.65), params.get("s", 1.5))
        if domain.curve.name == "circle":
            return DiskShape(domain.center, params.get("radius", 1.0))
        return SuperellipseShape(domain.center, params.get("radius", 1.0), params.get("exponent", 4.0))
    if kind == DomainKind.REVOLUTION:
        return _build_revolution(domain)
    if kind == DomainKind.IMPLICIT:
        return _build_implicit(domain)
    raise UnsupportedError(f"Unknown domain kind {kind}")


def _build_revolution(domain: DomainSpec) -> RevolutionShape:
    name, params = domain.profile.name, domain.profile.params
    if name == "sphere":
        radius, zc = params.get("radius", 1.0), params.get("z_center", 0.0)
        rho, d1, d2 = _sphere_profile(radius, zc)
        return RevolutionShape(rho, zc - radius, zc + radius, d1, d2, convex=True)
    if name == "cylinder":
        radius, length = params.get("radius", 1.0), params.get("length", 4.0)
        return RevolutionShape(lambda z: np.full_like(np.asarray(z, dtype=float), radius), -length / 2, length / 2,
                               lambda z: np.zeros_like(z), lambda z: np.zeros_like(z), convex=True)
    if name == "catenoid":
        c, half = params.get("c", 1.0), params.get("half_height", 1.0)
        return RevolutionShape(lambda z: c * np.cosh(np.asarray(z) / c), -half, half,
                               lambda z: np.sinh(z / c), lambda z: np.cosh(z / c) / c)
    rho, z0, z1 = dumbbell_profile(**params)
    return RevolutionShape(rho, z0, z1)


def _build_implicit(domain: DomainSpec) -> ImplicitShape:
    spec = domain.implicit
    params = spec.params
    if spec.name == "callback":
        return ImplicitShape(domain.sdf_callback, spec.bbox)
    if spec.name == "superellipse":
        ax, ay, m = params.get("ax", 1.0), params.get("ay", 1.0), params.get("exponent", 4.0)
        cx, cy = domain.center

        def level(p):
            return 1.0 - np.abs((p[:, 0] - cx) / ax) ** m - np.abs((p[:, 1] - cy) / ay) ** m
        return ImplicitShape(level, spec.bbox)
    a, c = params.get("a", 1.2), params.get("c", 1.0)
    cx, cy = domain.center

    def cassini(p):
        x, y = p[:, 0] - cx, p[:, 1] - cy
        return (a ** 4 - c ** 4) - ((x ** 2 + y ** 2) ** 2 - 2 * c ** 2 * (x ** 2 - y ** 2))
    return ImplicitShape(cassini, spec.bbox)


def regular_polygon(n: int, side: float, center=(0.0, 0.0)) -> np.ndarray:
    """Vertices of a regular n-gon with the given side, counter-clockwise."""
    if n < 3:
        raise DomainError("A polygon needs at least three vertices")
    circumradius = side / (2 * np.sin(np.pi / n))
    angles = np.pi / 2 + 2 * np.pi * np.arange(n) / n
    return np.asarray(center) + circumradius * np.column_stack([np.cos(angles), np.sin(angles)])
