"""
Post-processing of solved fields: maxima, gradients and barrier checks.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from hotspot.exceptions import DomainError
from hotspot.models.domain_models import DomainSpec
from hotspot.models.field_models import ScalarField
from hotspot.services.anisotropy_service import aniso_distance_field
from hotspot.services.grid_service import DIRECTIONS

logger = logging.getLogger(__name__)

NEAR_MAX = 1e-3


def _neighbor_values(field: ScalarField) -> Tuple[np.ndarray, np.ndarray]:
    """
    Values and signed offsets of the four stencil neighbours of every node.

    Boundary crossings contribute the value 0 at offset theta h. On the
    axis of a revolution grid the W neighbour mirrors the E neighbour.
    """
    grid = field.grid
    n = grid.size
    I, J = grid.ij.T
    nx, ny = grid.shape
    values = np.zeros((n, 4))
    offsets = np.zeros((n, 4))
    for k, (di, dj) in enumerate(DIRECTIONS):
        ni, nj = I + di, J + dj
        valid = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        idx = np.full(n, -1)
        idx[valid] = grid.index[ni[valid], nj[valid]]
        values[:, k] = np.where(idx >= 0, field.values[np.maximum(idx, 0)], 0.0)
        sign = 1.0 if k in (0, 2) else -1.0
        offsets[:, k] = sign * grid.fractions[:, k] * grid.h
    if grid.axisymmetric:
        axis = np.abs(grid.points[:, 0]) < 0.5 * grid.h
        values[axis, 1] = values[axis, 0]
        offsets[axis, 1] = -offsets[axis, 0]
    return values, offsets


def _three_point(fa, f0, fb, a, b) -> Tuple[np.ndarray, np.ndarray]:
    """First and second derivative at 0 of the parabola through (a, fa), (0, f0), (b, fb)."""
    d1 = fa * (-b) / (a * (a - b)) + f0 * (-(a + b)) / (a * b) + fb * (-a) / ((b - a) * b)
    d2 = 2 * (fa / (a * (a - b)) + f0 / (a * b) + fb / ((b - a) * b))
    return d1, d2


def field_gradient(field: ScalarField) -> np.ndarray:
    """
    Gradient at every node.

    Central differences between interior neighbours; next to the boundary
    the parabola through the boundary zero gives a one-sided difference.

    Returns:
        np.ndarray: (n, 2) gradient in grid coordinates
    """
    values, offsets = _neighbor_values(field)
    u = field.values
    gx, _ = _three_point(values[:, 1], u, values[:, 0], offsets[:, 1], offsets[:, 0])
    gy, _ = _three_point(values[:, 3], u, values[:, 2], offsets[:, 3], offsets[:, 2])
    return np.column_stack([gx, gy])


def near_max_indices(field: ScalarField, rel: float = NEAR_MAX) -> np.ndarray:
    top = field.max_value
    return np.nonzero(field.values >= top * (1 - rel))[0]


def locate_max(field: ScalarField) -> Tuple[List[float], float, List[List[float]]]:
    """
    Maximum of a field with quadratic interpolation around the best node.

    Returns:
        (point, value, near): interpolated argmax and maximum in domain
        coordinates, and every node within a relative 1e-3 of the max
        (lexicographically sorted)
    """
    if field.values.size == 0 or not np.any(field.values > 0):
        raise DomainError(f"Field '{field.problem}' has no positive maximum")
    grid = field.grid
    near = near_max_indices(field)
    # lexicographically smallest node among the tied best ones
    best_value = field.max_value
    ties = np.nonzero(field.values == best_value)[0]
    k = int(ties[np.lexsort(grid.points[ties].T[::-1])][0])
    values, offsets = _neighbor_values(field)
    u0 = field.values[k]
    point = grid.points[k].copy()
    value = u0
    for axis, (lo_k, hi_k) in enumerate(((1, 0), (3, 2))):
        d1, d2 = _three_point(values[k, lo_k], u0, values[k, hi_k], offsets[k, lo_k], offsets[k, hi_k])
        if d2 < 0:
            shift = float(np.clip(-d1 / d2, -0.5 * grid.h, 0.5 * grid.h))
            point[axis] += shift
            value += d1 * shift + 0.5 * d2 * shift ** 2
    if grid.axisymmetric:
        point[0] = max(point[0], 0.0)
    near_pts = grid.lift(grid.points[near])
    order = np.lexsort(near_pts.T[::-1])
    return grid.lift(point[None, :])[0].tolist(), float(value), near_pts[order].tolist()


def worst_near_max(field: ScalarField) -> Tuple[List[float], float]:
    """Near-max node closest to the boundary and its distance."""
    grid = field.grid
    near = near_max_indices(field)
    j = near[int(np.argmin(grid.distance[near]))]
    return grid.lift(grid.points[j][None, :])[0].tolist(), float(grid.distance[j])


def lower_barrier_check(field: ScalarField, domain: DomainSpec, pair=None, norm=None,
                        tol: Optional[float] = None) -> Tuple[float, bool]:
    """
    Check u >= Psi(d) - tol at every node.

    d is the Euclidean distance, or the anisotropic distance when a norm is
    given; without a pair Psi(d) = d^2 / 2.

    Returns:
        (float, bool): smallest margin u - Psi(d) and whether it exceeds -tol
    """
    grid = field.grid
    if norm is not None and not norm.is_euclidean:
        distance = aniso_distance_field(domain, norm, grid.points)
    else:
        distance = grid.distance
    barrier = distance ** 2 / 2 if pair is None else np.asarray(pair.Psi(distance))
    tolerance = tol if tol is not None else 5 * grid.h * max(field.max_value, 1e-300)
    margin = float(np.min(field.values - barrier))
    logger.debug(f"Lower barrier margin for '{field.problem}': {margin:.3e} (tol {tolerance:.3e})")
    return margin, margin >= -tolerance
