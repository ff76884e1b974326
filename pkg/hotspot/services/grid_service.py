"""
Node grids restricted to a domain and the quadrant operators built on them.

Each inside node owns up to four quadrants (NE, NW, SW, SE). A quadrant
carries one leg along x and one along y; a leg either reaches the
neighbouring node or stops where the edge crosses the boundary, at a
fraction theta of h, where the value is zero. The quadratic energy

    1/2 sum_q W_q |G_q u|^2

reproduces the 5-point stencil in the interior and a 1/theta diagonal
term at the boundary, so the stiffness matrix is symmetric positive
definite.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict
from scipy.sparse.linalg import splu

from hotspot.exceptions import DomainError, SolverError
from hotspot.models.domain_models import DomainSpec
from hotspot.models.field_models import Grid
from hotspot.services.shape_library import RevolutionShape

logger = logging.getLogger(__name__)

# E, W, N, S
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))
# (x-leg, y-leg) direction indices of NE, NW, SW, SE
QUADRANTS = ((0, 2), (1, 2), (1, 3), (0, 3))
THETA_MIN = 1e-3
RESIDUAL_TOL = 1e-10


def _edge_fraction(sdf, start: np.ndarray, end: np.ndarray, iterations: int = 52) -> np.ndarray:
    """Fraction along start -> end where the signed distance changes sign."""
    lo = np.zeros(len(start))
    hi = np.ones(len(start))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        inside = sdf(start + mid[:, None] * (end - start)) > 0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def build_grid(domain: DomainSpec, h: float) -> Grid:
    """
    Uniform grid with spacing h over the domain section.

    Node coordinates are multiples of h; domains of revolution are gridded
    on the meridian half-plane with the first column on the axis.
    """
    if h <= 0:
        raise DomainError(f"Grid spacing must be positive, got {h}")
    shape = domain.shape
    axisymmetric = isinstance(shape, RevolutionShape)
    lo, hi = shape.section_bbox()
    x0 = 0.0 if axisymmetric else (np.floor(lo[0] / h) - 1) * h
    y0 = (np.floor(lo[1] / h) - 1) * h
    nx = int(np.ceil((hi[0] - x0) / h)) + 2
    ny = int(np.ceil((hi[1] - y0) / h)) + 2
    xs = x0 + h * np.arange(nx)
    ys = y0 + h * np.arange(ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    sdf = shape.section_sdf(nodes).reshape(nx, ny)
    # nodes on the boundary are Dirichlet nodes
    inside = sdf > 1e-9 * h
    n = int(inside.sum())
    if n == 0:
        raise DomainError(f"Grid with h={h} has no node inside domain '{domain.id}'")

    index = np.full((nx, ny), -1, dtype=np.int64)
    index[inside] = np.arange(n)
    I, J = np.nonzero(inside)
    points = np.column_stack([xs[I], ys[J]])
    fractions = np.ones((n, 4))
    mask = inside.astype(np.int8)
    for k, (di, dj) in enumerate(DIRECTIONS):
        ni, nj = I + di, J + dj
        valid = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        if not np.all(valid) and not axisymmetric:
            raise DomainError("Grid padding does not enclose the domain")
        cross = np.zeros(n, dtype=bool)
        cross[valid] = ~inside[ni[valid], nj[valid]]
        if np.any(cross):
            theta = _edge_fraction(shape.section_sdf, points[cross], points[cross] + h * np.array([di, dj]))
            fractions[cross, k] = np.maximum(theta, THETA_MIN)
            mask[I[cross], J[cross]] = 2

    grid = Grid(h=h, origin=(float(x0), float(y0)), shape=(nx, ny), axisymmetric=axisymmetric,
                dimension=domain.dimension, mask=mask, index=index, points=points,
                fractions=fractions, distance=sdf[inside])
    logger.debug(f"Grid for '{domain.id}': h={h:.5g}, {n} unknowns, {int((mask == 2).sum())} next to the boundary")
    return grid


class GridOperators(BaseModel):
    """
    Quadrant gradient operators and lumped mass.

    Rows of Gx, Gy are quadrants; G_q u is the quadrant gradient scaled so
    that W_q |G_q u|^2 equals the sum of its weighted leg energies.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    Gx: sp.csr_matrix
    Gy: sp.csr_matrix
    W: np.ndarray
    V: np.ndarray
    owner: np.ndarray

    @property
    def quadrants(self) -> int:
        return int(self.W.shape[0])

    def stiffness(self) -> sp.csc_matrix:
        Wd = sp.diags(self.W)
        return (self.Gx.T @ Wd @ self.Gx + self.Gy.T @ Wd @ self.Gy).tocsc()

    def mass(self) -> sp.dia_matrix:
        return sp.diags(self.V)

    def gradients(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.Gx @ u, self.Gy @ u


def build_operators(grid: Grid) -> GridOperators:
    """Assemble the quadrant operators of a grid."""
    n = grid.size
    h = grid.h
    I, J = grid.ij.T
    nx, ny = grid.shape
    neighbors = np.full((n, 4), -1, dtype=np.int64)
    for k, (di, dj) in enumerate(DIRECTIONS):
        ni, nj = I + di, J + dj
        valid = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        neighbors[valid, k] = grid.index[ni[valid], nj[valid]]
    legs = grid.fractions * h
    on_axis = grid.axisymmetric & (np.abs(grid.points[:, 0]) < 0.5 * h)
    rho = grid.points[:, 0]

    rows_x, cols_x, data_x = [], [], []
    rows_y, cols_y, data_y = [], [], []
    weights, owners = [], []
    offset = 0
    nodes = np.arange(n)
    for kx, ky in QUADRANTS:
        sx = 1.0 if kx == 0 else -1.0
        sy = 1.0 if ky == 2 else -1.0
        keep = ~(on_axis & (kx == 1))
        P = nodes[keep]
        lx, ly = legs[keep, kx], legs[keep, ky]
        nbx, nby = neighbors[keep, kx], neighbors[keep, ky]
        mx = np.where(nbx < 0, 2.0, 1.0)
        my = np.where(nby < 0, 2.0, 1.0)
        if grid.axisymmetric:
            wx = rho[keep] + sx * lx / 2
            wy = np.where(on_axis[keep], h / 4, rho[keep])
        else:
            wx = wy = 1.0
        Wx = lx * h * mx / 4 * wx
        Wy = ly * h * my / 4 * wy
        Wq = np.maximum(Wx, Wy)
        ax = sx * np.sqrt(Wx / Wq) / lx
        ay = sy * np.sqrt(Wy / Wq) / ly
        q = offset + np.arange(len(P))
        rows_x += [q, q[nbx >= 0]]
        cols_x += [P, nbx[nbx >= 0]]
        data_x += [-ax, ax[nbx >= 0]]
        rows_y += [q, q[nby >= 0]]
        cols_y += [P, nby[nby >= 0]]
        data_y += [-ay, ay[nby >= 0]]
        weights.append(Wq)
        owners.append(P)
        offset += len(P)

    shape = (offset, n)
    Gx = sp.coo_matrix((np.concatenate(data_x), (np.concatenate(rows_x), np.concatenate(cols_x))), shape=shape).tocsr()
    Gy = sp.coo_matrix((np.concatenate(data_y), (np.concatenate(rows_y), np.concatenate(cols_y))), shape=shape).tocsr()
    if grid.axisymmetric:
        V = np.where(on_axis, h ** 3 / 8, rho * h ** 2)
    else:
        V = np.full(n, h ** 2)
    return GridOperators(Gx=Gx, Gy=Gy, W=np.concatenate(weights), V=V, owner=np.concatenate(owners))


class LinearSolver:
    """Sparse LU factorization with a relative residual check."""

    def __init__(self, matrix: sp.spmatrix, label: str = "system", tol: float = RESIDUAL_TOL):
        self.matrix = matrix.tocsc()
        self.label = label
        self.tol = tol
        try:
            self._lu = splu(self.matrix)
        except Exception as e:
            raise SolverError(f"Error factorizing {label}: {str(e)}") from e

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        u = self._lu.solve(rhs)
        scale = max(float(np.linalg.norm(rhs)), 1e-300)
        residual = float(np.linalg.norm(self.matrix @ u - rhs)) / scale
        if not np.all(np.isfinite(u)) or residual > self.tol:
            raise SolverError(f"Linear solve of {self.label} stalled with relative residual {residual:.3e}",
                              residual=residual)
        return u