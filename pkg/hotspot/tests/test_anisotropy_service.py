"""
Tests for anisotropic norms, polars, distances and Wulff shapes.
"""

import math

import numpy as np
import pytest

from hotspot.exceptions import DomainError, UnsupportedError
from hotspot.models.young_models import NormKind, NormSpec
from hotspot.services.anisotropy_service import (aniso_distance, aniso_distance_field, aniso_inradius,
                                                 aniso_mean_convexity, dual_norm_of_polar, make_norm,
                                                 norm_from_spec, polar, polar_numeric, wulff_ball_domain,
                                                 wulff_torsion_exact)
from hotspot.services.geometry_service import distance_to_boundary, inradius_incenter
from hotspot.services.young_service import make_power_pair

pytestmark = [pytest.mark.unit, pytest.mark.anisotropy]


@pytest.fixture
def elliptic():
    return make_norm("elliptic", A=[[4.0, 0.0], [0.0, 1.0]])


class TestPolar:
    def test_euclidean_is_self_dual(self):
        assert polar(make_norm("euclidean"), [3.0, 4.0]) == pytest.approx(5.0)

    def test_elliptic_closed_form_and_numeric(self, elliptic):
        assert polar(elliptic, [1.0, 0.0]) == pytest.approx(0.5)
        assert polar_numeric(elliptic, [1.0, 0.0]) == pytest.approx(0.5, rel=1e-6)

    def test_ls_polar_is_holder_dual(self):
        norm = make_norm("ls", s=3.0)
        assert polar(norm, [1.0, 1.0]) == pytest.approx(2 ** (2 / 3), rel=1e-12)
        assert polar_numeric(norm, [1.0, 1.0]) == pytest.approx(2 ** (2 / 3), rel=1e-6)

    def test_bidual_recovers_the_norm(self, elliptic):
        xi = np.array([0.3, -1.2])
        assert dual_norm_of_polar(elliptic, xi) == pytest.approx(float(elliptic.H(xi)), rel=1e-6)

    def test_gradient_of_H_is_homogeneous_of_degree_zero(self):
        norm = make_norm("ls", s=3.0)
        xi = np.array([0.4, -0.7])
        assert np.allclose(norm.grad_H(xi), norm.grad_H(5 * xi))
        # Euler identity
        assert float(np.dot(norm.grad_H(xi), xi)) == pytest.approx(float(norm.H(xi)))

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            NormSpec(kind=NormKind.ELLIPTIC, A=[[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(ValueError):
            NormSpec(kind=NormKind.LS)
        with pytest.raises(DomainError):
            make_norm("ls", s=np.inf)

    @pytest.mark.parametrize("kind,params", [
        ("elliptic", {"A": [[1.0, 2.0], [2.0, 1.0]]}),
        ("elliptic", {}),
        ("ls", {"s": 1.0}),
        ("octagonal", {}),
    ])
    def test_make_norm_reports_domain_errors(self, kind, params):
        with pytest.raises(DomainError, match="norm"):
            make_norm(kind, **params)

    def test_norm_from_spec(self):
        norm = norm_from_spec(NormSpec(kind="elliptic", A=[[0.25, 0.0], [0.0, 1.0]]))
        assert float(norm.H([2.0, 0.0])) == pytest.approx(1.0)


class TestDistance:
    def test_euclidean_reduces_to_distance(self, ellipse):
        norm = make_norm("euclidean")
        rng = np.random.default_rng(3)
        for _ in range(10):
            x = rng.uniform([-1.2, -0.5], [1.2, 0.5])
            assert aniso_distance(ellipse, norm, x) == pytest.approx(distance_to_boundary(ellipse, x), abs=1e-6)

    def test_elliptic_on_unit_disk(self, unit_disk, elliptic):
        assert aniso_distance(unit_disk, elliptic, [0.0, 0.0]) == pytest.approx(0.5, abs=1e-6)

    def test_wulff_ball_center(self, elliptic):
        domain = wulff_ball_domain(elliptic, 1.5)
        assert aniso_distance(domain, elliptic, [0.0, 0.0]) == pytest.approx(1.5, abs=1e-6)

    def test_outside_point_raises(self, unit_disk, elliptic):
        with pytest.raises(DomainError):
            aniso_distance(unit_disk, elliptic, [1.5, 0.0])

    def test_field_matches_pointwise(self, unit_disk, elliptic):
        pts = np.array([[0.1, 0.2], [-0.3, 0.0]])
        field = aniso_distance_field(unit_disk, elliptic, pts)
        assert field[1] == pytest.approx(aniso_distance(unit_disk, elliptic, pts[1]))

    def test_revolution_domain_is_unsupported(self, sphere, elliptic):
        with pytest.raises(UnsupportedError):
            aniso_distance_field(sphere, elliptic, [[0.1, 0.1, 0.1]])


class TestInradius:
    def test_euclidean_matches_inradius(self, ellipse):
        r, _ = aniso_inradius(ellipse, make_norm("euclidean"))
        assert r == pytest.approx(inradius_incenter(ellipse)[0])

    def test_wulff_ellipse(self, ellipse):
        norm = make_norm("elliptic", A=[[0.25, 0.0], [0.0, 1.0]])
        r, centers = aniso_inradius(ellipse, norm)
        assert r == pytest.approx(1.0, abs=1e-4)
        assert any(np.allclose(c, [0.0, 0.0], atol=0.1) for c in centers)


class TestWulffTorsion:
    def test_euclidean_quadratic(self):
        pair = make_power_pair(2.0)
        norm = make_norm("euclidean")
        assert wulff_torsion_exact(norm, pair, 1.0, [0.0, 0.0], [0.0, 0.0]) == pytest.approx(0.5)
        assert wulff_torsion_exact(norm, pair, 1.0, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(0.0)

    def test_elliptic_center_value(self, elliptic):
        assert wulff_torsion_exact(elliptic, make_power_pair(2.0), 1.0, [0, 0], [0, 0]) == pytest.approx(0.5)

    def test_boundary_point_is_zero(self, elliptic):
        # A = diag(4, 1) puts (2, 0) on the unit Wulff sphere
        value = wulff_torsion_exact(elliptic, make_power_pair(2.0), 1.0, [0, 0], [2.0, 0.0])
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_outside_the_ball_raises(self, elliptic):
        with pytest.raises(DomainError):
            wulff_torsion_exact(elliptic, make_power_pair(2.0), 1.0, [0, 0], [3.0, 0.0])


class TestMeanConvexity:
    def test_unit_circle_reduces_to_curvature(self, unit_disk):
        low, ok = aniso_mean_convexity(unit_disk, make_norm("euclidean"))
        assert low == pytest.approx(1.0, rel=1e-6)
        assert ok

    def test_wulff_ball_is_constant_and_positive(self, elliptic):
        domain = wulff_ball_domain(elliptic, 1.0)
        shape = domain.shape
        t = np.linspace(0, 2 * math.pi, 256, endpoint=False)
        low, ok = aniso_mean_convexity(domain, elliptic)
        assert ok and low > 0
        # sampled maximum equals the minimum up to finite-difference error
        step = 1e-4
        forward = elliptic.grad_H(shape.inward_normal(t + step))
        backward = elliptic.grad_H(shape.inward_normal(t - step))
        tangent = shape.d1(t)
        values = -np.einsum("ij,ij->i", (forward - backward) / (2 * step), tangent) / np.sum(tangent ** 2, axis=1)
        assert float(np.max(values)) == pytest.approx(low, abs=1e-3)

    def test_kite_concave_arc_is_flagged(self, kite):
        low, ok = aniso_mean_convexity(kite, make_norm("euclidean"))
        assert low < 0
        assert not ok

    def test_rectangle_is_unsupported(self, rectangle):
        with pytest.raises(UnsupportedError):
            aniso_mean_convexity(rectangle, make_norm("euclidean"))
