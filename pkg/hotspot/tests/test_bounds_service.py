"""
Tests for the closed-form bounds, the certification check and the registry.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from hotspot.exceptions import ConsistencyError, DomainError, InapplicableError
from hotspot.models.bound_models import BoundKind, BoundSense, BoundStatus
from hotspot.services.bounds_service import (BOUND_REGISTRY, bms_bound, bound_aniso, bound_eigen,
                                             bound_lane_emden, bound_p_eigen, bound_quasilinear,
                                             bound_semilinear_distance, bound_small_diffusion,
                                             bound_torsion_curvature, bound_torsion_exterior, bound_torsion_john,
                                             bound_torsion_meanconvex, check, evaluate_bound, gradient_G_upper,
                                             heat_bound, heat_inputs, lane_emden_integral, shifted_growth_ratio,
                                             torsion_max_upper)
from hotspot.services.elliptic_service import constant_source, discretize, linear_source, solve_eigen
from hotspot.services.field_service import field_gradient
from hotspot.services.heat_service import initial_datum
from hotspot.services.radial_service import radial_q_eps_disk
from hotspot.services.special_functions import gamma_beta, lambda1_ball
from hotspot.services.young_service import make_power_pair, make_shifted_power_pair

pytestmark = [pytest.mark.unit, pytest.mark.bounds]

J0 = 2.404825557695773


class TestTorsionBounds:
    @pytest.mark.parametrize("N,expected", [(2, 1 / math.sqrt(2)), (3, 0.5773502692), (4, 0.5)])
    def test_meanconvex(self, N, expected):
        value = bound_torsion_meanconvex(N)
        assert value.value == pytest.approx(expected, rel=1e-9)
        assert value.kind == BoundKind.RATIO

    def test_max_upper(self):
        assert torsion_max_upper(2, 1.0).value == pytest.approx(1.0)
        assert torsion_max_upper(3, 1.0).value == pytest.approx(1.5)
        assert torsion_max_upper(2, 1.0).sense == BoundSense.UPPER

    def test_john_on_ball_and_ellipse(self):
        assert bound_torsion_john([1.0, 1.0], 1.0, 2).value == pytest.approx(1 / math.sqrt(2))
        assert bound_torsion_john([1.0, 2.0], 1.0, 2).value == pytest.approx(0.894427191, rel=1e-9)

    def test_curvature(self):
        assert bound_torsion_curvature(2, 0.0, 1.0).value == pytest.approx(1 / math.sqrt(2))
        assert bound_torsion_curvature(2, 0.5, 1.0).value == pytest.approx(0.5)
        with pytest.raises(InapplicableError):
            bound_torsion_curvature(2, 1.0, 1.0)

    def test_gradient_upper(self):
        assert gradient_G_upper(2, 2.0, 2.0).value == pytest.approx(6.0)
        assert gradient_G_upper(3, 2.0, 1.0).value == pytest.approx(9.0)
        assert gradient_G_upper(2, 2.0, 1e12).value == pytest.approx(3.0)

    @pytest.mark.parametrize("N,diam,r_e,expected", [
        (2, 1.0, 1.0, 1 / math.sqrt(5)),
        (3, 2.0, 1.0, 1 / math.sqrt(21)),
        (2, 1.0, 1e12, 1 / math.sqrt(2)),
    ])
    def test_exterior(self, N, diam, r_e, expected):
        assert bound_torsion_exterior(N, diam, r_e).value == pytest.approx(expected, rel=1e-9)

    def test_dimension_guard(self):
        with pytest.raises(DomainError):
            bound_torsion_meanconvex(1)


class TestSemilinearBounds:
    def test_constant_source_closed_form(self):
        v = 0.5
        value = bound_semilinear_distance(constant_source(2.0), v, v).value
        assert value == pytest.approx(math.sqrt(2 * v / 2), rel=1e-6)

    def test_zero_level_gives_zero(self):
        assert bound_semilinear_distance(constant_source(2.0), 0.5, 0.0).value == 0.0

    def test_linear_source_is_arcsine(self):
        lam = 3.0
        value = bound_semilinear_distance(linear_source(lam), 0.8, 0.8).value
        assert value == pytest.approx(math.pi / (2 * math.sqrt(lam)), rel=1e-6)

    def test_decreasing_primitive_is_inapplicable(self):
        with pytest.raises(InapplicableError):
            bound_semilinear_distance(constant_source(-1.0), 0.5, 0.5)

    def test_level_above_maximum_is_rejected(self):
        with pytest.raises(DomainError):
            bound_semilinear_distance(constant_source(2.0), 0.5, 0.7)


class TestSmallDiffusionBound:
    def test_logarithm_identity(self):
        value = bound_small_diffusion(1.0, 2, u_z=1.0).value
        assert value == pytest.approx(math.log(2 + math.sqrt(3)), rel=1e-10)

    def test_vanishing_maximum(self):
        assert bound_small_diffusion(1.0, 2, u_z=0.0).value == 0.0

    def test_geometric_variant_approaches_torsion_bound(self):
        value = bound_small_diffusion(1e4, 2, r_in=1.0, use_geometric=True).value
        assert value == pytest.approx(1 / math.sqrt(2), rel=0.01)

    @pytest.mark.parametrize("eps", [0.01, 0.1, 1.0])
    def test_geometric_variant_uses_the_disk_value(self, eps):
        q = radial_q_eps_disk(eps, 1.0)
        expected = math.sqrt(eps) * math.acosh(2 / (2 - q / eps))
        value = bound_small_diffusion(eps, 2, r_in=1.0, use_geometric=True).value
        assert value == pytest.approx(expected, rel=1e-6)

    def test_saturated_maximum_is_inapplicable(self):
        with pytest.raises(InapplicableError):
            bound_small_diffusion(0.1, 2, u_z=0.2)


class TestEigenBounds:
    def test_ratio_forms(self):
        assert bound_eigen(None, 3, form="ratio").value == pytest.approx(0.5, rel=1e-10)
        assert bound_eigen(None, 2, form="ratio").value == pytest.approx(math.pi / (2 * J0), rel=1e-10)

    def test_absolute_form_on_unit_disk(self):
        value = bound_eigen(lambda1_ball(2), 2)
        assert value.value == pytest.approx(0.65319, abs=1e-5)
        assert value.kind == BoundKind.LENGTH

    def test_bms_on_ball(self):
        value = bms_bound(2, 1.0, 2.0).value
        assert value == pytest.approx(2 / (math.pi * lambda1_ball(2) ** 2), rel=1e-12)
        assert value == pytest.approx(0.01903, abs=1e-5)

    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    def test_bms_is_weaker_than_the_eigen_ratio(self, N):
        assert bms_bound(N, 1.0, 2.0).value <= bound_eigen(None, N, form="ratio").value

    def test_p_eigen(self):
        assert bound_p_eigen(2.0, 4.0, 2).value == pytest.approx(math.pi / 4, rel=1e-10)
        # (2^(1/3) / 3) B(1/3, 2/3) with B(1/3, 2/3) = 2 pi / sqrt(3)
        expected = 2 ** (1 / 3) / 3 * 2 * math.pi / math.sqrt(3)
        assert bound_p_eigen(3.0, 1.0, 2).value == pytest.approx(expected, rel=1e-9)
        assert bound_p_eigen(3.0, 1.0, 2).value == pytest.approx(1.5235, abs=1e-4)

    def test_p_eigen_ratio_at_p2_is_eigen_ratio(self):
        assert bound_p_eigen(2.0, None, 2, form="ratio").value == pytest.approx(math.pi / (2 * J0), rel=1e-6)

    def test_unknown_form(self):
        with pytest.raises(DomainError):
            bound_eigen(1.0, 2, form="relative")


class TestLaneEmdenBound:
    def test_q2_reduces_to_eigen_bound(self):
        lam = 5.0
        value = bound_lane_emden(2.0, lambda_q=lam, max_u=0.7, N=2).value
        assert value == pytest.approx(math.pi / (2 * math.sqrt(lam)), rel=1e-8)

    def test_integral_matches_beta_form(self):
        assert lane_emden_integral(1.5) == pytest.approx(gamma_beta(2 / 3, 0.5) / 1.5, rel=1e-8)

    def test_q_outside_range_is_inapplicable(self):
        with pytest.raises(InapplicableError):
            lane_emden_integral(1.0)

    def test_disagreeing_beta_form_raises(self):
        with patch("hotspot.services.bounds_service.gamma_beta", return_value=1.0):
            with pytest.raises(ConsistencyError):
                lane_emden_integral(1.5)

    def test_ratio_on_unit_disk(self):
        value = bound_lane_emden(2.0, N=2, r_in=1.0, vol=math.pi, form="ratio").value
        assert value == pytest.approx(math.pi / (2 * J0), rel=1e-6)


class TestHeatBound:
    def test_eigenfunction_datum(self, unit_disk, coarse_h):
        lam, _, phi1 = solve_eigen(unit_disk, coarse_h)
        inputs = heat_inputs(phi1, phi1, field_gradient(phi1), lam, 1.0, 2)
        assert inputs.K == pytest.approx(J0, rel=0.02)
        t = 0.5
        K, value = heat_bound(inputs, t, math.exp(-lam * t))
        assert K == inputs.K
        assert value.value == pytest.approx(1 / J0, rel=0.02)

    def test_discontinuous_datum_is_inapplicable(self, unit_disk, coarse_h):
        grid, _ = discretize(unit_disk, coarse_h)
        g = initial_datum(unit_disk, "one", grid, coarse_h)
        lam, _, phi1 = solve_eigen(unit_disk, coarse_h)
        with pytest.raises(InapplicableError):
            heat_inputs(g, phi1, np.zeros((grid.size, 2)), lam, 1.0, 2)

    def test_negative_time(self, unit_disk, coarse_h):
        lam, _, phi1 = solve_eigen(unit_disk, coarse_h)
        inputs = heat_inputs(phi1, phi1, field_gradient(phi1), lam, 1.0, 2)
        with pytest.raises(DomainError):
            heat_bound(inputs, -1.0, 0.5)


class TestQuasilinearBounds:
    def test_p2_general_reduces_to_torsion(self):
        value = bound_quasilinear(make_power_pair(2.0), 2, 1.0)
        assert value.value == pytest.approx(1 / math.sqrt(2), rel=1e-8)

    def test_power_ratio_p3(self):
        value = bound_quasilinear(make_power_pair(3.0), 2, 1.0, "power-ratio").value
        assert value == pytest.approx(2 ** (-1 / 3), rel=1e-12)

    def test_shift_without_shift_equals_power_ratio(self):
        pair = make_power_pair(3.0)
        shift = bound_quasilinear(pair, 2, 1.0, "shift").value
        assert shift == pytest.approx(bound_quasilinear(pair, 2, 1.0, "power-ratio").value, rel=1e-9)

    def test_power_ratio_needs_zero_shift(self):
        with pytest.raises(InapplicableError):
            bound_quasilinear(make_shifted_power_pair(3.0, 0.5), 2, 1.0, "power-ratio")

    def test_shifted_ratio_is_a_fraction(self):
        ratio = shifted_growth_ratio(2, 1.0, 3.0, 0.5, 0.8, 1.2)
        assert 0 <= ratio < 1

    def test_aniso_p2(self):
        assert bound_aniso(make_power_pair(2.0), 2, 1.0).value == pytest.approx(1 / math.sqrt(2), rel=1e-8)

    def test_unknown_variant(self):
        with pytest.raises(DomainError):
            bound_quasilinear(make_power_pair(2.0), 2, 1.0, "tight")


class TestCheck:
    def test_pass_with_slack(self):
        result = check(1.0, 0.7071, 0.02)
        assert result.passed
        assert result.relative_slack == pytest.approx(0.41421, abs=1e-4)
        assert result.status == BoundStatus.PASS

    def test_fail_below_tolerance(self):
        result = check(0.69, 0.7071, 0.02)
        assert not result.passed
        assert result.status.fails_run

    def test_pass_within_tolerance(self):
        assert check(0.700, 0.7071, 0.02).passed

    def test_upper_sense(self):
        assert check(0.5, 1.0, 0.02, sense=BoundSense.UPPER).passed
        assert not check(1.05, 1.0, 0.02, sense=BoundSense.UPPER).passed

    def test_default_tolerance_from_config(self):
        assert check(1.0, 0.7071).tolerance == pytest.approx(0.02)

    def test_negative_measurement(self):
        with pytest.raises(DomainError):
            check(-0.1, 0.5)


class TestRegistry:
    def test_registry_size(self):
        assert len(BOUND_REGISTRY) == 23

    def test_every_entry_names_its_problems(self):
        for entry in BOUND_REGISTRY.values():
            assert entry.problems
            assert entry.measure in ("distance", "aniso_distance", "max_value", "max_gradient")

    def test_evaluate_by_name(self):
        assert evaluate_bound("torsion_meanconvex", {"N": 2}).value == pytest.approx(1 / math.sqrt(2))

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            evaluate_bound("nope", {})

    def test_missing_input_is_inapplicable_with_reason(self):
        with pytest.raises(InapplicableError, match="nonconvex"):
            evaluate_bound("torsion_john", {"N": 2, "r_in": 1.0, "john_axes": None,
                                            "reasons": {"john_axes": "nonconvex domain"}})
