import math

import pytest

from hotspot.exceptions import DomainError
from hotspot.services.radial_service import (h_eps, radial_lane_emden, radial_p_eigen, radial_q_eps,
                                             radial_q_eps_disk)
from hotspot.services.special_functions import lambda1_ball

pytestmark = [pytest.mark.unit, pytest.mark.pde]


class TestSmallDiffusionBall:
    def test_large_eps_approaches_torsion(self):
        assert radial_q_eps(1e4, 1.0, 2) == pytest.approx(0.5, rel=0.01)
        assert radial_q_eps(1e4, 1.0, 2) == pytest.approx(radial_q_eps_disk(1e4, 1.0), rel=1e-8)

    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("eps", [1e-3, 0.01, 0.1, 1.0, 10.0])
    def test_center_value_obeys_maximum_principle(self, eps, N):
        # w stays below the torsion value r^2 / 2 and the saturation value N eps
        value = radial_q_eps(eps, 1.0, N)
        assert 0 < value <= min(N * eps, 0.5) * (1 + 1e-9)

    def test_center_value_increases_with_radius(self):
        values = [radial_q_eps(0.1, r, 3) for r in (0.25, 0.5, 1.0, 2.0)]
        assert values == sorted(values)

    def test_zero_radius(self):
        assert radial_q_eps(0.1, 0.0, 3) == 0.0

    @pytest.mark.parametrize("eps", [0.01, 0.1, 1.0])
    def test_disk_matches_bessel_form(self, eps):
        assert radial_q_eps(eps, 1.0, 2) == pytest.approx(radial_q_eps_disk(eps, 1.0), rel=1e-7)

    def test_small_eps_saturates_at_n_eps(self):
        # w / eps tends to N away from the boundary
        assert radial_q_eps(1e-3, 1.0, 3) == pytest.approx(3e-3, rel=1e-3)

    @pytest.mark.parametrize("sigma,eps", [(0.5, 1.0), (2.0, 0.1), (0.0, 0.5)])
    def test_h_eps_closed_form_in_three_dimensions(self, sigma, eps):
        assert h_eps(sigma, eps, 3) == pytest.approx(h_eps(sigma, eps, 3, method="quad"), rel=1e-8)

    def test_h_eps_at_zero_is_sphere_measure(self):
        assert h_eps(0.0, 1.0, 2) == pytest.approx(math.pi)
        assert h_eps(0.0, 1.0, 4) == pytest.approx(math.pi / 2)

    def test_invalid_arguments(self):
        with pytest.raises(DomainError):
            radial_q_eps(0.0, 1.0, 2)
        with pytest.raises(DomainError):
            h_eps(1.0, 1.0, 1)
        with pytest.raises(DomainError):
            h_eps(1.0, 1.0, 2, method="series")


class TestShooting:
    @pytest.mark.parametrize("N", [2, 3])
    def test_p2_eigenvalue_is_bessel_zero(self, N):
        assert radial_p_eigen(2.0, N) == pytest.approx(lambda1_ball(N), rel=1e-6)

    @pytest.mark.parametrize("N", [2, 3])
    def test_lane_emden_q2_is_lambda1(self, N):
        assert radial_lane_emden(2.0, N) == pytest.approx(lambda1_ball(N), rel=1e-6)

    def test_p_eigen_scaling(self):
        assert radial_p_eigen(3.0, 2, R=2.0) == pytest.approx(radial_p_eigen(3.0, 2) / 8, rel=1e-10)

    def test_lane_emden_scaling(self):
        q, N = 1.5, 2
        expected = 2.0 ** (-2 + N * (1 - 2 / q)) * radial_lane_emden(q, N)
        assert radial_lane_emden(q, N, R=2.0) == pytest.approx(expected, rel=1e-10)

    def test_invalid_exponents(self):
        with pytest.raises(DomainError):
            radial_lane_emden(2.5, 2)
        with pytest.raises(DomainError):
            radial_p_eigen(1.0, 2)
