import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hotspot.exceptions import DomainError
from hotspot.models.young_models import GrowthConstants, YoungKind, YoungSpec
from hotspot.services.young_service import (chi, conjugate, fit_growth, make_cosh_pair, make_power_pair,
                                            make_shifted_power_pair, make_tabulated_pair, make_young_pair,
                                            psi_inverse, verify_growth, young_inequality_gap, zeta)

pytestmark = [pytest.mark.unit, pytest.mark.young]


class TestPowerPair:
    def test_quadratic_conjugate(self):
        pair = make_power_pair(2.0)
        assert pair.Psi(3.0) == pytest.approx(4.5)

    def test_p4_conjugate_exponent(self):
        pair = make_power_pair(4.0)
        assert pair.p_conjugate == pytest.approx(4 / 3)
        assert pair.Psi(1.0) == pytest.approx(0.75)

    def test_young_equality_on_the_graph_of_phi(self):
        pair = make_power_pair(3.0)
        sigma = np.linspace(0.1, 3.0, 20)
        gap = young_inequality_gap(pair, sigma, pair.phi(sigma))
        assert np.allclose(gap, 0.0, atol=1e-12)

    def test_rejects_p_at_most_one(self):
        with pytest.raises(DomainError):
            make_power_pair(1.0)


@given(sigma=st.floats(0.0, 10.0), tau=st.floats(0.0, 10.0), p=st.floats(1.2, 6.0))
def test_young_inequality_is_nonnegative(sigma, tau, p):
    pair = make_power_pair(p)
    assert young_inequality_gap(pair, sigma, tau) >= -1e-9 * (1 + sigma * tau)


class TestConjugate:
    def test_power_closed_form(self):
        assert conjugate(make_power_pair(2.0), 1.0) == pytest.approx(0.5)

    def test_power_p3_numeric_matches_closed_form(self):
        closed = conjugate(make_power_pair(3.0), 8.0)
        numeric = conjugate(lambda s: s ** 3 / 3, 8.0)
        assert closed == pytest.approx(8 ** 1.5 / 1.5, rel=1e-12)
        assert numeric == pytest.approx(closed, rel=1e-8)

    def test_cosh_conjugate(self):
        expected = math.asinh(1.0) - math.sqrt(2.0) + 1.0
        assert expected == pytest.approx(0.46716, abs=1e-5)
        assert conjugate(lambda s: np.cosh(s) - 1.0, 1.0) == pytest.approx(expected, rel=1e-8)

    def test_tabulated_cosh_conjugate(self):
        sigma = np.linspace(0.0, 4.0, 401)
        pair = make_tabulated_pair(sigma, np.cosh(sigma) - 1.0)
        assert conjugate(pair, 1.0) == pytest.approx(0.46716, abs=1e-4)

    def test_negative_tau_raises(self):
        with pytest.raises(DomainError):
            conjugate(make_power_pair(2.0), -1.0)


class TestInverseAndChi:
    def test_psi_inverse_quadratic(self):
        pair = make_power_pair(2.0)
        assert psi_inverse(pair, 2.0) == pytest.approx(2.0, rel=1e-9)
        assert psi_inverse(pair, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_psi_inverse_round_trip(self):
        pair = make_power_pair(3.0)
        assert psi_inverse(pair, float(pair.Psi(5.0))) == pytest.approx(5.0, rel=1e-9)

    @pytest.mark.parametrize("p,N,sigma,expected", [
        (2.0, 2, 1.0, 1.0),
        (2.0, 3, 0.5, 1 / math.sqrt(3)),
        (4.0, 2, 0.75, 2 ** -0.25),
    ])
    def test_chi_closed_forms(self, p, N, sigma, expected):
        assert chi(make_power_pair(p), sigma, N) == pytest.approx(expected, rel=1e-8)

    def test_chi_of_cosh_pair_passes_the_quadrature_check(self):
        pair = make_cosh_pair()
        assert chi(pair, 0.3, 2) > 0

    def test_zeta_quadratic_is_sqrt(self):
        pair = make_power_pair(2.0)
        assert zeta(pair, 2.0) == pytest.approx(2.0, rel=1e-9)


class TestGrowth:
    def test_power_pair_has_no_violation(self):
        report = verify_growth(make_power_pair(3.0), (0.0, 2.0))
        assert report.holds
        assert report.worst_violation == 0.0
        assert report.worst_sigma is None
        assert report.fitted_c == pytest.approx(1.0, rel=1e-12)
        assert report.fitted_C == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
    def test_power_hessian_envelope_reported_separately(self, p):
        # radial eigenvalue is (p-1) s^(p-2), so only p = 2 keeps c = C = 1
        report = verify_growth(make_power_pair(p), (0.0, 2.0))
        assert report.holds
        assert report.hessian_violation == pytest.approx(abs(p - 2.0) / min(1.0, p - 1.0), rel=1e-9)
        assert report.hessian_c == pytest.approx(min(1.0, p - 1.0), rel=1e-9)
        assert report.hessian_C == pytest.approx(max(1.0, p - 1.0), rel=1e-9)

    def test_cosh_fitted_constants_hold(self):
        pair = make_cosh_pair()
        report = verify_growth(pair, (0.0, 1.0))
        assert report.worst_violation == pytest.approx(0.0, abs=1e-12)
        assert pair.growth.c == pytest.approx(1.0, rel=1e-3)
        assert pair.growth.C == pytest.approx(math.cosh(1.0), rel=1e-9)

    def test_wrong_constants_are_flagged(self):
        pair = make_cosh_pair()
        wrong = GrowthConstants(p=2.0, a=0.0, c=1.0, C=1.0)
        report = verify_growth(pair, (0.0, 1.0), constants=wrong)
        assert not report.holds
        assert report.worst_violation > 0

    def test_fit_growth_for_shifted_power(self):
        pair = make_shifted_power_pair(3.0, 0.5)
        growth = fit_growth(pair, 3.0, 0.5, (0.0, 1.0))
        assert 0 < growth.c <= growth.C


def test_make_young_pair_dispatches_on_kind():
    assert make_young_pair(YoungSpec()).kind == YoungKind.POWER
    assert make_young_pair(YoungSpec(kind="cosh")).kind == YoungKind.COSH
    shifted = make_young_pair(YoungSpec(kind="shifted_power", p=3.0, a=0.5))
    assert shifted.growth.a == 0.5


def test_shifted_spec_requires_positive_shift():
    with pytest.raises(ValueError):
        YoungSpec(kind="shifted_power", p=3.0, a=0.0)


def test_tabulated_pair_rejects_slopes_beyond_the_table():
    sigma = np.linspace(0.0, 1.0, 11)
    pair = make_tabulated_pair(sigma, sigma ** 2 / 2)
    with pytest.raises(DomainError):
        pair.psi(np.array([5.0]))
