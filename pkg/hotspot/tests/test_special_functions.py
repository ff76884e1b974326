import math

import pytest

from hotspot.exceptions import DomainError
from hotspot.services.special_functions import arccosh, ball_volume, bessel_first_zero, gamma_beta, lambda1_ball

pytestmark = [pytest.mark.unit, pytest.mark.bounds]


def test_bessel_first_zero_half_order_is_pi():
    assert bessel_first_zero(0.5) == pytest.approx(math.pi, abs=1e-12)


def test_bessel_first_zero_order_zero():
    assert bessel_first_zero(0.0) == pytest.approx(2.4048255577, abs=1e-9)


def test_bessel_first_zero_rejects_out_of_range_orders():
    with pytest.raises(DomainError):
        bessel_first_zero(-0.5)
    with pytest.raises(DomainError):
        bessel_first_zero(11.0)


def test_lambda1_ball():
    assert lambda1_ball(2) == pytest.approx(5.7831859629, rel=1e-9)
    assert lambda1_ball(3) == pytest.approx(math.pi ** 2, rel=1e-12)


@pytest.mark.parametrize("a,b,expected", [
    (0.5, 0.5, math.pi),
    (1.0, 1.0, 1.0),
    (1 / 3, 2 / 3, 2 * math.pi / math.sqrt(3)),
])
def test_gamma_beta(a, b, expected):
    assert gamma_beta(a, b) == pytest.approx(expected, rel=1e-12)


def test_gamma_beta_rejects_nonpositive_arguments():
    with pytest.raises(DomainError):
        gamma_beta(0.0, 1.0)


@pytest.mark.parametrize("k,expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_ball_volume(k, expected):
    assert ball_volume(k) == pytest.approx(expected, rel=1e-12)


def test_arccosh_logarithm_identity():
    assert arccosh(2.0) == pytest.approx(math.log(2 + math.sqrt(3)), rel=1e-12)
    assert arccosh(1.0) == 0.0
    with pytest.raises(DomainError):
        arccosh(0.5)
