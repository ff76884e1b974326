import numpy as np
import pytest

from hotspot.exceptions import DomainError
from hotspot.services.elliptic_service import discretize, solve_eigen
from hotspot.services.heat_service import initial_datum, solve_heat

pytestmark = [pytest.mark.unit, pytest.mark.pde]


class TestHeat:
    def test_eigenfunction_decays_exponentially(self, unit_disk, coarse_h):
        lam, _, _ = solve_eigen(unit_disk, coarse_h)
        trajectory = solve_heat(unit_disk, "phi1", [0.05, 0.1, 0.5], coarse_h)
        assert np.allclose(trajectory.ratio_series(lam), 1.0, rtol=2e-3)

    def test_maximum_is_nonincreasing(self, unit_disk, coarse_h):
        trajectory = solve_heat(unit_disk, "one", [0.0, 0.01, 0.05, 0.2], coarse_h)
        assert trajectory.M[0] == pytest.approx(1.0)
        assert all(b <= a + 1e-12 for a, b in zip(trajectory.M, trajectory.M[1:]))

    def test_times_are_sorted_and_snapshots_recorded(self, unit_disk, coarse_h):
        trajectory = solve_heat(unit_disk, "torsion", [0.2, 0.1], coarse_h)
        assert trajectory.times == [0.1, 0.2]
        assert len(trajectory.hotspots) == 2
        assert trajectory.initial.params["g"] == "torsion"

    def test_hotspot_of_symmetric_datum_is_central(self, unit_disk, coarse_h):
        trajectory = solve_heat(unit_disk, "phi1", [0.1], coarse_h)
        assert np.max(np.linalg.norm(trajectory.hotspots[0], axis=1)) < 0.1

    @pytest.mark.parametrize("times", [[], [-0.1, 0.2], [0.1, 0.1]])
    def test_bad_times_raise(self, unit_disk, coarse_h, times):
        with pytest.raises(DomainError):
            solve_heat(unit_disk, "one", times, coarse_h)


class TestInitialDatum:
    def test_callable_datum(self, unit_disk, coarse_h):
        grid, _ = discretize(unit_disk, coarse_h)
        field = initial_datum(unit_disk, lambda x: 1.0 - np.sum(x ** 2, axis=1), grid, coarse_h)
        assert field.max_value <= 1.0
        assert field.params["g"] == "<lambda>"

    def test_negative_datum_is_rejected(self, unit_disk, coarse_h):
        grid, _ = discretize(unit_disk, coarse_h)
        with pytest.raises(DomainError):
            initial_datum(unit_disk, -np.ones(grid.size), grid, coarse_h)

    def test_wrong_size_is_rejected(self, unit_disk, coarse_h):
        grid, _ = discretize(unit_disk, coarse_h)
        with pytest.raises(DomainError):
            initial_datum(unit_disk, np.ones(3), grid, coarse_h)

    def test_unknown_name(self, unit_disk, coarse_h):
        grid, _ = discretize(unit_disk, coarse_h)
        with pytest.raises(DomainError):
            initial_datum(unit_disk, "gauss", grid, coarse_h)
