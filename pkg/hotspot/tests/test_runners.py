"""
Tests for config loading, the experiment pipeline, property checks and reports.
"""

import json
from unittest.mock import patch

import pytest

from hotspot.exceptions import ConfigError, SolverError
from hotspot.models.bound_models import BoundStatus
from hotspot.models.experiment_models import ReportRow
from hotspot.runners.experiment_runner import ExperimentRunner, load_config, run, run_failed
from hotspot.runners.property_runner import property_suite
from hotspot.runners.report_writer import CSV_COLUMNS, emit, rows_from_json, write_field_csv
from hotspot.services.bounds_service import BOUND_REGISTRY
from hotspot.services.elliptic_service import solve_torsion

pytestmark = [pytest.mark.integration, pytest.mark.harness]


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_schema_errors_carry_paths(self, config_file, disk_torsion_config):
        disk_torsion_config["experiments"][0]["problems"][0]["bounds"] = ["torsion_magic"]
        with pytest.raises(ConfigError) as excinfo:
            load_config(config_file(disk_torsion_config))
        assert excinfo.value.paths

    def test_loads_valid_config(self, config_file, disk_torsion_config):
        config = load_config(config_file(disk_torsion_config))
        assert config.name == "disk-torsion"
        assert config.h == pytest.approx(1 / 32)

    @pytest.mark.parametrize("name", ["disk.json", "ellipse.json", "rectangle.json", "dumbbell3d.json",
                                      "nonconvex2d.json", "aniso.json", "coverage.json"])
    def test_shipped_configs_validate(self, config_dir, name):
        assert load_config(config_dir / name).experiments


class TestRun:
    def test_disk_torsion_passes(self, config_file, disk_torsion_config):
        rows = run(load_config(config_file(disk_torsion_config)))
        assert [row.bound for row in rows] == ["torsion_max_upper", "torsion_meanconvex"]
        assert all(row.status == BoundStatus.PASS.value for row in rows)
        meanconvex = rows[1]
        assert meanconvex.bound_value == pytest.approx(2 ** -0.5, rel=1e-9)
        assert meanconvex.slack > 0.3
        assert not run_failed(rows)

    def test_solver_failure_becomes_error_rows(self, config_file, disk_torsion_config):
        config = load_config(config_file(disk_torsion_config))
        with patch("hotspot.runners.pipeline.solve_torsion", side_effect=SolverError("did not converge")):
            rows = run(config)
        assert len(rows) == 2
        assert all(row.status == BoundStatus.ERROR.value for row in rows)
        assert "did not converge" in rows[0].message
        assert run_failed(rows)

    def test_missing_geometry_input_is_inapplicable(self, config_file):
        document = {
            "h": 1 / 32,
            "experiments": [{
                "domain": {"id": "kite", "kind": "smooth-curve", "curve": {"name": "kite",
                                                                             "params": {"k": 0.65, "s": 1.5}}},
                "problems": [{"kind": "torsion", "bounds": ["torsion_john"]}],
            }],
        }
        rows = run(load_config(config_file(document)))
        assert rows[0].status == BoundStatus.INAPPLICABLE.value
        assert "John" in rows[0].message
        assert not run_failed(rows)

    def test_runs_are_deterministic(self, config_file, disk_torsion_config):
        config = load_config(config_file(disk_torsion_config))
        first = [row.model_dump(exclude={"runtime_s"}) for row in run(config)]
        second = [row.model_dump(exclude={"runtime_s"}) for row in run(config, threads=2)]
        assert first == second

    def test_solved_fields_are_kept(self, config_file, disk_torsion_config):
        runner = ExperimentRunner()
        runner.run(load_config(config_file(disk_torsion_config)))
        field = runner.field("disk", "torsion")
        assert field is not None
        assert field.max_value == pytest.approx(0.5, abs=1e-3)


def test_coverage_config_reaches_every_bound(config_dir):
    config = load_config(config_dir / "coverage.json")
    named = {name for experiment in config.experiments for problem in experiment.problems
             for name in config.bounds_for(problem)}
    assert named == set(BOUND_REGISTRY)


class TestReports:
    def test_empty_csv_has_only_the_header(self):
        assert emit([], "csv") == ",".join(CSV_COLUMNS) + "\n"

    def test_csv_row_and_json_round_trip(self, tmp_path):
        row = ReportRow(domain="disk", problem="torsion", N=2, r_in=1.0, d_measured=0.98,
                        bound="torsion_meanconvex", bound_value=0.7071, slack=0.386, status="pass")
        text = emit([row], "csv")
        assert len(text.strip().splitlines()) == 2
        assert rows_from_json(emit([row], "json")) == [row]
        path = tmp_path / "out" / "report.json"
        emit([row], "json", path)
        assert json.loads(path.read_text())["rows"][0]["bound"] == "torsion_meanconvex"

    def test_infinite_slack_is_written(self):
        row = ReportRow(domain="disk", problem="torsion", N=2, bound="b", slack=float("inf"), status="pass")
        assert ",inf," in emit([row], "csv")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit([], "xml")

    def test_field_dump_contains_center(self, tmp_path, unit_disk, coarse_h):
        path = write_field_csv(solve_torsion(unit_disk, coarse_h), tmp_path / "disk.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,value"
        center = [line for line in lines[1:] if line.startswith("0.0,0.0,")]
        assert center
        assert float(center[0].split(",")[2]) == pytest.approx(0.5, abs=1e-3)


class TestProperties:
    def test_disk_torsion_properties(self, config_file, disk_torsion_config):
        results = property_suite(load_config(config_file(disk_torsion_config)))
        by_name = {r.name: r for r in results}
        for name in ("max_principle", "lower_barrier", "torsion_gradient", "semilinear_gradient"):
            assert by_name[name].passed, name
        assert "grid_convergence" in by_name

    def test_small_diffusion_sweep_trend(self, config_file):
        document = {
            "h": 1 / 32,
            "experiments": [{"domain": {"id": "disk", "kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
                             "problems": [{"kind": "small_diffusion", "eps": [0.1, 1.0, 10.0]}]}],
        }
        results = property_suite(load_config(config_file(document)))
        names = [r.name for r in results]
        assert "varadhan_elliptic" in names
        assert all(r.passed for r in results if r.name in ("max_principle", "small_diffusion_v_range"))

    def test_solve_failure_is_reported(self, config_file, disk_torsion_config):
        with patch("hotspot.runners.pipeline.solve_torsion", side_effect=SolverError("boom")):
            results = property_suite(load_config(config_file(disk_torsion_config)))
        solve = [r for r in results if r.name == "solve"]
        assert solve and not solve[0].passed


@pytest.mark.slow
@pytest.mark.parametrize("name", ["disk.json", "ellipse.json", "rectangle.json"])
def test_reference_configs_verify(config_dir, name):
    rows = run(load_config(config_dir / name))
    assert rows
    assert not run_failed(rows), [r for r in rows if BoundStatus(r.status).fails_run]
