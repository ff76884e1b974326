import json
import math
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from hotspot.cli import cli, parse_params
from hotspot.exceptions import ConfigError, SolverError
from hotspot.models.bound_models import HeatBoundInputs
from hotspot.runners.report_writer import CSV_COLUMNS
from hotspot.services.young_service import YoungPair

pytestmark = [pytest.mark.integration, pytest.mark.harness]


@pytest.fixture
def runner():
    return CliRunner()


class TestParseParams:
    def test_numbers_and_lists(self):
        params = parse_params("N=3, r_in=1.5, john_axes=2;1;1")
        assert params["N"] == 3 and isinstance(params["N"], int)
        assert params["r_in"] == 1.5
        assert params["john_axes"] == [2.0, 1.0, 1.0]

    def test_empty(self):
        assert parse_params("") == {}

    def test_young_pair(self):
        params = parse_params("young=shifted_power,p=3,a=0.5")
        assert isinstance(params["pair"], YoungPair)
        assert params["pair"].p == 3.0

    def test_power_pair_from_p_alone(self):
        assert parse_params("p=4")["pair"].p == 4.0

    def test_sources(self):
        constant = parse_params("source=constant,value=2,N=2")["source"]
        assert float(constant.f(0.3)) == pytest.approx(2.0)
        linear = parse_params("source=linear,lambda=2")["source"]
        assert float(linear.F(1.0)) == pytest.approx(1.0)

    def test_heat_inputs(self):
        params = parse_params("lambda1=5.78,lambda1_ball=5.78,K=2.4,K_Omega=2.4,r_in=1")
        assert isinstance(params["heat_inputs"], HeatBoundInputs)

    @pytest.mark.parametrize("text", ["N", "N=two", "source=cubic", "K_Omega=2", "young=quartic,p=2"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_params(text)


class TestBoundsCommand:
    def test_meanconvex(self, runner):
        result = runner.invoke(cli, ["bounds", "--name", "torsion_meanconvex", "--params", "N=2"])
        assert result.exit_code == 0
        name, value = result.output.strip().splitlines()[-1].split(",")
        assert name == "torsion_meanconvex"
        assert float(value) == pytest.approx(1 / math.sqrt(2))

    def test_inapplicable_is_printed(self, runner):
        result = runner.invoke(cli, ["bounds", "--name", "torsion_curvature", "--params", "N=2,r_in=1,M0_minus=1"])
        assert result.exit_code == 0
        assert "torsion_curvature,inapplicable" in result.output

    def test_bad_parameter_exits_2(self, runner):
        result = runner.invoke(cli, ["bounds", "--name", "torsion_max_upper", "--params", "N=two"])
        assert result.exit_code == 2

    def test_unknown_bound_name(self, runner):
        result = runner.invoke(cli, ["bounds", "--name", "torsion_magic"])
        assert result.exit_code == 2


class TestVerifyCommand:
    def test_disk_verification_prints_csv(self, runner, config_file, disk_torsion_config):
        result = runner.invoke(cli, ["verify", "--config", str(config_file(disk_torsion_config))])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert ",".join(CSV_COLUMNS) in lines
        assert len([line for line in lines if line.startswith("disk,torsion,")]) == 2

    def test_report_files(self, runner, tmp_path, config_file, disk_torsion_config):
        disk_torsion_config["output"] = {"fields": True}
        report, json_report = tmp_path / "r.csv", tmp_path / "r.json"
        result = runner.invoke(cli, ["verify", "--config", str(config_file(disk_torsion_config)),
                                     "--report", str(report), "--json", str(json_report)])
        assert result.exit_code == 0, result.output
        assert report.read_text().startswith("domain,problem")
        document = json.loads(json_report.read_text())
        assert "disk/torsion" in document["fields"]
        assert document["config"]["name"] == "disk-torsion"

    def test_solver_error_exits_1(self, runner, config_file, disk_torsion_config):
        with patch("hotspot.runners.pipeline.solve_torsion", side_effect=SolverError("boom")):
            result = runner.invoke(cli, ["verify", "--config", str(config_file(disk_torsion_config))])
        assert result.exit_code == 1
        assert "error" in result.output

    def test_invalid_config_exits_2(self, runner, config_file, disk_torsion_config):
        disk_torsion_config["tolerance"] = 2.0
        result = runner.invoke(cli, ["verify", "--config", str(config_file(disk_torsion_config))])
        assert result.exit_code == 2
        assert "tolerance" in result.output


def test_solve_dumps_fields(runner, tmp_path, config_file, disk_torsion_config):
    out = tmp_path / "fields"
    result = runner.invoke(cli, ["solve", "--config", str(config_file(disk_torsion_config)), "--out", str(out)])
    assert result.exit_code == 0, result.output
    dump = out / "disk__torsion.csv"
    assert dump.read_text().splitlines()[0] == "x,y,value"


def test_props_command(runner, config_file, disk_torsion_config):
    result = runner.invoke(cli, ["props", "--config", str(config_file(disk_torsion_config))])
    assert "max_principle" in result.output
    assert "properties hold" in result.output
