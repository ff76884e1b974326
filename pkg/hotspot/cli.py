"""
Command line entry point: hotspot solve | verify | bounds | props.
"""

import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict

import click
from pydantic import ValidationError

from hotspot.config import get_config
from hotspot.exceptions import ConfigError, DomainError, HotspotError, InapplicableError
from hotspot.models.bound_models import HeatBoundInputs
from hotspot.models.young_models import YoungKind, YoungSpec
from hotspot.runners.experiment_runner import ExperimentRunner, load_config, run_failed
from hotspot.runners.property_runner import PropertyRunner
from hotspot.runners.report_writer import emit, write_field_csv
from hotspot.services.bounds_service import BOUND_REGISTRY, evaluate_bound
from hotspot.services.elliptic_service import constant_source, linear_source, small_diffusion_source
from hotspot.services.young_service import make_young_pair

logger = logging.getLogger(__name__)

INTEGER_KEYS = {"N"}
HEAT_KEYS = ("lambda1", "lambda1_ball", "K", "K_Omega", "r_in")


def _number(key: str, raw: str):
    try:
        return int(raw) if key in INTEGER_KEYS else float(raw)
    except ValueError:
        raise ConfigError(f"Parameter {key} must be numeric, got {raw!r}", paths=[key])


def parse_params(text: str) -> Dict[str, Any]:
    """
    Turn "k=v,k=v" into bound inputs.

    Lists use ";" (john_axes=2;1). young=power|cosh|shifted_power builds a
    Young pair from p and a; source=constant|linear|small_diffusion builds a
    source from value, lambda or eps; K_Omega with its companions builds
    the heat inputs.
    """
    raw: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        if "=" not in item:
            raise ConfigError(f"Expected key=value, got {item!r}", paths=[item])
        key, value = (s.strip() for s in item.split("=", 1))
        raw[key] = value

    params: Dict[str, Any] = {}
    for key, value in raw.items():
        if key in ("young", "source"):
            continue
        if ";" in value:
            params[key] = [_number(key, v) for v in value.split(";") if v]
        else:
            params[key] = _number(key, value)

    if "young" in raw or "p" in params:
        try:
            spec = YoungSpec(kind=YoungKind(raw.get("young", "power")), p=params.get("p", 2.0), a=params.get("a", 0.0))
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"Invalid Young pair: {str(e)}", paths=["young"]) from e
        params["pair"] = make_young_pair(spec)

    source = raw.get("source")
    if source == "constant":
        params["source"] = constant_source(params.get("value", float(params.get("N", 2))))
    elif source == "linear":
        params["source"] = linear_source(params["lambda"])
    elif source == "small_diffusion":
        params["source"] = small_diffusion_source(params["eps"], params.get("N", 2))
    elif source is not None:
        raise ConfigError(f"Unknown source {source!r}", paths=["source"])

    if "K_Omega" in params:
        missing = [key for key in HEAT_KEYS if key not in params]
        if missing:
            raise ConfigError(f"Heat inputs need {', '.join(missing)}", paths=missing)
        try:
            params["heat_inputs"] = HeatBoundInputs(**{key: params[key] for key in HEAT_KEYS})
        except ValidationError as e:
            raise ConfigError(f"Invalid heat inputs: {str(e)}", paths=["K_Omega"]) from e
    return params


def _load(path: str):
    try:
        return load_config(path)
    except ConfigError as e:
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(2)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
@click.option("--threads", type=int, default=None, help="Worker cap; overrides HOTSPOT_THREADS.")
@click.pass_context
def cli(ctx, verbose, threads):
    """Solve hot-spot problems and certify distance bounds."""
    settings = get_config()
    logging.basicConfig(level=logging.DEBUG if verbose else settings.LOG_LEVEL,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["options"] = {"threads": threads} if threads else None


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_context
def solve(ctx, config_path, out_dir):
    """Solve every problem and dump one x,y,value CSV per case."""
    config = _load(config_path)
    cases = ExperimentRunner(options=ctx.obj["options"]).solve(config)
    out = Path(out_dir)
    for case in cases:
        name = re.sub(r"[^A-Za-z0-9_.=-]+", "_", f"{case.domain}__{case.label}")
        write_field_csv(case.field, out / f"{name}.csv")
    click.echo(f"Wrote {len(cases)} field(s) to {out}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False),
              help="CSV report; the config's output.report when omitted.")
@click.option("--json", "json_path", default=None, type=click.Path(dir_okay=False))
@click.pass_context
def verify(ctx, config_path, report_path, json_path):
    """Certify every configured bound; exit 1 when a row fails or errors."""
    config = _load(config_path)
    runner = ExperimentRunner(options=ctx.obj["options"])
    rows = runner.run(config)
    report_path = report_path or config.output.report
    json_path = json_path or config.output.json_report
    text = emit(rows, "csv", report_path)
    if report_path is None:
        click.echo(text, nl=False)
    if json_path is not None:
        fields = {f"{d}/{label}": case.field for (d, label), case in runner.cases.items()} if config.output.fields else None
        emit(rows, "json", json_path, config=config, fields=fields)
    if run_failed(rows):
        click.echo("Verification failed", err=True)
        sys.exit(1)


@cli.command()
@click.option("--name", required=True, type=click.Choice(sorted(BOUND_REGISTRY)))
@click.option("--params", default="", help="Comma separated key=value inputs, e.g. N=2,r_in=1.")
def bounds(name, params):
    """Evaluate one registered bound and print name,value."""
    try:
        value = evaluate_bound(name, parse_params(params))
    except InapplicableError as e:
        click.echo(f"{name},inapplicable,{e.reason}")
        return
    except (ConfigError, DomainError) as e:
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(2)
    except KeyError as e:
        click.echo(f"Error: missing parameter {str(e)}", err=True)
        sys.exit(2)
    click.echo(f"{name},{value.value!r}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def props(ctx, config_path):
    """Run the pointwise and trend property checks."""
    config = _load(config_path)
    results = PropertyRunner(options=ctx.obj["options"]).property_suite(config)
    for result in results:
        margin = "" if result.margin is None else f"{result.margin:.3e}"
        click.echo(f"{'ok  ' if result.passed else 'FAIL'} {result.domain:<16} {result.problem:<32} "
                   f"{result.name:<26} {margin}")
    failed = sum(not r.passed for r in results)
    click.echo(f"{len(results) - failed}/{len(results)} properties hold")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    try:
        cli()
    except HotspotError as e:
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(2)
