"""
Experiment orchestration: solve, locate maxima, evaluate bounds, certify.
"""

import json
import logging
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from hotspot.exceptions import ConfigError, HotspotError, InapplicableError
from hotspot.models.bound_models import BoundStatus
from hotspot.models.domain_models import GeomSummary
from hotspot.models.experiment_models import Experiment, ExperimentConfig, ReportRow
from hotspot.models.field_models import ScalarField
from hotspot.runners.base_runner import BaseRunner
from hotspot.runners.pipeline import SolvedCase, geometry, safe_solve
from hotspot.services.bounds_service import BOUND_REGISTRY, check, evaluate_bound

logger = logging.getLogger(__name__)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: unreadable file, invalid JSON or schema violations, with
        the offending field paths
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {str(e)}", paths=[str(path)]) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {str(e)}", paths=[str(path)]) from e
    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        paths = [".".join(str(part) for part in error["loc"]) or "<root>" for error in e.errors()]
        details = "; ".join(f"{p}: {error['msg']}" for p, error in zip(paths, e.errors()))
        raise ConfigError(f"Invalid config {path}: {details}", paths=paths) from e
    logger.info(f"Loaded config '{config.name}' from {path}: {len(config.experiments)} domain(s)")
    return config


class ExperimentRunner(BaseRunner):
    """
    Runs every (domain, problem) pipeline of a config.

    Pipelines run concurrently up to the thread cap; rows are sorted by
    (domain, problem, bound) before they are returned.
    """

    def __init__(self, **kwargs):
        super().__init__("experiment", **kwargs)
        self.cases: Dict[Tuple[str, str], SolvedCase] = {}

    def _geometry(self, experiment: Experiment) -> Tuple[Optional[GeomSummary], Optional[str]]:
        try:
            summary, seconds = self.timed(geometry, experiment)
            logger.debug(f"Geometry of '{experiment.domain.id}' took {seconds:.2f}s")
            return summary, None
        except HotspotError as e:
            if self.options["fail_fast"]:
                raise
            logger.error(f"Geometry of '{experiment.domain.id}' failed: {str(e)}")
            return None, f"{type(e).__name__}: {str(e)}"

    def solve(self, config: ExperimentConfig) -> List[SolvedCase]:
        """Solve every problem and keep the cases, without certifying."""
        summaries = self.map(self._geometry, config.experiments)
        tasks = [(experiment, problem, summary)
                 for experiment, (summary, _) in zip(config.experiments, summaries)
                 for problem in experiment.problems]
        solved = self.map(lambda task: safe_solve(task[0], task[1], task[1].h or config.h, task[2]), tasks)
        cases = [case for found, _ in solved for case in found]
        for case in cases:
            self.cases[(case.domain, case.label)] = case
        return cases

    def run(self, config: ExperimentConfig) -> List[ReportRow]:
        start = time.perf_counter()
        summaries = self.map(self._geometry, config.experiments)
        tasks = [(experiment, problem, summary, error)
                 for experiment, (summary, error) in zip(config.experiments, summaries)
                 for problem in experiment.problems]
        chunks = self.map(lambda task: self._pipeline(config, *task), tasks)
        rows = sorted((row for chunk in chunks for row in chunk), key=lambda row: row.sort_key)
        failed = sum(BoundStatus(row.status).fails_run for row in rows)
        logger.info(f"Run '{config.name}': {len(rows)} rows, {failed} failing, "
                    f"{time.perf_counter() - start:.1f}s")
        return rows

    def _pipeline(self, config: ExperimentConfig, experiment: Experiment, problem,
                  summary: Optional[GeomSummary], geometry_error: Optional[str]) -> List[ReportRow]:
        domain = experiment.domain
        names = config.bounds_for(problem)
        cases, error = safe_solve(experiment, problem, problem.h or config.h, summary)
        if error is not None or geometry_error is not None:
            if self.options["fail_fast"]:
                raise HotspotError(geometry_error or error)
            message = geometry_error or error
            return [ReportRow(domain=domain.id, problem=problem.label, N=domain.dimension, bound=name,
                              status=BoundStatus.ERROR.value, message=message) for name in names]
        rows = []
        for case in cases:
            self.cases[(case.domain, case.label)] = case
            rows.extend(self.certify(case, names, config.tolerance))
        return rows

    def certify(self, case: SolvedCase, names: List[str], tolerance: float) -> List[ReportRow]:
        """Evaluate and check each named bound on a solved case."""
        rows = []
        for name in names:
            entry = BOUND_REGISTRY[name]
            started = time.perf_counter()
            r_ref = case.r_ref
            base = dict(domain=case.domain, problem=case.label, N=case.field.grid.dimension, r_in=r_ref,
                        bound=name)
            try:
                value = evaluate_bound(name, case.inputs)
                measured = case.measured[entry.measure]
                bound_len = value.as_length(r_ref)
                verdict = check(measured, bound_len, tolerance, name=name, sense=entry.sense,
                                inputs={"z": case.z})
                status = verdict.status.value
                rows.append(ReportRow(**base, d_measured=measured, bound_value=bound_len,
                                      slack=verdict.relative_slack, status=status,
                                      runtime_s=case.runtime_s + time.perf_counter() - started))
                if not verdict.passed:
                    logger.warning(f"{name} fails on {case.domain}/{case.label}: measured {measured:.6g} "
                                   f"vs bound {bound_len:.6g}")
            except InapplicableError as e:
                rows.append(ReportRow(**base, d_measured=case.measured.get(entry.measure),
                                      status=BoundStatus.INAPPLICABLE.value, message=e.reason,
                                      runtime_s=case.runtime_s + time.perf_counter() - started))
            except HotspotError as e:
                logger.error(f"Bound {name} on {case.domain}/{case.label} failed: {str(e)}")
                rows.append(ReportRow(**base, status=BoundStatus.ERROR.value, message=str(e),
                                      runtime_s=case.runtime_s + time.perf_counter() - started))
        return rows

    def field(self, domain_id: str, label: str) -> Optional[ScalarField]:
        case = self.cases.get((domain_id, label))
        return case.field if case else None


def run(config: ExperimentConfig, threads: Optional[int] = None) -> List[ReportRow]:
    """Run a config and return its sorted report rows."""
    options = {"threads": threads} if threads else None
    return ExperimentRunner(options=options).run(config)


def run_failed(rows: List[ReportRow]) -> bool:
    return any(BoundStatus(row.status).fails_run for row in rows)
