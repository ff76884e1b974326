"""
Solve step shared by the experiment and property runners.

A problem expands into cases (one per eps, p or heat time); each case
carries its field, the measured quantities at its maximum points and the
inputs the bound evaluators read.
"""

import logging
import math
import time
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hotspot.exceptions import HotspotError, InapplicableError
from hotspot.models.domain_models import DomainSpec, GeomSummary
from hotspot.models.experiment_models import Experiment, ProblemKind
from hotspot.models.field_models import ScalarField
from hotspot.services.anisotropy_service import aniso_distance_field, aniso_inradius, norm_from_spec
from hotspot.services.bounds_service import heat_inputs
from hotspot.services.elliptic_service import (constant_source, linear_source, small_diffusion_source,
                                               solve_eigen, solve_lane_emden, solve_semilinear,
                                               solve_small_diffusion, solve_torsion)
from hotspot.services.field_service import field_gradient, locate_max, near_max_indices, worst_near_max
from hotspot.services.geometry_service import summarize
from hotspot.services.heat_service import solve_heat
from hotspot.services.nonlinear_service import solve_aniso_torsion, solve_p_eigen
from hotspot.services.young_service import make_power_pair, make_young_pair

logger = logging.getLogger(__name__)


class SolvedCase(BaseModel):
    """A solved field with what the bounds and properties need from it."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    domain: str
    kind: ProblemKind
    label: str
    field: ScalarField
    z: List[float]
    measured: Dict[str, float] = Field(default_factory=dict)
    inputs: Dict[str, Any] = Field(default_factory=dict)
    extras: Dict[str, Any] = Field(default_factory=dict)
    runtime_s: float = 0.0

    @property
    def r_ref(self) -> float:
        """Inradius the ratio bounds scale with; the anisotropic one for aniso problems."""
        return self.inputs.get("r_aniso") or self.inputs["r_in"]


def geometry(experiment: Experiment) -> GeomSummary:
    overrides = experiment.overrides
    return summarize(experiment.domain, r_e=overrides.r_e, john_axes=overrides.john_axes)


def base_inputs(domain: DomainSpec, summary: GeomSummary) -> Dict[str, Any]:
    """Geometry inputs shared by every bound on a domain."""
    reasons = {}
    if summary.john_axes is None:
        reasons["john_axes"] = "no John ellipsoid for this domain kind"
    if summary.M0_minus is None:
        reasons["M0_minus"] = "mean curvature unavailable for this domain kind"
    if summary.r_e is None:
        reasons["r_e"] = "the boundary admits no exterior ball"
    r_e = math.inf if summary.r_e_unbounded else summary.r_e
    return {"N": domain.dimension, "r_in": summary.r_in, "diam": summary.diam, "r_e": r_e,
            "M0_minus": summary.M0_minus, "john_axes": summary.john_axes, "volume": summary.volume,
            "reasons": reasons}


def _measure(field: ScalarField) -> Dict[str, float]:
    _, distance = worst_near_max(field)
    gradient = field_gradient(field)
    return {"distance": distance, "max_value": field.max_value,
            "max_gradient": float(np.max(np.hypot(gradient[:, 0], gradient[:, 1])))}


def _case(domain: DomainSpec, kind: ProblemKind, label: str, field: ScalarField, inputs: Dict[str, Any],
          started: float, **extras) -> SolvedCase:
    z, value, _ = locate_max(field)
    measured = _measure(field)
    case_inputs = dict(inputs)
    case_inputs["u_z"] = measured["max_value"]
    return SolvedCase(domain=domain.id, kind=kind, label=label, field=field, z=z, measured=measured,
                      inputs=case_inputs, extras=extras, runtime_s=time.perf_counter() - started)


def solve_problem(experiment: Experiment, problem, h: float, summary: GeomSummary) -> List[SolvedCase]:
    """Solve one configured problem into its cases."""
    domain = experiment.domain
    kind = ProblemKind(problem.kind)
    N = domain.dimension
    inputs = base_inputs(domain, summary)
    label = problem.label
    started = time.perf_counter()
    cases: List[SolvedCase] = []

    if kind == ProblemKind.TORSION:
        field = solve_torsion(domain, h)
        inputs["source"] = constant_source(float(N))
        cases.append(_case(domain, kind, label, field, inputs, started, source=inputs["source"]))

    elif kind == ProblemKind.EIGEN:
        lam, psi1, phi1 = solve_eigen(domain, h)
        inputs.update(lambda1=lam, source=linear_source(lam))
        cases.append(_case(domain, kind, label, psi1, inputs, started, lambda1=lam, phi1=phi1,
                           source=inputs["source"]))

    elif kind == ProblemKind.SMALL_DIFFUSION:
        for eps in problem.eps:
            started = time.perf_counter()
            u, v = solve_small_diffusion(domain, eps, h)
            source = small_diffusion_source(eps, N)
            case_inputs = dict(inputs, eps=eps, source=source)
            cases.append(_case(domain, kind, f"{label}[eps={eps:g}]", u, case_inputs, started,
                               eps=eps, v=v, source=source))

    elif kind == ProblemKind.SEMILINEAR:
        if problem.source == "constant":
            source = constant_source(problem.params.get("value", float(N)))
        elif problem.source == "linear":
            source = linear_source(problem.params["lambda"])
        else:
            source = small_diffusion_source(problem.params["eps"], N)
        field = solve_semilinear(domain, source, h)
        inputs["source"] = source
        cases.append(_case(domain, kind, label, field, inputs, started, source=source))

    elif kind == ProblemKind.P_TORSION:
        pairs = [make_young_pair(problem.young)] if problem.young else [make_power_pair(p) for p in problem.p]
        for pair in pairs:
            started = time.perf_counter()
            field = solve_aniso_torsion(domain, None, pair, h)
            source = constant_source(float(N))
            case_inputs = dict(inputs, pair=pair, p=pair.p, source=source)
            cases.append(_case(domain, kind, f"{label}[{pair.name},p={pair.p:g}]", field, case_inputs,
                               started, pair=pair, source=source))

    elif kind == ProblemKind.ANISO:
        norm = norm_from_spec(problem.norm, dimension=N)
        pair = make_young_pair(problem.young)
        field = solve_aniso_torsion(domain, norm, pair, h)
        r_aniso, _ = aniso_inradius(domain, norm)
        near = near_max_indices(field)
        d_aniso = float(np.min(aniso_distance_field(domain, norm, field.grid.points[near])))
        inputs.update(pair=pair, norm=norm, r_aniso=r_aniso)
        case = _case(domain, kind, label, field, inputs, started, pair=pair, norm=norm)
        case.measured["aniso_distance"] = d_aniso
        cases.append(case)

    elif kind == ProblemKind.LANE_EMDEN:
        lam_q, field = solve_lane_emden(domain, problem.q, h)
        inputs.update(q=problem.q, lambda_q=lam_q)
        cases.append(_case(domain, kind, label, field, inputs, started, lambda_q=lam_q))

    elif kind == ProblemKind.P_EIGEN:
        lam_p, field = solve_p_eigen(domain, problem.p, h)
        inputs.update(p=problem.p, lambda_1p=lam_p)
        cases.append(_case(domain, kind, label, field, inputs, started, lambda_1p=lam_p))

    elif kind == ProblemKind.HEAT:
        cases.extend(_solve_heat_cases(domain, problem, h, inputs, started))

    logger.debug(f"Solved {label} on '{domain.id}' into {len(cases)} case(s)")
    return cases


def _solve_heat_cases(domain: DomainSpec, problem, h: float, inputs: Dict[str, Any],
                      started: float) -> List[SolvedCase]:
    trajectory = solve_heat(domain, problem.g, problem.times, h)
    g_field = trajectory.initial
    if problem.g == "phi1":
        lam, phi1 = float(g_field.params["lambda1"]), g_field
    else:
        lam, _, phi1 = solve_eigen(domain, h)
    inputs = dict(inputs, lambda1=lam)
    try:
        inputs["heat_inputs"] = heat_inputs(g_field, phi1, field_gradient(g_field), lam, inputs["r_in"],
                                            domain.dimension, trajectory.M)
    except InapplicableError as e:
        inputs["heat_inputs"] = None
        inputs["reasons"] = dict(inputs["reasons"], heat_inputs=e.reason)
    elapsed = time.perf_counter() - started
    cases = []
    for t, field, M_t in zip(trajectory.times, trajectory.fields, trajectory.M):
        case = _case(domain, ProblemKind.HEAT, f"{problem.label}[g={problem.g},t={t:g}]", field,
                     dict(inputs, t=t, M_t=M_t), time.perf_counter(), lambda1=lam, phi1=phi1, g=g_field,
                     t=t, trajectory=trajectory)
        case.runtime_s += elapsed / len(trajectory.times)
        cases.append(case)
    return cases


def safe_solve(experiment: Experiment, problem, h: float, summary: Optional[GeomSummary]):
    """solve_problem with failures returned instead of raised: (cases, error message)."""
    if summary is None:
        return [], "geometry unavailable"
    try:
        return solve_problem(experiment, problem, h, summary), None
    except HotspotError as e:
        logger.error(f"Solving {problem.label} on '{experiment.domain.id}' failed: {str(e)}")
        return [], f"{type(e).__name__}: {str(e)}"
    except Exception as e:
        logger.error(f"Unexpected error solving {problem.label} on '{experiment.domain.id}': {str(e)}")
        return [], f"{type(e).__name__}: {str(e)}"
