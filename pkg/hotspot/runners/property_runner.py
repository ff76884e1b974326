"""
Pointwise inequalities and asymptotic trends checked on solved fields.

Pointwise checks hold at every node up to 5 h times the scale of their
right-hand side. Trend checks compare cases of one problem (eps, p or t
sweeps) up to one grid spacing.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from hotspot.exceptions import HotspotError, UnsupportedError
from hotspot.models.domain_models import DomainKind, DomainSpec
from hotspot.models.experiment_models import ExperimentConfig, ProblemKind, PropertyResult
from hotspot.runners.base_runner import BaseRunner
from hotspot.runners.pipeline import SolvedCase, geometry, safe_solve
from hotspot.services.anisotropy_service import aniso_mean_convexity
from hotspot.services.elliptic_service import solve_torsion
from hotspot.services.field_service import field_gradient, lower_barrier_check, worst_near_max
from hotspot.services.grid_service import build_operators

logger = logging.getLogger(__name__)

TOL_FACTOR = 5.0


def _pointwise(name: str, case: SolvedCase, lhs: np.ndarray, rhs: np.ndarray, **detail) -> PropertyResult:
    """lhs <= rhs at every node, within 5 h max|rhs|."""
    h = case.field.grid.h
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    tol = TOL_FACTOR * h * scale
    margin = float(np.min(rhs - lhs))
    return PropertyResult(name=name, domain=case.domain, problem=case.label, margin=margin,
                          passed=margin >= -tol, detail={"tolerance": tol, **detail})


def _gradient_sq(case: SolvedCase) -> np.ndarray:
    g = field_gradient(case.field)
    return g[:, 0] ** 2 + g[:, 1] ** 2


def max_principle(case: SolvedCase, upper: Optional[float] = None) -> PropertyResult:
    u = case.field.values
    h = case.field.grid.h
    tol = TOL_FACTOR * h * max(case.field.max_value, 1e-300)
    margin = float(np.min(u))
    if upper is not None:
        margin = min(margin, float(upper - np.max(u)))
    return PropertyResult(name="max_principle", domain=case.domain, problem=case.label, margin=margin,
                          passed=margin >= -tol, detail={"tolerance": tol, "upper": upper})


def torsion_gradient(case: SolvedCase) -> PropertyResult:
    """|grad u|^2 <= 2 [N + (N-1) M G] (max u - u), M = 0 on mean convex domains."""
    N = case.inputs["N"]
    M0 = case.inputs.get("M0_minus") or 0.0
    G = case.measured["max_gradient"]
    u = case.field.values
    rhs = 2 * (N + (N - 1) * M0 * G) * (case.field.max_value - u)
    return _pointwise("torsion_gradient", case, _gradient_sq(case), rhs, M0_minus=M0, G=G)


def eigen_gradient(case: SolvedCase) -> PropertyResult:
    """|grad psi|^2 <= lambda1 (max psi^2 - psi^2)."""
    lam = case.extras["lambda1"]
    psi = case.field.values
    rhs = lam * (case.field.max_value ** 2 - psi ** 2)
    return _pointwise("eigen_gradient", case, _gradient_sq(case), rhs)


def semilinear_gradient(case: SolvedCase) -> PropertyResult:
    """|grad u|^2 <= 2 (F(max u) - F(u))."""
    source = case.extras["source"]
    u = case.field.values
    rhs = 2 * (np.asarray(source.F(np.asarray(case.field.max_value))) - np.asarray(source.F(u)))
    return _pointwise("semilinear_gradient", case, _gradient_sq(case), rhs)


def quasilinear_gradient(case: SolvedCase, norm=None) -> PropertyResult:
    """Psi(phi(H(grad u))) <= N (max u - u), H Euclidean unless a norm is given."""
    pair = case.extras["pair"]
    g = field_gradient(case.field)
    H = np.hypot(g[:, 0], g[:, 1]) if norm is None else norm.H(g)
    lhs = np.asarray(pair.Psi(np.asarray(pair.phi(H))))
    rhs = case.inputs["N"] * (case.field.max_value - case.field.values)
    name = "quasilinear_gradient" if norm is None else "aniso_gradient"
    return _pointwise(name, case, lhs, rhs)


def heat_gradient(case: SolvedCase) -> PropertyResult:
    """|grad u|^2 + lambda1 u^2 <= K_Omega^2 exp(-2 lambda1 t)."""
    inputs = case.inputs["heat_inputs"]
    lam, t = inputs.lambda1, case.extras["t"]
    lhs = _gradient_sq(case) + lam * case.field.values ** 2
    rhs = np.full_like(lhs, inputs.K_Omega ** 2 * np.exp(-2 * lam * t))
    return _pointwise("heat_gradient", case, lhs, rhs, K_Omega=inputs.K_Omega)


def heat_upper(case: SolvedCase) -> PropertyResult:
    """u(x, t) <= sup(g / phi1) phi1(x) exp(-lambda1 t)."""
    g, phi1 = case.extras["g"], case.extras["phi1"]
    lam, t = case.extras["lambda1"], case.extras["t"]
    support = phi1.values > 1e-6 * phi1.max_value
    sup_ratio = float(np.max(g.values[support] / phi1.values[support]))
    rhs = sup_ratio * phi1.values * np.exp(-lam * t)
    return _pointwise("heat_upper", case, case.field.values, rhs, sup_ratio=sup_ratio)


def lower_barrier(case: SolvedCase, domain: DomainSpec, pair=None, norm=None) -> PropertyResult:
    margin, passed = lower_barrier_check(case.field, domain, pair=pair, norm=norm)
    name = "lower_barrier" if norm is None else "aniso_lower_barrier"
    return PropertyResult(name=name, domain=case.domain, problem=case.label, margin=margin, passed=passed)


def grid_convergence(domain: DomainSpec, h: float) -> PropertyResult:
    """Halving h on a ball shrinks the error of max u = R^2 / 2 at least 1.7 times."""
    exact = domain.radius ** 2 / 2
    coarse = abs(solve_torsion(domain, 2 * h).max_value - exact)
    fine = abs(solve_torsion(domain, h).max_value - exact)
    ratio = coarse / max(fine, 1e-300)
    return PropertyResult(name="grid_convergence", domain=domain.id, problem="torsion", margin=ratio - 1.7,
                          passed=ratio >= 1.7 or fine < 1e-12, detail={"coarse": coarse, "fine": fine})


def _trend(name: str, cases: List[SolvedCase], key: Callable[[SolvedCase], float],
           increasing: bool) -> Optional[PropertyResult]:
    """d(z) monotone along the sorted cases, within one grid spacing."""
    if len(cases) < 2:
        return None
    ordered = sorted(cases, key=key)
    d = np.array([worst_near_max(c.field)[1] for c in ordered])
    steps = np.diff(d) if increasing else -np.diff(d)
    h = ordered[0].field.grid.h
    margin = float(np.min(steps))
    r_in = ordered[0].inputs["r_in"]
    return PropertyResult(name=name, domain=ordered[0].domain, problem=ordered[0].label.split("[")[0],
                          margin=margin, passed=margin >= -h,
                          detail={"d_over_r": (d / r_in).tolist(), "keys": [key(c) for c in ordered]})


def spectral_large_time(cases: List[SolvedCase]) -> Optional[PropertyResult]:
    """M(t) exp(lambda1 t) -> <g, phi1> / |phi1|^2 at the last time."""
    last = max(cases, key=lambda c: c.extras["t"])
    lam, t = last.extras["lambda1"], last.extras["t"]
    if lam * t < 2:
        return None
    g, phi1 = last.extras["g"], last.extras["phi1"]
    V = build_operators(phi1.grid).V
    limit = float(np.dot(V, g.values * phi1.values) / np.dot(V, phi1.values ** 2)) * phi1.max_value
    ratio = last.field.max_value * np.exp(lam * t)
    error = abs(ratio - limit) / limit
    return PropertyResult(name="spectral_large_time", domain=last.domain, problem=last.label, margin=0.02 - error,
                          passed=error <= 0.02, detail={"ratio": ratio, "limit": limit})


class PropertyRunner(BaseRunner):
    """Runs every applicable property on every solved case of a config."""

    def __init__(self, **kwargs):
        super().__init__("properties", **kwargs)

    def property_suite(self, config: ExperimentConfig) -> List[PropertyResult]:
        results: List[PropertyResult] = []
        for experiment in config.experiments:
            results.extend(self._experiment(config, experiment))
        results.sort(key=lambda r: (r.domain, r.problem, r.name))
        failed = [r for r in results if not r.passed]
        logger.info(f"Property suite '{config.name}': {len(results)} checks, {len(failed)} failing")
        return results

    def _experiment(self, config: ExperimentConfig, experiment) -> List[PropertyResult]:
        domain = experiment.domain
        try:
            summary = geometry(experiment)
        except HotspotError as e:
            logger.error(f"Geometry of '{domain.id}' failed: {str(e)}")
            return [PropertyResult(name="geometry", domain=domain.id, problem="-", passed=False,
                                   detail={"error": str(e)})]
        mean_convex = summary.M0_minus == 0
        solved = self.map(lambda problem: (problem, safe_solve(experiment, problem, problem.h or config.h, summary)),
                          experiment.problems)
        results = []
        for problem, (cases, error) in solved:
            if error is not None:
                results.append(PropertyResult(name="solve", domain=domain.id, problem=problem.label, passed=False,
                                              detail={"error": error}))
                continue
            results.extend(self._checks(domain, problem, cases, mean_convex))
            if problem.kind == ProblemKind.TORSION and domain.kind == DomainKind.BALL:
                results.append(grid_convergence(domain, problem.h or config.h))
        return results

    def _checks(self, domain: DomainSpec, problem, cases: List[SolvedCase], mean_convex: bool) -> List[PropertyResult]:
        kind = ProblemKind(problem.kind)
        out: List[Optional[PropertyResult]] = []
        for case in cases:
            if kind == ProblemKind.TORSION:
                out += [max_principle(case), lower_barrier(case, domain)]
                if case.inputs.get("M0_minus") is not None:
                    out.append(torsion_gradient(case))
                if mean_convex:
                    out.append(semilinear_gradient(case))
            elif kind == ProblemKind.EIGEN:
                out.append(eigen_gradient(case))
            elif kind in (ProblemKind.SMALL_DIFFUSION, ProblemKind.SEMILINEAR):
                out.append(max_principle(case))
                source = case.extras["source"]
                error = source.primitive_error(max(case.field.max_value, 1e-12))
                out.append(PropertyResult(name="source_primitive", domain=case.domain, problem=case.label,
                                          margin=1e-6 - error, passed=error <= 1e-6))
                if mean_convex:
                    out.append(semilinear_gradient(case))
                if kind == ProblemKind.SMALL_DIFFUSION:
                    v = case.extras["v"].values
                    out.append(PropertyResult(name="small_diffusion_v_range", domain=case.domain,
                                              problem=case.label, margin=float(min(v.min(), 1 - v.max())),
                                              passed=bool(v.min() > -1e-12 and v.max() <= 1 + 1e-12)))
            elif kind == ProblemKind.P_TORSION:
                pair = case.extras["pair"]
                out += [max_principle(case), lower_barrier(case, domain, pair=pair)]
                if mean_convex:
                    out.append(quasilinear_gradient(case))
            elif kind == ProblemKind.ANISO:
                pair, norm = case.extras["pair"], case.extras["norm"]
                out += [max_principle(case), lower_barrier(case, domain, pair=pair, norm=norm)]
                try:
                    _, h_convex = aniso_mean_convexity(domain, norm)
                except UnsupportedError:
                    h_convex = False
                if h_convex:
                    out.append(quasilinear_gradient(case, norm=norm))
            elif kind == ProblemKind.HEAT:
                g = case.extras["g"]
                out.append(max_principle(case, upper=g.max_value))
                if case.inputs.get("heat_inputs") is not None:
                    out += [heat_gradient(case), heat_upper(case)]

        if kind == ProblemKind.SMALL_DIFFUSION:
            out.append(_trend("varadhan_elliptic", cases, key=lambda c: -c.extras["eps"], increasing=True))
        elif kind == ProblemKind.P_TORSION:
            out.append(_trend("p_incenter", cases, key=lambda c: c.extras["pair"].p, increasing=True))
        elif kind == ProblemKind.HEAT:
            positive = [c for c in cases if c.extras["t"] > 0]
            trajectory = cases[0].extras["trajectory"]
            M = np.asarray(trajectory.M)
            h = cases[0].field.grid.h
            drops = -np.diff(M) if len(M) > 1 else np.zeros(1)
            out.append(PropertyResult(name="heat_max_nonincreasing", domain=domain.id, problem=problem.label,
                                      margin=float(np.min(drops)), passed=bool(np.min(drops) >= -TOL_FACTOR * h * M[0])))
            if problem.g == "one":
                out.append(_trend("varadhan_parabolic", positive, key=lambda c: c.extras["t"], increasing=False))
            if positive:
                out.append(spectral_large_time(positive))
        return [r for r in out if r is not None]


def property_suite(config: ExperimentConfig, threads: Optional[int] = None) -> List[PropertyResult]:
    """Run every property check the config's problems support."""
    options = {"threads": threads} if threads else None
    return PropertyRunner(options=options).property_suite(config)
