"""Runs scenario pipelines and writes the JSON report and CSV traces.

Each scenario gets one VerificationReport. A failing sub-pipeline is recorded as an `error`
verdict and the remaining sub-pipelines still run; the exit status is 1 as soon as any record
fails or errors.
"""

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from steen_lab import __version__
from steen_lab.config.scenario_config import (
    DeformScenario,
    DiracScenario,
    FullChainScenario,
    ScenarioConfiguration,
    SteenScenario,
)
from steen_lab.numkit.integrate import IntegrationMethod, IntegratorSettings
from steen_lab.numkit.linalg2 import mat2_exp
from steen_lab.potentials.function_spec import ConstantSpec, ZeroSpec
from steen_lab.potentials.potential import Potential, dirac_coefficient_matrix, random_fourier_potential
from steen_lab.report import PLUMBING, SCHEMA_VERSION, VerificationReport
from steen_lab.steen.oscillator import solve_oscillator
from steen_lab.steen.superposition import SuperpositionCoeffs, verify_superposition_identity
from steen_lab.dirac.fundamental import cocycle_defect, fundamental_solution
from steen_lab.dirac.monodromy import invariants, monodromy, novikov_residual, similarity_check
from steen_lab.deform.operators import novikov_entrywise_residuals
from steen_lab.deform.theorem import gradient_fd_check, verify_theorem1

logger = logging.getLogger("steen-lab")

REPORT_FILE = "report.json"

DIRAC_TOLERANCES = {
    "dirac.identity_at_x0": 1e-13,
    "dirac.det_F": 1e-9,
    "dirac.cocycle": 1e-9,
    "dirac.det_S": 1e-9,
    "dirac.trace_constancy": 1e-8,
    "dirac.cayley_hamilton": 1e-9,
    "dirac.gamma1_oracle": 1e-8,
    "dirac.novikov_residual": 1e-6,
    "dirac.novikov_entrywise_a": 1e-6,
    "dirac.novikov_entrywise_b": 1e-6,
    "dirac.novikov_entrywise_c": 1e-6,
    "dirac.similarity": 1e-8,
}
GRADIENT_TOLERANCE = 1e-5
GRADIENT_EPS = 1e-5


@dataclass
class RunResult:
    reports: List[VerificationReport]
    exit_status: int


def _guarded(report: VerificationReport, check_id: str, reference: str, pipeline: Callable[[], None]):
    """Runs one sub-pipeline, recording any exception as an `error` verdict."""
    try:
        pipeline()
    except Exception as e:
        logger.exception(f"[{report.scenario}] {check_id} failed.")
        report.error(check_id, reference, e)


def _constant_oracle(q: Potential, lam: complex) -> Optional[complex]:
    """tr exp(l P) for potentials whose entries are zero or constant; None otherwise."""
    if not all(isinstance(spec, (ZeroSpec, ConstantSpec)) for spec in (q.q1, q.q2)):
        return None
    return complex(np.trace(mat2_exp(dirac_coefficient_matrix(q, lam, 0.0) * q.period)))


def dirac_report(name: str, q: Potential, lam: complex, x0: float, settings: IntegratorSettings,
                 invariant_count: int = 4, tolerances: Dict[str, float] = None) -> VerificationReport:
    """Checks of the fundamental solution and the monodromy for one spectral parameter."""
    report = VerificationReport(name, tolerances=dict(tolerances or {}))
    tolerance = {**DIRAC_TOLERANCES, **report.tolerances}
    with report.timed("dirac"):
        F = fundamental_solution(q, lam, x0, settings=settings)
        scale_F = max(1.0, F.F.max_norm())
        report.check("dirac.identity_at_x0", "F(x0, x0) = 1", F.identity_defect(), tolerance["dirac.identity_at_x0"])
        report.check("dirac.det_F", "det F(x, x0) = 1", F.det_defect(), tolerance["dirac.det_F"])
        report.check("dirac.cocycle", "F(x2, x0) = F(x2, x1) F(x1, x0)",
                     cocycle_defect(F, F.steps_per_period // 2, settings) / scale_F ** 2, tolerance["dirac.cocycle"])
        S = monodromy(F)
        gamma = invariants(S, invariant_count)
        scale_S = max(1.0, S.S.max_norm())
        report.measure("dirac.gamma1", "gamma1 = tr S(x0)", gamma.gamma1,
                       detail={"gamma": list(gamma.gamma), "multipliers": list(gamma.multipliers),
                               "stable": gamma.is_stable()})
        report.check("dirac.det_S", "det S(x) = 1", S.det_defect(), tolerance["dirac.det_S"])
        report.check("dirac.trace_constancy", "tr S(x) is independent of x", S.trace_defect(),
                     tolerance["dirac.trace_constancy"] * (1 + abs(gamma.gamma1)))
        report.check("dirac.cayley_hamilton", "tr S^2 = (tr S)^2 - 2", gamma.cayley_hamilton_defect(),
                     tolerance["dirac.cayley_hamilton"] * (1 + abs(gamma.gamma1) ** 2))
        oracle = _constant_oracle(q, lam)
        if oracle is not None:
            report.check("dirac.gamma1_oracle", "tr S = tr exp(l P) for constant potentials",
                         abs(gamma.gamma1 - oracle) / max(1.0, abs(oracle)), tolerance["dirac.gamma1_oracle"],
                         {"gamma1": gamma.gamma1, "oracle": oracle})
        report.check("dirac.novikov_residual", "dS/dx = [l, S]", novikov_residual(S, q, lam) / scale_S,
                     tolerance["dirac.novikov_residual"])
        for label, value in zip("abc", novikov_entrywise_residuals(S, q, lam)):
            report.check(f"dirac.novikov_entrywise_{label}", f"entrywise commutator identity for {label}",
                         value / scale_S, tolerance[f"dirac.novikov_entrywise_{label}"])
        report.check("dirac.similarity", "S(x) = F(x, x0) S(x0) F(x, x0)^-1", similarity_check(F, S) / scale_S,
                     tolerance["dirac.similarity"])
    report.metadata.update({"lambda": lam, "samples": len(F.F)})
    return report


def _run_steen(scenario, report: VerificationReport, settings: IntegratorSettings):
    x1 = scenario.x1 if getattr(scenario, "x1", None) is not None else scenario.x0 + scenario.coefficient.period
    u0 = getattr(scenario, "u", [1, 0])
    v0 = getattr(scenario, "v", [0, 1])
    solutions = {}

    def solve():
        solutions["u"] = solve_oscillator(scenario.coefficient, scenario.convention, *u0, scenario.x0, x1, settings)
        solutions["v"] = solve_oscillator(scenario.coefficient, scenario.convention, *v0, scenario.x0, x1, settings)
        for label, solution in solutions.items():
            report.check(f"steen.oscillator_residual_{label}", "y'' = omega y", solution.residual(),
                         scenario.tolerances.get("steen.oscillator_residual", 1e-7))

    _guarded(report, "steen.oscillators", PLUMBING, solve)
    if len(solutions) < 2:
        return
    for index, entry in enumerate(scenario.superpositions):
        if entry.cross_form:
            coeffs = SuperpositionCoeffs.from_product_form(entry.A, entry.B, entry.C, entry.k)
        else:
            coeffs = SuperpositionCoeffs(entry.A, entry.B, entry.C, entry.k)
        prefix = f"superposition{index}."

        def superpose(coeffs=coeffs, prefix=prefix):
            sub = verify_superposition_identity(solutions["u"], solutions["v"], coeffs, scenario.tolerances,
                                                report.scenario, settings)
            report.extend(sub, prefix)

        _guarded(report, f"{prefix}steen", "z = sqrt(A u^2 + 2B uv + C v^2)", superpose)


def _run_dirac(name: str, q: Potential, lambdas: Sequence[complex], x0: float, settings: IntegratorSettings,
               report: VerificationReport, invariant_count: int, jobs: int):
    def one(indexed):
        index, lam = indexed
        try:
            return dirac_report(name, q, lam, x0, settings, invariant_count, report.tolerances), None
        except Exception as e:
            logger.exception(f"[{name}] monodromy for lambda={lam} failed.")
            return None, e

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        outcomes = list(pool.map(one, enumerate(lambdas)))
    rows = {"lambda": [], "gamma1": [], "det_defect": [], "novikov_residual": []}
    for index, (lam, (sub, error)) in enumerate(zip(lambdas, outcomes)):
        prefix = f"lambda{index}."
        if error is not None:
            report.error(f"{prefix}dirac", "monodromy pipeline", error)
            continue
        report.extend(sub, prefix)
        rows["lambda"].append(complex(lam))
        rows["gamma1"].append(sub.record("dirac.gamma1").value)
        rows["det_defect"].append(sub.record("dirac.det_S").value)
        rows["novikov_residual"].append(sub.record("dirac.novikov_residual").value)
    report.add_trace("lambda_scan", **{
        "lambda": np.array(rows["lambda"], dtype=complex),
        "gamma1": np.array(rows["gamma1"], dtype=complex),
        "det_defect": np.array(rows["det_defect"], dtype=float),
        "novikov_residual": np.array(rows["novikov_residual"], dtype=float),
    })


def _run_deform(scenario, report: VerificationReport, settings: IntegratorSettings):
    def theorem():
        sub = verify_theorem1(scenario.potential, scenario.lam, scenario.C, scenario.alpha_grid, settings,
                              scenario.x0, scenario.flow_alpha, scenario.tolerances, report.scenario)
        report.extend(sub)

    _guarded(report, "deform.partial_solution", "explicit partial solution of the deformed equation", theorem)
    if scenario.gradient_directions:
        rng = np.random.default_rng(scenario.seed)
        gradient_settings = IntegratorSettings(method=IntegrationMethod.RK4,
                                               samples_per_period=settings.samples_per_period)
        tolerance = scenario.tolerances.get("deform.gradient_fd", GRADIENT_TOLERANCE)
        for index in range(scenario.gradient_directions):
            direction = random_fourier_potential(rng, scenario.potential.period)

            def gradient(index=index, direction=direction):
                comparison = gradient_fd_check(scenario.potential, scenario.lam, direction, GRADIENT_EPS,
                                               scenario.x0, gradient_settings)
                report.check(f"deform.gradient_fd{index}", "grad gamma1 is the functional gradient of tr S",
                             comparison.defect, tolerance,
                             {"analytic": comparison.analytic, "finite_difference": comparison.finite_difference})

            _guarded(report, f"deform.gradient_fd{index}", "grad gamma1 is the functional gradient of tr S", gradient)


def run_scenario(configuration: ScenarioConfiguration, scenario, jobs: int = 1) -> VerificationReport:
    """Runs one scenario's pipeline."""
    settings = configuration.settings_for(scenario)
    report = VerificationReport(scenario.name, tolerances=dict(scenario.tolerances))
    report.metadata.update({
        "kind": scenario.kind,
        "version": __version__,
        "integrator": settings.describe(),
    })
    logger.info(f"Running scenario '{scenario.name}' ({scenario.kind})")
    with report.timed("total"):
        if isinstance(scenario, SteenScenario):
            _run_steen(scenario, report, settings)
        elif isinstance(scenario, DiracScenario):
            _run_dirac(scenario.name, scenario.potential, scenario.all_lambdas(), scenario.x0, settings, report,
                       scenario.invariant_count, jobs)
        elif isinstance(scenario, DeformScenario):
            _run_deform(scenario, report, settings)
        elif isinstance(scenario, FullChainScenario):
            _run_steen(scenario, report, settings)
            _run_dirac(scenario.name, scenario.potential, [scenario.lam], scenario.x0, settings, report, 4, 1)
            _run_deform(scenario, report, settings)
        else:
            raise ValueError(f"Unsupported scenario kind: {scenario.kind}")
    logger.info(f"Scenario '{scenario.name}': {'passed' if report.passed else 'FAILED'} ({len(report.records)} checks)")
    return report


def run_scenarios(configuration: ScenarioConfiguration, jobs: int = 1) -> RunResult:
    """Runs every scenario of the configuration; results keep document order.

    Args:
        configuration (ScenarioConfiguration): Validated scenarios.
        jobs (int): Worker threads for scenarios (and for spectral-parameter lists within one).

    Returns:
        RunResult: Reports and the exit status (0 iff no record failed or errored).
    """
    jobs = max(1, jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        reports = list(pool.map(lambda scenario: run_scenario(configuration, scenario, jobs), configuration.scenarios))
    exit_status = 0 if all(report.passed for report in reports) else 1
    return RunResult(reports, exit_status)


def report_document(result: RunResult, include_timings: bool = True) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "exit_status": result.exit_status,
        "scenarios": [report.to_dict(include_timings) for report in result.reports],
    }


def write_report(result: RunResult, out_dir: str, include_timings: bool = True) -> str:
    """Writes report.json (sorted keys, two-space indent) and returns its path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, REPORT_FILE)
    with open(path, "w") as file:
        file.write(json.dumps(report_document(result, include_timings), indent=2, sort_keys=True, allow_nan=False))
        file.write("\n")
    logger.info(f"Report written to {path}")
    return path


def emit_traces(reports: Sequence[VerificationReport], out_dir: str) -> List[str]:
    """Writes one CSV per trace as `<scenario>__<trace>.csv`; returns the paths.

    Raises:
        OSError: If the directory or a file cannot be written.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for report in reports:
        for name in sorted(report.traces):
            path = os.path.join(out_dir, f"{report.scenario}__{name}.csv")
            report.traces[name].write_csv(path)
            paths.append(path)
    logger.info(f"Wrote {len(paths)} trace file(s) to {out_dir}")
    return paths
