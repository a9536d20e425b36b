"""Fundamental solution F(x, x0) of df/dx = l(lam; q) f with F(x0, x0) = 1."""

import logging
from dataclasses import dataclass

import numpy as np

from steen_lab.errors import DomainError
from steen_lab.numkit.integrate import DEFAULT_SETTINGS, IntegratorSettings, integrate_linear_system
from steen_lab.numkit.linalg2 import IDENTITY, C2Vector, mat2_det
from steen_lab.numkit.paths import SampledPath
from steen_lab.potentials.potential import Potential, dirac_coefficient_matrix

logger = logging.getLogger("steen-lab")

SPAN_SLACK = 1e-9


@dataclass(frozen=True)
class FundamentalSolution:
    """Matrix propagator sampled on a grid of spacing P / steps_per_period.

    Attributes:
        F (SampledPath): F(x, x0), 2x2 payload.
        lam (complex): Spectral parameter.
        q (Potential): Potential.
        x0 (float): Initial abscissa.
        steps_per_period (int): Grid intervals per period; shifting an index by this moves one period.
    """
    F: SampledPath
    lam: complex
    q: Potential
    x0: float
    steps_per_period: int

    @property
    def period(self) -> float:
        return self.q.period

    @property
    def periods_covered(self) -> int:
        return (len(self.F) - 1) // self.steps_per_period

    def identity_defect(self) -> float:
        return float(np.max(np.abs(self.F.values[0] - IDENTITY)))

    def det_defect(self) -> float:
        return float(np.max(np.abs(mat2_det(self.F.values) - 1)))


def period_grid(x0: float, period: float, steps_per_period: int, span: float) -> np.ndarray:
    """Grid of spacing period / steps_per_period from x0 covering at least `span`."""
    step = period / steps_per_period
    n_intervals = int(np.ceil(span / step - SPAN_SLACK))
    return x0 + step * np.arange(n_intervals + 1)


def _propagate_matrix(q: Potential, lam: complex, grid: np.ndarray, settings: IntegratorSettings) -> SampledPath:
    def rhs_matrix(x):
        return dirac_coefficient_matrix(q, lam, x)

    return integrate_linear_system(rhs_matrix, IDENTITY, grid[0], grid[-1], settings, period=q.period, grid=grid)


def fundamental_solution(q: Potential, lam: complex, x0: float = 0.0, span: float = None,
                         settings: IntegratorSettings = DEFAULT_SETTINGS) -> FundamentalSolution:
    """Solves dF/dx = l(lam; q) F, F(x0, x0) = 1, on [x0, x0 + span].

    Args:
        q (Potential): Potential.
        lam (complex): Spectral parameter.
        x0 (float): Initial abscissa. Defaults to 0.
        span (float): Length of the interval; at least two periods. Defaults to two periods.
        settings (IntegratorSettings): Integrator configuration.

    Returns:
        FundamentalSolution: The propagator on a grid aligned with the period.

    Raises:
        DomainError: If the span is shorter than two periods.
        IntegrationFailure: If the integrator fails.
    """
    span = 2 * q.period if span is None else span
    if span < 2 * q.period * (1 - SPAN_SLACK):
        raise DomainError(f"The fundamental solution must span two periods ({2 * q.period}), got {span}.")
    grid = period_grid(x0, q.period, settings.samples_per_period, span)
    F = _propagate_matrix(q, lam, grid, settings)
    logger.debug(f"Fundamental solution for lam={lam} on [{x0}, {grid[-1]}]: det defect {np.max(np.abs(mat2_det(F.values) - 1)):.2e}")
    return FundamentalSolution(F, complex(lam), q, float(x0), settings.samples_per_period)


def period_map(q: Potential, lam: complex, x0: float = 0.0,
               settings: IntegratorSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """F(x0 + P, x0), integrating over a single period."""
    grid = period_grid(x0, q.period, settings.samples_per_period, q.period)
    return _propagate_matrix(q, lam, grid, settings).values[-1]


def propagate(F: FundamentalSolution, f0: C2Vector, x: float) -> C2Vector:
    """f(x) = F(x, x0) f0.

    Raises:
        DomainError: If x lies outside the sampled span.
    """
    return F.F.at(x) @ np.asarray(f0, dtype=complex)


def cocycle_defect(F: FundamentalSolution, index: int, settings: IntegratorSettings = DEFAULT_SETTINGS) -> float:
    """Max-norm of F(x, x0) - F(x, x1) F(x1, x0) for x >= x1 = grid[index].

    F(x, x1) comes from a separate integration started at x1 on the same grid.
    """
    if not 0 < index < len(F.F) - 1:
        raise DomainError(f"Cocycle split index must be interior, got {index}.")
    restarted = _propagate_matrix(F.q, F.lam, F.F.grid[index:], settings)
    composed = restarted.values @ F.F.values[index]
    return float(np.max(np.abs(F.F.values[index:] - composed)))

