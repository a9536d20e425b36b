"""Forward integration of the deformed Dirac flow.

The state (f1, f2, alpha) evolves by

    f'     = l(lam; q) f + (alpha q2 / f1, alpha q1 / f2)
    alpha' = alpha (q1 f1 / f2 + q2 f2 / f1)

with a guard that halts the integration where a component of f approaches zero.
"""

import logging
from dataclasses import dataclass

import numpy as np

from steen_lab.errors import SingularityError
from steen_lab.numkit.integrate import DEFAULT_SETTINGS, IntegratorSettings, integrate_nonlinear_system
from steen_lab.numkit.linalg2 import C2Vector
from steen_lab.numkit.paths import SampledPath
from steen_lab.potentials.potential import Potential
from steen_lab.deform.operators import dxinv

logger = logging.getLogger("steen-lab")

GUARD_THRESHOLD = 1e-8


@dataclass(frozen=True)
class DeformationState:
    f1: complex
    f2: complex
    alpha: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.alpha], dtype=complex)

    @classmethod
    def from_array(cls, values) -> "DeformationState":
        f1, f2, alpha = (complex(v) for v in values)
        return cls(f1, f2, alpha)


def deformation_vector(state: DeformationState, q: Potential, x: float,
                       zero_threshold: float = GUARD_THRESHOLD) -> C2Vector:
    """(alpha q2(x) / f1, alpha q1(x) / f2).

    Raises:
        SingularityError: If |f1| or |f2| is below the zero-threshold.
    """
    if min(abs(state.f1), abs(state.f2)) < zero_threshold:
        raise SingularityError(f"Deformation vector is singular at x={x:.17g}: f = ({state.f1}, {state.f2}).", x)
    q1, q2 = q.evaluate(x)
    return np.array([state.alpha * q2 / state.f1, state.alpha * q1 / state.f2], dtype=complex)


@dataclass(frozen=True)
class DeformedFlow:
    """Trajectory of (f1, f2, alpha)."""
    path: SampledPath
    lam: complex
    q: Potential

    @property
    def ftilde(self) -> SampledPath:
        return self.path.with_values(self.path.values[:, :2])

    @property
    def alpha(self) -> SampledPath:
        return self.path.with_values(self.path.values[:, 2])

    @property
    def terminal(self) -> DeformationState:
        return DeformationState.from_array(self.path.values[-1])


def integrate_deformed(q: Potential, lam: complex, state0: DeformationState, x0: float, x1: float,
                       settings: IntegratorSettings = DEFAULT_SETTINGS,
                       guard_threshold: float = GUARD_THRESHOLD) -> DeformedFlow:
    """Integrates the coupled flow from state0 at x0 to x1.

    Raises:
        SingularityError: If state0 already violates the guard.
        GuardHalt: Where |f1| or |f2| reaches the guard threshold; carries the localized
            abscissa and state.
        IntegrationFailure: If the integrator fails.
    """
    if min(abs(state0.f1), abs(state0.f2)) <= guard_threshold:
        raise SingularityError(f"Initial state has a vanishing component at x={x0:.17g}.", x0)

    def rhs(x, y):
        f1, f2, alpha = y
        q1, q2 = q.evaluate(x)
        return np.array([
            lam * f1 + q1 * f2 + alpha * q2 / f1,
            q2 * f1 - lam * f2 + alpha * q1 / f2,
            alpha * (q1 * f1 / f2 + q2 * f2 / f1),
        ])

    def guard(x, y):
        return min(abs(y[0]), abs(y[1])) - guard_threshold

    path = integrate_nonlinear_system(rhs, state0.as_array(), x0, x1, settings, period=q.period, guard=guard)
    logger.debug(f"Deformed flow reached x={x1} with state {path.values[-1]}")
    return DeformedFlow(path, complex(lam), q)


def alpha_closed_form(flow: DeformedFlow) -> SampledPath:
    """alpha_bar exp(D(q1 f1 / f2 + q2 f2 / f1)) over the flow's span, alpha_bar fitted at x0."""
    grid = flow.path.grid
    f1, f2 = flow.path.values[:, 0], flow.path.values[:, 1]
    q1, q2 = flow.q.evaluate(grid)
    exponent = dxinv(flow.alpha.with_values(q1 * f1 / f2 + q2 * f2 / f1), grid[0], grid[-1] - grid[0])
    alpha_bar = flow.alpha.values[0] / np.exp(exponent.values[0])
    return flow.alpha.with_values(alpha_bar * np.exp(exponent.values))


def alpha_consistency_defect(flow: DeformedFlow) -> float:
    """Max deviation of the integrated alpha from its closed form, relative to max(1, max |alpha|)."""
    closed = alpha_closed_form(flow)
    scale = max(1.0, flow.alpha.max_norm())
    return float(np.max(np.abs(flow.alpha.values - closed.values)) / scale)
