"""Linear oscillators y'' + q y = 0 and y'' = omega y, and their Wronskian."""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from steen_lab.errors import DomainError
from steen_lab.numkit.integrate import DEFAULT_SETTINGS, IntegratorSettings, integrate_linear_system
from steen_lab.numkit.paths import SampledPath, central_difference, interior
from steen_lab.potentials.potential import ScalarCoefficient

logger = logging.getLogger("steen-lab")


class Convention(Enum):
    """Sign convention of the scalar coefficient."""
    STEEN = "steen"  # y'' + q y = 0
    OMEGA = "omega"  # y'' = omega y


def omega_of(coeff: ScalarCoefficient, convention: Convention) -> ScalarCoefficient:
    """The coefficient in the omega convention (omega = -q for the steen convention)."""
    return coeff if Convention(convention) is Convention.OMEGA else coeff.negated()


@dataclass(frozen=True)
class OscillatorSolution:
    """A solved oscillator.

    Attributes:
        path (SampledPath): Pairs (y, y') on the report grid.
        coefficient (ScalarCoefficient): q or omega, as given.
        convention (Convention): How `coefficient` enters the equation.
    """
    path: SampledPath
    coefficient: ScalarCoefficient
    convention: Convention

    @property
    def y(self) -> SampledPath:
        return self.path.with_values(self.path.values[:, 0])

    @property
    def dy(self) -> SampledPath:
        return self.path.with_values(self.path.values[:, 1])

    @property
    def omega(self) -> ScalarCoefficient:
        return omega_of(self.coefficient, self.convention)

    def residual(self) -> float:
        """Max-norm of y'' - omega y on interior points, with y'' differenced from y'."""
        d2y = central_difference(self.dy, 1)
        y = interior(self.y, 2)
        return float(np.max(np.abs(d2y.values - self.omega(y.grid) * y.values)))


def solve_oscillator(coeff: ScalarCoefficient, convention: Convention, y0: complex, dy0: complex,
                     x0: float, x1: float, settings: IntegratorSettings = DEFAULT_SETTINGS) -> OscillatorSolution:
    """Solves the oscillator IVP y(x0) = y0, y'(x0) = dy0 on [x0, x1].

    Args:
        coeff (ScalarCoefficient): q (steen convention) or omega (omega convention).
        convention (Convention): Sign convention of `coeff`.
        y0 (complex): Initial value.
        dy0 (complex): Initial slope.
        x0 (float): Initial abscissa.
        x1 (float): Final abscissa.
        settings (IntegratorSettings): Integrator configuration.

    Returns:
        OscillatorSolution: The solution on the report grid of `settings`.
    """
    convention = Convention(convention)
    omega = omega_of(coeff, convention)

    def rhs_matrix(x):
        return np.array([[0.0, 1.0], [omega(x), 0.0]], dtype=complex)

    path = integrate_linear_system(rhs_matrix, [y0, dy0], x0, x1, settings, period=coeff.period)
    logger.debug(f"Solved {convention.value} oscillator on [{x0}, {x1}] with {len(path)} samples")
    return OscillatorSolution(path, coeff, convention)


@dataclass(frozen=True)
class WronskianResult:
    """W = u v' - u' v at x0 and its largest deviation along the grid."""
    value: complex
    constancy_defect: float


def wronskian(u: OscillatorSolution, v: OscillatorSolution) -> WronskianResult:
    """Wronskian of two solutions of the same oscillator.

    Raises:
        DomainError: If the solutions do not share grid, coefficient and convention.
    """
    if u.path.grid.shape != v.path.grid.shape or not np.array_equal(u.path.grid, v.path.grid):
        raise DomainError("Wronskian needs solutions sampled on the same grid.")
    if u.coefficient != v.coefficient or u.convention is not v.convention:
        raise DomainError("Wronskian needs solutions of the same oscillator.")
    y_u, dy_u = u.path.values[:, 0], u.path.values[:, 1]
    y_v, dy_v = v.path.values[:, 0], v.path.values[:, 1]
    w = y_u * dy_v - dy_u * y_v
    return WronskianResult(complex(w[0]), float(np.max(np.abs(w - w[0]))))
