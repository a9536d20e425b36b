"""Nonlinear superposition for the Pinney equation z'' = omega z + k / z**3.

Given two solutions u, v of the linear oscillator with Wronskian W, every solution of the Pinney
equation is z = sqrt(A u**2 + 2 B u v + C v**2) with k = (A C - B**2) W**2. The module builds z,
solves the inverse problem for (A, B, C), and measures the residuals that certify the
construction: the Pinney residual of z and the third-order residual shared by products of
oscillator solutions (u v, u**2, z**2).
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from steen_lab.errors import DomainError, SingularityError
from steen_lab.numkit.branch import ZERO_THRESHOLD, continuous_sqrt
from steen_lab.numkit.integrate import IntegratorSettings, integrate_nonlinear_system
from steen_lab.numkit.paths import SampledPath, central_difference, interior
from steen_lab.potentials.potential import ScalarCoefficient
from steen_lab.report import VerificationReport
from steen_lab.steen.oscillator import Convention, OscillatorSolution, omega_of, wronskian

logger = logging.getLogger("steen-lab")

DEFAULT_TOLERANCES = {
    "steen.wronskian_constancy": 1e-8,
    "steen.pinney_residual": 1e-6,
    "steen.cubic_invariance_z2": 1e-6,
    "steen.cubic_invariance_z2_divergence": 1e-6,
    "steen.cubic_invariance_uv": 1e-6,
    "steen.k_relation": 1e-8,
    "steen.direct_integration": 1e-7,
}


@dataclass(frozen=True)
class SuperpositionCoeffs:
    """Coefficients of z**2 = A u**2 + 2 B u v + C v**2.

    Attributes:
        A (complex): Coefficient of u**2.
        B (complex): Half the coefficient of u v.
        C (complex): Coefficient of v**2.
        k (Optional[complex]): Target nonlinearity strength, when the caller has one.
    """
    A: complex
    B: complex
    C: complex
    k: Optional[complex] = None

    @classmethod
    def from_product_form(cls, A: complex, B_cross: complex, C: complex, k: Optional[complex] = None) -> "SuperpositionCoeffs":
        """Coefficients given as z**2 = A u**2 + B_cross u v + C v**2 (cross term without the 2)."""
        return cls(A, 0.5 * B_cross, C, k)

    @property
    def discriminant(self) -> complex:
        """A C - B**2."""
        return self.A * self.C - self.B ** 2


@dataclass(frozen=True)
class ProductJet:
    """alpha = A u**2 + 2 B u v + C v**2 with its first two derivatives, all on the grid of u and v.

    The derivatives come from the oscillator states (u, u'), (v, v'): u'' = omega u and
    v'' = omega v close the second derivative without differencing samples.
    """
    value: SampledPath
    first: SampledPath
    second: SampledPath


def product_jet(u: OscillatorSolution, v: OscillatorSolution, A: complex, B: complex, C: complex) -> ProductJet:
    """alpha, alpha' = 2 (A u u' + B (u' v + u v') + C v v') and
    alpha'' = 2 (A u'**2 + 2 B u' v' + C v'**2) + 2 omega alpha."""
    _shared_grid(u, v)
    (y_u, dy_u), (y_v, dy_v) = u.path.values.T, v.path.values.T
    value = A * y_u ** 2 + 2 * B * y_u * y_v + C * y_v ** 2
    first = 2 * (A * y_u * dy_u + B * (dy_u * y_v + y_u * dy_v) + C * y_v * dy_v)
    second = 2 * (A * dy_u ** 2 + 2 * B * dy_u * dy_v + C * dy_v ** 2) + 2 * u.omega(u.path.grid) * value
    y = u.y
    return ProductJet(y.with_values(value), y.with_values(first), y.with_values(second))


@dataclass(frozen=True)
class SuperpositionResult:
    """z with the nonlinearity strength implied by the coefficients and the Wronskian.

    `square` carries z**2 with the derivatives taken from the oscillator states.
    """
    z: SampledPath
    k_implied: complex
    wronskian: complex
    coeffs: SuperpositionCoeffs
    square: Optional[ProductJet] = None


def _shared_grid(u: OscillatorSolution, v: OscillatorSolution):
    if not np.array_equal(u.path.grid, v.path.grid):
        raise DomainError("Superposition needs solutions sampled on the same grid.")


def pinney_superpose(u: OscillatorSolution, v: OscillatorSolution, coeffs: SuperpositionCoeffs,
                     zero_threshold: float = ZERO_THRESHOLD) -> SuperpositionResult:
    """Builds z = sqrt(A u**2 + 2 B u v + C v**2) with a continuous branch.

    Raises:
        BranchAmbiguityError: Where the quadratic form falls below the zero-threshold.
    """
    square = product_jet(u, v, coeffs.A, coeffs.B, coeffs.C)
    w = wronskian(u, v).value
    z = continuous_sqrt(square.value, zero_threshold, component="z")
    k_implied = coeffs.discriminant * w ** 2
    logger.debug(f"Superposed z with A={coeffs.A}, B={coeffs.B}, C={coeffs.C}: W={w}, k_implied={k_implied}")
    return SuperpositionResult(z, complex(k_implied), w, coeffs, square)


def superposition_coefficients_for(z0: complex, dz0: complex, k: complex,
                                   u: OscillatorSolution, v: OscillatorSolution) -> SuperpositionCoeffs:
    """Coefficients whose superposition is the Pinney solution with z(x0) = z0, z'(x0) = dz0.

    In the basis c, s of solutions with (c, c') = (1, 0) and (s, s') = (0, 1) at x0 the answer is
    A = z0**2, B = z0 dz0, C = dz0**2 + k / z0**2; it is carried to (u, v) through the matrix of
    their initial data.

    Raises:
        SingularityError: If z0 is zero.
        DomainError: If u and v are linearly dependent.
    """
    if abs(z0) < ZERO_THRESHOLD:
        raise SingularityError("The Pinney solution must start away from zero.", u.path.grid[0])
    canonical = np.array([[z0 ** 2, z0 * dz0], [z0 * dz0, dz0 ** 2 + k / z0 ** 2]], dtype=complex)
    initial = np.array([u.path.values[0], v.path.values[0]], dtype=complex)  # rows (y, y') at x0
    if abs(np.linalg.det(initial)) < ZERO_THRESHOLD:
        raise DomainError("Superposition needs two independent solutions.")
    inverse = np.linalg.inv(initial)
    form = inverse.T @ canonical @ inverse
    return SuperpositionCoeffs(form[0, 0], form[0, 1], form[1, 1], k)


def superposition_slope(result: SuperpositionResult, u: OscillatorSolution, v: OscillatorSolution) -> complex:
    """z'(x0) = (A u u' + B (u' v + u v') + C v v') / z at the first grid point."""
    (y_u, dy_u), (y_v, dy_v) = u.path.values[0], v.path.values[0]
    coeffs = result.coeffs
    numerator = coeffs.A * y_u * dy_u + coeffs.B * (dy_u * y_v + y_u * dy_v) + coeffs.C * y_v * dy_v
    return complex(numerator / result.z.values[0])


def integrate_pinney(coeff: ScalarCoefficient, convention: Convention, z0: complex, dz0: complex, k: complex,
                     grid: np.ndarray, settings: IntegratorSettings) -> SampledPath:
    """Integrates z'' = omega z + k / z**3 directly on `grid`, halting where |z| reaches the zero-threshold."""
    omega = omega_of(coeff, convention)

    def rhs(x, y):
        z, dz = y
        return np.array([dz, omega(x) * z + k / z ** 3])

    def guard(x, y):
        return abs(y[0]) - ZERO_THRESHOLD

    path = integrate_nonlinear_system(rhs, [z0, dz0], grid[0], grid[-1], settings, period=coeff.period,
                                      grid=grid, guard=guard)
    return path.with_values(path.values[:, 0])


def pinney_residual(z: SampledPath, coeff: ScalarCoefficient, convention: Convention, k: complex,
                    zero_threshold: float = ZERO_THRESHOLD, square: Optional[ProductJet] = None) -> float:
    """Max-norm of z'' - omega z - k / z**3.

    Without `square`, z'' is a central difference of the samples and the norm runs over interior
    grid points. With `square` (z**2 and its derivatives on the grid of z), z' = (z**2)' / (2 z)
    and z'' = ((z**2)'' / 2 - z'**2) / z on every grid point.

    Raises:
        SingularityError: If z falls below the zero-threshold.
        DomainError: If `square` lives on another grid.
    """
    small = np.flatnonzero(np.abs(z.values) < zero_threshold)
    if small.size:
        x = float(z.grid[small[0]])
        raise SingularityError(f"z vanishes at x={x:.17g}.", x)
    omega = omega_of(coeff, convention)
    if square is None:
        d2z = central_difference(z, 2)
        zi = interior(z, 2)
        x, values, d2 = zi.grid, zi.values, d2z.values
    else:
        if not np.array_equal(square.value.grid, z.grid):
            raise DomainError("z and z**2 must share a grid.")
        x, values = z.grid, z.values
        dz = square.first.values / (2 * values)
        d2 = (square.second.values / 2 - dz ** 2) / values
    residual = d2 - omega(x) * values - k / values ** 3
    return float(np.max(np.abs(residual)))


def cubic_invariance_residual(alpha: Union[SampledPath, ProductJet], omega: ScalarCoefficient, form: str = "expanded",
                              convention: Convention = Convention.OMEGA) -> float:
    """Max-norm of alpha''' - 2 omega' alpha - 4 omega alpha' on interior grid points.

    Args:
        alpha (Union[SampledPath, ProductJet]): Samples on a uniform grid (at least 7 points), or a
            product of oscillator solutions whose alpha' and alpha'' come from the states; then
            alpha''' is a first difference of alpha''.
        omega (ScalarCoefficient): The coefficient; omega' is taken analytically.
        form (str): "expanded", or "divergence" for alpha''' - 2 omega alpha' - 2 (omega alpha)'
            with (omega alpha)' differenced from samples.
        convention (Convention): Convention of `omega`. Defaults to the omega convention.

    Raises:
        DomainError: For grids shorter than 7 points (5 for a jet) or an unknown form.
    """
    if form not in ("expanded", "divergence"):
        raise DomainError(f"Unknown residual form '{form}'; expected 'expanded' or 'divergence'.")
    coefficient = omega_of(omega, convention)
    if isinstance(alpha, ProductJet):
        samples, width = alpha.value, 2
        d3 = central_difference(alpha.second, 1)
        d1 = interior(alpha.first, width)
    else:
        samples, width = alpha, 3
        d3 = central_difference(alpha, 3)
        d1 = interior(central_difference(alpha, 1), 1)
    x = d3.grid
    values = interior(samples, width).values
    if form == "expanded":
        residual = d3.values - 2 * coefficient.derivative(x) * values - 4 * coefficient(x) * d1.values
    else:
        product = samples.with_values(coefficient(samples.grid) * samples.values)
        d_product = interior(central_difference(product, 1), width - 2)
        residual = d3.values - 2 * coefficient(x) * d1.values - 2 * d_product.values
    return float(np.max(np.abs(residual)))


def verify_superposition_identity(u: OscillatorSolution, v: OscillatorSolution, coeffs: SuperpositionCoeffs,
                                  tolerances: Optional[Dict[str, float]] = None, scenario: str = "steen",
                                  settings: Optional[IntegratorSettings] = None) -> VerificationReport:
    """Runs the superposition pipeline and records every residual.

    Asserted: Wronskian constancy, the Pinney residual of z with k = (A C - B**2) W**2, the
    third-order residual of z**2 (both forms) and of u v. With a target `coeffs.k` the k relation
    is asserted too; with `settings` z is also compared against a direct integration of the
    Pinney equation from z(x0), z'(x0). Reported only: k_implied without a target and the
    opposite-sign relation B**2 - A C = 1 / W**2.
    """
    report = VerificationReport(scenario, tolerances=dict(tolerances or {}))
    tolerance = {**DEFAULT_TOLERANCES, **report.tolerances}
    with report.timed("steen"):
        w = wronskian(u, v)
        report.check("steen.wronskian_constancy", "W = u v' - u' v is constant", w.constancy_defect,
                     tolerance["steen.wronskian_constancy"] * (1 + abs(w.value)), {"wronskian": w.value})
        result = pinney_superpose(u, v, coeffs)
        z = result.z
        report.check("steen.pinney_residual", "z'' = omega z + k / z^3 with k = (AC - B^2) W^2",
                     pinney_residual(z, u.coefficient, u.convention, result.k_implied, square=result.square),
                     tolerance["steen.pinney_residual"], {"k_implied": result.k_implied})
        report.check("steen.cubic_invariance_z2", "beta''' - 2 omega' beta - 4 omega beta' = 0 for beta = z^2",
                     cubic_invariance_residual(result.square, u.omega), tolerance["steen.cubic_invariance_z2"])
        report.check("steen.cubic_invariance_z2_divergence", "divergence form of the third-order equation for z^2",
                     cubic_invariance_residual(result.square, u.omega, form="divergence"),
                     tolerance["steen.cubic_invariance_z2_divergence"])
        product = product_jet(u, v, 0, 0.5, 0)
        report.check("steen.cubic_invariance_uv", "alpha''' - 2 omega' alpha - 4 omega alpha' = 0 for alpha = u v",
                     cubic_invariance_residual(product, u.omega), tolerance["steen.cubic_invariance_uv"])
        if coeffs.k is not None:
            report.check("steen.k_relation", "k = (AC - B^2) W^2", abs(result.k_implied - coeffs.k),
                         tolerance["steen.k_relation"] * (1 + abs(coeffs.k)),
                         {"k_implied": result.k_implied, "k": coeffs.k})
        else:
            report.measure("steen.k_implied", "k = (AC - B^2) W^2", result.k_implied)
        report.measure("steen.printed_sign_relation", "B^2 - AC = 1 / W^2 (opposite sign)",
                       abs(-coeffs.discriminant - 1 / w.value ** 2) if w.value != 0 else None,
                       detail={"B2_minus_AC": -coeffs.discriminant})
        if settings is not None:
            direct = integrate_pinney(u.coefficient, u.convention, z.values[0], superposition_slope(result, u, v),
                                      result.k_implied, z.grid, settings)
            report.check("steen.direct_integration", "superposition = direct solution of the Pinney equation",
                         float(np.max(np.abs(direct.values - z.values))) / max(1.0, z.max_norm()),
                         tolerance["steen.direct_integration"])
    report.add_trace("superposition", x=z.grid, z=z.values, u=u.y.values, v=v.y.values)
    report.metadata.update({"samples": len(z), "coefficients": [coeffs.A, coeffs.B, coeffs.C]})
    return report
