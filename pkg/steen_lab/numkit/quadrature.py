"""Quadrature on sampled paths.

Both rules integrate the not-a-knot cubic spline through the samples, which is fourth order on
uniform grids and handles partial cells at the ends of [a, b] by interpolation.
"""

from steen_lab.errors import DomainError
from steen_lab.numkit.paths import ComplexSpline, SampledPath


def periodic_quadrature(samples: SampledPath, a: float, b: float) -> complex:
    """Integral of a sampled complex scalar over [a, b].

    Args:
        samples (SampledPath): Scalar path; [a, b] must lie within its grid.
        a (float): Lower limit.
        b (float): Upper limit (b < a gives the negated integral).

    Returns:
        complex: The integral.

    Raises:
        DomainError: If [a, b] leaves the sampled range or the payload is not scalar.
    """
    if samples.payload_shape:
        raise DomainError(f"Quadrature expects a scalar path, got payload shape {samples.payload_shape}.")
    if not samples.contains([a, b]):
        raise DomainError(f"Quadrature range [{a}, {b}] outside sampled range [{samples.grid[0]}, {samples.grid[-1]}].")
    spline = ComplexSpline.interpolating(samples.grid, samples.values)
    return complex(spline.integrate(a, b))


def cumulative_quadrature(samples: SampledPath) -> SampledPath:
    """Running integral x -> integral from grid[0] to x, on the same grid.

    The dense interpolant of the result is the spline antiderivative itself, so `at` stays
    consistent with the samples.
    """
    if samples.payload_shape:
        raise DomainError(f"Quadrature expects a scalar path, got payload shape {samples.payload_shape}.")
    primitive = ComplexSpline.interpolating(samples.grid, samples.values).antiderivative()
    values = primitive(samples.grid)
    return SampledPath(samples.grid, values - values[0], samples.x0, lambda x: primitive(x) - values[0])
