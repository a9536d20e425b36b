"""Grid-sampled paths, uniform grids, spline interpolation and central differences.

Every downstream operator (quadrature, the skew antiderivative, residual norms) works on
uniform grids, so this module owns the grid conventions: grids include both endpoints and
`samples_per_period` counts intervals, so that index shifts by `samples_per_period` move
exactly one period along the grid.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline, PPoly

from steen_lab.errors import DomainError

logger = logging.getLogger("steen-lab")

UNIFORM_RTOL = 1e-12

# 4th-order central stencils, offsets -w..w
_STENCILS = {
    1: (np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]), 2),
    2: (np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]), 2),
    3: (np.array([1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8]), 3),
}


def uniform_grid(x0: float, x1: float, n_intervals: int) -> np.ndarray:
    """Returns `n_intervals + 1` equally spaced abscissae from x0 to x1 inclusive."""
    if n_intervals < 1:
        raise DomainError(f"A grid needs at least one interval, got {n_intervals}.")
    return np.linspace(x0, x1, n_intervals + 1)


def report_grid(x0: float, x1: float, period: float, samples_per_period: int) -> np.ndarray:
    """Uniform report grid with `samples_per_period` intervals per period (at least one interval)."""
    n_intervals = max(1, int(round(abs(x1 - x0) / period * samples_per_period)))
    return uniform_grid(x0, x1, n_intervals)


@dataclass(frozen=True)
class ComplexSpline:
    """Piecewise cubic interpolant of complex data, kept as a pair of real `PPoly` objects.

    Attributes:
        real (PPoly): Interpolant of the real part (axis 0 is the abscissa).
        imag (PPoly): Interpolant of the imaginary part.
    """
    real: PPoly
    imag: PPoly

    @classmethod
    def interpolating(cls, grid: np.ndarray, values: np.ndarray) -> "ComplexSpline":
        values = np.asarray(values, dtype=complex)
        return cls(CubicSpline(grid, values.real, axis=0), CubicSpline(grid, values.imag, axis=0))

    @classmethod
    def hermite(cls, grid: np.ndarray, values: np.ndarray, derivatives: np.ndarray) -> "ComplexSpline":
        values = np.asarray(values, dtype=complex)
        derivatives = np.asarray(derivatives, dtype=complex)
        return cls(
            CubicHermiteSpline(grid, values.real, derivatives.real, axis=0),
            CubicHermiteSpline(grid, values.imag, derivatives.imag, axis=0),
        )

    def __call__(self, x) -> np.ndarray:
        return self.real(x) + 1j * self.imag(x)

    def integrate(self, a: float, b: float) -> np.ndarray:
        return np.asarray(self.real.integrate(a, b)) + 1j * np.asarray(self.imag.integrate(a, b))

    def antiderivative(self) -> "ComplexSpline":
        return ComplexSpline(self.real.antiderivative(), self.imag.antiderivative())


@dataclass(frozen=True)
class SampledPath:
    """A payload sampled on a strictly increasing grid.

    The payload of a single abscissa is a complex scalar, a vector or a matrix; `values` stacks
    them along axis 0. Instances are immutable: the arrays are copied and write-protected.

    Attributes:
        grid (np.ndarray): Strictly increasing abscissae, length N >= 2.
        values (np.ndarray): Payload per abscissa, shape (N, ...).
        x0 (float): Anchor abscissa (initial point of the computation that produced the path).
        interpolant (Optional[Callable]): Dense evaluator returning payload-shaped values; when
            absent, `at` falls back to a cubic spline through the samples.
    """
    grid: np.ndarray
    values: np.ndarray
    x0: float
    interpolant: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=complex)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError(f"A sampled path needs a 1-D grid with at least 2 points, got shape {grid.shape}.")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("Grid abscissae must be strictly increasing.")
        if values.shape[0] != grid.size:
            raise DomainError(f"values length {values.shape[0]} does not match grid length {grid.size}.")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "x0", float(self.x0))

    def __len__(self) -> int:
        return self.grid.size

    @property
    def payload_shape(self) -> tuple:
        return self.values.shape[1:]

    @property
    def spacing(self) -> float:
        """Mean grid spacing."""
        return float((self.grid[-1] - self.grid[0]) / (self.grid.size - 1))

    def is_uniform(self, rtol: float = UNIFORM_RTOL) -> bool:
        steps = np.diff(self.grid)
        return bool(np.max(np.abs(steps - self.spacing)) <= rtol * max(1.0, abs(self.grid[-1]), abs(self.grid[0])))

    def require_uniform(self, what: str = "operation"):
        if not self.is_uniform(rtol=1e-9):
            raise DomainError(f"The {what} needs a uniform grid.")

    def contains(self, x, slack: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        pad = slack * max(1.0, abs(self.grid[0]), abs(self.grid[-1]))
        return bool(np.all((x >= self.grid[0] - pad) & (x <= self.grid[-1] + pad)))

    def at(self, x) -> np.ndarray:
        """Dense evaluation at abscissa (or array of abscissae) within the sampled range.

        Raises:
            DomainError: If any query point lies outside the grid.
        """
        if not self.contains(x):
            raise DomainError(f"Query point outside sampled range [{self.grid[0]}, {self.grid[-1]}].")
        x = np.clip(x, self.grid[0], self.grid[-1])
        if self.interpolant is not None:
            return self.interpolant(x)
        return ComplexSpline.interpolating(self.grid, self.values)(x)

    def window(self, start: int, stop: int) -> "SampledPath":
        """Index-based slice [start, stop) sharing the dense interpolant."""
        return SampledPath(self.grid[start:stop], self.values[start:stop], self.x0, self.interpolant)

    def with_values(self, values: np.ndarray) -> "SampledPath":
        """Same grid and anchor, new payload (the interpolant is dropped)."""
        return SampledPath(self.grid, values, self.x0)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def central_difference(path: SampledPath, order: int) -> SampledPath:
    """4th-order central difference of the given derivative order (1, 2 or 3).

    The result lives on the interior grid: the stencil half-width is dropped at both ends.

    Raises:
        DomainError: For non-uniform or too short grids, or unsupported orders.
    """
    if order not in _STENCILS:
        raise DomainError(f"Central differences are available for orders 1-3, got {order}.")
    coefficients, width = _STENCILS[order]
    n = len(path)
    if n < 2 * width + 1:
        raise DomainError(f"Derivative of order {order} needs at least {2 * width + 1} grid points, got {n}.")
    path.require_uniform("finite-difference stencil")
    h = path.spacing
    values = path.values
    result = sum(c * values[j:n - 2 * width + j] for j, c in enumerate(coefficients) if c != 0.0)
    return SampledPath(path.grid[width:n - width], result / h ** order, path.x0)


def interior(path: SampledPath, width: int) -> SampledPath:
    """Drops `width` points at both ends so the path aligns with a stencil of that half-width."""
    return path.window(width, len(path) - width)
