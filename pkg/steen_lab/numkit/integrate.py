"""ODE drivers: adaptive embedded Runge-Kutta pairs (via scipy's stepper classes) and a fixed-step RK4.

Both drivers return a `SampledPath` on a uniform report grid with a dense interpolant attached.
The adaptive pairs are stepped manually so that the minimum step size and the optional guard
are enforced after every accepted step. The guard margin is minimised over each step's dense
output, so a component that dips through zero inside a step is caught, and the crossing is then
localised by bracketing.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import inf, pi
from typing import Callable, Optional

import numpy as np
from scipy.integrate import DOP853, RK45, OdeSolution
from scipy.optimize import brentq, minimize_scalar

from steen_lab.errors import DomainError, GuardHalt, IntegrationFailure
from steen_lab.numkit.paths import ComplexSpline, SampledPath, report_grid

logger = logging.getLogger("steen-lab")

TWO_PI = 2 * pi

Guard = Callable[[float, np.ndarray], float]

GUARD_SAMPLES = 8


class IntegrationMethod(Enum):
    """Supported integrators."""
    RK45 = "RK45"  # Dormand-Prince 5(4), the default
    DOP853 = "DOP853"  # Dormand-Prince 8(5,3)
    RK4 = "RK4"  # classical fixed-step RK4 on the report grid


_ADAPTIVE = {IntegrationMethod.RK45: RK45, IntegrationMethod.DOP853: DOP853}


@dataclass(frozen=True)
class IntegratorSettings:
    """Integrator configuration.

    Attributes:
        method (IntegrationMethod): Integrator. Defaults to RK45.
        abs_tol (float): Absolute tolerance of the adaptive pairs. Defaults to 1e-10.
        rel_tol (float): Relative tolerance of the adaptive pairs. Defaults to 1e-10.
        max_step (float): Largest admissible step. Defaults to inf.
        min_step (float): Steps below this size are reported as step-size underflow. Defaults to 1e-14.
        samples_per_period (int): Report-grid intervals per period. Defaults to 2048.
    """
    method: IntegrationMethod = IntegrationMethod.RK45
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = inf
    min_step: float = 1e-14
    samples_per_period: int = 2048

    def __post_init__(self):
        object.__setattr__(self, "method", IntegrationMethod(self.method))
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError(f"Tolerances must be positive, got abs_tol={self.abs_tol}, rel_tol={self.rel_tol}.")
        if not (0 < self.min_step <= self.max_step):
            raise DomainError(f"Need 0 < min_step <= max_step, got {self.min_step} and {self.max_step}.")
        if self.samples_per_period < 2:
            raise DomainError(f"samples_per_period must be at least 2, got {self.samples_per_period}.")

    def describe(self) -> dict:
        return {
            "method": self.method.value,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "samples_per_period": self.samples_per_period,
        }


DEFAULT_SETTINGS = IntegratorSettings()


def _payload_interpolant(evaluate: Callable, payload_shape: tuple) -> Callable:
    """Wraps a state-vector evaluator (state axis first) into a payload-shaped one (abscissa axis first)."""
    def interpolant(x):
        states = np.asarray(evaluate(x))
        if np.ndim(x) == 0:
            return states.reshape(payload_shape)
        return np.moveaxis(states, 0, -1).reshape((-1,) + payload_shape)
    return interpolant


def _check_guard(guard: Optional[Guard], x: float, y: np.ndarray):
    if guard is not None and guard(x, y) <= 0:
        raise GuardHalt(f"Guard violated at x={x:.17g}.", x, y)


def _localize_crossing(guard: Guard, dense: Callable, x_left: float, x_right: float) -> float:
    """Abscissa where the guard margin changes sign inside one step."""
    margin = lambda x: guard(x, dense(x))
    if margin(x_left) <= 0:
        return x_left
    return brentq(margin, x_left, x_right, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)


def _guard_violation(guard: Guard, dense: Callable, x_left: float, x_right: float) -> Optional[float]:
    """Abscissa of the first guard crossing inside [x_left, x_right], or None.

    The margin is sampled across the step and minimised around the lowest sample, which catches
    V-shaped dips such as a real component passing through zero between two step ends.
    """
    margin = lambda x: guard(x, dense(x))
    samples = np.linspace(x_left, x_right, GUARD_SAMPLES + 1)
    margins = np.array([margin(x) for x in samples])
    k = int(np.argmin(margins))
    x_low, low = samples[k], margins[k]
    if low > 0:
        lo, hi = samples[max(k - 1, 0)], samples[min(k + 1, GUARD_SAMPLES)]
        xatol = 1e-13 * max(1.0, abs(x_right))
        result = minimize_scalar(margin, bounds=(lo, hi), method="bounded", options={"xatol": xatol, "maxiter": 200})
        if result.fun <= 0:
            x_low, low = float(result.x), float(result.fun)
    if low > 0:
        return None
    return _localize_crossing(guard, dense, x_left, x_low)


def _run_adaptive(fun, y0: np.ndarray, x0: float, x1: float, settings: IntegratorSettings,
                  guard: Optional[Guard]) -> OdeSolution:
    solver = _ADAPTIVE[settings.method](
        fun, x0, y0, x1, rtol=settings.rel_tol, atol=settings.abs_tol, max_step=settings.max_step
    )
    abscissae, interpolants = [x0], []
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationFailure(f"Integration failed at x={solver.t:.17g}: {message}", solver.t)
        step = solver.t - solver.t_old
        dense = solver.dense_output()
        if solver.status == "running" and abs(step) < settings.min_step:
            raise IntegrationFailure(f"Step size {abs(step):.3e} underflowed at x={solver.t:.17g}.", solver.t)
        if not np.all(np.isfinite(solver.y)):
            raise IntegrationFailure(f"Non-finite state at x={solver.t:.17g}.", solver.t)
        if guard is not None:
            x_hit = _guard_violation(guard, dense, solver.t_old, solver.t)
            if x_hit is not None:
                raise GuardHalt(f"Guard violated at x={x_hit:.17g}.", x_hit, dense(x_hit))
        abscissae.append(solver.t)
        interpolants.append(dense)
    logger.debug(f"{settings.method.value}: {len(interpolants)} steps, {solver.nfev} evaluations on [{x0}, {x1}]")
    return OdeSolution(abscissae, interpolants)


def _run_rk4(fun, y0: np.ndarray, grid: np.ndarray, guard: Optional[Guard]):
    values = np.empty((grid.size, y0.size), dtype=complex)
    slopes = np.empty_like(values)
    values[0] = y0
    for k in range(grid.size - 1):
        x, h, y = grid[k], grid[k + 1] - grid[k], values[k]
        k1 = fun(x, y)
        k2 = fun(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = fun(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = fun(x + h, y + h * k3)
        slopes[k] = k1
        values[k + 1] = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(values[k + 1])):
            raise IntegrationFailure(f"Non-finite state at x={grid[k + 1]:.17g}.", grid[k + 1])
        if guard is not None:
            slopes[k + 1] = fun(grid[k + 1], values[k + 1])
            cell = ComplexSpline.hermite(grid[k:k + 2], values[k:k + 2], slopes[k:k + 2])
            x_hit = _guard_violation(guard, cell, grid[k], grid[k + 1])
            if x_hit is not None:
                raise GuardHalt(f"Guard violated at x={x_hit:.17g}.", x_hit, cell(x_hit))
    slopes[-1] = fun(grid[-1], values[-1])
    logger.debug(f"RK4: {grid.size - 1} fixed steps on [{grid[0]}, {grid[-1]}]")
    return values, ComplexSpline.hermite(grid, values, slopes)


def _integrate(fun, y0: np.ndarray, x0: float, x1: float, settings: IntegratorSettings,
               period: float, grid: Optional[np.ndarray], guard: Optional[Guard]) -> SampledPath:
    if not x1 > x0:
        raise DomainError(f"Integration needs x1 > x0, got [{x0}, {x1}].")
    if grid is None:
        grid = report_grid(x0, x1, period, settings.samples_per_period)
    else:
        grid = np.asarray(grid, dtype=float)
        if abs(grid[0] - x0) > 1e-12 * max(1.0, abs(x0)) or abs(grid[-1] - x1) > 1e-12 * max(1.0, abs(x1)):
            raise DomainError("An explicit report grid must start at x0 and end at x1.")
    payload_shape = y0.shape
    state0 = y0.ravel()
    _check_guard(guard, x0, state0)
    if settings.method is IntegrationMethod.RK4:
        values, spline = _run_rk4(fun, state0, grid, guard)
        interpolant = lambda x: spline(x).reshape(np.shape(x) + payload_shape)
        return SampledPath(grid, values.reshape((-1,) + payload_shape), x0, interpolant)
    solution = _run_adaptive(fun, state0, x0, x1, settings, guard)
    values = solution(grid).T.reshape((-1,) + payload_shape)
    return SampledPath(grid, values, x0, _payload_interpolant(solution, payload_shape))


def integrate_linear_system(rhs_matrix: Callable[[float], np.ndarray], y0, x0: float, x1: float,
                            settings: IntegratorSettings = DEFAULT_SETTINGS, period: float = TWO_PI,
                            grid: Optional[np.ndarray] = None) -> SampledPath:
    """Integrates dy/dx = A(x) y on [x0, x1].

    `y0` may be a vector (shape (n,)) or a matrix (shape (n, m)); a matrix initial value is
    integrated column by column inside a single state so the columns share step control.

    Args:
        rhs_matrix (Callable[[float], np.ndarray]): x -> A(x), an (n, n) matrix.
        y0: Initial vector or matrix.
        x0 (float): Initial abscissa.
        x1 (float): Final abscissa (x1 > x0).
        settings (IntegratorSettings): Integrator configuration.
        period (float): Period used to size the report grid. Defaults to 2*pi.
        grid (Optional[np.ndarray]): Explicit report grid from x0 to x1 (overrides `period`).

    Returns:
        SampledPath: Solution on the report grid, payload shaped like `y0`, with dense output.

    Raises:
        IntegrationFailure: On step-size underflow or solver failure (carries the abscissa).
    """
    y0 = np.asarray(y0, dtype=complex)
    shape = y0.shape

    def fun(x, y):
        return (np.asarray(rhs_matrix(x), dtype=complex) @ y.reshape(shape)).ravel()

    return _integrate(fun, y0, x0, x1, settings, period, grid, guard=None)


def integrate_nonlinear_system(rhs: Callable[[float, np.ndarray], np.ndarray], y0, x0: float, x1: float,
                               settings: IntegratorSettings = DEFAULT_SETTINGS, period: float = TWO_PI,
                               grid: Optional[np.ndarray] = None, guard: Optional[Guard] = None) -> SampledPath:
    """Integrates dy/dx = rhs(x, y) on [x0, x1] with an optional guard.

    The guard returns a signed margin: integration halts as soon as it is <= 0, and the
    crossing abscissa is localised inside the offending step.

    Raises:
        GuardHalt: When the guard is violated (carries abscissa and state).
        IntegrationFailure: On step-size underflow or solver failure.
    """
    y0 = np.asarray(y0, dtype=complex)
    shape = y0.shape

    def fun(x, y):
        return np.asarray(rhs(x, y.reshape(shape)), dtype=complex).ravel()

    return _integrate(fun, y0, x0, x1, settings, period, grid, guard)
