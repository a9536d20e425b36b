"""Periodic Dirac potentials q = (q1, q2) and scalar oscillator coefficients."""

import json
import logging
from math import pi
from typing import Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, PositiveFloat, ValidationError

from steen_lab.errors import ConfigError, json_pointer
from steen_lab.numkit.linalg2 import C2Matrix
from steen_lab.potentials.function_spec import (
    SPEC_TAGS,
    CombinationSpec,
    ConstantSpec,
    FourierSpec,
    FunctionSpec,
    ZeroSpec,
    fourier_cosine,
)

logger = logging.getLogger("steen-lab")

TWO_PI = 2 * pi


class Potential(BaseModel):
    """A P-periodic potential pair.

    Attributes:
        period (float): Period P. Defaults to 2*pi.
        q1 (FunctionSpec): Upper off-diagonal entry of the Dirac coefficient matrix.
        q2 (FunctionSpec): Lower off-diagonal entry.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    period: PositiveFloat = TWO_PI
    q1: FunctionSpec
    q2: FunctionSpec

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        return self.q1.evaluate(x, self.period), self.q2.evaluate(x, self.period)

    def derivative(self, x) -> Tuple[np.ndarray, np.ndarray]:
        return self.q1.derivative(x, self.period), self.q2.derivative(x, self.period)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.q1, ZeroSpec) and isinstance(self.q2, ZeroSpec)


class ScalarCoefficient(BaseModel):
    """A P-periodic scalar coefficient: omega(t) of y'' = omega y, or q(u) of y'' + q y = 0."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    period: PositiveFloat = TWO_PI
    spec: FunctionSpec

    def __call__(self, x) -> np.ndarray:
        return self.spec.evaluate(x, self.period)

    def derivative(self, x) -> np.ndarray:
        return self.spec.derivative(x, self.period)

    def negated(self) -> "ScalarCoefficient":
        """The coefficient of the opposite sign convention (omega = -q)."""
        return ScalarCoefficient(period=self.period, spec=CombinationSpec(terms=[(-1.0, self.spec)]))


def eval_potential(q: Potential, x: float) -> Tuple[complex, complex]:
    """Returns (q1(x), q2(x))."""
    q1, q2 = q.evaluate(x)
    return complex(q1), complex(q2)


def dirac_coefficient_matrix(q: Potential, lam: complex, x) -> C2Matrix:
    """The trace-free matrix [[lam, q1(x)], [q2(x), -lam]].

    `x` may be an array, in which case a stack of shape (len(x), 2, 2) is returned.
    """
    q1, q2 = q.evaluate(x)
    matrix = np.empty(np.shape(x) + (2, 2), dtype=complex)
    matrix[..., 0, 0] = lam
    matrix[..., 0, 1] = q1
    matrix[..., 1, 0] = q2
    matrix[..., 1, 1] = -lam
    return matrix


def perturbed(q: Potential, direction: Potential, epsilon: float) -> Potential:
    """The potential q + epsilon * direction (directions must share the period)."""
    if not np.isclose(q.period, direction.period, rtol=1e-12, atol=0.0):
        raise ValueError(f"Perturbation period {direction.period} differs from potential period {q.period}.")
    return Potential(
        period=q.period,
        q1=CombinationSpec(terms=[(1.0, q.q1), (epsilon, direction.q1)]),
        q2=CombinationSpec(terms=[(1.0, q.q2), (epsilon, direction.q2)]),
    )


def zero_potential(period: float = TWO_PI) -> Potential:
    return Potential(period=period, q1=ZeroSpec(), q2=ZeroSpec())


def constant_potential(c1: complex, c2: complex, period: float = TWO_PI) -> Potential:
    return Potential(period=period, q1=ConstantSpec(c=c1), q2=ConstantSpec(c=c2))


def cosine_potential(amplitude: complex = 1.0, period: float = TWO_PI) -> Potential:
    """q1 = q2 = amplitude * cos(2 pi x / P)."""
    return Potential(period=period, q1=fourier_cosine(amplitude), q2=fourier_cosine(amplitude))


def constant_coefficient(c: complex, period: float = TWO_PI) -> ScalarCoefficient:
    return ScalarCoefficient(period=period, spec=ConstantSpec(c=c))


def mathieu_omega(eps: float, period: float = TWO_PI) -> ScalarCoefficient:
    """omega(t) = -(1 + eps cos t), the Mathieu-type coefficient in the y'' = omega y convention."""
    return ScalarCoefficient(
        period=period,
        spec=CombinationSpec(terms=[(-1.0, ConstantSpec(c=1.0)), (-1.0, fourier_cosine(eps))]),
    )


def load_potential(path: str) -> Potential:
    """Loads a potential document from a JSON or YAML file.

    Raises:
        ConfigError: If the file is missing, unparsable, or fails validation.
    """
    is_yaml = path.endswith((".yaml", ".yml"))
    kind = "YAML" if is_yaml else "JSON"
    try:
        with open(path, "r") as file:
            document = yaml.safe_load(file) if is_yaml else json.load(file)
    except FileNotFoundError as e:
        raise ConfigError(f"{kind} file '{path}' not found.") from e
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Error parsing {kind} file '{path}': {e}") from e
    try:
        potential = Potential.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        pointer = json_pointer(first["loc"], SPEC_TAGS)
        raise ConfigError(f"Invalid potential in '{path}' at '{pointer}': {first['msg']}", pointer) from e
    logger.debug(f"Loaded potential from {path} with period {potential.period}")
    return potential


def random_fourier_potential(rng: np.random.Generator, period: float = TWO_PI, modes: int = 2,
                             scale: float = 0.5) -> Potential:
    """A potential with random complex Fourier coefficients for |k| <= modes (perturbation directions)."""
    def spec():
        terms = [(k, complex(*(scale * rng.standard_normal(2)))) for k in range(-modes, modes + 1)]
        return FourierSpec(terms=terms)

    return Potential(period=period, q1=spec(), q2=spec())
