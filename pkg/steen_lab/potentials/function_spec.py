"""Tagged function specifications for periodic coefficients.

A specification is a pydantic model selected by its `type` tag:

    {"type": "zero"}
    {"type": "constant", "c": [0.3, 0]}
    {"type": "fourier", "terms": [[1, [0.5, 0]], [-1, [0.5, 0]]]}
    {"type": "samples", "values": [[1, 0], [0.5, 0], ...]}
    {"type": "combination", "terms": [[[1, 0], {...}], [[1e-5, 0], {...}]]}

Complex numbers are [re, im] pairs; a bare number is read as a real value. Every spec evaluates
(and differentiates) on arrays of abscissae for a given period P.
"""

from math import pi
from typing import Annotated, Any, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer


def parse_complex(value: Any) -> complex:
    """Reads [re, im], a bare real or a Python complex."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in (re, im)):
            return complex(re, im)
    raise ValueError("complex numbers are written as [re, im] or as a real number")


ComplexNumber = Annotated[
    complex,
    BeforeValidator(parse_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
]


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def evaluate(self, x, period: float) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, x, period: float) -> np.ndarray:
        raise NotImplementedError


class ZeroSpec(_Spec):
    type: Literal["zero"] = "zero"

    def evaluate(self, x, period: float) -> np.ndarray:
        return np.zeros(np.shape(x), dtype=complex)

    def derivative(self, x, period: float) -> np.ndarray:
        return np.zeros(np.shape(x), dtype=complex)


class ConstantSpec(_Spec):
    type: Literal["constant"] = "constant"
    c: ComplexNumber

    def evaluate(self, x, period: float) -> np.ndarray:
        return np.full(np.shape(x), self.c, dtype=complex)

    def derivative(self, x, period: float) -> np.ndarray:
        return np.zeros(np.shape(x), dtype=complex)


class FourierSpec(_Spec):
    """Finite Fourier series sum_k c_k exp(i k x 2 pi / P)."""
    type: Literal["fourier"] = "fourier"
    terms: List[Tuple[int, ComplexNumber]]

    def _modes(self, period: float):
        wavenumbers = np.array([k for k, _ in self.terms], dtype=float) * (2 * pi / period)
        coefficients = np.array([c for _, c in self.terms], dtype=complex)
        return wavenumbers, coefficients

    def evaluate(self, x, period: float) -> np.ndarray:
        if not self.terms:
            return np.zeros(np.shape(x), dtype=complex)
        wavenumbers, coefficients = self._modes(period)
        phases = np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), wavenumbers))
        return phases @ coefficients

    def derivative(self, x, period: float) -> np.ndarray:
        if not self.terms:
            return np.zeros(np.shape(x), dtype=complex)
        wavenumbers, coefficients = self._modes(period)
        phases = np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), wavenumbers))
        return phases @ (1j * wavenumbers * coefficients)


class SamplesSpec(_Spec):
    """Values on the uniform grid x_j = j P / N (j = 0..N-1), trigonometrically interpolated.

    For even N the Nyquist coefficient is split evenly between +N/2 and -N/2, so that real
    samples give a real interpolant.
    """
    type: Literal["samples"] = "samples"
    values: List[ComplexNumber] = Field(min_length=1)

    def _modes(self, period: float):
        samples = np.asarray(self.values, dtype=complex)
        n = samples.size
        coefficients = np.fft.fft(samples) / n
        wavenumbers = np.fft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            nyquist = n // 2
            coefficients = np.append(coefficients, 0.5 * coefficients[nyquist])
            coefficients[nyquist] *= 0.5
            wavenumbers = np.append(wavenumbers, float(nyquist))
            wavenumbers[nyquist] = -float(nyquist)
        return wavenumbers * (2 * pi / period), coefficients

    def evaluate(self, x, period: float) -> np.ndarray:
        wavenumbers, coefficients = self._modes(period)
        return np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), wavenumbers)) @ coefficients

    def derivative(self, x, period: float) -> np.ndarray:
        wavenumbers, coefficients = self._modes(period)
        phases = np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), wavenumbers))
        return phases @ (1j * wavenumbers * coefficients)


class CombinationSpec(_Spec):
    """Linear combination sum_i w_i spec_i."""
    type: Literal["combination"] = "combination"
    terms: List[Tuple[ComplexNumber, "FunctionSpec"]]

    def evaluate(self, x, period: float) -> np.ndarray:
        total = np.zeros(np.shape(x), dtype=complex)
        for weight, spec in self.terms:
            total = total + weight * spec.evaluate(x, period)
        return total

    def derivative(self, x, period: float) -> np.ndarray:
        total = np.zeros(np.shape(x), dtype=complex)
        for weight, spec in self.terms:
            total = total + weight * spec.derivative(x, period)
        return total


FunctionSpec = Annotated[
    Union[ZeroSpec, ConstantSpec, FourierSpec, SamplesSpec, CombinationSpec],
    Field(discriminator="type"),
]

SPEC_TAGS = frozenset({"zero", "constant", "fourier", "samples", "combination"})

CombinationSpec.model_rebuild()


def fourier_cosine(amplitude: complex = 1.0, k: int = 1) -> FourierSpec:
    """amplitude * cos(k x 2 pi / P)."""
    return FourierSpec(terms=[(k, 0.5 * amplitude), (-k, 0.5 * amplitude)])


def fourier_sine(amplitude: complex = 1.0, k: int = 1) -> FourierSpec:
    """amplitude * sin(k x 2 pi / P)."""
    return FourierSpec(terms=[(k, -0.5j * amplitude), (-k, 0.5j * amplitude)])
