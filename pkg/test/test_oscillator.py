from math import pi

import numpy as np
import pytest

from steen_lab.errors import DomainError
from steen_lab.numkit.integrate import IntegrationMethod, IntegratorSettings
from steen_lab.potentials.potential import constant_coefficient, mathieu_omega
from steen_lab.steen.oscillator import Convention, omega_of, solve_oscillator, wronskian

TIGHT = IntegratorSettings(method=IntegrationMethod.DOP853, abs_tol=1e-12, rel_tol=1e-12)


@pytest.fixture
def harmonic():
    return constant_coefficient(-1.0)


def test_cosine_solution(harmonic):
    solution = solve_oscillator(harmonic, Convention.OMEGA, 1, 0, 0.0, 2 * pi, TIGHT)
    grid = solution.path.grid
    assert np.max(np.abs(solution.y.values - np.cos(grid))) < 1e-9
    assert np.max(np.abs(solution.dy.values + np.sin(grid))) < 1e-9


def test_steen_convention_flips_the_sign(harmonic):
    omega_form = solve_oscillator(harmonic, Convention.OMEGA, 1, 0, 0.0, 2 * pi, TIGHT)
    steen_form = solve_oscillator(constant_coefficient(1.0), "steen", 1, 0, 0.0, 2 * pi, TIGHT)
    assert steen_form.convention is Convention.STEEN
    assert np.max(np.abs(steen_form.y.values - omega_form.y.values)) < 1e-10
    assert omega_of(constant_coefficient(1.0), Convention.STEEN)(0.0) == pytest.approx(-1.0)


def test_growing_exponential():
    solution = solve_oscillator(constant_coefficient(1.0), Convention.OMEGA, 1, 1, 0.0, 2.0, TIGHT)
    assert np.max(np.abs(solution.y.values - np.exp(solution.path.grid))) < 1e-8


@pytest.mark.parametrize("coefficient", [constant_coefficient(-1.0), mathieu_omega(0.3)], ids=["harmonic", "mathieu"])
def test_residual_is_small(coefficient):
    solution = solve_oscillator(coefficient, Convention.OMEGA, 0, 1, 0.0, 2 * pi, TIGHT)
    assert solution.residual() < 1e-7


def test_wronskian_of_cosine_and_sine(harmonic):
    u = solve_oscillator(harmonic, Convention.OMEGA, 1, 0, 0.0, 2 * pi, TIGHT)
    v = solve_oscillator(harmonic, Convention.OMEGA, 0, 1, 0.0, 2 * pi, TIGHT)
    result = wronskian(u, v)
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.constancy_defect < 1e-9


def test_wronskian_needs_the_same_oscillator(harmonic):
    u = solve_oscillator(harmonic, Convention.OMEGA, 1, 0, 0.0, 2 * pi, TIGHT)
    other = solve_oscillator(mathieu_omega(0.3), Convention.OMEGA, 0, 1, 0.0, 2 * pi, TIGHT)
    shorter = solve_oscillator(harmonic, Convention.OMEGA, 0, 1, 0.0, pi, TIGHT)
    with pytest.raises(DomainError, match="same oscillator"):
        wronskian(u, other)
    with pytest.raises(DomainError, match="same grid"):
        wronskian(u, shorter)
