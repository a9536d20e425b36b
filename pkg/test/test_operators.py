from math import pi

import numpy as np
import pytest
from pydantic import ValidationError

from steen_lab.dirac.fundamental import fundamental_solution
from steen_lab.dirac.monodromy import monodromy
from steen_lab.errors import DomainError
from steen_lab.numkit.integrate import IntegrationMethod, IntegratorSettings
from steen_lab.numkit.paths import SampledPath, central_difference, interior, uniform_grid
from steen_lab.potentials.potential import constant_potential, cosine_potential, zero_potential
from steen_lab.deform.operators import (
    CMatrix,
    GradientField,
    OperatorCoefficients,
    OperatorPreset,
    determining_operator_apply,
    dxinv,
    expected_kappa,
    grad_gamma1,
    kappa_estimate,
    kernel_defect,
    novikov_entrywise_residuals,
)

TIGHT = IntegratorSettings(method=IntegrationMethod.DOP853, abs_tol=1e-12, rel_tol=1e-12)
GRID = uniform_grid(0.0, 2 * pi, 1024)


def _path(values, grid=GRID):
    return SampledPath(grid, values, grid[0])


@pytest.fixture(scope="module")
def free():
    return fundamental_solution(zero_potential(), 0.4, settings=TIGHT)


@pytest.fixture(scope="module")
def constant():
    return fundamental_solution(constant_potential(0.3, 0.3), 0.3, settings=TIGHT)


@pytest.mark.parametrize("f,expected", [
    (np.cos, np.sin),
    (np.sin, lambda x: 1 - np.cos(x)),
    (lambda x: 0.7 * np.ones_like(x), lambda x: 0.7 * (x - pi)),
])
def test_skew_antiderivative(f, expected):
    g = dxinv(_path(f(GRID)), 0.0, 2 * pi)
    assert np.max(np.abs(g.values - expected(GRID))) < 1e-9
    assert g.at(0.5) == pytest.approx(expected(0.5), abs=1e-9)


def test_skew_antiderivative_differentiates_back():
    f = _path(np.exp(1j * GRID) + 0.2 * np.cos(3 * GRID))
    g = dxinv(f, 0.0, 2 * pi)
    assert np.max(np.abs(central_difference(g, 1).values - interior(f, 2).values)) < 1e-8
    # g(x0) = -g(x0 + P) for any f
    assert g.values[0] == pytest.approx(-g.values[-1], abs=1e-12)


def test_skew_antiderivative_needs_a_full_period():
    half = uniform_grid(0.0, pi, 256)
    with pytest.raises(DomainError, match="do not cover one period"):
        dxinv(_path(np.cos(half), half), 0.0, 2 * pi)
    with pytest.raises(DomainError, match="scalar path"):
        dxinv(_path(np.ones((GRID.size, 2))), 0.0, 2 * pi)


def test_c_matrix():
    C = CMatrix.from_array([[1, 2j], [-1, 0.5]])
    assert C.kappa == 0.5
    assert np.array_equal(C.as_array(), [[1, 2j], [-1, 0.5]])
    assert CMatrix.model_validate({"c12": [0, 1]}).c12 == 1j
    assert np.array_equal(CMatrix.rotation().as_array(), [[0, 1], [-1, 0]])
    with pytest.raises(DomainError, match="2x2"):
        CMatrix.from_array(np.eye(3))


@pytest.mark.parametrize("weight", [0.0, float("inf"), float("nan")])
def test_operator_weights_are_validated(weight):
    with pytest.raises(ValidationError):
        OperatorCoefficients(lambda_weight=weight)


def test_operator_presets():
    assert OperatorCoefficients() == OperatorCoefficients.novikov_derived()
    printed = OperatorCoefficients.as_printed()
    assert (printed.lambda_weight, printed.coupling_weight, printed.preset) == (1.0, 1.0, OperatorPreset.AS_PRINTED)


def test_free_gradient_field(free):
    x = free.F.grid[:free.steps_per_period + 1]
    C = CMatrix(c11=0.5, c12=2.0, c21=-1.5, c22=0.25)
    field = grad_gamma1(free, C)
    assert np.max(np.abs(field.a.values - (-1.5) * np.exp(-0.8 * x)) / np.exp(-0.8 * x)) < 1e-9
    assert np.max(np.abs(field.b.values - 2.0 * np.exp(0.8 * x)) / np.exp(0.8 * x)) < 1e-9
    assert field.cross_check_defect < 1e-10 * field.b.max_norm()
    assert field.source == "from_C_and_F"


def test_gradient_field_special_matrices(constant):
    identity = grad_gamma1(constant, CMatrix(c11=1, c22=1))
    assert max(identity.a.max_norm(), identity.b.max_norm()) < 1e-12
    e12 = grad_gamma1(constant, CMatrix.e12())
    values = constant.F.values[:constant.steps_per_period + 1]
    assert np.allclose(e12.a.values, -values[:, 1, 0] ** 2, rtol=1e-14, atol=1e-14)
    assert np.allclose(e12.b.values, values[:, 0, 0] ** 2, rtol=1e-14, atol=1e-14)
    assert e12.cross_check_defect < 1e-10 * max(1.0, e12.b.max_norm())


def test_gradient_field_from_ftilde():
    ftilde = _path(np.stack([np.exp(1j * GRID), 2 + 0 * GRID], axis=1))
    field = GradientField.from_ftilde(ftilde)
    assert np.allclose(field.a.values, -4)
    assert np.allclose(field.b.values, np.exp(2j * GRID))
    assert field.c is None
    with pytest.raises(DomainError, match="no diagonal difference"):
        expected_kappa(field)


def test_determining_operator_on_the_free_field(free):
    field = grad_gamma1(free, CMatrix.rotation())
    scale = max(field.a.max_norm(), field.b.max_norm())
    row_a, row_b = determining_operator_apply(zero_potential(), 0.4, field)
    assert max(row_a.max_norm(), row_b.max_norm()) / scale < 1e-8
    assert row_a.grid.size == field.grid.size - 4


def test_printed_operator_leaves_a_multiple_of_the_field(free):
    field = grad_gamma1(free, CMatrix.rotation())
    scale = max(field.a.max_norm(), field.b.max_norm())
    rows = determining_operator_apply(zero_potential(), 0.4, field, OperatorCoefficients.as_printed())
    residual = max(rows[0].max_norm(), rows[1].max_norm())
    assert residual == pytest.approx(3 * 0.4 * scale, rel=0.05)


def test_kernel_defect_for_a_constant_potential(constant):
    q = constant_potential(0.3, 0.3)
    field = grad_gamma1(constant, CMatrix.rotation())
    defect = kernel_defect(q, 0.3, field)
    scale = max(field.a.max_norm(), field.b.max_norm())
    assert defect["corrected"] / scale < 1e-7
    assert defect["kappa"] == expected_kappa(field)
    assert abs(defect["kappa_hat"] - defect["kappa"]) < 1e-6 * max(1.0, abs(defect["kappa"]))


def test_kappa_estimate_recovers_the_constant(constant):
    q = constant_potential(0.3, 0.3)
    field = grad_gamma1(constant, CMatrix(c11=1, c12=1, c21=-1))
    defect = kernel_defect(q, 0.3, field)
    assert abs(defect["kappa"]) > 1e-3
    assert abs(defect["kappa_hat"] - defect["kappa"]) < 1e-6 * abs(defect["kappa"])
    # without the correction the rows are kappa (q2, -q1)
    assert defect["raw"] == pytest.approx(abs(defect["kappa"]) * 0.3, rel=1e-5)


def test_kappa_estimate_is_undefined_for_the_free_potential(free):
    rows = determining_operator_apply(zero_potential(), 0.4, grad_gamma1(free, CMatrix.rotation()))
    assert kappa_estimate(zero_potential(), rows) is None


@pytest.mark.parametrize("q,lam", [(zero_potential(), 0.4), (cosine_potential(0.5), 0.3 + 0.1j)])
def test_entrywise_commutator_residuals(q, lam):
    S = monodromy(fundamental_solution(q, lam, settings=TIGHT))
    residuals = novikov_entrywise_residuals(S, q, lam)
    assert len(residuals) == 3
    assert max(residuals) / max(1.0, S.S.max_norm()) < 1e-6
