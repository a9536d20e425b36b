from math import pi

import numpy as np
import pytest

from steen_lab.errors import BranchAmbiguityError, DomainError, SingularityError
from steen_lab.numkit.integrate import IntegrationMethod, IntegratorSettings
from steen_lab.numkit.paths import SampledPath, central_difference, interior, uniform_grid
from steen_lab.potentials.potential import constant_coefficient, mathieu_omega
from steen_lab.report import Verdict
from steen_lab.steen.oscillator import Convention, solve_oscillator
from steen_lab.steen.superposition import (
    SuperpositionCoeffs,
    cubic_invariance_residual,
    integrate_pinney,
    pinney_residual,
    pinney_superpose,
    product_jet,
    superposition_coefficients_for,
    superposition_slope,
    verify_superposition_identity,
)
from steen_lab.suites import POSITIVE_TRIPLES

TIGHT = IntegratorSettings(method=IntegrationMethod.DOP853, abs_tol=1e-12, rel_tol=1e-12, samples_per_period=2048)
HARMONIC = constant_coefficient(-1.0)


def _pair(coefficient, x1=2 * pi):
    u = solve_oscillator(coefficient, Convention.OMEGA, 1, 0, 0.0, x1, TIGHT)
    v = solve_oscillator(coefficient, Convention.OMEGA, 0, 1, 0.0, x1, TIGHT)
    return u, v


@pytest.fixture(scope="module")
def harmonic_pair():
    return _pair(HARMONIC)


@pytest.fixture(scope="module")
def mathieu_pair():
    return _pair(mathieu_omega(0.3))


def _analytic(function, n=1024):
    grid = uniform_grid(0.0, 2 * pi, n)
    return SampledPath(grid, function(grid), 0.0)


def test_unit_circle_superposition(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(1, 0, 1))
    assert result.k_implied == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(result.z.values - 1)) < 1e-9


def test_ellipse_superposition(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(4, 0, 1))
    assert result.z.values[0] == pytest.approx(2.0, abs=1e-12)
    assert result.z.at(pi / 2) == pytest.approx(1.0, abs=1e-8)
    assert result.k_implied == pytest.approx(4.0, abs=1e-9)
    assert pinney_residual(result.z, HARMONIC, Convention.OMEGA, 4.0, square=result.square) < 1e-7


def test_perfect_square_gives_the_linear_equation():
    u, v = _pair(HARMONIC, x1=2.0)
    result = pinney_superpose(u, v, SuperpositionCoeffs(1, 1, 1))
    assert abs(result.k_implied) < 1e-9
    assert pinney_residual(result.z, HARMONIC, Convention.OMEGA, 0.0, square=result.square) < 1e-7


def test_vanishing_quadratic_form_is_rejected(harmonic_pair):
    # (cos + sin)^2 vanishes at 3 pi / 4
    with pytest.raises(BranchAmbiguityError) as excinfo:
        pinney_superpose(*harmonic_pair, SuperpositionCoeffs(1, 1, 1))
    assert excinfo.value.abscissa == pytest.approx(3 * pi / 4, abs=0.05)
    assert excinfo.value.component == "z"


def test_product_form_halves_the_cross_term():
    coeffs = SuperpositionCoeffs.from_product_form(2.0, 1.0, 3.0, k=5.0)
    assert (coeffs.A, coeffs.B, coeffs.C, coeffs.k) == (2.0, 0.5, 3.0, 5.0)
    assert coeffs.discriminant == pytest.approx(5.75)


@pytest.mark.parametrize("triple", POSITIVE_TRIPLES[:5])
def test_random_triples_solve_the_pinney_equation(harmonic_pair, mathieu_pair, triple):
    for u, v in (harmonic_pair, mathieu_pair):
        result = pinney_superpose(u, v, SuperpositionCoeffs(*triple))
        assert pinney_residual(result.z, u.coefficient, u.convention, result.k_implied, square=result.square) < 1e-7


def test_pinney_residual_of_analytic_paths():
    ones = _analytic(np.ones_like)
    assert pinney_residual(ones, HARMONIC, Convention.OMEGA, 1.0) < 1e-10
    cosine = SampledPath(uniform_grid(0.0, 1.0, 256), np.cos(uniform_grid(0.0, 1.0, 256)), 0.0)
    assert pinney_residual(cosine, HARMONIC, Convention.OMEGA, 0.0) < 1e-7


def test_pinney_residual_rejects_zeros():
    with pytest.raises(SingularityError, match="z vanishes"):
        pinney_residual(_analytic(np.cos, 256), HARMONIC, Convention.OMEGA, 1.0)


@pytest.mark.parametrize("form", ["expanded", "divergence"])
def test_cubic_invariance_of_analytic_products(form):
    product = _analytic(lambda t: 0.5 * np.sin(2 * t))
    assert cubic_invariance_residual(product, HARMONIC, form) < 1e-7
    assert cubic_invariance_residual(_analytic(np.ones_like), HARMONIC, form) < 1e-10


@pytest.mark.parametrize("form", ["expanded", "divergence"])
def test_cubic_invariance_of_mathieu_products(form):
    omega = mathieu_omega(0.3)
    u, v = _pair(omega)
    assert cubic_invariance_residual(product_jet(u, v, 0, 0.5, 0), omega, form) < 1e-7
    # exact linear combinations of products satisfy the same equation
    combination = product_jet(u, v, -0.5, 1, 0)
    assert cubic_invariance_residual(combination, omega, form) < 1e-7


def test_product_jet_matches_the_sampled_products(mathieu_pair):
    u, v = mathieu_pair
    jet = product_jet(u, v, 2, 0.5, 1)
    y_u, y_v = u.y.values, v.y.values
    assert np.max(np.abs(jet.value.values - (2 * y_u ** 2 + y_u * y_v + y_v ** 2))) < 1e-14
    # alpha' against a difference of the samples, far above the stencil noise
    d1 = central_difference(jet.value, 1)
    assert np.max(np.abs(interior(jet.first, 2).values - d1.values)) < 1e-6


def test_unit_circle_residuals_are_at_solver_accuracy(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(1, 0, 1))
    assert pinney_residual(result.z, HARMONIC, Convention.OMEGA, result.k_implied, square=result.square) < 1e-9
    for form in ("expanded", "divergence"):
        assert cubic_invariance_residual(result.square, HARMONIC, form) < 1e-8


def test_pinney_residual_needs_a_shared_grid(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(4, 0, 1))
    shifted = SampledPath(result.z.grid + 0.1, result.z.values, 0.1)
    with pytest.raises(DomainError, match="share a grid"):
        pinney_residual(shifted, HARMONIC, Convention.OMEGA, 4.0, square=result.square)


def test_cubic_invariance_is_subadditive():
    first = _analytic(lambda t: np.sin(t) ** 2)
    second = _analytic(lambda t: np.exp(0.1 * t))
    total = first.with_values(first.values + second.values)
    bound = cubic_invariance_residual(first, HARMONIC) + cubic_invariance_residual(second, HARMONIC)
    assert cubic_invariance_residual(total, HARMONIC) <= bound + 1e-12


def test_cubic_invariance_of_z_squared(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(4, 0, 1))
    assert cubic_invariance_residual(result.square, HARMONIC) < 1e-7
    assert cubic_invariance_residual(result.square, HARMONIC, "divergence") < 1e-7


def test_cubic_invariance_errors():
    short = SampledPath(uniform_grid(0.0, 1.0, 5), np.ones(6), 0.0)
    with pytest.raises(DomainError, match="at least 7"):
        cubic_invariance_residual(short, HARMONIC)
    with pytest.raises(DomainError, match="Unknown residual form"):
        cubic_invariance_residual(_analytic(np.ones_like), HARMONIC, form="weak")


def test_coefficients_for_initial_data(harmonic_pair):
    coeffs = superposition_coefficients_for(2.0, 0.0, 4.0, *harmonic_pair)
    assert (coeffs.A, coeffs.B, coeffs.C) == pytest.approx((4.0, 0.0, 1.0), abs=1e-12)
    general = superposition_coefficients_for(1.5, 0.3, 2.0, *harmonic_pair)
    result = pinney_superpose(*harmonic_pair, general)
    assert result.z.values[0] == pytest.approx(1.5, abs=1e-12)
    assert superposition_slope(result, *harmonic_pair) == pytest.approx(0.3, abs=1e-12)
    assert result.k_implied == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(SingularityError):
        superposition_coefficients_for(0.0, 1.0, 1.0, *harmonic_pair)
    u, _ = harmonic_pair
    with pytest.raises(DomainError, match="independent"):
        superposition_coefficients_for(1.0, 0.0, 1.0, u, u)


def test_direct_integration_matches_superposition(harmonic_pair):
    result = pinney_superpose(*harmonic_pair, SuperpositionCoeffs(4, 0, 1))
    direct = integrate_pinney(HARMONIC, Convention.OMEGA, 2.0, 0.0, 4.0, result.z.grid, TIGHT)
    assert np.max(np.abs(direct.values - result.z.values)) < 1e-7


@pytest.mark.parametrize("coeffs", [SuperpositionCoeffs(1, 0, 1, k=1), SuperpositionCoeffs(4, 0, 1, k=4)])
def test_verify_harmonic_superposition(harmonic_pair, coeffs):
    report = verify_superposition_identity(*harmonic_pair, coeffs, settings=TIGHT)
    assert report.passed, [r for r in report.records if r.verdict is not Verdict.PASS]
    for check_id in ("steen.wronskian_constancy", "steen.pinney_residual", "steen.cubic_invariance_z2",
                     "steen.cubic_invariance_uv", "steen.k_relation", "steen.direct_integration"):
        assert report.record(check_id).verdict is Verdict.PASS
    assert report.record("steen.printed_sign_relation").verdict is Verdict.REPORTED_ONLY
    assert set(report.traces) == {"superposition"}


def test_verify_mathieu_superposition(mathieu_pair):
    report = verify_superposition_identity(*mathieu_pair, SuperpositionCoeffs(2, 0.5, 1))
    assert report.passed, [r for r in report.records if r.verdict is not Verdict.PASS]
    k_implied = report.record("steen.k_implied")
    assert k_implied.verdict is Verdict.REPORTED_ONLY
    # W = 1 for the standard initial data
    assert k_implied.value == pytest.approx(2 * 1 - 0.25, abs=1e-8)


def test_verify_reports_a_wrong_target_k(harmonic_pair):
    report = verify_superposition_identity(*harmonic_pair, SuperpositionCoeffs(4, 0, 1, k=1))
    assert report.record("steen.k_relation").verdict is Verdict.FAIL
    assert not report.passed


def test_tolerance_overrides(harmonic_pair):
    report = verify_superposition_identity(*harmonic_pair, SuperpositionCoeffs(4, 0, 1),
                                           tolerances={"steen.pinney_residual": 1e-30})
    assert report.record("steen.pinney_residual").verdict is Verdict.FAIL
    assert report.record("steen.pinney_residual").tolerance == 1e-30
