"""The skew antiderivative, the functional gradient of tr S and the determining operator.

For G(x) = F(x, x0) C F(x, x0)^{-1} with a constant matrix C, the entries a = G21, b = G12 and
c = G11 - G22 satisfy

    a' + 2 lam a - q2 c = 0,    b' - 2 lam b + q1 c = 0,    c' = 2 q1 a - 2 q2 b.

Replacing c by the skew antiderivative of c' leaves the constant kappa = (c(x0) + c(x0 + P)) / 2,
so the determining operator maps (a, b) to kappa (q2, -q1); the kernel check removes it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from steen_lab.errors import DomainError
from steen_lab.numkit.linalg2 import C2Matrix, mat2_adjugate
from steen_lab.numkit.paths import ComplexSpline, SampledPath, central_difference, interior
from steen_lab.potentials.function_spec import ComplexNumber
from steen_lab.potentials.potential import Potential
from steen_lab.dirac.fundamental import FundamentalSolution
from steen_lab.dirac.monodromy import Monodromy

logger = logging.getLogger("steen-lab")

RANGE_SLACK = 1e-9


class CMatrix(BaseModel):
    """Constant 2x2 matrix C of the similarity representation and of the partial solution."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    c11: ComplexNumber = 0j
    c12: ComplexNumber = 0j
    c21: ComplexNumber = 0j
    c22: ComplexNumber = 0j

    @property
    def kappa(self) -> complex:
        """c11 - c22."""
        return self.c11 - self.c22

    def as_array(self) -> C2Matrix:
        return np.array([[self.c11, self.c12], [self.c21, self.c22]], dtype=complex)

    @classmethod
    def from_array(cls, matrix) -> "CMatrix":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise DomainError(f"C must be 2x2, got shape {matrix.shape}.")
        return cls(c11=matrix[0, 0], c12=matrix[0, 1], c21=matrix[1, 0], c22=matrix[1, 1])

    @classmethod
    def e12(cls) -> "CMatrix":
        return cls(c12=1)

    @classmethod
    def rotation(cls) -> "CMatrix":
        """[[0, 1], [-1, 0]]."""
        return cls(c12=1, c21=-1)


@dataclass(frozen=True)
class GradientField:
    """A pair (a, b) on one period, optionally with the diagonal difference c.

    Attributes:
        a (SampledPath): First component.
        b (SampledPath): Second component.
        source (str): "from_C_and_F" or "from_ftilde".
        c (Optional[SampledPath]): G11 - G22 when known.
        cross_check_defect (Optional[float]): Max deviation of the entrywise formulas from the
            off-diagonal entries of F C F^{-1}.
    """
    a: SampledPath
    b: SampledPath
    source: str
    c: Optional[SampledPath] = None
    cross_check_defect: Optional[float] = None

    @classmethod
    def from_ftilde(cls, ftilde: SampledPath, c: Optional[SampledPath] = None) -> "GradientField":
        """The field (-f2**2, f1**2) of a partial solution (payload (f1, f2))."""
        f1, f2 = ftilde.values[:, 0], ftilde.values[:, 1]
        return cls(ftilde.with_values(-f2 ** 2), ftilde.with_values(f1 ** 2), "from_ftilde", c)

    @property
    def grid(self) -> np.ndarray:
        return self.a.grid


class OperatorPreset(Enum):
    NOVIKOV_DERIVED = "novikov-derived"
    AS_PRINTED = "as-printed"


class OperatorCoefficients(BaseModel):
    """Weights and row layout of the determining operator.

    The novikov-derived layout (weights 2, 2) is the one the commutator equation yields; the
    printed layout (weights 1, 1) pairs d/dx with the other component and is kept for reporting.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_weight: float = 2.0
    coupling_weight: float = 2.0
    preset: OperatorPreset = OperatorPreset.NOVIKOV_DERIVED

    @field_validator("lambda_weight", "coupling_weight")
    @classmethod
    def _finite_nonzero(cls, weight: float) -> float:
        if not np.isfinite(weight) or weight == 0:
            raise ValueError(f"operator weights must be finite and nonzero, got {weight}")
        return weight

    @classmethod
    def novikov_derived(cls) -> "OperatorCoefficients":
        return cls(lambda_weight=2.0, coupling_weight=2.0, preset=OperatorPreset.NOVIKOV_DERIVED)

    @classmethod
    def as_printed(cls) -> "OperatorCoefficients":
        return cls(lambda_weight=1.0, coupling_weight=1.0, preset=OperatorPreset.AS_PRINTED)


def dxinv(f: SampledPath, x0: float, P: float) -> SampledPath:
    """Skew antiderivative g(x) = (integral_{x0}^{x} f - integral_{x}^{x0+P} f) / 2.

    Equivalently g(x) = I(x) - I(x0 + P) / 2 with I the running integral from x0, so g' = f and
    g is P-periodic when f has zero mean.

    Args:
        f (SampledPath): Scalar samples covering [x0, x0 + P].
        x0 (float): Left end.
        P (float): Length of the interval (the period).

    Returns:
        SampledPath: g on the grid of `f`, with the spline primitive as dense interpolant.

    Raises:
        DomainError: If the samples do not cover [x0, x0 + P].
    """
    if f.payload_shape:
        raise DomainError(f"The skew antiderivative expects a scalar path, got payload shape {f.payload_shape}.")
    slack = RANGE_SLACK * max(1.0, abs(x0) + abs(P))
    if f.grid[0] > x0 + slack or f.grid[-1] < x0 + P - slack:
        raise DomainError(f"Samples on [{f.grid[0]}, {f.grid[-1]}] do not cover one period [{x0}, {x0 + P}].")
    primitive = ComplexSpline.interpolating(f.grid, f.values).antiderivative()
    offset = complex(primitive(x0)) + 0.5 * complex(primitive(x0 + P) - primitive(x0))
    return SampledPath(f.grid, primitive(f.grid) - offset, f.x0, lambda x: primitive(x) - offset)


def _period_window(F: FundamentalSolution) -> np.ndarray:
    return F.F.values[:F.steps_per_period + 1]


def grad_gamma1(F: FundamentalSolution, C: CMatrix) -> GradientField:
    """(a, b) on the first period of F, from the entrywise formulas in F and C.

    a = c11 f21 f22 - c12 f21**2 + c21 f22**2 - c22 f22 f21
    b = c12 f11**2 - c11 f11 f12 - c21 f12**2 + c22 f12 f11

    These are the off-diagonal entries (G21, G12) of G = F C F^{-1}; the deviation from a direct
    evaluation of G is stored as `cross_check_defect`, and c = G11 - G22 is attached.
    """
    values = _period_window(F)
    f11, f12, f21, f22 = values[:, 0, 0], values[:, 0, 1], values[:, 1, 0], values[:, 1, 1]
    c11, c12, c21, c22 = C.c11, C.c12, C.c21, C.c22
    a = c11 * f21 * f22 - c12 * f21 ** 2 + c21 * f22 ** 2 - c22 * f22 * f21
    b = c12 * f11 ** 2 - c11 * f11 * f12 - c21 * f12 ** 2 + c22 * f12 * f11
    G = values @ C.as_array() @ mat2_adjugate(values)
    defect = float(max(np.max(np.abs(a - G[:, 1, 0])), np.max(np.abs(b - G[:, 0, 1]))))
    template = SampledPath(F.F.grid[:len(values)], a, F.x0)
    return GradientField(template, template.with_values(b), "from_C_and_F",
                         template.with_values(G[:, 0, 0] - G[:, 1, 1]), defect)


def determining_operator_apply(q: Potential, lam: complex, field: GradientField,
                               coeffs: OperatorCoefficients = OperatorCoefficients()) -> Tuple[SampledPath, SampledPath]:
    """Applies the determining operator to (a, b) on one period.

    novikov-derived rows (weights w_lam, w_c):
        R_A = a' + w_lam lam a - w_c q2 D(q1 a) + w_c q2 D(q2 b)
        R_B = b' - w_lam lam b + w_c q1 D(q1 a) - w_c q1 D(q2 b)
    as-printed rows:
        R_1 = w_c q2 D(q2 a) + b' + w_lam lam b - w_c q2 D(q1 b)
        R_2 = a' - w_lam lam a - w_c q1 D(q2 a) + w_c q1 D(q1 b)
    with D the skew antiderivative over [x0, x0 + P]. Rows live on interior grid points.
    """
    grid = field.grid
    x0, P = grid[0], q.period
    q1, q2 = q.evaluate(grid)
    a, b = field.a.values, field.b.values
    w_lam, w_c = coeffs.lambda_weight, coeffs.coupling_weight

    def D(values):
        return interior(dxinv(field.a.with_values(values), x0, P), 2).values

    def inner(values):
        return values[2:-2]

    da = central_difference(field.a, 1).values
    db = central_difference(field.b, 1).values
    iq1, iq2, ia, ib = inner(q1), inner(q2), inner(a), inner(b)
    if coeffs.preset is OperatorPreset.NOVIKOV_DERIVED:
        q1a, q2b = D(q1 * a), D(q2 * b)
        row_a = da + w_lam * lam * ia - w_c * iq2 * q1a + w_c * iq2 * q2b
        row_b = db - w_lam * lam * ib + w_c * iq1 * q1a - w_c * iq1 * q2b
    else:
        row_a = w_c * iq2 * D(q2 * a) + db + w_lam * lam * ib - w_c * iq2 * D(q1 * b)
        row_b = da - w_lam * lam * ia - w_c * iq1 * D(q2 * a) + w_c * iq1 * D(q1 * b)
    template = interior(field.a, 2)
    return template.with_values(row_a), template.with_values(row_b)


def expected_kappa(field: GradientField) -> complex:
    """(c(x0) + c(x0 + P)) / 2, the constant the determining operator leaves behind.

    Raises:
        DomainError: If the field carries no diagonal difference.
    """
    if field.c is None:
        raise DomainError("The field carries no diagonal difference c; build it from F and C.")
    return complex(0.5 * (field.c.values[0] + field.c.values[-1]))


def kappa_estimate(q: Potential, rows: Tuple[SampledPath, SampledPath]) -> Optional[complex]:
    """Least-squares kappa with (R_A, R_B) ~ kappa (q2, -q1); None when q vanishes on the grid."""
    row_a, row_b = rows
    q1, q2 = q.evaluate(row_a.grid)
    norm = float(np.sum(np.abs(q1) ** 2 + np.abs(q2) ** 2))
    if norm <= 1e-300:
        return None
    return complex(np.sum(row_a.values * np.conj(q2) - row_b.values * np.conj(q1)) / norm)


def kernel_defect(q: Potential, lam: complex, field: GradientField) -> dict:
    """Raw and kappa-corrected max-norms of the novikov-derived rows.

    Returns:
        dict: raw, corrected, kappa (the expected constant) and kappa_hat (None for q = 0).
    """
    rows = determining_operator_apply(q, lam, field, OperatorCoefficients.novikov_derived())
    row_a, row_b = rows
    q1, q2 = q.evaluate(row_a.grid)
    kappa = expected_kappa(field) if field.c is not None else 0j
    raw = max(row_a.max_norm(), row_b.max_norm())
    corrected = float(max(np.max(np.abs(row_a.values - kappa * q2)), np.max(np.abs(row_b.values + kappa * q1))))
    kappa_hat = kappa_estimate(q, rows)
    return {"raw": raw, "corrected": corrected, "kappa": kappa, "kappa_hat": kappa_hat}


def novikov_entrywise_residuals(S: Monodromy, q: Potential, lam: complex) -> Tuple[float, float, float]:
    """Max-norms of a' + 2 lam a - q2 c, b' - 2 lam b + q1 c and c' - 2 q1 a + 2 q2 b.

    a = S21, b = S12, c = S11 - S22, on interior grid points.
    """
    path = S.S
    a = path.with_values(path.values[:, 1, 0])
    b = path.with_values(path.values[:, 0, 1])
    c = path.with_values(path.values[:, 0, 0] - path.values[:, 1, 1])
    da, db, dc = (central_difference(p, 1).values for p in (a, b, c))
    ia, ib, ic = (interior(p, 2).values for p in (a, b, c))
    q1, q2 = q.evaluate(interior(a, 2).grid)
    return (
        float(np.max(np.abs(da + 2 * lam * ia - q2 * ic))),
        float(np.max(np.abs(db - 2 * lam * ib + q1 * ic))),
        float(np.max(np.abs(dc - 2 * q1 * ia + 2 * q2 * ib))),
    )
