"""Complex 2-vectors and 2x2 matrices.

C2Vector and C2Matrix are plain complex numpy arrays of shape (2,) and (2, 2). Helpers accept
stacks (..., 2, 2) so the grid-wide computations stay vectorised.
"""

from math import factorial
from typing import Sequence

import numpy as np

C2Vector = np.ndarray
C2Matrix = np.ndarray

IDENTITY = np.eye(2, dtype=complex)
MU_SERIES_THRESHOLD = 1e-6
_SERIES_TERMS = 6
_COSH_COEFFS = np.array([1 / factorial(2 * n) for n in range(_SERIES_TERMS)])
_SINHC_COEFFS = np.array([1 / factorial(2 * n + 1) for n in range(_SERIES_TERMS)])


def c2vector(v1: complex, v2: complex) -> C2Vector:
    return np.array([v1, v2], dtype=complex)


def c2matrix(m11: complex, m12: complex, m21: complex, m22: complex) -> C2Matrix:
    return np.array([[m11, m12], [m21, m22]], dtype=complex)


def as_c2matrix(rows: Sequence[Sequence[complex]]) -> C2Matrix:
    matrix = np.asarray(rows, dtype=complex)
    if matrix.shape != (2, 2):
        raise ValueError(f"Expected a 2x2 matrix, got shape {matrix.shape}.")
    return matrix


def mat2_trace(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] + m[..., 1, 1]


def mat2_det(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def mat2_adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate; equals the inverse for unimodular matrices."""
    adj = np.empty_like(m, dtype=complex)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    adj[..., 1, 1] = m[..., 0, 0]
    return adj


def mat2_inv_unimodular(m: np.ndarray) -> np.ndarray:
    return mat2_adjugate(m)


def mat2_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _polynomial(coefficients: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Horner in z, lowest-order coefficient first
    result = np.zeros_like(z, dtype=complex)
    for c in coefficients[::-1]:
        result = result * z + c
    return result


def mat2_exp(m: np.ndarray) -> np.ndarray:
    """Closed-form exponential of a 2x2 complex matrix (or a stack of them).

    exp(M) = e^{tau/2} (cosh(mu) I + sinh(mu)/mu (M - tau/2 I)) with tau = tr M and
    mu^2 = (tau/2)^2 - det M. For |mu| < 1e-6 both cosh(mu) and sinh(mu)/mu are taken from their
    Taylor series in mu^2, which avoids the 0/0 of the nilpotent and scalar cases.

    Args:
        m (np.ndarray): Matrix of shape (2, 2) or (..., 2, 2).

    Returns:
        np.ndarray: exp(m), same shape.
    """
    m = np.asarray(m, dtype=complex)
    half_trace = 0.5 * mat2_trace(m)
    shifted = m - half_trace[..., None, None] * IDENTITY
    mu_squared = -mat2_det(shifted)
    mu = np.sqrt(mu_squared)
    small = np.abs(mu) < MU_SERIES_THRESHOLD
    safe_mu = np.where(small, 1.0, mu)
    cosh = np.where(small, _polynomial(_COSH_COEFFS, mu_squared), np.cosh(safe_mu))
    sinhc = np.where(small, _polynomial(_SINHC_COEFFS, mu_squared), np.sinh(safe_mu) / safe_mu)
    scale = np.exp(half_trace)[..., None, None]
    return scale * (cosh[..., None, None] * IDENTITY + sinhc[..., None, None] * shifted)
