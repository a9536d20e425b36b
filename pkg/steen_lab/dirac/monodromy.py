"""Monodromy S(x) = F(x + P, x), its trace invariants and the commutator equation dS/dx = [l, S]."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from steen_lab.errors import DomainError
from steen_lab.numkit.integrate import DEFAULT_SETTINGS, IntegratorSettings
from steen_lab.numkit.linalg2 import mat2_adjugate, mat2_commutator, mat2_det, mat2_trace
from steen_lab.numkit.paths import SampledPath, central_difference, interior
from steen_lab.potentials.potential import Potential, dirac_coefficient_matrix
from steen_lab.dirac.fundamental import FundamentalSolution, fundamental_solution

logger = logging.getLogger("steen-lab")


@dataclass(frozen=True)
class Monodromy:
    """S(x) on one period [x0, x0 + P].

    Attributes:
        S (SampledPath): 2x2 payload on the first period of the parent grid.
        lam (complex): Spectral parameter.
        parent (FundamentalSolution): The propagator S was assembled from.
    """
    S: SampledPath
    lam: complex
    parent: FundamentalSolution

    @property
    def at_x0(self) -> np.ndarray:
        return self.S.values[0]

    def det_defect(self) -> float:
        return float(np.max(np.abs(mat2_det(self.S.values) - 1)))

    def trace_defect(self) -> float:
        traces = mat2_trace(self.S.values)
        return float(np.max(np.abs(traces - traces[0])))


@dataclass(frozen=True)
class InvariantSet:
    """gamma[j - 1] = tr S(x0)**j for j = 1..J.

    Attributes:
        gamma (Tuple[complex, ...]): Traces of powers.
        det (complex): det S(x0).
        trace_defect (float): Largest deviation of tr S(x) from tr S(x0) along the period.
    """
    gamma: Tuple[complex, ...]
    det: complex
    trace_defect: float

    @property
    def gamma1(self) -> complex:
        return self.gamma[0]

    def cayley_hamilton_defect(self) -> float:
        """|tr S**2 - (tr S)**2 + 2|; zero for unimodular S."""
        if len(self.gamma) < 2:
            return 0.0
        return abs(self.gamma[1] - self.gamma[0] ** 2 + 2)

    @property
    def multipliers(self) -> Tuple[complex, complex]:
        """Floquet multipliers gamma1 / 2 +- sqrt(gamma1**2 / 4 - 1)."""
        half = self.gamma[0] / 2
        root = np.sqrt(complex(half ** 2 - 1))
        return complex(half + root), complex(half - root)

    def is_stable(self, tol: float = 1e-9) -> bool:
        return all(abs(abs(rho) - 1) <= tol for rho in self.multipliers)


def monodromy(F: FundamentalSolution) -> Monodromy:
    """S(x) = F(x + P, x0) F(x, x0)^{-1} on the first period of F's grid.

    Raises:
        DomainError: If F covers less than two periods.
    """
    n = F.steps_per_period
    if len(F.F) < 2 * n + 1:
        raise DomainError(f"Monodromy needs two periods of samples ({2 * n + 1}), got {len(F.F)}.")
    values = F.F.values[n:2 * n + 1] @ mat2_adjugate(F.F.values[:n + 1])
    S = SampledPath(F.F.grid[:n + 1], values, F.x0)
    logger.debug(f"Monodromy for lam={F.lam}: tr S(x0) = {values[0, 0, 0] + values[0, 1, 1]}")
    return Monodromy(S, F.lam, F)


def invariants(S: Monodromy, J: int = 4) -> InvariantSet:
    """Traces of the first J powers of S(x0)."""
    if J < 1:
        raise DomainError(f"At least one invariant is needed, got J={J}.")
    gamma = tuple(complex(np.trace(np.linalg.matrix_power(S.at_x0, j))) for j in range(1, J + 1))
    return InvariantSet(gamma, complex(mat2_det(S.at_x0)), S.trace_defect())


def novikov_residual(S: Monodromy, q: Potential, lam: complex) -> float:
    """Max-norm of dS/dx - [l, S] over interior grid points."""
    dS = central_difference(S.S, 1)
    inner = interior(S.S, 2)
    l = dirac_coefficient_matrix(q, lam, inner.grid)
    return float(np.max(np.abs(dS.values - mat2_commutator(l, inner.values))))


def similarity_check(F: FundamentalSolution, S: Monodromy) -> float:
    """Max-norm of S(x) - F(x, x0) S(x0) F(x, x0)^{-1} on the period grid."""
    n = len(S.S)
    if not np.array_equal(F.F.grid[:n], S.S.grid):
        raise DomainError("Similarity check needs S sampled on the grid of F.")
    F_period = F.F.values[:n]
    conjugated = F_period @ S.at_x0 @ mat2_adjugate(F_period)
    return float(np.max(np.abs(S.S.values - conjugated)))


@dataclass(frozen=True)
class LambdaScanRow:
    lam: complex
    gamma1: complex
    det_defect: float
    novikov_residual: float


def _scan_one(q: Potential, lam: complex, x0: float, settings: IntegratorSettings) -> LambdaScanRow:
    F = fundamental_solution(q, lam, x0, settings=settings)
    S = monodromy(F)
    return LambdaScanRow(complex(lam), invariants(S, 1).gamma1, S.det_defect(), novikov_residual(S, q, lam))


def lambda_scan(q: Potential, lambdas: Sequence[complex], settings: IntegratorSettings = DEFAULT_SETTINGS,
                x0: float = 0.0, jobs: int = 1) -> List[LambdaScanRow]:
    """Monodromy trace, det defect and commutator residual for each lam, in input order."""
    logger.info(f"Scanning {len(lambdas)} spectral parameters with {jobs} worker(s)")
    if jobs <= 1:
        return [_scan_one(q, lam, x0, settings) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda lam: _scan_one(q, lam, x0, settings), lambdas))
