"""Explicit partial solutions f = (sqrt(b), sqrt(-a)) built from the gradient field of tr S."""

import logging
from dataclasses import dataclass

import numpy as np

from steen_lab.numkit.branch import ZERO_THRESHOLD, continuous_sqrt
from steen_lab.numkit.paths import SampledPath
from steen_lab.dirac.fundamental import FundamentalSolution
from steen_lab.deform.operators import CMatrix, GradientField, grad_gamma1

logger = logging.getLogger("steen-lab")


@dataclass(frozen=True)
class PartialSolution:
    """f on one period (payload (f1, f2)) and the field it was built from."""
    ftilde: SampledPath
    field: GradientField
    C: CMatrix

    @property
    def f1(self) -> SampledPath:
        return self.ftilde.with_values(self.ftilde.values[:, 0])

    @property
    def f2(self) -> SampledPath:
        return self.ftilde.with_values(self.ftilde.values[:, 1])


def build_partial_solution(F: FundamentalSolution, C: CMatrix, zero_threshold: float = ZERO_THRESHOLD) -> PartialSolution:
    """f1 = sqrt(b), f2 = sqrt(-a) with (a, b) = grad_gamma1(F, C), both branch-tracked.

    f1**2 = c12 f11**2 - c11 f11 f12 - c21 f12**2 + c22 f12 f11
    f2**2 = c12 f21**2 - c11 f21 f22 + c22 f22 f21 - c21 f22**2

    Raises:
        BranchAmbiguityError: If either quadratic form reaches the zero-threshold (component
            'f1' or 'f2').
    """
    field = grad_gamma1(F, C)
    f1 = continuous_sqrt(field.b, zero_threshold, component="f1")
    f2 = continuous_sqrt(field.a.with_values(-field.a.values), zero_threshold, component="f2")
    ftilde = f1.with_values(np.stack([f1.values, f2.values], axis=1))
    logger.debug(f"Partial solution on [{ftilde.grid[0]}, {ftilde.grid[-1]}] for lam={F.lam}")
    return PartialSolution(ftilde, field, C)
