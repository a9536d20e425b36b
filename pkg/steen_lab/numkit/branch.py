"""Branch-tracked square roots along sampled paths."""

import logging
from typing import Optional

import numpy as np

from steen_lab.errors import BranchAmbiguityError
from steen_lab.numkit.paths import SampledPath

logger = logging.getLogger("steen-lab")

ZERO_THRESHOLD = 1e-10


def continuous_sqrt(path: SampledPath, zero_threshold: float = ZERO_THRESHOLD,
                    component: Optional[str] = None) -> SampledPath:
    """Square root of a sampled complex scalar, continued along the grid.

    The first sample takes the principal root. Each following root takes the sign that keeps
    it closest to its predecessor, so the output leaves the principal branch whenever the
    input winds around the origin.

    Args:
        path (SampledPath): Scalar path bounded away from zero.
        zero_threshold (float): Samples with modulus below this are rejected. Defaults to 1e-10.
        component (Optional[str]): Label carried by the error, e.g. "f1".

    Returns:
        SampledPath: Roots s with s**2 equal to the input to rounding.

    Raises:
        BranchAmbiguityError: At the first sample below the threshold.
    """
    values = path.values
    small = np.flatnonzero(np.abs(values) < zero_threshold)
    if small.size:
        x = float(path.grid[small[0]])
        raise BranchAmbiguityError(
            f"Square root is ambiguous at x={x:.17g}: |value| = {abs(values[small[0]]):.3e} is below {zero_threshold:g}.",
            x,
            component,
        )
    principal = np.sqrt(values)
    # flip relative to the predecessor when the opposite sign is closer
    flips = np.abs(principal[1:] - principal[:-1]) > np.abs(principal[1:] + principal[:-1])
    signs = np.concatenate(([1.0], np.cumprod(np.where(flips, -1.0, 1.0))))
    logger.debug(f"continuous_sqrt: {int(np.count_nonzero(flips))} branch switches over {len(path)} samples")
    return path.with_values(principal * signs)
