from steen_lab.dirac.fundamental import (
    FundamentalSolution,
    cocycle_defect,
    fundamental_solution,
    period_grid,
    period_map,
    propagate,
)
from steen_lab.dirac.monodromy import (
    InvariantSet,
    LambdaScanRow,
    Monodromy,
    invariants,
    lambda_scan,
    monodromy,
    novikov_residual,
    similarity_check,
)
