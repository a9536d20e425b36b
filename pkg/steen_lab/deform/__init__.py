from steen_lab.deform.flow import (
    DeformationState,
    DeformedFlow,
    alpha_closed_form,
    alpha_consistency_defect,
    deformation_vector,
    integrate_deformed,
)
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
from steen_lab.deform.partial_solution import PartialSolution, build_partial_solution
from steen_lab.deform.theorem import (
    AlphaScan,
    GradientComparison,
    gradient_fd_check,
    implied_alpha,
    implied_deformation,
    scan_alpha,
    verify_theorem1,
)
