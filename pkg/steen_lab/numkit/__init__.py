from steen_lab.numkit.branch import ZERO_THRESHOLD, continuous_sqrt
from steen_lab.numkit.integrate import (
    DEFAULT_SETTINGS,
    IntegrationMethod,
    IntegratorSettings,
    integrate_linear_system,
    integrate_nonlinear_system,
)
from steen_lab.numkit.linalg2 import (
    IDENTITY,
    c2matrix,
    c2vector,
    mat2_adjugate,
    mat2_commutator,
    mat2_det,
    mat2_exp,
    mat2_inv_unimodular,
    mat2_trace,
)
from steen_lab.numkit.paths import SampledPath, central_difference, interior, report_grid, uniform_grid
from steen_lab.numkit.quadrature import cumulative_quadrature, periodic_quadrature
