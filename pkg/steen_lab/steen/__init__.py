from steen_lab.steen.oscillator import Convention, OscillatorSolution, WronskianResult, solve_oscillator, wronskian
from steen_lab.steen.superposition import (
    ProductJet,
    SuperpositionCoeffs,
    SuperpositionResult,
    cubic_invariance_residual,
    pinney_residual,
    pinney_superpose,
    product_jet,
    superposition_coefficients_for,
    verify_superposition_identity,
)
