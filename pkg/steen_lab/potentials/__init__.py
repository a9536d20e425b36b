from steen_lab.potentials.function_spec import (
    CombinationSpec,
    ComplexNumber,
    ConstantSpec,
    FourierSpec,
    FunctionSpec,
    SamplesSpec,
    ZeroSpec,
    fourier_cosine,
    fourier_sine,
    parse_complex,
)
from steen_lab.potentials.potential import (
    Potential,
    ScalarCoefficient,
    constant_coefficient,
    constant_potential,
    cosine_potential,
    dirac_coefficient_matrix,
    eval_potential,
    load_potential,
    mathieu_omega,
    perturbed,
    random_fourier_potential,
    zero_potential,
)
