"""Bundled scenario suites."""

from steen_lab.deform.operators import CMatrix
from steen_lab.potentials.potential import (
    constant_coefficient,
    constant_potential,
    cosine_potential,
    mathieu_omega,
    zero_potential,
)

# Positive-definite triples (A, B, C): the quadratic form of two real independent solutions never vanishes.
POSITIVE_TRIPLES = [
    (1.0, 0.2, 2.0), (3.0, -0.5, 1.0), (0.5, 0.1, 0.8), (2.0, 1.0, 3.0), (4.0, -1.5, 2.0),
    (1.5, 0.7, 1.0), (2.5, 0.0, 0.5), (0.8, -0.3, 3.5), (3.0, 1.2, 1.5), (1.0, -0.9, 4.0),
]

SPECTRAL_SAMPLES = [[0.4, 0.0], [0.0, 0.5], [0.3, 0.2]]


def _dump(model) -> dict:
    return model.model_dump(mode="json")


def _triples(triples):
    return [{"A": A, "B": B, "C": C} for A, B, C in triples]


def default_suite() -> dict:
    """The acceptance suite as a scenario document.

    Every scenario runs with DOP853 at 1e-12 on 2048 report intervals per period.
    """
    tight = {"method": "DOP853", "abs_tol": 1e-12, "rel_tol": 1e-12}
    harmonic = _dump(constant_coefficient(-1.0))
    return {
        "integrator": tight,
        "scenarios": [
            {
                "kind": "steen",
                "name": "steen-harmonic",
                "coefficient": harmonic,
                "superpositions": [
                    {"A": 1, "B": 0, "C": 1, "k": 1},
                    {"A": 4, "B": 0, "C": 1, "k": 4},
                ] + _triples(POSITIVE_TRIPLES),
            },
            {
                "kind": "steen",
                "name": "steen-perfect-square",
                "coefficient": harmonic,
                "x1": 2.0,
                "superpositions": [{"A": 1, "B": 1, "C": 1, "k": 0}],
            },
            {
                "kind": "steen",
                "name": "steen-convention",
                "coefficient": _dump(constant_coefficient(1.0)),
                "convention": "steen",
                "superpositions": [{"A": 1, "B": 0, "C": 1, "k": 1}, {"A": 4, "B": 0, "C": 1, "k": 4}],
            },
            {
                "kind": "steen",
                "name": "steen-mathieu",
                "coefficient": _dump(mathieu_omega(0.3)),
                "superpositions": [{"A": 2, "B": 0.5, "C": 1}] + _triples(POSITIVE_TRIPLES),
            },
            {
                "kind": "dirac",
                "name": "dirac-free",
                "potential": _dump(zero_potential()),
                "lambdas": SPECTRAL_SAMPLES + [[0.5, 0.0]],
                "lambda_grid": "0:0.4:5,0:0.4:5",
            },
            {
                "kind": "dirac",
                "name": "dirac-constant",
                "potential": _dump(constant_potential(0.3, 0.3)),
                "lambdas": SPECTRAL_SAMPLES,
            },
            {
                "kind": "dirac",
                "name": "dirac-cosine",
                "potential": _dump(cosine_potential(0.5)),
                "lambdas": SPECTRAL_SAMPLES,
            },
            {
                "kind": "deform",
                "name": "deform-free",
                "potential": _dump(zero_potential()),
                "lam": [0.5, 0.0],
                "gradient_directions": 5,
            },
            {
                "kind": "deform",
                "name": "deform-constant",
                "potential": _dump(constant_potential(0.3, 0.3)),
                "lam": [0.4, 0.0],
                "gradient_directions": 5,
            },
            {
                "kind": "deform",
                "name": "deform-cosine",
                "potential": _dump(cosine_potential(0.5)),
                "lam": [0.4, 0.0],
                "gradient_directions": 5,
            },
            {
                "kind": "deform",
                "name": "deform-kappa",
                "potential": _dump(constant_potential(0.3, 0.3)),
                "lam": [0.4, 0.0],
                "C": _dump(CMatrix(c11=1, c12=1, c21=-1)),
            },
            {
                "kind": "full-chain",
                "name": "full-chain-constant",
                "coefficient": harmonic,
                "superpositions": [{"A": 4, "B": 0, "C": 1, "k": 4}],
                "potential": _dump(constant_potential(0.3, 0.3)),
                "lam": [0.4, 0.0],
            },
        ],
    }


SUITES = {"default": default_suite}
