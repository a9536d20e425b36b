"""Scenario documents: schema, defaults and loaders.

A document is a JSON object (YAML is accepted too) of the form

    {
      "integrator": {"method": "RK45", "abs_tol": 1e-10, ...},
      "scenarios": [
        {"kind": "dirac", "name": "free", "potential": {...}, "lambdas": [[0, 0.5]]},
        ...
      ]
    }

Each scenario selects its pipeline by `kind` (steen, dirac, deform, full-chain). Complex numbers
are [re, im] pairs.
"""

import json
import logging
from math import inf
from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError

from steen_lab.errors import ConfigError, json_pointer
from steen_lab.numkit.integrate import IntegrationMethod, IntegratorSettings
from steen_lab.potentials.function_spec import SPEC_TAGS, ComplexNumber
from steen_lab.potentials.potential import Potential, ScalarCoefficient
from steen_lab.steen.oscillator import Convention
from steen_lab.deform.operators import CMatrix

logger = logging.getLogger("steen-lab")

SCENARIO_KINDS = frozenset({"steen", "dirac", "deform", "full-chain"})


def alpha_range(low: float = -1.0, high: float = 1.0, steps: int = 41) -> List[complex]:
    """Evenly spaced real alpha_bar values, inclusive."""
    return [complex(value) for value in np.linspace(low, high, steps)]


def parse_lambda_grid(text: str) -> List[complex]:
    """Parses 're0:re1:nre,im0:im1:nim' (inclusive in each axis) or a single complex 'a+bj'.

    Raises:
        ConfigError: If the text matches neither form.
    """
    text = text.strip()
    try:
        if "," in text:
            real_axis, imag_axis = (part.split(":") for part in text.split(","))
            re0, re1, nre = float(real_axis[0]), float(real_axis[1]), int(real_axis[2])
            im0, im1, nim = float(imag_axis[0]), float(imag_axis[1]), int(imag_axis[2])
            return [complex(re, im) for re in np.linspace(re0, re1, nre) for im in np.linspace(im0, im1, nim)]
        return [complex(text.replace(" ", ""))]
    except (ValueError, IndexError) as e:
        raise ConfigError(f"Invalid lambda grid '{text}': expected 're0:re1:nre,im0:im1:nim' or 'a+bj'.") from e


class _Model(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class IntegratorConfig(_Model):
    """Integrator section; `max_step` null means unbounded."""
    method: IntegrationMethod = IntegrationMethod.RK45
    abs_tol: PositiveFloat = 1e-10
    rel_tol: PositiveFloat = 1e-10
    max_step: Optional[PositiveFloat] = None
    min_step: PositiveFloat = 1e-14
    samples_per_period: PositiveInt = 2048

    def to_settings(self) -> IntegratorSettings:
        return IntegratorSettings(
            method=self.method,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_step=inf if self.max_step is None else self.max_step,
            min_step=self.min_step,
            samples_per_period=self.samples_per_period,
        )


class SuperpositionConfig(_Model):
    """One coefficient triple; `cross_form` reads B as the full coefficient of u v."""
    A: ComplexNumber
    B: ComplexNumber = 0j
    C: ComplexNumber
    k: Optional[ComplexNumber] = None
    cross_form: bool = False


class _ScenarioBase(_Model):
    name: str = Field(min_length=1)
    integrator: Optional[IntegratorConfig] = None
    tolerances: Dict[str, PositiveFloat] = Field(default_factory=dict)


class SteenScenario(_ScenarioBase):
    kind: Literal["steen"] = "steen"
    coefficient: ScalarCoefficient
    convention: Convention = Convention.OMEGA
    x0: float = 0.0
    x1: Optional[float] = None
    u: List[ComplexNumber] = Field(default_factory=lambda: [1 + 0j, 0j], min_length=2, max_length=2)
    v: List[ComplexNumber] = Field(default_factory=lambda: [0j, 1 + 0j], min_length=2, max_length=2)
    superpositions: List[SuperpositionConfig] = Field(min_length=1)


class DiracScenario(_ScenarioBase):
    kind: Literal["dirac"] = "dirac"
    potential: Potential
    lambdas: List[ComplexNumber] = Field(default_factory=list)
    lambda_grid: Optional[str] = None
    x0: float = 0.0
    invariant_count: PositiveInt = 4

    def all_lambdas(self) -> List[complex]:
        extra = parse_lambda_grid(self.lambda_grid) if self.lambda_grid else []
        return list(self.lambdas) + extra


class DeformScenario(_ScenarioBase):
    kind: Literal["deform"] = "deform"
    potential: Potential
    lam: ComplexNumber
    C: CMatrix = Field(default_factory=CMatrix.rotation)
    alpha_grid: List[ComplexNumber] = Field(default_factory=alpha_range)
    flow_alpha: ComplexNumber = 0.1 + 0j
    gradient_directions: int = Field(default=0, ge=0)
    seed: int = 0
    x0: float = 0.0


class FullChainScenario(_ScenarioBase):
    """Oscillator superposition, monodromy and partial solution for one parameter set."""
    kind: Literal["full-chain"] = "full-chain"
    coefficient: ScalarCoefficient
    convention: Convention = Convention.OMEGA
    superpositions: List[SuperpositionConfig] = Field(min_length=1)
    potential: Potential
    lam: ComplexNumber
    C: CMatrix = Field(default_factory=CMatrix.rotation)
    alpha_grid: List[ComplexNumber] = Field(default_factory=alpha_range)
    flow_alpha: ComplexNumber = 0.1 + 0j
    gradient_directions: int = Field(default=0, ge=0)
    seed: int = 0
    x0: float = 0.0


Scenario = Annotated[
    Union[SteenScenario, DiracScenario, DeformScenario, FullChainScenario],
    Field(discriminator="kind"),
]


class ScenarioDocument(_Model):
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    scenarios: List[Scenario] = Field(default_factory=list)


class ScenarioConfiguration:
    """Holds the scenarios of a run.

    Attributes:
        integrator (IntegratorConfig): Document-wide integrator defaults.
        scenarios (List[Scenario]): Scenarios in document order.
    """
    def __init__(self):
        self.integrator: IntegratorConfig = IntegratorConfig()
        self.scenarios: List[Scenario] = []

    def settings_for(self, scenario: Scenario) -> IntegratorSettings:
        """The scenario's integrator settings, falling back to the document defaults."""
        return (scenario.integrator or self.integrator).to_settings()

    def get_scenario(self, name: str) -> Scenario:
        """Retrieves a scenario by name.

        Raises:
            ValueError: If no scenario has that name.
        """
        for scenario in self.scenarios:
            if scenario.name == name:
                return scenario
        raise ValueError(f"Scenario '{name}' is not configured. Available scenarios: {[s.name for s in self.scenarios]}")

    def load_from_dict(self, config_data: Dict):
        """Validates a document and appends its scenarios.

        Args:
            config_data (Dict): The parsed document.

        Raises:
            ConfigError: On schema violations or duplicate names; `pointer` locates the field.
        """
        try:
            document = ScenarioDocument.model_validate(config_data if config_data is not None else {})
        except ValidationError as e:
            first = e.errors()[0]
            pointer = json_pointer(first["loc"], SPEC_TAGS | SCENARIO_KINDS)
            raise ConfigError(f"Invalid scenario document at '{pointer}': {first['msg']}", pointer) from e
        names = {scenario.name for scenario in self.scenarios}
        for index, scenario in enumerate(document.scenarios):
            if scenario.name in names:
                raise ConfigError(f"Scenario name '{scenario.name}' is used twice.", f"/scenarios/{index}/name")
            names.add(scenario.name)
        self.integrator = document.integrator
        self.scenarios.extend(document.scenarios)
        logger.info(f"Loaded {len(document.scenarios)} scenario(s)")

    def load_from_yaml(self, yaml_file_path: str):
        """Loads scenarios from a YAML file.

        Raises:
            ConfigError: If the file is not found, cannot be parsed, or fails validation.
        """
        try:
            with open(yaml_file_path, "r") as file:
                config_data = yaml.safe_load(file)
        except FileNotFoundError as e:
            raise ConfigError(f"YAML file '{yaml_file_path}' not found.") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing YAML file '{yaml_file_path}': {e}") from e
        self.load_from_dict(config_data)

    def load_from_json(self, json_file_path: str):
        """Loads scenarios from a JSON file.

        Raises:
            ConfigError: If the file is not found, cannot be parsed, or fails validation.
        """
        try:
            with open(json_file_path, "r") as file:
                config_data = json.load(file)
        except FileNotFoundError as e:
            raise ConfigError(f"JSON file '{json_file_path}' not found.") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Error parsing JSON file '{json_file_path}': {e}") from e
        self.load_from_dict(config_data)

    def load_from_file(self, path: str):
        """Dispatches on the extension: .yaml/.yml are YAML, everything else JSON."""
        if path.endswith((".yaml", ".yml")):
            self.load_from_yaml(path)
        else:
            self.load_from_json(path)
