from steen_lab.config.scenario_config import (
    DeformScenario,
    DiracScenario,
    FullChainScenario,
    IntegratorConfig,
    Scenario,
    ScenarioConfiguration,
    ScenarioDocument,
    SteenScenario,
    SuperpositionConfig,
    alpha_range,
    parse_lambda_grid,
)
