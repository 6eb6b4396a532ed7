"""Size co-located data-center microgrids by trading embodied against operational carbon."""

__version__ = "0.1.0"

from .carbon import EmbodiedFactors, EmissionProfile, crossover_time, embodied, operational, project
from .config import ScenarioConfig, build_scenario, load_config
from .estimators import (ExhaustiveSearch, GreedyDiversitySelector, KMeansSelector, NSGA2Search,
                         ThresholdSelector)
from .exceptions import ConfigError, MicrogridError, TraceError
from .optimize import (ParameterSpace, ParetoFront, SearchConfig, exhaustive_run, nsga2_run,
                       parameter_grid)
from .simulate import Composition, Scenario, SimulationMetrics, run_simulation

__all__ = [
    "Composition", "ConfigError", "EmbodiedFactors", "EmissionProfile", "ExhaustiveSearch",
    "GreedyDiversitySelector", "KMeansSelector", "MicrogridError", "NSGA2Search", "ParameterSpace",
    "ParetoFront", "Scenario", "ScenarioConfig", "SearchConfig", "SimulationMetrics",
    "ThresholdSelector", "TraceError", "build_scenario", "crossover_time", "embodied",
    "exhaustive_run", "load_config", "nsga2_run", "operational", "parameter_grid", "project",
    "run_simulation",
]
