"""Headless deterministic sailing-vessel simulator with an episodic
(reset/step) interface, a scripted mission baseline, and a TCP wire
protocol for remote trainers."""

from .episode import (
    Action,
    BaselineController,
    EnvConfig,
    EpisodeLog,
    Mission,
    SailingEnv,
    StepResult,
    default_mission,
    run_scripted_baseline,
)
from .errors import (
    ConfigurationError,
    EpisodeContractError,
    GimbalLockError,
    IntegrationBlowupError,
    SailsimError,
)
from .sensing import Observation, OBSERVATION_FIELDS, SensorNoise
from .vessel import (
    CoefficientTable,
    FoilParams,
    VesselParams,
    VesselState,
    default_eboat_params,
    validate_params,
)
from .world import WaveComponent, WaveField, WindProcess

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BaselineController",
    "CoefficientTable",
    "ConfigurationError",
    "EnvConfig",
    "EpisodeContractError",
    "EpisodeLog",
    "FoilParams",
    "GimbalLockError",
    "IntegrationBlowupError",
    "Mission",
    "Observation",
    "OBSERVATION_FIELDS",
    "SailingEnv",
    "SailsimError",
    "SensorNoise",
    "StepResult",
    "VesselParams",
    "VesselState",
    "WaveComponent",
    "WaveField",
    "WindProcess",
    "default_eboat_params",
    "default_mission",
    "run_scripted_baseline",
    "validate_params",
]
