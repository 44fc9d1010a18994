"""Optical-flow-divergence landing simulator with INDI and PID controllers."""
from .analysis import (LandingMetrics, affine_model_residual, exp_decay_fit, landing_metrics, rmse,
                       tune_pid)
from .config import load_scenario, scenario_from_raw
from .control import ControllerConfig, IndiController, PidConfig, PidController, PidGains
from .dynamics import (ControlCommand, Terrain, VehicleParams, VehicleState, clearances, derivatives,
                       step, touchdown_check)
from .errors import (ConfigError, EffectivenessUndefinedError, FitError, FlowlandError, GroundPenetrationError,
                     IntegrationError, ModelEvaluationError, ObservationUnavailableError, TuningError,
                     UndefinedMetricError)
from .sensing import RateEstimator, estimate_output_rates, observe
from .simulation import ScenarioConfig, SimLog, run_scenario, run_sweep

__version__ = "0.1.0"

__all__ = [
    "LandingMetrics",
    "affine_model_residual",
    "exp_decay_fit",
    "landing_metrics",
    "rmse",
    "tune_pid",
    "load_scenario",
    "scenario_from_raw",
    "ControllerConfig",
    "IndiController",
    "PidConfig",
    "PidController",
    "PidGains",
    "ControlCommand",
    "Terrain",
    "VehicleParams",
    "VehicleState",
    "clearances",
    "derivatives",
    "step",
    "touchdown_check",
    "RateEstimator",
    "estimate_output_rates",
    "observe",
    "ScenarioConfig",
    "SimLog",
    "run_scenario",
    "run_sweep",
    "ConfigError",
    "EffectivenessUndefinedError",
    "FitError",
    "FlowlandError",
    "GroundPenetrationError",
    "IntegrationError",
    "ModelEvaluationError",
    "ObservationUnavailableError",
    "TuningError",
    "UndefinedMetricError",
]
