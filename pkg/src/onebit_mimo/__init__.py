"""Downlink massive MIMO with one-bit DACs: rates, simulation and sizing."""

__version__ = "0.1.0"

from .analysis import PowerModel, ee_sweep, energy_efficiency, kappa_search, low_snr_kappa
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .rates import (
    RateBreakdown,
    asymptotic_rate,
    closed_form,
    closed_form_fr,
    closed_form_onebit,
    degradation_ratios,
    mc_moments,
    mc_rate_breakdown,
)
from .scenario import NetworkScenario, ScenarioError, SystemConstants, build_scenario

__all__ = [
    "__version__",
    "PowerModel",
    "ee_sweep",
    "energy_efficiency",
    "kappa_search",
    "low_snr_kappa",
    "ConfigError",
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
    "RateBreakdown",
    "asymptotic_rate",
    "closed_form",
    "closed_form_fr",
    "closed_form_onebit",
    "degradation_ratios",
    "mc_moments",
    "mc_rate_breakdown",
    "NetworkScenario",
    "ScenarioError",
    "SystemConstants",
    "build_scenario",
]
