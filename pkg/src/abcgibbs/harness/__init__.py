"""Experiment configuration, runner and command-line interface."""

from .config import ConfigError, ExperimentConfig, SamplerConfig, config_from_dict, load_config, sweep_configs
from .data import draw_truth, load_stellar_flux, observed_data
from .output import emit_density, write_density_csv, write_json, write_samples_csv
from .runner import RunSummary, resolve_matching, run_experiment, run_oracle, run_probe, run_sampler, run_sweep

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunSummary",
    "SamplerConfig",
    "config_from_dict",
    "draw_truth",
    "emit_density",
    "load_config",
    "load_stellar_flux",
    "observed_data",
    "resolve_matching",
    "run_experiment",
    "run_oracle",
    "run_probe",
    "run_sampler",
    "run_sweep",
    "sweep_configs",
    "write_density_csv",
    "write_json",
    "write_samples_csv",
]
