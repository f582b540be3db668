"""Experiment configuration, orchestration, persistence and plots."""
from ppclab.expcli.config import ExperimentConfig, config_hash, load_config, parse_config
from ppclab.expcli.plots import emit_plot
from ppclab.expcli.runner import RunManifest, TaskRecord, read_paircorr_table, run_experiment

__all__ = ["ExperimentConfig", "RunManifest", "TaskRecord", "config_hash", "emit_plot",
           "load_config", "parse_config", "read_paircorr_table", "run_experiment"]
