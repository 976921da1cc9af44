"""Experiment documents, parallel runs, reports, manifests and figures."""

from .config import EXPERIMENTS as EXPERIMENT_NAMES
from .config import ExperimentConfig, ParameterReader, canonical_json, load_config, parse_config
from .experiments import EXPERIMENTS, Experiment, default_out_dir, run_experiment, validate_config
from .fields import FieldSetup, read_field_setup, read_sle_params
from .manifest import RunManifest, read_manifest, record_manifest, sha256_file
from .pool import WorkerPool
from .presets import get_preset, preset_names
from .render import count_foreground, hues_for, render_light_cone, render_paths
from .reports import binomial_report, exact_report, overall_pass, summarize, write_report

__all__ = [
    "EXPERIMENTS",
    "EXPERIMENT_NAMES",
    "Experiment",
    "ExperimentConfig",
    "FieldSetup",
    "ParameterReader",
    "RunManifest",
    "WorkerPool",
    "binomial_report",
    "canonical_json",
    "count_foreground",
    "default_out_dir",
    "exact_report",
    "get_preset",
    "hues_for",
    "load_config",
    "overall_pass",
    "parse_config",
    "preset_names",
    "read_field_setup",
    "read_manifest",
    "read_sle_params",
    "record_manifest",
    "render_light_cone",
    "render_paths",
    "run_experiment",
    "sha256_file",
    "summarize",
    "validate_config",
    "write_report",
]
