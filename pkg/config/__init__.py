"""
Config Module
=============
Run configuration resolved from CLI flags, environment and JSON defaults.
"""

from .settings import (
    DATA_DIR,
    RUN_DEFAULTS_PATH,
    SIMULATION_MODELS_PATH,
    OutputFormat,
    RunConfig,
    default_threads,
    load_run_defaults,
    load_simulation_presets,
    parse_directions,
    resolve_run_config,
    run_config_schema,
)

__all__ = [
    'DATA_DIR',
    'RUN_DEFAULTS_PATH',
    'SIMULATION_MODELS_PATH',
    'OutputFormat',
    'RunConfig',
    'default_threads',
    'load_run_defaults',
    'load_simulation_presets',
    'parse_directions',
    'resolve_run_config',
    'run_config_schema',
]
