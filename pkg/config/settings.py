"""
Run Configuration
=================
Resolves run settings from CLI flags, environment variables and the JSON
defaults under data/.

Architecture: Imperative Shell
Reads files and the environment. Never import this in the functional core
packages (survival, peeling, crossval, simulation).

Resolution order: CLI flag > environment variable > JSON default.

Environment (all optional, may live in a .env file):
    SBH_THREADS      worker count for replicates and permutations
    SBH_OUTPUT_DIR   output directory
    SBH_LOG_LEVEL    DEBUG, INFO, WARNING or ERROR
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from models import ConfigError, CvConfig, PeelConfig

logger = logging.getLogger(__name__)

load_dotenv()

DATA_DIR = Path(__file__).resolve().parent.parent / 'data'
RUN_DEFAULTS_PATH = DATA_DIR / 'run_defaults.json'
SIMULATION_MODELS_PATH = DATA_DIR / 'simulation_models.json'

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


# =============================================================================
# JSON reference data
# =============================================================================

def _load_json(path: Path) -> Dict:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Configuration file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}")


def load_run_defaults(path: Optional[Path] = None) -> Dict:
    return _load_json(Path(path) if path else RUN_DEFAULTS_PATH)


def load_simulation_presets(path: Optional[Path] = None) -> Dict:
    return _load_json(Path(path) if path else SIMULATION_MODELS_PATH)


def default_threads() -> int:
    return os.cpu_count() or 1


def parse_directions(text: Optional[str]) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """
    Parse a ``--directed`` value.

    Returns (directed, directions). ``auto`` derives directions from the
    training data and ``free`` turns directed peeling off; otherwise a comma
    list of +1/-1/0 (or +/-/0), one per covariate.
    """
    if text is None or text == '':
        return False, None
    text = text.strip().lower()
    if text == 'free':
        return False, None
    if text == 'auto':
        return True, None
    tokens = {'+': 1, '+1': 1, '1': 1, '-': -1, '-1': -1, '0': 0}
    directions = []
    for token in text.split(','):
        token = token.strip()
        if token not in tokens:
            raise ConfigError(f"Invalid peel direction '{token}'; use +1, -1, 0 or 'auto'")
        directions.append(tokens[token])
    return True, tuple(directions)


# =============================================================================
# RunConfig
# =============================================================================

class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI run"""
    # Data source: exactly one of input / model
    input: Optional[Path] = None
    model: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)
    p: Optional[int] = Field(default=None, ge=1)
    pi: Optional[float] = Field(default=None, ge=0.0, lt=1.0)

    # Peeling
    alpha0: float = Field(default=0.10, gt=0.0, lt=1.0)
    beta0: float = Field(default=0.05, gt=0.0, lt=1.0)
    criterion: str = 'lrt'
    pasting: bool = False
    directed: Optional[str] = None
    preselect: Optional[int] = Field(default=None, ge=1)

    # Cross-validation
    technique: str = 'combined'
    opt_criterion: str = 'lrt'
    K: int = Field(default=5, ge=1)
    B: int = Field(default=16, ge=1)
    A: int = Field(default=256, ge=1)
    one_se_rule: bool = False
    M: int = Field(default=1, ge=1)

    # Execution
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)
    output_dir: Path = Path('output')
    formats: List[OutputFormat] = [OutputFormat.JSON, OutputFormat.CSV]
    log_level: str = 'WARNING'

    @field_validator('criterion')
    @classmethod
    def _criterion(cls, value: str) -> str:
        value = value.lower()
        if value not in ('lrt', 'chs', 'lhr'):
            raise ValueError(f"criterion must be lrt, chs or lhr, got '{value}'")
        return value

    @field_validator('opt_criterion')
    @classmethod
    def _opt_criterion(cls, value: str) -> str:
        value = value.lower()
        if value not in ('lhr', 'lrt', 'cer'):
            raise ValueError(f"optimisation criterion must be lhr, lrt or cer, got '{value}'")
        return value

    @field_validator('technique')
    @classmethod
    def _technique(cls, value: str) -> str:
        value = value.lower()
        if value not in ('averaged', 'combined', 'none'):
            raise ValueError(f"technique must be averaged, combined or none, got '{value}'")
        return value

    @field_validator('log_level')
    @classmethod
    def _log_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {LOG_LEVELS}")
        return value

    @model_validator(mode='after')
    def _consistency(self) -> 'RunConfig':
        if (self.input is None) == (self.model is None):
            raise ValueError("exactly one data source is required: an input file or a simulation model")
        if self.technique != 'none' and self.K < 2:
            raise ValueError(f"K must be >= 2 for {self.technique} cross-validation")
        parse_directions(self.directed)
        return self

    # --- Derived configs ---

    def peel_config(self) -> PeelConfig:
        directed, directions = parse_directions(self.directed)
        return PeelConfig(
            alpha0=self.alpha0,
            beta0=self.beta0,
            criterion=self.criterion,
            pasting=self.pasting,
            peel_mode='directed' if directed else 'free',
            directions=directions,
            preselect=self.preselect,
        )

    def cv_config(self) -> CvConfig:
        return CvConfig(
            K=self.K,
            B=self.B,
            A=self.A,
            technique=self.technique,
            opt_criterion=self.opt_criterion,
            one_se_rule=self.one_se_rule,
            master_seed=self.seed,
        )

    def prepare_output_dir(self) -> Path:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create output directory {self.output_dir}: {e}")
        if not os.access(self.output_dir, os.W_OK):
            raise ConfigError(f"Output directory is not writable: {self.output_dir}")
        return self.output_dir

    def provenance(self) -> Dict[str, Any]:
        """Resolved settings embedded in every artifact; execution-only fields excluded"""
        return self.model_dump(mode='json', exclude={'threads', 'output_dir', 'log_level', 'formats'})


# =============================================================================
# Resolution
# =============================================================================

def _flatten_defaults(defaults: Dict) -> Dict[str, Any]:
    peeling = defaults.get('peeling', {})
    cv = defaults.get('cross_validation', {})
    run = defaults.get('run', {})
    flat = {
        'alpha0': peeling.get('alpha0'),
        'beta0': peeling.get('beta0'),
        'criterion': peeling.get('criterion'),
        'pasting': peeling.get('pasting'),
        'preselect': peeling.get('preselect'),
        'technique': cv.get('technique'),
        'opt_criterion': cv.get('opt_criterion'),
        'K': cv.get('K'),
        'B': cv.get('B'),
        'A': cv.get('A'),
        'one_se_rule': cv.get('one_se_rule'),
        'M': defaults.get('coverage', {}).get('M'),
        'seed': run.get('seed'),
        'output_dir': run.get('output_dir'),
        'formats': run.get('formats'),
    }
    if peeling.get('peel_mode') == 'directed':
        directions = peeling.get('directions')
        flat['directed'] = ','.join(str(d) for d in directions) if directions else 'auto'
    return {k: v for k, v in flat.items() if v is not None}


def _environment() -> Dict[str, Any]:
    env = {}
    if os.getenv('SBH_THREADS'):
        env['threads'] = os.getenv('SBH_THREADS')
    if os.getenv('SBH_OUTPUT_DIR'):
        env['output_dir'] = os.getenv('SBH_OUTPUT_DIR')
    if os.getenv('SBH_LOG_LEVEL'):
        env['log_level'] = os.getenv('SBH_LOG_LEVEL')
    return env


def resolve_run_config(overrides: Dict[str, Any], defaults: Optional[Dict] = None) -> RunConfig:
    """
    Merge JSON defaults, environment and CLI overrides into a RunConfig.

    ``overrides`` entries that are None are treated as not given.
    """
    defaults = load_run_defaults() if defaults is None else defaults
    merged: Dict[str, Any] = {'threads': default_threads()}
    merged.update(_flatten_defaults(defaults))
    merged.update(_environment())
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = RunConfig(**merged)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}")
    logger.debug(f"Resolved run config: {config.provenance()}")
    return config


def run_config_schema() -> Dict:
    """JSON schema of RunConfig"""
    return RunConfig.model_json_schema()
