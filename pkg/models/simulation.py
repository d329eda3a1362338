"""
Simulation Models
=================
Specification and ground truth of simulated survival datasets.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .peeling import Box


class CovariateLaw(Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"


@dataclass(frozen=True, eq=False)
class SimModelSpec:
    """
    One simulated survival model.

    ``coefficients`` of None means they are drawn at generation time
    (``n_nonzero`` values from U(-1, 1), the rest zero).
    ``censoring_rate`` of 0 switches censoring off entirely.
    """
    model_id: str
    n: int
    p: int
    covariate_law: CovariateLaw
    coefficients: Optional[Tuple[float, ...]]
    censoring_rate: float = 0.5
    planted_box: Optional[Box] = None
    sigma: float = 1.0
    n_nonzero: int = 0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.covariate_law, CovariateLaw):
            object.__setattr__(self, 'covariate_law', CovariateLaw(self.covariate_law))
        if self.n < 1 or self.p < 1:
            raise ConfigError(f"Model {self.model_id}: n and p must be >= 1")
        if not 0.0 <= self.censoring_rate < 1.0:
            raise ConfigError(f"Censoring rate must lie in [0, 1), got {self.censoring_rate}")
        if self.coefficients is not None and len(self.coefficients) != self.p:
            raise ConfigError(
                f"Model {self.model_id}: {len(self.coefficients)} coefficients for p={self.p}"
            )
        if self.coefficients is None and not 0 < self.n_nonzero <= self.p:
            raise ConfigError(f"Model {self.model_id}: n_nonzero must lie in 1..p")
        if self.planted_box is not None and self.planted_box.p != self.p:
            raise ConfigError(f"Model {self.model_id}: planted box dimension differs from p")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")

    def to_dict(self) -> Dict:
        return {
            'model_id': self.model_id,
            'n': self.n,
            'p': self.p,
            'covariate_law': self.covariate_law.value,
            'coefficients': list(self.coefficients) if self.coefficients is not None else None,
            'censoring_rate': self.censoring_rate,
            'planted_box': self.planted_box.to_dict() if self.planted_box is not None else None,
            'sigma': self.sigma,
            'n_nonzero': self.n_nonzero,
            'seed': self.seed,
        }


@dataclass(eq=False)
class GroundTruth:
    """What the generator knows and the learner does not"""
    true_times: np.ndarray
    censor_times: np.ndarray
    linear_predictor: np.ndarray
    coefficients: np.ndarray
    censoring_bound: float
    planted_membership: Optional[np.ndarray] = None
    coefficients_drawn: bool = False
    sigma_defaulted: bool = False
