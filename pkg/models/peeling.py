"""
Peeling Models
==============
Boxes, peeling configuration, step records and trajectories produced by
the recursive survival peeling engine.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .survival import EndPoints


class Criterion(Enum):
    """Peeling criterion whose rate of increase selects each peel"""
    LRT = "lrt"
    CHS = "chs"
    LHR = "lhr"


class PeelSide(Enum):
    LOWER = "lower"
    UPPER = "upper"


class PeelMode(Enum):
    FREE = "free"
    DIRECTED = "directed"


# =============================================================================
# Box
# =============================================================================

@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned hyper-rectangle, closed on every face"""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float, copy=True)
        upper = np.array(self.upper, dtype=float, copy=True)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("Box bounds must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("Box lower bound exceeds upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @classmethod
    def covering(cls, covariates: np.ndarray) -> 'Box':
        """Smallest box holding every row"""
        return cls(covariates.min(axis=0), covariates.max(axis=0))

    @property
    def p(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, covariates: np.ndarray) -> np.ndarray:
        covariates = np.atleast_2d(covariates)
        return np.all((covariates >= self.lower) & (covariates <= self.upper), axis=1)

    def with_bound(self, covariate: int, side: PeelSide, value: float) -> 'Box':
        lower, upper = self.lower.copy(), self.upper.copy()
        if side is PeelSide.LOWER:
            lower[covariate] = value
        else:
            upper[covariate] = value
        return Box(lower, upper)

    def same_as(self, other: 'Box') -> bool:
        return bool(np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper))

    def to_dict(self) -> Dict:
        return {'lower': self.lower.tolist(), 'upper': self.upper.tolist()}


# =============================================================================
# Configuration
# =============================================================================

def max_peeling_length(alpha0: float, beta0: float) -> int:
    """Upper bound on any trajectory length: ceil(log beta0 / log(1 - alpha0))"""
    return int(math.ceil(math.log(beta0) / math.log(1.0 - alpha0) - 1e-12))


@dataclass(frozen=True)
class PeelConfig:
    """
    Peeling meta-parameters.

    ``directions`` is only read in directed mode: one entry per covariate,
    +1 keeps high values (peels the lower face), -1 keeps low values
    (peels the upper face), 0 allows both. ``None`` in directed mode means
    the directions are derived from the training data.
    """
    alpha0: float = 0.10
    beta0: float = 0.05
    criterion: Criterion = Criterion.LRT
    pasting: bool = False
    peel_mode: PeelMode = PeelMode.FREE
    directions: Optional[Tuple[int, ...]] = None
    max_steps: Optional[int] = None
    preselect: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.alpha0 < 1.0:
            raise ConfigError(f"alpha0 must lie in (0, 1), got {self.alpha0}")
        if not 0.0 < self.beta0 < 1.0:
            raise ConfigError(f"beta0 must lie in (0, 1), got {self.beta0}")
        if not isinstance(self.criterion, Criterion):
            object.__setattr__(self, 'criterion', Criterion(str(self.criterion).lower()))
        if not isinstance(self.peel_mode, PeelMode):
            object.__setattr__(self, 'peel_mode', PeelMode(str(self.peel_mode).lower()))
        if self.directions is not None:
            directions = tuple(int(d) for d in self.directions)
            if any(d not in (-1, 0, 1) for d in directions):
                raise ConfigError("Peel directions must be -1, 0 or +1")
            object.__setattr__(self, 'directions', directions)
        if self.max_steps is not None:
            if self.max_steps < 1:
                raise ConfigError("max_steps must be >= 1")
            if self.max_steps > self.length_bound:
                raise ConfigError(
                    f"max_steps={self.max_steps} exceeds the peeling length bound {self.length_bound}"
                )
        if self.preselect is not None and self.preselect < 1:
            raise ConfigError("preselect must be >= 1")

    @property
    def length_bound(self) -> int:
        return max_peeling_length(self.alpha0, self.beta0)

    @property
    def step_limit(self) -> int:
        return self.max_steps or self.length_bound

    @property
    def directed(self) -> bool:
        return self.peel_mode is PeelMode.DIRECTED

    def to_dict(self) -> Dict:
        return {
            'alpha0': self.alpha0,
            'beta0': self.beta0,
            'criterion': self.criterion.value,
            'pasting': self.pasting,
            'peel_mode': self.peel_mode.value,
            'directions': list(self.directions) if self.directions is not None else None,
            'max_steps': self.max_steps,
            'preselect': self.preselect,
        }


# =============================================================================
# Steps and trajectories
# =============================================================================

@dataclass(frozen=True, eq=False)
class Candidate:
    """One eligible sub-box; ``members`` is over the active rows"""
    covariate: int
    side: PeelSide
    bound: float
    members: np.ndarray
    support: float


@dataclass(eq=False)
class StepRecord:
    """One step of a peeling trajectory; ``in_box`` is over the active rows"""
    step: int
    box: Box
    support: float
    n_in: int
    n_events_in: int
    in_box: np.ndarray
    criterion_value: float
    rate: float
    end_points: EndPoints
    peeled_covariate: Optional[int] = None
    peeled_side: Optional[PeelSide] = None
    pasted: bool = False

    def to_dict(self, names: Optional[Tuple[str, ...]] = None) -> Dict:
        covariate = self.peeled_covariate
        return {
            'step': self.step,
            'support': self.support,
            'n_in': self.n_in,
            'n_events_in': self.n_events_in,
            'peeled_covariate': (names[covariate] if names and covariate is not None else covariate),
            'peeled_side': self.peeled_side.value if self.peeled_side else None,
            'criterion_value': self.criterion_value,
            'rate': self.rate,
            'pasted': self.pasted,
            'box': self.box.to_dict(),
            'end_points': self.end_points.to_dict(),
        }


@dataclass(eq=False)
class Trajectory:
    """
    Nested box sequence grown on the active rows of a dataset.

    steps[0] is the unpeeled box; ``length`` counts peels only.
    """
    steps: List[StepRecord]
    active: np.ndarray
    n_total: int
    initial_box: Box
    covariate_names: Tuple[str, ...]
    criterion: Criterion
    empty: bool = False
    stop_reason: str = ''
    peelable: Optional[np.ndarray] = None
    directions: Optional[Tuple[int, ...]] = None
    trace_usage: List[Optional[int]] = field(default_factory=list)
    trace_importance: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    @property
    def supports(self) -> np.ndarray:
        return np.array([s.support for s in self.steps])

    @property
    def boxes(self) -> List[Box]:
        return [s.box for s in self.steps]

    @property
    def final(self) -> StepRecord:
        return self.steps[-1]

    def box_at(self, step: int) -> Box:
        """Box at a step, holding the final box past the end"""
        return self.steps[min(step, self.length)].box

    def membership(self, step: int) -> np.ndarray:
        """In-box indicator over all n_total rows (False outside the active set)"""
        full = np.zeros(self.n_total, dtype=bool)
        full[self.active] = self.steps[step].in_box
        return full

    def used_covariates(self) -> List[int]:
        return sorted({j for j in self.trace_usage if j is not None})

    def to_dict(self) -> Dict:
        return {
            'length': self.length,
            'empty': self.empty,
            'stop_reason': self.stop_reason,
            'criterion': self.criterion.value,
            'n_active': int(len(self.active)),
            'directions': list(self.directions) if self.directions is not None else None,
            'steps': [s.to_dict(self.covariate_names) for s in self.steps],
            'trace_usage': [self.covariate_names[j] if j is not None else None for j in self.trace_usage],
        }


@dataclass(eq=False)
class CoverageResult:
    """Boxes grown by the covering loop and their disjunctive rule"""
    trajectories: List[Trajectory]
    rule: 'DecisionRule'
    membership: np.ndarray

    @property
    def n_boxes(self) -> int:
        return len(self.trajectories)


@dataclass(frozen=True)
class RuleEdge:
    """One conjunct of a decision rule"""
    covariate: int
    name: str
    side: PeelSide
    value: float
    se: Optional[float] = None
    frequency: Optional[float] = None

    def text(self, digits: int = 6) -> str:
        op = '>=' if self.side is PeelSide.LOWER else '<='
        body = f"{self.name} {op} {self.value:.{digits}g}"
        if self.se is not None:
            body += f" ({self.se:.{digits}g})"
        return body

    def to_dict(self) -> Dict:
        return {
            'covariate': self.name,
            'side': self.side.value,
            'value': self.value,
            'se': self.se,
            'frequency': self.frequency,
        }


@dataclass(frozen=True)
class DecisionRule:
    """Disjunction of conjunctive box rules"""
    boxes: Tuple[Tuple[RuleEdge, ...], ...]

    def text(self) -> str:
        blocks = []
        for m, edges in enumerate(self.boxes, start=1):
            body = " AND ".join(edge.text() for edge in edges) if edges else "TRUE"
            blocks.append(f"Box {m}: {body}")
        return "\n".join(blocks)

    def to_dict(self) -> Dict:
        return {'boxes': [[edge.to_dict() for edge in edges] for edges in self.boxes]}
