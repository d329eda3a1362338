"""
Cross-Validation Models
=======================
Fold assignments, per-replicate results, replicated profiles and the
final cross-validated result.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .peeling import Box, DecisionRule

# Per-step statistics carried through every cross-validation technique
STATISTICS = ('support', 'lhr', 'lrt', 'cer', 'meft', 'mefp')


class Technique(Enum):
    AVERAGED = "averaged"
    COMBINED = "combined"
    NONE = "none"


class OptCriterion(Enum):
    """Statistic optimised over peeling length"""
    LHR = "lhr"
    LRT = "lrt"
    CER = "cer"

    @property
    def maximise(self) -> bool:
        return self is not OptCriterion.CER


@dataclass(frozen=True)
class CvConfig:
    K: int = 5
    B: int = 16
    A: int = 256
    technique: Technique = Technique.COMBINED
    opt_criterion: OptCriterion = OptCriterion.LRT
    one_se_rule: bool = False
    master_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.technique, Technique):
            object.__setattr__(self, 'technique', Technique(str(self.technique).lower()))
        if not isinstance(self.opt_criterion, OptCriterion):
            object.__setattr__(self, 'opt_criterion', OptCriterion(str(self.opt_criterion).lower()))
        if self.technique is not Technique.NONE and self.K < 2:
            raise ConfigError(f"K must be >= 2 for {self.technique.value} cross-validation")
        if self.B < 1:
            raise ConfigError("B must be >= 1")
        if self.A < 1:
            raise ConfigError("A must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")

    @property
    def replicates(self) -> int:
        return 1 if self.technique is Technique.NONE else self.B

    def to_dict(self) -> Dict:
        return {
            'K': self.K,
            'B': self.B,
            'A': self.A,
            'technique': self.technique.value,
            'opt_criterion': self.opt_criterion.value,
            'one_se_rule': self.one_se_rule,
            'master_seed': self.master_seed,
        }


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    """
    Fold label per observation.

    With K == 1 the assignment is resubstitution: every fold trains and
    tests on all rows.
    """
    fold_of: np.ndarray
    K: int

    @property
    def resubstitution(self) -> bool:
        return self.K == 1

    def test_index(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == k)

    def train_index(self, k: int) -> np.ndarray:
        if self.resubstitution:
            return np.arange(self.fold_of.shape[0])
        return np.flatnonzero(self.fold_of != k)

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.K)


# =============================================================================
# One replicate
# =============================================================================

@dataclass(eq=False)
class ReplicateResult:
    """
    Per-step output of one cross-validation replicate.

    Arrays are indexed by step 0..max_length. ``edge_usage`` has shape
    (steps, p, 2) with the fraction of fold trajectories constraining the
    lower (0) and upper (1) face of each covariate by that step.
    ``step_share`` is the fraction of all fold peel steps that peeled each
    covariate.
    """
    technique: Technique
    max_length: int
    stats: Dict[str, np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    membership: np.ndarray
    edge_usage: np.ndarray
    step_share: np.ndarray
    fold_lengths: List[int]
    warnings: List[str] = field(default_factory=list)
    failed: Optional[str] = None

    @property
    def n_steps(self) -> int:
        return self.max_length + 1

    @classmethod
    def failure(cls, technique: Technique, message: str, warnings: List[str]) -> 'ReplicateResult':
        empty = np.empty((0, 0))
        return cls(
            technique=technique,
            max_length=0,
            stats={},
            lower=empty,
            upper=empty,
            membership=empty,
            edge_usage=empty,
            step_share=np.empty(0),
            fold_lengths=[],
            warnings=list(warnings),
            failed=message,
        )


# =============================================================================
# Replicated result
# =============================================================================

@dataclass(eq=False)
class CvProfile:
    """
    Cross-validated statistics per step across replicates.

    ``raw[name]`` has shape (B, steps) with NaN where a replicate did not
    reach a step.
    """
    max_length: int
    mean: Dict[str, np.ndarray]
    se: Dict[str, np.ndarray]
    raw: Dict[str, np.ndarray]
    counts: np.ndarray

    @property
    def steps(self) -> np.ndarray:
        return np.arange(self.max_length + 1)


@dataclass(eq=False)
class PermutationResult:
    p_values: np.ndarray
    exceed_counts: np.ndarray
    n_defined: np.ndarray
    below_precision: np.ndarray
    null_statistics: np.ndarray
    A: int

    def to_dict(self) -> Dict:
        return {
            'A': self.A,
            'p_values': self.p_values.tolist(),
            'exceed_counts': self.exceed_counts.tolist(),
            'n_defined': self.n_defined.tolist(),
            'below_precision': self.below_precision.tolist(),
        }


@dataclass(eq=False)
class CvResult:
    """Replicated cross-validation outcome"""
    technique: Technique
    optimal_length: int
    flat_profile: bool
    profile: CvProfile
    boxes: List[Box]
    membership: np.ndarray
    vote_membership: np.ndarray
    vote_agreement: np.ndarray
    support: np.ndarray
    box_support: np.ndarray
    edge_usage: np.ndarray
    covariate_step_share: np.ndarray
    rule: DecisionRule
    replicate_lengths: List[int]
    covariate_names: Tuple[str, ...]
    warnings: List[str] = field(default_factory=list)
    p_values: Optional[PermutationResult] = None

    @property
    def final_box(self) -> Box:
        return self.boxes[self.optimal_length]

    @property
    def final_membership(self) -> np.ndarray:
        return self.membership[self.optimal_length]

    def used_covariates(self, threshold: float = 0.5) -> List[str]:
        """Covariates whose faces are constrained in at least ``threshold`` of folds at the optimum"""
        usage = self.edge_usage[self.optimal_length].max(axis=1)
        return [self.covariate_names[j] for j in np.flatnonzero(usage >= threshold)]
