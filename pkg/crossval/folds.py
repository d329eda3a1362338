"""
Fold Assignment
===============
Stratified K-fold splitting by conservation of events, and the seed
derivation shared by replicates and permutations.

Seeds are derived, never handed off: replicate b draws from
SeedSequence([master_seed, REPLICATE_STREAM, b]) and permutation a from
SeedSequence([master_seed, PERMUTATION_STREAM, a]), so any work unit can
run on any worker in any order.
"""

import logging
import warnings
from typing import Union

import numpy as np

from models import FoldAssignment, StratumTooSmallWarning, SurvivalData

logger = logging.getLogger(__name__)

REPLICATE_STREAM = 1
PERMUTATION_STREAM = 2

SeedLike = Union[int, np.random.SeedSequence]


def derive_seed(master_seed: int, stream: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed), int(stream), int(index)])


def resubstitution_folds(n: int) -> FoldAssignment:
    """Single fold that trains and tests on every row"""
    return FoldAssignment(fold_of=np.zeros(n, dtype=np.int64), K=1)


def stratified_kfold(data: SurvivalData, K: int, seed: SeedLike) -> FoldAssignment:
    """
    Deal events and censored rows to K folds separately.

    Each stratum is shuffled independently and dealt round-robin; the
    censored deal continues where the event deal stopped, so fold sizes
    differ by at most one and so do per-fold event counts.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K == 1:
        return resubstitution_folds(data.n)

    rng = np.random.default_rng(seed)
    events = np.flatnonzero(data.event_mask)
    censored = np.flatnonzero(~data.event_mask)

    for label, stratum in (('event', events), ('censored', censored)):
        if stratum.size < K and (label == 'event' or stratum.size > 0):
            message = f"Only {stratum.size} {label} observations for K={K} folds"
            logger.warning(message)
            warnings.warn(message, StratumTooSmallWarning, stacklevel=2)

    fold_of = np.empty(data.n, dtype=np.int64)
    fold_of[rng.permutation(events)] = np.arange(events.size) % K
    fold_of[rng.permutation(censored)] = (np.arange(censored.size) + events.size) % K
    return FoldAssignment(fold_of=fold_of, K=K)
