"""
Permutation P-Values
====================
Null distribution of the cross-validated log-rank statistic built by
permuting (time, event) pairs jointly against the covariate rows and
rerunning one cross-validation replicate per permutation.
"""

import logging
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from models import CvConfig, CvProfile, PeelConfig, PermutationResult, SurvivalData

from .folds import PERMUTATION_STREAM, derive_seed
from .replicated import run_replicate

logger = logging.getLogger(__name__)

NULL_STATISTIC = 'lrt'


def permuted_statistic(
    data: SurvivalData,
    cv_config: CvConfig,
    peel_config: PeelConfig,
    index: int,
    steps: int,
) -> np.ndarray:
    """Cross-validated LRT per step for permutation ``index``; NaN where undefined"""
    permute_seed, fold_seed = derive_seed(cv_config.master_seed, PERMUTATION_STREAM, index).spawn(2)
    order = np.random.default_rng(permute_seed).permutation(data.n)
    permuted = data.with_outcomes(data.times[order], data.events[order])

    out = np.full(steps, np.nan)
    result = run_replicate(permuted, cv_config, peel_config, fold_seed)
    if result.failed is not None:
        logger.debug(f"Permutation {index} failed: {result.failed}")
        return out
    values = result.stats[NULL_STATISTIC]
    reach = min(values.shape[0], steps)
    out[:reach] = values[:reach]
    return out


def permutation_pvalues(
    data: SurvivalData,
    cv_config: CvConfig,
    peel_config: PeelConfig,
    observed_profile: CvProfile,
    n_jobs: int = 1,
    A: Optional[int] = None,
) -> PermutationResult:
    """
    Per-step p-values of the observed cross-validated LRT.

    p(l) is the fraction of permutations whose statistic at step l is at
    least the observed one, among permutations that reached step l. A zero
    count is reported as 1/A_l with ``below_precision`` set.
    """
    A = A or cv_config.A
    observed = observed_profile.mean[NULL_STATISTIC]
    steps = observed.shape[0]
    logger.info(f"Running {A} permutations over {steps} steps on {n_jobs} worker(s)")

    if n_jobs == 1:
        rows = [permuted_statistic(data, cv_config, peel_config, a, steps) for a in range(A)]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(permuted_statistic)(data, cv_config, peel_config, a, steps) for a in range(A)
        )
    null = np.vstack(rows)

    defined = ~np.isnan(null) & ~np.isnan(observed)[None, :]
    exceed = np.sum(defined & (null >= observed[None, :] - 1e-12), axis=0)
    n_defined = defined.sum(axis=0)

    p_values = np.full(steps, np.nan)
    below = np.zeros(steps, dtype=bool)
    for step in range(steps):
        if n_defined[step] == 0:
            continue
        if exceed[step] == 0:
            p_values[step] = 1.0 / n_defined[step]
            below[step] = True
        else:
            p_values[step] = exceed[step] / n_defined[step]

    return PermutationResult(
        p_values=p_values,
        exceed_counts=exceed,
        n_defined=n_defined,
        below_precision=below,
        null_statistics=null,
        A=A,
    )
