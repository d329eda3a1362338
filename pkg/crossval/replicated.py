"""
Replicated Cross-Validation
===========================
B independent replicates of the configured technique, merged by a
fixed index-ordered reduction so the result does not depend on worker
count or completion order.

Usage:
    from crossval import replicated_cv
    result = replicated_cv(data, CvConfig(B=16), PeelConfig(), n_jobs=4)
    print(result.optimal_length, result.final_box.to_dict())
"""

import logging
import math
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from models import (
    STATISTICS,
    Box,
    ConsistencyWarning,
    CrossValidationError,
    CvConfig,
    CvProfile,
    CvResult,
    DecisionRule,
    PeelConfig,
    ReplicateResult,
    SbhError,
    SurvivalData,
    Technique,
)
from peeling import box_rule_edges

from .folds import REPLICATE_STREAM, SeedLike, derive_seed, resubstitution_folds, stratified_kfold
from .techniques import average_edges, averaged_cv, combined_cv
from .tuning import select_optimal_length

logger = logging.getLogger(__name__)

CONSISTENCY_TOLERANCE = 0.15


# =============================================================================
# One replicate
# =============================================================================

def run_replicate(
    data: SurvivalData,
    cv_config: CvConfig,
    peel_config: PeelConfig,
    seed: SeedLike,
) -> ReplicateResult:
    """
    Draw folds from ``seed`` and run one replicate.

    Warnings raised inside the replicate are captured as text so they
    survive the trip back from a worker process. A module error fails
    the replicate, not the run.
    """
    technique = cv_config.technique
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        try:
            if technique is Technique.NONE:
                folds = resubstitution_folds(data.n)
            else:
                folds = stratified_kfold(data, cv_config.K, seed)
            if technique is Technique.AVERAGED:
                result = averaged_cv(data, folds, peel_config)
            else:
                result = combined_cv(data, folds, peel_config)
        except SbhError as e:
            logger.warning(f"Replicate failed: {e}")
            return ReplicateResult.failure(technique, str(e), [str(w.message) for w in caught])
    result.warnings = [str(w.message) for w in caught]
    return result


def _replicate_worker(data, cv_config, peel_config, index: int) -> ReplicateResult:
    return run_replicate(data, cv_config, peel_config, derive_seed(cv_config.master_seed, REPLICATE_STREAM, index))


def run_replicates(
    data: SurvivalData,
    cv_config: CvConfig,
    peel_config: PeelConfig,
    n_jobs: int = 1,
) -> List[ReplicateResult]:
    """Replicates in index order regardless of ``n_jobs``"""
    count = cv_config.replicates
    logger.info(f"Running {count} {cv_config.technique.value} replicate(s) on {n_jobs} worker(s)")
    if n_jobs == 1 or count == 1:
        return [_replicate_worker(data, cv_config, peel_config, b) for b in range(count)]
    return Parallel(n_jobs=n_jobs)(
        delayed(_replicate_worker)(data, cv_config, peel_config, b) for b in range(count)
    )


# =============================================================================
# Aggregation
# =============================================================================

def replicated_max_length(lengths: Sequence[int]) -> int:
    """Ceiling of the mean replicate maximum length"""
    if len(lengths) == 0:
        return 0
    return int(math.ceil(float(np.mean(lengths)) - 1e-12))


def _pad(rows: List[np.ndarray], steps: int) -> np.ndarray:
    """Stack per-replicate step arrays into (B, steps, ...) with NaN past each end"""
    shape = (len(rows), steps) + rows[0].shape[1:]
    out = np.full(shape, np.nan)
    for b, row in enumerate(rows):
        reach = min(row.shape[0], steps)
        out[b, :reach] = row[:reach]
    return out


def _mean_se(raw: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    counts = np.sum(~np.isnan(raw), axis=0)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', category=RuntimeWarning)
        mean = np.nanmean(raw, axis=0)
        sd = np.nanstd(raw, axis=0, ddof=1)
    se = np.where(counts > 1, sd / np.sqrt(np.maximum(counts, 1)), 0.0)
    se = np.where(counts == 0, np.nan, se)
    return mean, se, counts


def build_profile(replicates: List[ReplicateResult], max_length: int) -> CvProfile:
    steps = max_length + 1
    raw, mean, se = {}, {}, {}
    counts = np.zeros(steps, dtype=int)
    for name in STATISTICS:
        raw[name] = _pad([r.stats[name][:, None] for r in replicates], steps)[:, :, 0]
        mean[name], se[name], count = _mean_se(raw[name])
        if name == 'support':
            counts = count.astype(int)
    return CvProfile(max_length=max_length, mean=mean, se=se, raw=raw, counts=counts)


def majority_vote(memberships: np.ndarray) -> np.ndarray:
    """
    Point-wise majority over replicate memberships of shape (B, steps, n).

    At each step only replicates that reached it vote; a row is in the
    box when at least ceil(B_l / 2) of them put it there.
    """
    reached = ~np.isnan(memberships[:, :, 0])
    votes = np.nansum(memberships, axis=0)
    needed = np.ceil(reached.sum(axis=0) / 2.0)
    return (votes >= needed[:, None]) & (needed[:, None] > 0)


def check_support_consistency(
    support: np.ndarray,
    box_support: np.ndarray,
    tolerance: float = CONSISTENCY_TOLERANCE,
) -> List[str]:
    """
    Compare the cross-validated support with the averaged-box support.

    Returns one warning message per step where they differ by more than
    ``tolerance``; each is also logged and issued as a ConsistencyWarning.
    """
    messages = []
    for step in range(min(support.shape[0], box_support.shape[0])):
        if np.isnan(support[step]) or abs(support[step] - box_support[step]) <= tolerance:
            continue
        message = (
            f"Step {step}: averaged-box support {box_support[step]:.3f} differs from "
            f"cross-validated support {support[step]:.3f}"
        )
        logger.warning(message)
        warnings.warn(message, ConsistencyWarning, stacklevel=3)
        messages.append(message)
    return messages


def aggregate_replicates(
    data: SurvivalData,
    replicates: List[ReplicateResult],
    cv_config: CvConfig,
) -> CvResult:
    """Merge replicate results in index order into a CvResult"""
    ok = [r for r in replicates if r.failed is None]
    run_warnings = [message for r in replicates for message in r.warnings]
    run_warnings += [f"Replicate {b} failed: {r.failed}" for b, r in enumerate(replicates) if r.failed]
    if not ok:
        raise CrossValidationError(
            f"All {len(replicates)} cross-validation replicates failed",
            reasons=[r.failed for r in replicates],
        )

    lengths = [r.max_length for r in ok]
    max_length = replicated_max_length(lengths)
    steps = max_length + 1
    profile = build_profile(ok, max_length)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        optimal, flat = select_optimal_length(profile, cv_config.opt_criterion, cv_config.one_se_rule)
    run_warnings += [str(w.message) for w in caught]

    lower_raw = _pad([r.lower for r in ok], steps)
    upper_raw = _pad([r.upper for r in ok], steps)
    lower = average_edges(lower_raw)
    upper = average_edges(upper_raw)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', category=RuntimeWarning)
        lower_se = np.nanstd(lower_raw, axis=0, ddof=1) / np.sqrt(len(ok)) if len(ok) > 1 else np.zeros_like(lower)
        upper_se = np.nanstd(upper_raw, axis=0, ddof=1) / np.sqrt(len(ok)) if len(ok) > 1 else np.zeros_like(upper)
        edge_usage = np.nanmean(_pad([r.edge_usage for r in ok], steps), axis=0)
    lower_se = np.nan_to_num(lower_se)
    upper_se = np.nan_to_num(upper_se)

    boxes = [Box(lower[s], upper[s]) for s in range(steps)]
    membership = np.array([box.contains(data.covariates) for box in boxes])
    votes = majority_vote(_pad([r.membership.astype(float) for r in ok], steps))
    agreement = (membership == votes).mean(axis=1)
    support = profile.mean['support']
    box_support = membership.mean(axis=1)
    run_warnings += check_support_consistency(support, box_support)

    initial = Box.covering(data.covariates)
    edges = box_rule_edges(
        boxes[optimal],
        initial,
        data.covariate_names,
        se_lower=lower_se[optimal],
        se_upper=upper_se[optimal],
        frequency=edge_usage[optimal],
    )
    step_share = np.mean([r.step_share for r in ok], axis=0)

    logger.info(
        f"Replicated {cv_config.technique.value} CV: {len(ok)}/{len(replicates)} replicates, "
        f"max length {max_length}, optimal length {optimal}"
    )
    return CvResult(
        technique=cv_config.technique,
        optimal_length=optimal,
        flat_profile=flat,
        profile=profile,
        boxes=boxes,
        membership=membership,
        vote_membership=votes,
        vote_agreement=agreement,
        support=support,
        box_support=box_support,
        edge_usage=edge_usage,
        covariate_step_share=step_share,
        rule=DecisionRule((edges,)),
        replicate_lengths=lengths,
        covariate_names=data.covariate_names,
        warnings=_dedupe(run_warnings),
    )


def _dedupe(messages: List[str]) -> List[str]:
    seen = set()
    return [m for m in messages if not (m in seen or seen.add(m))]


def replicated_cv(
    data: SurvivalData,
    cv_config: Optional[CvConfig] = None,
    peel_config: Optional[PeelConfig] = None,
    n_jobs: int = 1,
) -> CvResult:
    cv_config = cv_config or CvConfig()
    peel_config = peel_config or PeelConfig()
    replicates = run_replicates(data, cv_config, peel_config, n_jobs=n_jobs)
    return aggregate_replicates(data, replicates, cv_config)
