"""
Cross-Validation Techniques
===========================
One replicate of averaged or combined K-fold cross-validation.

- averaged_cv: statistics, support included, are computed on each
  held-out fold inside the box trained without it, then averaged across
  folds step by step; the step box is the edge-wise mean of the fold
  boxes.
- combined_cv: held-out memberships of all folds are concatenated into
  one membership over all n rows and statistics are computed once; the
  step box circumscribes the in-box held-out rows.

Both truncate at the shortest fold trajectory.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np

from models import (
    STATISTICS,
    Box,
    FoldAssignment,
    FoldWithoutEventsWarning,
    PeelConfig,
    ReplicateResult,
    SurvivalData,
    Technique,
    Trajectory,
)
from peeling import box_end_points, peel_trajectory, unpeeled_end_points

from .tuning import cv_max_length

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class FoldFit:
    """Trajectory trained on one fold's training rows"""
    fold: int
    train: np.ndarray
    test: np.ndarray
    trajectory: Trajectory


def fit_folds(data: SurvivalData, folds: FoldAssignment, config: PeelConfig) -> List[FoldFit]:
    fits = []
    for k in range(folds.K):
        train, test = folds.train_index(k), folds.test_index(k)
        trajectory = peel_trajectory(data, train, config)
        logger.debug(f"Fold {k}: {train.size} training rows, trajectory length {trajectory.length}")
        fits.append(FoldFit(k, train, test, trajectory))
    return fits


def _nanmean(values: np.ndarray, axis: int = 0) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', category=RuntimeWarning)
        return np.nanmean(values, axis=axis)


def average_edges(edges: np.ndarray) -> np.ndarray:
    """
    NaN-aware mean over axis 0, clipped to the range of the averaged edges.

    Edges that agree average to exactly their common value, so an unpeeled
    face stays on the extreme data value.
    """
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', category=RuntimeWarning)
        mean = np.nanmean(edges, axis=0)
        return np.clip(mean, np.nanmin(edges, axis=0), np.nanmax(edges, axis=0))


def _edge_usage(fits: List[FoldFit], steps: int, p: int) -> np.ndarray:
    """(steps, p, 2) fraction of fold boxes whose lower/upper face has moved"""
    usage = np.zeros((steps, p, 2))
    for fit in fits:
        start = fit.trajectory.initial_box
        for step in range(steps):
            box = fit.trajectory.box_at(step)
            usage[step, :, 0] += box.lower > start.lower
            usage[step, :, 1] += box.upper < start.upper
    return usage / max(len(fits), 1)


def _step_share(fits: List[FoldFit], max_length: int, p: int) -> np.ndarray:
    """Fraction of fold peel steps 1..max_length spent on each covariate"""
    counts = np.zeros(p)
    for fit in fits:
        for covariate in fit.trajectory.trace_usage[:max_length]:
            if covariate is not None:
                counts[covariate] += 1
    total = len(fits) * max_length
    return counts / total if total else counts


def _warn_empty_folds(data: SurvivalData, fits: List[FoldFit]) -> List[int]:
    empty = []
    for fit in fits:
        if not data.event_mask[fit.test].any():
            message = f"Held-out fold {fit.fold} has no events"
            logger.warning(message)
            warnings.warn(message, FoldWithoutEventsWarning, stacklevel=3)
            empty.append(fit.fold)
    return empty


# =============================================================================
# Averaged
# =============================================================================

def averaged_cv(data: SurvivalData, folds: FoldAssignment, config: PeelConfig) -> ReplicateResult:
    """
    Fold-wise held-out statistics averaged step by step.

    Folds whose held-out rows carry no events contribute no event-based
    statistic; their box still enters the averaged box.
    """
    fits = fit_folds(data, folds, config)
    empty = set(_warn_empty_folds(data, fits))
    max_length = cv_max_length([fit.trajectory.length for fit in fits])
    steps = max_length + 1

    per_fold = {name: np.full((folds.K, steps), np.nan) for name in STATISTICS}
    for fit in fits:
        test = data.subset(fit.test)
        for step in range(steps):
            in_box = fit.trajectory.box_at(step).contains(test.covariates)
            per_fold['support'][fit.fold, step] = in_box.mean()
            points = unpeeled_end_points(test) if step == 0 else box_end_points(test, in_box)
            per_fold['meft'][fit.fold, step] = points.meft
            per_fold['mefp'][fit.fold, step] = points.mefp
            if fit.fold in empty:
                continue
            per_fold['lhr'][fit.fold, step] = points.lhr
            per_fold['lrt'][fit.fold, step] = points.lrt
            per_fold['cer'][fit.fold, step] = points.cer

    lower = average_edges(np.array([[fit.trajectory.box_at(s).lower for s in range(steps)] for fit in fits]))
    upper = average_edges(np.array([[fit.trajectory.box_at(s).upper for s in range(steps)] for fit in fits]))
    membership = np.array([Box(lower[s], upper[s]).contains(data.covariates) for s in range(steps)])

    stats = {name: _nanmean(per_fold[name]) for name in STATISTICS}

    return ReplicateResult(
        technique=Technique.AVERAGED,
        max_length=max_length,
        stats=stats,
        lower=lower,
        upper=upper,
        membership=membership,
        edge_usage=_edge_usage(fits, steps, data.p),
        step_share=_step_share(fits, max_length, data.p),
        fold_lengths=[fit.trajectory.length for fit in fits],
    )


# =============================================================================
# Combined
# =============================================================================

def combined_cv(data: SurvivalData, folds: FoldAssignment, config: PeelConfig) -> ReplicateResult:
    """
    Concatenated held-out memberships, statistics computed once per step.

    A face never moved by any fold at a step keeps the full data range;
    a moved face is set to the extreme in-box held-out value.
    """
    fits = fit_folds(data, folds, config)
    _warn_empty_folds(data, fits)
    max_length = cv_max_length([fit.trajectory.length for fit in fits])
    steps = max_length + 1
    start = Box.covering(data.covariates)
    usage = _edge_usage(fits, steps, data.p)

    membership = np.zeros((steps, data.n), dtype=bool)
    stats = {name: np.full(steps, np.nan) for name in STATISTICS}
    lower = np.tile(start.lower, (steps, 1))
    upper = np.tile(start.upper, (steps, 1))

    for step in range(steps):
        for fit in fits:
            box = fit.trajectory.box_at(step)
            membership[step, fit.test] = box.contains(data.covariates[fit.test])
        in_box = membership[step]
        points = unpeeled_end_points(data) if step == 0 else box_end_points(data, in_box)
        stats['support'][step] = in_box.mean()
        for name in ('lhr', 'lrt', 'cer', 'meft', 'mefp'):
            stats[name][step] = getattr(points, name)
        if in_box.any():
            inside = data.covariates[in_box]
            lower[step] = np.where(usage[step, :, 0] > 0, inside.min(axis=0), start.lower)
            upper[step] = np.where(usage[step, :, 1] > 0, inside.max(axis=0), start.upper)

    return ReplicateResult(
        technique=Technique.COMBINED,
        max_length=max_length,
        stats=stats,
        lower=lower,
        upper=upper,
        membership=membership,
        edge_usage=usage,
        step_share=_step_share(fits, max_length, data.p),
        fold_lengths=[fit.trajectory.length for fit in fits],
    )
