"""
Peeling Length Tuning
=====================
Cross-validated maximum length and optimal length selection.
"""

import logging
import warnings
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from models import CvProfile, FlatProfileWarning, OptCriterion

logger = logging.getLogger(__name__)

FLAT_TOLERANCE = 1e-6


def cv_max_length(fold_lengths: Sequence[int]) -> int:
    """Smallest fold trajectory length, so every fold covers every step"""
    if len(fold_lengths) == 0:
        return 0
    return int(min(fold_lengths))


def select_optimal_length(
    profile: Union[CvProfile, Sequence[float]],
    opt_criterion: OptCriterion,
    one_se_rule: bool = False,
    se: Optional[Sequence[float]] = None,
) -> Tuple[int, bool]:
    """
    Optimal peeling length from a profile indexed by step (step 0 first).

    Steps 1..max are searched: argmax of LHR/LRT means, argmin of CER
    means, first step on ties. With the one-standard-error rule, the
    smallest step whose mean is within one standard error of the optimum
    is returned instead.

    Returns:
        (length, flat) where ``flat`` marks a profile whose range is below
        1e-6 and whose optimum is therefore unreliable
    """
    opt_criterion = OptCriterion(opt_criterion)
    if isinstance(profile, CvProfile):
        key = opt_criterion.value
        means = profile.mean[key]
        se = profile.se[key]
    else:
        means = np.asarray(profile, dtype=float)
        se = np.zeros_like(means) if se is None else np.asarray(se, dtype=float)

    defined = ~np.isnan(means)
    flat = bool(defined.sum() == 0 or np.ptp(means[defined]) < FLAT_TOLERANCE)
    if flat:
        message = "Cross-validated profile is flat; optimal length is unreliable"
        logger.warning(message)
        warnings.warn(message, FlatProfileWarning, stacklevel=2)

    candidates = [step for step in range(1, means.shape[0]) if defined[step]]
    if not candidates:
        return 0, flat

    values = means[candidates]
    position = int(np.argmax(values) if opt_criterion.maximise else np.argmin(values))
    best = candidates[position]
    if not one_se_rule:
        return best, flat

    margin = se[best] if np.isfinite(se[best]) else 0.0
    for step in candidates:
        if opt_criterion.maximise:
            within = means[step] >= means[best] - margin
        else:
            within = means[step] <= means[best] + margin
        if within:
            return step, flat
    return best, flat
