"""
Candidate Sub-Boxes
===================
Quantile peels of the current box and the criterion each one scores.

The alpha0-quantile of k sorted in-box values is the value at 1-based
position ceil(alpha0 * k); a lower peel removes every in-box row at or
below it and moves the lower bound to the smallest remaining value, so
bounds are always observed order statistics. Upper peels mirror this
from the top.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models import (
    Box,
    Candidate,
    Criterion,
    DegenerateVarianceError,
    PeelConfig,
    PeelSide,
    SurvivalData,
)
from survival import (
    RiskSetIndex,
    chs_from_index,
    cox_from_table,
    log_rank_from_table,
)

logger = logging.getLogger(__name__)


def quantile_count(alpha0: float, m: int) -> int:
    """Number of order statistics in an alpha0 slab of m values (at least 1)"""
    return max(1, int(math.ceil(alpha0 * m - 1e-9)))


def allowed_faces(
    p: int,
    directions: Optional[Sequence[int]] = None,
    peelable: Optional[np.ndarray] = None,
) -> List[Tuple[int, PeelSide]]:
    """
    Faces open to peeling, in tie-break order: covariate index, then
    lower before upper.
    """
    faces = []
    for j in range(p):
        if peelable is not None and not peelable[j]:
            continue
        direction = directions[j] if directions is not None else 0
        if direction >= 0:
            faces.append((j, PeelSide.LOWER))
        if direction <= 0:
            faces.append((j, PeelSide.UPPER))
    return faces


def candidate_peels(
    data: SurvivalData,
    active: np.ndarray,
    box: Box,
    config: PeelConfig,
    directions: Optional[Sequence[int]] = None,
    peelable: Optional[np.ndarray] = None,
) -> List[Candidate]:
    """
    Eligible peels of ``box`` over the active rows.

    A candidate is excluded when it removes nothing, removes every in-box
    row, or leaves the box without events. Candidate membership masks are
    over the active rows.
    """
    active = np.asarray(active)
    covariates = data.covariates[active]
    events = data.event_mask[active]
    in_box = box.contains(covariates)
    rows = np.flatnonzero(in_box)
    m = rows.shape[0]
    if m == 0:
        return []

    values = covariates[rows]
    ordered = np.sort(values, axis=0)
    k = quantile_count(config.alpha0, m)
    lower_cut = ordered[k - 1]
    upper_cut = ordered[m - k]
    events_in = events[rows]
    n_active = active.shape[0]

    candidates = []
    for j, side in allowed_faces(data.p, directions, peelable):
        column = values[:, j]
        if side is PeelSide.LOWER:
            removed = column <= lower_cut[j]
        else:
            removed = column >= upper_cut[j]
        kept = ~removed
        if not removed.any() or not kept.any():
            continue
        if not events_in[kept].any():
            continue
        bound = float(column[kept].min() if side is PeelSide.LOWER else column[kept].max())
        members = in_box.copy()
        members[rows[removed]] = False
        candidates.append(Candidate(
            covariate=j,
            side=side,
            bound=bound,
            members=members,
            support=float(np.count_nonzero(members)) / n_active,
        ))
    return candidates


def criterion_value(index: RiskSetIndex, members: np.ndarray, criterion: Criterion) -> float:
    """Criterion z of an in-box mask over the rows behind ``index``; NaN if undefined"""
    if criterion is Criterion.CHS:
        return chs_from_index(index, members)
    table = index.table(members)
    if criterion is Criterion.LHR:
        return cox_from_table(table).eta
    try:
        return log_rank_from_table(table)
    except DegenerateVarianceError:
        return float('nan')


def initial_criterion(index: RiskSetIndex, criterion: Criterion) -> float:
    """Criterion of the unpeeled box: 0 for LRT and LHR, all events for CHS"""
    if criterion is Criterion.CHS:
        return float(index.n_events)
    return 0.0
