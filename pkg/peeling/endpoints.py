"""
Box End Points
==============
End-point statistics of an in-box / out-of-box split: log hazard ratio,
log-rank, concordance error rate and the in-box Kaplan-Meier limit end
points.

A split with every row in the box is the unpeeled reference and takes the
conventional values LHR = 0, LRT = 0, CER = 1.
"""

import logging

import numpy as np

from models import (
    DegenerateVarianceError,
    EndPoints,
    NoPermissiblePairsError,
    SurvivalData,
)
from survival import (
    RiskSetIndex,
    concordance_error_rate,
    cox_from_table,
    group_curve,
    km_end_points,
    log_rank_from_table,
)

logger = logging.getLogger(__name__)

NAN = float('nan')


def unpeeled_end_points(data: SurvivalData) -> EndPoints:
    km = km_end_points(group_curve(data, np.ones(data.n, dtype=bool)))
    return EndPoints(lhr=0.0, lrt=0.0, cer=1.0, meft=km.meft, mefp=km.mefp)


def box_end_points(data: SurvivalData, in_box: np.ndarray) -> EndPoints:
    """
    End points of the split given by ``in_box`` (length data.n).

    Undefined statistics come back as NaN with a reason code instead of
    raising, so callers can average across folds and replicates.
    """
    in_box = np.asarray(in_box).astype(bool)
    if in_box.all():
        return unpeeled_end_points(data)
    if not in_box.any():
        return EndPoints(NAN, NAN, NAN, NAN, NAN, reasons={
            key: 'empty_box' for key in ('lhr', 'lrt', 'cer', 'meft', 'mefp')
        })

    km = km_end_points(group_curve(data, in_box))
    if data.n_events == 0:
        return EndPoints(NAN, NAN, NAN, km.meft, km.mefp, reasons={
            key: 'no_events' for key in ('lhr', 'lrt', 'cer')
        })

    reasons = {}
    table = RiskSetIndex(data.times, data.events).table(in_box)
    try:
        lrt = log_rank_from_table(table)
    except DegenerateVarianceError:
        lrt = NAN
        reasons['lrt'] = 'degenerate_variance'

    cox = cox_from_table(table)
    try:
        cer = concordance_error_rate(data, in_box.astype(float))
    except NoPermissiblePairsError:
        cer = NAN
        reasons['cer'] = 'no_permissible_pairs'

    return EndPoints(
        lhr=cox.eta,
        lrt=lrt,
        cer=cer,
        meft=km.meft,
        mefp=km.mefp,
        lhr_separated=cox.separated,
        reasons=reasons,
    )
