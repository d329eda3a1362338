"""
Nonparametric Estimators
========================
Kaplan-Meier and Nelson-Aalen curves from a risk table, and the
KM-derived box end points.
"""

from typing import Optional

import numpy as np

from models import KmEndPoints, RiskTable, StepCurve, SurvivalData

from .risk_table import build_risk_table


def kaplan_meier(table: RiskTable) -> StepCurve:
    """Product-limit survival curve; 1 before the first event time"""
    factors = 1.0 - table.deaths / table.at_risk
    values = np.clip(np.cumprod(factors), 0.0, 1.0)
    return StepCurve(table.event_times.copy(), values, table.last_time, 'survival')


def nelson_aalen(table: RiskTable) -> StepCurve:
    """Cumulative hazard: sum of d_h / n_h over event times <= t"""
    values = np.cumsum(table.deaths / table.at_risk)
    return StepCurve(table.event_times.copy(), values, table.last_time, 'cumulative_hazard')


def group_curve(data: SurvivalData, mask: np.ndarray) -> StepCurve:
    """KM curve of a subgroup; flat at 1 when the subgroup has no events"""
    subset = data.subset(np.asarray(mask, dtype=bool))
    return kaplan_meier(build_risk_table(subset, allow_empty=True))


def km_end_points(
    curve: StepCurve,
    horizon_time: Optional[float] = None,
    horizon_prob: Optional[float] = None,
) -> KmEndPoints:
    """
    Limit end points of a survival curve.

    MEFT is the largest observed time behind the curve and MEFP the curve
    value there. With ``horizon_prob`` the first time the curve drops to
    that probability is returned as EFT; with ``horizon_time`` the curve
    value at that time is returned as EFP. Unreachable horizons fall back
    to the limit end points with the reached flag cleared.
    """
    meft = float(curve.end_time)
    mefp = float(curve.evaluate(meft))
    eft, efp = None, None
    eft_reached, efp_reached = False, False

    if horizon_prob is not None:
        crossed = np.flatnonzero(np.asarray(curve.values) <= horizon_prob)
        if crossed.size:
            eft, eft_reached = float(curve.breakpoints[crossed[0]]), True
        else:
            eft = meft

    if horizon_time is not None:
        if horizon_time <= meft:
            efp, efp_reached = float(curve.evaluate(horizon_time)), True
        else:
            efp = mefp

    return KmEndPoints(meft, mefp, eft, efp, eft_reached, efp_reached)
