"""
Survival Core
=============
Deterministic estimators for right-censored data.

Components:
- build_risk_table / RiskSetIndex: distinct event times, deaths, at-risk counts
- kaplan_meier, nelson_aalen, km_end_points: curves and limit end points
- log_rank_statistic, chs_statistic, cox_lhr, concordance_error_rate:
  in-box versus out-of-box statistics
"""

from .risk_table import RiskSetIndex, build_risk_table
from .estimators import kaplan_meier, nelson_aalen, group_curve, km_end_points
from .statistics import (
    LHR_CLAMP,
    log_rank_statistic,
    log_rank_from_table,
    chs_statistic,
    chs_from_index,
    cox_lhr,
    cox_from_table,
    partial_loglik,
    cox_score_test,
    concordance_error_rate,
)

__all__ = [
    'RiskSetIndex',
    'build_risk_table',
    'kaplan_meier',
    'nelson_aalen',
    'group_curve',
    'km_end_points',
    'LHR_CLAMP',
    'log_rank_statistic',
    'log_rank_from_table',
    'chs_statistic',
    'chs_from_index',
    'cox_lhr',
    'cox_from_table',
    'partial_loglik',
    'cox_score_test',
    'concordance_error_rate',
]
