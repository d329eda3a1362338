"""
Peeling Engine
==============
Patient recursive survival peeling.

Components:
- candidate_peels: quantile sub-boxes of the current box
- peel_step / paste_step: one top-down peel, bottom-up refinement
- peel_trajectory: full nested box sequence on the active rows
- coverage_loop: successive boxes on uncovered rows
- trace_statistics: covariate usage and importance traces
- box_end_points: LHR, LRT, CER and KM end points of a split
- decision_rule: canonical rule text
"""

from .candidates import allowed_faces, candidate_peels, criterion_value, quantile_count
from .endpoints import box_end_points, unpeeled_end_points
from .engine import (
    range_importance,
    resolve_peel_plan,
    peel_step,
    paste_step,
    peel_trajectory,
    coverage_loop,
    trace_statistics,
)
from .rules import box_rule_edges, decision_rule

__all__ = [
    'allowed_faces',
    'candidate_peels',
    'criterion_value',
    'quantile_count',
    'box_end_points',
    'unpeeled_end_points',
    'range_importance',
    'resolve_peel_plan',
    'peel_step',
    'paste_step',
    'peel_trajectory',
    'coverage_loop',
    'trace_statistics',
    'box_rule_edges',
    'decision_rule',
]
