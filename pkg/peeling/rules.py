"""
Decision Rules
==============
Canonical text form of boxes: one conjunct per constrained face,
``name >= v`` / ``name <= v``, covariates in index order, conjuncts
joined with AND. Boxes of a covering are separate blocks (a disjunction).
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from models import Box, DecisionRule, PeelSide, RuleEdge


def box_rule_edges(
    box: Box,
    initial_box: Box,
    names: Sequence[str],
    se_lower: Optional[np.ndarray] = None,
    se_upper: Optional[np.ndarray] = None,
    frequency: Optional[np.ndarray] = None,
    min_frequency: float = 0.5,
) -> Tuple[RuleEdge, ...]:
    """
    Conjuncts of one box.

    Without ``frequency`` a face is reported when it moved inside the
    starting box. With ``frequency`` (shape (p, 2), lower/upper usage
    across fits) a face is reported when used in at least
    ``min_frequency`` of them, with its standard error attached.
    """
    edges = []
    for j, name in enumerate(names):
        faces = (
            (PeelSide.LOWER, box.lower[j], initial_box.lower[j], se_lower, 0),
            (PeelSide.UPPER, box.upper[j], initial_box.upper[j], se_upper, 1),
        )
        for side, value, start, se, column in faces:
            if frequency is not None:
                if frequency[j, column] < min_frequency:
                    continue
            elif value == start:
                continue
            edges.append(RuleEdge(
                covariate=j,
                name=name,
                side=side,
                value=float(value),
                se=float(se[j]) if se is not None else None,
                frequency=float(frequency[j, column]) if frequency is not None else None,
            ))
    return tuple(edges)


def decision_rule(
    boxes: Sequence[Box],
    initial_box: Box,
    names: Sequence[str],
) -> DecisionRule:
    """Disjunctive rule of a covering, one conjunctive block per box"""
    return DecisionRule(tuple(box_rule_edges(box, initial_box, names) for box in boxes))
