"""
Patient Recursive Survival Peeling
==================================
Top-down peeling, bottom-up pasting and the outer covering loop.

Architecture: Functional Core
Every function here is a deterministic function of its inputs. Boxes are
grown on the "active" rows of a dataset (all rows, a training fold, or
what the covering loop has left); supports are fractions of the active
rows and the starting box is the covariate range of the whole dataset.

Usage:
    from peeling import peel_trajectory
    from models import PeelConfig, Criterion

    trajectory = peel_trajectory(data, config=PeelConfig(criterion=Criterion.LRT))
    print(trajectory.length, trajectory.final.support)
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models import (
    Box,
    ConfigError,
    CoverageResult,
    Criterion,
    NoCandidatesError,
    PeelConfig,
    PeelSide,
    StepRecord,
    SurvivalData,
    Trajectory,
)
from survival import RiskSetIndex, cox_score_test

from .candidates import (
    allowed_faces,
    candidate_peels,
    criterion_value,
    initial_criterion,
    quantile_count,
)
from .endpoints import box_end_points, unpeeled_end_points
from .rules import decision_rule

logger = logging.getLogger(__name__)


# =============================================================================
# Peel plan: which faces may move
# =============================================================================

def resolve_peel_plan(
    data: SurvivalData,
    config: PeelConfig,
) -> Tuple[np.ndarray, Optional[Tuple[int, ...]]]:
    """
    Peelable covariates and peel directions for the given (training) rows.

    Pre-selection keeps the ``config.preselect`` covariates with the
    largest absolute univariate Cox score. Directed mode without explicit
    directions takes each covariate's direction from the sign of that
    score: higher hazard with larger values keeps the high end.
    """
    peelable = np.ones(data.p, dtype=bool)
    scores = None

    if config.preselect is not None and config.preselect < data.p:
        scores = cox_score_test(data)
        keep = np.argsort(-np.abs(scores), kind='stable')[: config.preselect]
        peelable[:] = False
        peelable[keep] = True
        logger.debug(f"Pre-selected covariates: {sorted(keep.tolist())}")

    directions = None
    if config.directed:
        if config.directions is None:
            if scores is None:
                scores = cox_score_test(data)
            directions = tuple(int(s) for s in np.sign(scores))
        else:
            if len(config.directions) != data.p:
                raise ConfigError(
                    f"{len(config.directions)} peel directions given for {data.p} covariates"
                )
            directions = config.directions
    return peelable, directions


def _record(
    data: SurvivalData,
    step: int,
    box: Box,
    members: np.ndarray,
    z: float,
    rate: float,
    covariate: Optional[int] = None,
    side: Optional[PeelSide] = None,
    pasted: bool = False,
) -> StepRecord:
    n_in = int(np.count_nonzero(members))
    return StepRecord(
        step=step,
        box=box,
        support=n_in / data.n,
        n_in=n_in,
        n_events_in=int(np.count_nonzero(members & data.event_mask)),
        in_box=members,
        criterion_value=z,
        rate=rate,
        end_points=box_end_points(data, members),
        peeled_covariate=covariate,
        peeled_side=side,
        pasted=pasted,
    )


# =============================================================================
# Top-down peeling
# =============================================================================

def peel_step(
    data: SurvivalData,
    active: np.ndarray,
    box: Box,
    previous_z: float,
    previous_beta: float,
    config: PeelConfig,
    *,
    step: int = 1,
    index: Optional[RiskSetIndex] = None,
    directions: Optional[Sequence[int]] = None,
    peelable: Optional[np.ndarray] = None,
) -> StepRecord:
    """
    Choose the peel with the largest rate of criterion increase.

    r = (z - previous_z) / (previous_beta - beta). Candidates whose
    support would fall below beta0 are not eligible. Ties go to the lower
    covariate index, then to the lower face.

    Raises:
        NoCandidatesError: When no candidate is eligible; ``reason`` tells
            whether minimal support or candidate validity ended the loop
    """
    active = np.asarray(active)
    sub = data.subset(active)
    if index is None:
        index = RiskSetIndex(sub.times, sub.events)

    candidates = candidate_peels(data, active, box, config, directions, peelable)
    if not candidates:
        raise NoCandidatesError(f"No eligible peel at step {step}", reason='no_candidates')
    supported = [c for c in candidates if c.support >= config.beta0]
    if not supported:
        raise NoCandidatesError(f"Every peel at step {step} falls below beta0", reason='min_support')

    best, best_rate, best_z = None, -np.inf, None
    for candidate in supported:
        z = criterion_value(index, candidate.members, config.criterion)
        if np.isnan(z):
            continue
        rate = (z - previous_z) / (previous_beta - candidate.support)
        if best is None or rate > best_rate:
            best, best_rate, best_z = candidate, rate, z
    if best is None:
        raise NoCandidatesError(f"No candidate at step {step} has a defined criterion")

    logger.debug(
        f"Step {step}: peel covariate {best.covariate} {best.side.value} at {best.bound:.6g}, "
        f"support {best.support:.4f}, z={best_z:.6g}, r={best_rate:.6g}"
    )
    return _record(
        sub,
        step,
        box.with_bound(best.covariate, best.side, best.bound),
        best.members,
        best_z,
        float(best_rate),
        covariate=best.covariate,
        side=best.side,
    )


# =============================================================================
# Bottom-up pasting
# =============================================================================

def _paste_objective(z: float, support: float, config: PeelConfig) -> float:
    # CHS pastes compare in-box events per in-box row
    if config.criterion is Criterion.CHS:
        return z / support
    return z


def paste_step(
    data: SurvivalData,
    active: np.ndarray,
    box: Box,
    current_z: float,
    config: PeelConfig,
    *,
    parent: Optional[StepRecord] = None,
    last: Optional[StepRecord] = None,
    index: Optional[RiskSetIndex] = None,
    directions: Optional[Sequence[int]] = None,
    peelable: Optional[np.ndarray] = None,
) -> Optional[StepRecord]:
    """
    Re-expand faces of the final box while doing so raises the criterion.

    Each face may admit the nearest alpha0 slab of the active rows it
    currently excludes, counted among the excluded rows beside that face
    and restricted to rows inside the parent (previous step) box, so
    nesting is kept and the support stays strictly below the parent's.
    The best expansion with positive rate is applied and the search
    repeats. Returns None when no paste was applied.
    """
    active = np.asarray(active)
    sub = data.subset(active)
    covariates = sub.covariates
    if index is None:
        index = RiskSetIndex(sub.times, sub.events)

    parent_box = parent.box if parent is not None else Box.covering(data.covariates)
    parent_support = parent.support if parent is not None else 1.0
    parent_in = parent_box.contains(covariates)

    members = box.contains(covariates)
    support = np.count_nonzero(members) / sub.n
    z = current_z
    faces = allowed_faces(sub.p, directions, peelable)
    pasted = False

    while True:
        within = (covariates >= box.lower) & (covariates <= box.upper)
        misses = np.count_nonzero(~within, axis=1)
        objective = _paste_objective(z, support, config)

        best = None
        for j, side in faces:
            others_inside = (misses == 0) | ((misses == 1) & ~within[:, j])
            column = covariates[:, j]
            if side is PeelSide.LOWER:
                outside = others_inside & parent_in & (column < box.lower[j])
                values = np.sort(column[outside])[::-1]
            else:
                outside = others_inside & parent_in & (column > box.upper[j])
                values = np.sort(column[outside])
            if values.size == 0:
                continue
            k = quantile_count(config.alpha0, values.size)
            bound = float(values[k - 1])
            new_box = box.with_bound(j, side, bound)
            new_members = new_box.contains(covariates)
            new_support = np.count_nonzero(new_members) / sub.n
            if new_support >= parent_support:
                continue
            new_z = criterion_value(index, new_members, config.criterion)
            if np.isnan(new_z):
                continue
            rate = (_paste_objective(new_z, new_support, config) - objective) / (new_support - support)
            if rate > 0 and (best is None or rate > best[0]):
                best = (rate, new_box, new_members, new_support, new_z, j, side)

        if best is None:
            break
        _, box, members, support, z, j, side = best
        pasted = True
        logger.debug(f"Paste covariate {j} {side.value}: support {support:.4f}, z={z:.6g}")

    if not pasted:
        return None

    step = last.step if last is not None else 1
    parent_z = parent.criterion_value if parent is not None else float('nan')
    rate = (z - parent_z) / (parent_support - support)
    return _record(
        sub,
        step,
        box,
        members,
        z,
        float(rate),
        covariate=last.peeled_covariate if last is not None else None,
        side=last.peeled_side if last is not None else None,
        pasted=True,
    )


# =============================================================================
# Trajectory
# =============================================================================

def range_importance(boxes: Sequence[Box], initial: Box) -> np.ndarray:
    """
    (p, steps) signed importance of a box sequence.

    Entry [j, l] is the fraction of covariate j's starting range removed
    from below minus the fraction removed from above by step l; constant
    covariates stay at 0.
    """
    width = initial.upper - initial.lower
    safe = np.where(width > 0, width, 1.0)
    lowers = np.array([b.lower for b in boxes])
    uppers = np.array([b.upper for b in boxes])
    importance = ((lowers - initial.lower) - (initial.upper - uppers)) / safe
    importance[:, width <= 0] = 0.0
    return importance.T


def trace_statistics(trajectory: Trajectory) -> Tuple[List[Optional[int]], np.ndarray]:
    """Covariate usage (VU[l-1] is the covariate peeled at step l) and range importance traces"""
    usage = [s.peeled_covariate for s in trajectory.steps[1:]]
    return usage, range_importance(trajectory.boxes, trajectory.initial_box)


def peel_trajectory(
    data: SurvivalData,
    active: Optional[np.ndarray] = None,
    config: Optional[PeelConfig] = None,
) -> Trajectory:
    """
    Grow one nested box sequence on the active rows.

    Peeling stops when the next peel would take the support below beta0,
    when the step limit is reached, or when no candidate is eligible.
    Pasting, when enabled, refines only the final box.
    """
    config = config or PeelConfig()
    active = np.arange(data.n) if active is None else np.asarray(active)
    sub = data.subset(active)
    index = RiskSetIndex(sub.times, sub.events)
    initial_box = Box.covering(data.covariates)
    peelable, directions = resolve_peel_plan(sub, config)

    start = StepRecord(
        step=0,
        box=initial_box,
        support=1.0,
        n_in=sub.n,
        n_events_in=sub.n_events,
        in_box=np.ones(sub.n, dtype=bool),
        criterion_value=initial_criterion(index, config.criterion),
        rate=float('nan'),
        end_points=unpeeled_end_points(sub),
    )
    steps = [start]
    stop_reason = 'max_steps'

    if sub.n_events == 0:
        stop_reason = 'no_events'
    else:
        for step in range(1, config.step_limit + 1):
            previous = steps[-1]
            try:
                record = peel_step(
                    data, active, previous.box, previous.criterion_value, previous.support, config,
                    step=step, index=index, directions=directions, peelable=peelable,
                )
            except NoCandidatesError as exc:
                stop_reason = exc.reason
                break
            steps.append(record)

    if config.pasting and len(steps) > 1:
        pasted = paste_step(
            data, active, steps[-1].box, steps[-1].criterion_value, config,
            parent=steps[-2], last=steps[-1], index=index,
            directions=directions, peelable=peelable,
        )
        if pasted is not None:
            steps[-1] = pasted

    trajectory = Trajectory(
        steps=steps,
        active=active,
        n_total=data.n,
        initial_box=initial_box,
        covariate_names=data.covariate_names,
        criterion=config.criterion,
        empty=len(steps) == 1,
        stop_reason=stop_reason,
        peelable=peelable,
        directions=directions,
    )
    trajectory.trace_usage, trajectory.trace_importance = trace_statistics(trajectory)
    if trajectory.empty:
        logger.info(f"Empty trajectory on {sub.n} rows ({stop_reason})")
    return trajectory


# =============================================================================
# Covering loop
# =============================================================================

def coverage_loop(
    data: SurvivalData,
    config: Optional[PeelConfig] = None,
    max_boxes: int = 1,
) -> CoverageResult:
    """
    Grow up to ``max_boxes`` boxes, each on the rows the previous boxes
    left uncovered. Stops early when the remaining support is at or below
    beta0, the remaining rows carry no events, or a box peels nothing.
    """
    if max_boxes < 1:
        raise ConfigError("max_boxes must be >= 1")
    config = config or PeelConfig()

    remaining = np.arange(data.n)
    trajectories = []
    covered = np.zeros(data.n, dtype=bool)
    for m in range(max_boxes):
        if remaining.size / data.n <= config.beta0:
            break
        if not data.event_mask[remaining].any():
            break
        trajectory = peel_trajectory(data, remaining, config)
        if trajectory.empty:
            break
        trajectories.append(trajectory)
        in_box = trajectory.membership(trajectory.length)
        covered |= in_box
        remaining = remaining[~in_box[remaining]]
        logger.info(
            f"Box {m + 1}: {trajectory.length} steps, {int(in_box.sum())} rows covered, "
            f"{remaining.size} remaining"
        )
        if remaining.size == 0:
            break

    rule = decision_rule([t.final.box for t in trajectories], Box.covering(data.covariates),
                         data.covariate_names)
    return CoverageResult(trajectories=trajectories, rule=rule, membership=covered)
