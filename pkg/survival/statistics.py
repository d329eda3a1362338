"""
Two-Group Survival Statistics
=============================
Statistics comparing an in-box group (g=1) against the out-of-box group:

- log_rank_statistic: standardized log-rank, positive when the in-box
  group has excess events
- chs_statistic: cumulative hazard summary, identical to the in-box event
  count
- cox_lhr: log hazard ratio of the box indicator (one-covariate Cox,
  Breslow ties)
- concordance_error_rate: 1 - Harrell's C
- cox_score_test: univariate Cox score test for continuous covariates

The ``*_from_table`` / ``*_from_index`` variants are the fast paths used
inside the peeling loop, where the risk-set index is built once per
trajectory.
"""

import logging
import warnings
from typing import Tuple

import numpy as np

from models import (
    CoxFit,
    DegenerateVarianceError,
    InvariantViolation,
    NoEventsError,
    NoPermissiblePairsError,
    RiskTable,
    SeparationWarning,
    SurvivalData,
)

from .risk_table import RiskSetIndex

logger = logging.getLogger(__name__)

LHR_CLAMP = 10.0
NEWTON_TOL = 1e-8
NEWTON_MAX_ITER = 50
CONCORDANCE_CHUNK = 1024


def _index_for(data: SurvivalData, in_box: np.ndarray) -> Tuple[RiskSetIndex, np.ndarray]:
    in_box = np.asarray(in_box).astype(bool)
    if in_box.shape != (data.n,):
        raise ValueError(f"in_box has shape {in_box.shape}, expected ({data.n},)")
    if data.n_events == 0:
        raise NoEventsError(f"All {data.n} observations are censored")
    return RiskSetIndex(data.times, data.events), in_box


# =============================================================================
# Log-rank
# =============================================================================

def log_rank_from_table(table: RiskTable) -> float:
    """
    Standardized log-rank statistic from a grouped risk table.

    Terms are accumulated in event-time order; the variance carries the
    tie factor (n-d)/(n-1), with n == 1 terms contributing 0.
    """
    d = table.deaths.astype(float)
    n = table.at_risk.astype(float)
    d1 = table.deaths_in.astype(float)
    n1 = table.at_risk_in.astype(float)
    n2 = n - n1

    numerator = np.sum((d1 * n - n1 * d) / n)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(n > 1, (d * n1 * n2 * (n - d)) / (n * n * (n - 1.0)), 0.0)
    variance = float(np.sum(terms))
    if not variance > 0.0:
        raise DegenerateVarianceError("Log-rank variance is zero")
    return float(numerator / np.sqrt(variance))


def log_rank_statistic(data: SurvivalData, in_box: np.ndarray) -> float:
    """
    Two-sample log-rank statistic, in-box versus out-of-box.

    Raises:
        NoEventsError: If no observation has an event
        DegenerateVarianceError: If the variance is zero (e.g. one group empty)
    """
    index, in_box = _index_for(data, in_box)
    return log_rank_from_table(index.table(in_box))


# =============================================================================
# Cumulative hazard summary
# =============================================================================

def chs_from_index(index: RiskSetIndex, in_box: np.ndarray) -> float:
    """
    Sum over in-box rows of the in-box Nelson-Aalen value at each row's
    time. The sum telescopes to the in-box event count; that identity is
    checked and the exact count returned.
    """
    in_box = np.asarray(in_box).astype(bool)
    n_events_in = int(np.count_nonzero(index.events & in_box))
    if n_events_in == 0:
        return 0.0
    total = float(np.sum(index.cumulative_hazard_in(in_box)[in_box]))
    if abs(total - n_events_in) > 1e-9 * max(1, n_events_in):
        raise InvariantViolation(
            f"Cumulative hazard summary {total!r} differs from in-box event count {n_events_in}"
        )
    return float(n_events_in)


def chs_statistic(data: SurvivalData, in_box: np.ndarray) -> float:
    in_box = np.asarray(in_box).astype(bool)
    if not in_box.any():
        raise ValueError("In-box group is empty")
    return chs_from_index(RiskSetIndex(data.times, data.events), in_box)


# =============================================================================
# Log hazard ratio (one-covariate Cox, Breslow ties)
# =============================================================================

def _log_denominator(n1: np.ndarray, n2: np.ndarray, eta: float) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.logaddexp(np.log(n1) + eta, np.log(n2))


def partial_loglik(table: RiskTable, eta: float) -> float:
    """Breslow partial log-likelihood of the in-box indicator at eta"""
    n1 = table.at_risk_in.astype(float)
    n2 = table.at_risk_out.astype(float)
    d = table.deaths.astype(float)
    d1 = table.deaths_in.astype(float)
    return float(np.sum(d1 * eta - d * _log_denominator(n1, n2, eta)))


def _score_information(table: RiskTable, eta: float) -> Tuple[float, float]:
    n1 = table.at_risk_in.astype(float)
    n2 = table.at_risk_out.astype(float)
    d = table.deaths.astype(float)
    d1 = table.deaths_in.astype(float)
    with np.errstate(divide='ignore'):
        share = np.exp(np.log(n1) + eta - _log_denominator(n1, n2, eta))
    score = float(np.sum(d1 - d * share))
    information = float(np.sum(d * share * (1.0 - share)))
    return score, information


def cox_from_table(table: RiskTable) -> CoxFit:
    """
    Maximise the partial likelihood over eta.

    Monotone likelihoods are detected from the limiting scores and
    returned clamped at +/-10 with ``separated`` set. A flat likelihood
    returns eta=0, unflagged. Otherwise Newton iterations with step
    halving run from eta=0; ``separated`` is set only when they reach the
    clamp.
    """
    d = table.deaths
    d1 = table.deaths_in
    n1 = table.at_risk_in
    n2 = table.at_risk_out

    score_plus_inf = int(d1.sum() - d[n1 > 0].sum())
    score_minus_inf = int(d1.sum() - d[n2 == 0].sum())

    if score_plus_inf == 0 and score_minus_inf == 0:
        # the in-box indicator carries no information
        return CoxFit(0.0, loglik=partial_loglik(table, 0.0))
    if score_plus_inf == 0:
        return CoxFit(LHR_CLAMP, separated=True, converged=False,
                      loglik=partial_loglik(table, LHR_CLAMP))
    if score_minus_inf == 0:
        return CoxFit(-LHR_CLAMP, separated=True, converged=False,
                      loglik=partial_loglik(table, -LHR_CLAMP))

    eta = 0.0
    loglik = partial_loglik(table, eta)
    for iteration in range(1, NEWTON_MAX_ITER + 1):
        score, information = _score_information(table, eta)
        if abs(score) < NEWTON_TOL:
            return CoxFit(eta, converged=True, iterations=iteration - 1, loglik=loglik)
        if information <= 0.0:
            break
        step = score / information
        for _ in range(60):
            candidate = float(np.clip(eta + step, -LHR_CLAMP, LHR_CLAMP))
            candidate_loglik = partial_loglik(table, candidate)
            if candidate_loglik >= loglik:
                break
            step *= 0.5
        else:
            break
        if candidate == eta:
            break
        eta, loglik = candidate, candidate_loglik

    score, _ = _score_information(table, eta)
    converged = abs(score) < NEWTON_TOL
    at_clamp = abs(eta) >= LHR_CLAMP
    if not converged and not at_clamp:
        logger.debug(f"Cox Newton stopped at eta={eta:.6g} with score {score:.3g}")
    return CoxFit(eta, separated=at_clamp, converged=converged,
                  iterations=iteration, loglik=loglik)


def cox_lhr(data: SurvivalData, in_box: np.ndarray) -> CoxFit:
    """
    Log hazard ratio of the in-box indicator.

    Returns a CoxFit; ``eta`` is the estimate and ``separated`` flags a
    clamped, monotone-likelihood estimate.
    """
    index, in_box = _index_for(data, in_box)
    fit = cox_from_table(index.table(in_box))
    if fit.separated:
        message = f"Monotone partial likelihood; log hazard ratio clamped at {fit.eta:+g}"
        logger.warning(message)
        warnings.warn(message, SeparationWarning, stacklevel=2)
    return fit


# =============================================================================
# Univariate score test (continuous covariates)
# =============================================================================

def cox_score_test(data: SurvivalData) -> np.ndarray:
    """
    Score statistic U(0)/sqrt(I(0)) of each covariate in a univariate
    Cox model with Breslow ties. Zero where the information vanishes.
    """
    index = RiskSetIndex(data.times, data.events)
    if index.n_events == 0:
        return np.zeros(data.p)

    x = data.covariates
    n_times = index.n_times
    sums = np.zeros((n_times + 1, data.p))
    squares = np.zeros((n_times + 1, data.p))
    np.add.at(sums, index.reach, x)
    np.add.at(squares, index.reach, x * x)
    risk_sum = np.cumsum(sums[::-1], axis=0)[::-1][1:]
    risk_square = np.cumsum(squares[::-1], axis=0)[::-1][1:]

    at_risk = index.at_risk.astype(float)[:, None]
    deaths = index.deaths.astype(float)[:, None]
    event_sum = np.zeros((n_times, data.p))
    np.add.at(event_sum, index.event_slot[index.events], x[index.events])

    mean = risk_sum / at_risk
    variance = np.maximum(risk_square / at_risk - mean * mean, 0.0)
    score = np.sum(event_sum - deaths * mean, axis=0)
    information = np.sum(deaths * variance, axis=0)
    with np.errstate(divide='ignore', invalid='ignore'):
        z = np.where(information > 1e-14, score / np.sqrt(information), 0.0)
    return z


# =============================================================================
# Concordance
# =============================================================================

def concordance_error_rate(data: SurvivalData, risk_score: np.ndarray) -> float:
    """
    1 - Harrell's C.

    A pair (i, j) is comparable when Y_i < Y_j and i had an event, or when
    Y_i == Y_j, i had an event and j did not. It is concordant when i,
    the earlier failure, carries the higher risk score; score ties count
    one half.

    Raises:
        NoPermissiblePairsError: If no pair is comparable
    """
    risk_score = np.asarray(risk_score, dtype=float)
    if risk_score.shape != (data.n,):
        raise ValueError(f"risk_score has shape {risk_score.shape}, expected ({data.n},)")

    times = data.times
    events = data.event_mask
    permissible_total = 0
    concordant_total = 0.0
    for start in range(0, data.n, CONCORDANCE_CHUNK):
        rows = slice(start, start + CONCORDANCE_CHUNK)
        t_i = times[rows, None]
        e_i = events[rows, None]
        s_i = risk_score[rows, None]
        permissible = e_i & ((t_i < times[None, :]) | ((t_i == times[None, :]) & ~events[None, :]))
        permissible_total += int(np.count_nonzero(permissible))
        concordant_total += float(np.count_nonzero(permissible & (s_i > risk_score[None, :])))
        concordant_total += 0.5 * float(np.count_nonzero(permissible & (s_i == risk_score[None, :])))

    if permissible_total == 0:
        raise NoPermissiblePairsError("No comparable pairs for the concordance index")
    return 1.0 - concordant_total / permissible_total
