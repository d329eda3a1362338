"""
Simulated Survival Models
=========================
Exponential event times with proportional hazards and uniform censoring.

    T_i ~ Exp(exp(eta(x_i)))      baseline hazard 1
    C_i ~ U(0, v)                 v calibrated to a target censored fraction
    Y_i = min(T_i, C_i), delta_i = 1(T_i <= C_i)

Usage:
    from simulation import spec_from_preset, generate
    spec = spec_from_preset(presets, '2', seed=7)
    data, truth = generate(spec)
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from models import (
    Box,
    CalibrationFailure,
    ConfigError,
    CovariateLaw,
    GroundTruth,
    SimModelSpec,
    SurvivalData,
)

logger = logging.getLogger(__name__)

SIMULATION_STREAM = 3
CALIBRATION_XTOL = 1e-6
CALIBRATION_SPAN = 1e8


# =============================================================================
# Presets
# =============================================================================

def spec_from_preset(
    presets: Dict,
    model_id: str,
    n: Optional[int] = None,
    p: Optional[int] = None,
    censoring_rate: Optional[float] = None,
    seed: int = 0,
    sigma: Optional[float] = None,
) -> SimModelSpec:
    """
    Build a SimModelSpec from the ``models`` section of the presets file.

    A larger ``p`` than the preset pads the coefficients with zeros (extra
    noise covariates) and the planted region with the unit interval.
    """
    models = presets.get('models', {})
    model_id = str(model_id)
    if model_id not in models:
        raise ConfigError(f"Unknown simulation model '{model_id}'; known: {sorted(models)}")
    preset = models[model_id]

    n = int(n or preset['n'])
    p = int(p or preset['p'])
    if censoring_rate is None:
        censoring_rate = presets.get('defaults', {}).get('censoring_rate', 0.5)

    coefficients = preset.get('coefficients')
    if coefficients is not None:
        if p < len(coefficients):
            raise ConfigError(f"Model {model_id} needs p >= {len(coefficients)}, got {p}")
        coefficients = tuple(float(c) for c in coefficients) + (0.0,) * (p - len(coefficients))

    planted = preset.get('planted_box')
    planted_box = None
    if planted is not None:
        extra = p - len(planted['lower'])
        planted_box = Box(
            list(planted['lower']) + [0.0] * extra,
            list(planted['upper']) + [1.0] * extra,
        )

    return SimModelSpec(
        model_id=model_id,
        n=n,
        p=p,
        covariate_law=CovariateLaw(preset.get('covariate_law', 'uniform')),
        coefficients=coefficients,
        censoring_rate=float(censoring_rate),
        planted_box=planted_box,
        sigma=float(sigma if sigma is not None else preset.get('sigma', 1.0)),
        n_nonzero=min(int(preset.get('n_nonzero', 0)), p),
        seed=int(seed),
    )


# =============================================================================
# Censoring calibration
# =============================================================================

def censoring_probability(hazards: np.ndarray, bound: float) -> float:
    """Mean P(C < T) for T ~ Exp(hazard), C ~ U(0, bound)"""
    x = np.asarray(hazards, dtype=float) * bound
    return float(np.mean(-np.expm1(-x) / x))


def calibrate_censoring(hazards: np.ndarray, pi: float) -> float:
    """
    Censoring bound v whose mean censoring probability equals ``pi``.

    Bisection on log v; the probability falls from 1 to 0 as v grows, so
    the root is bracketed by bounds scaled to the hazard range.
    """
    hazards = np.asarray(hazards, dtype=float)
    if hazards.size == 0 or not np.all(np.isfinite(hazards)) or np.any(hazards <= 0):
        raise CalibrationFailure("Hazards must be positive and finite")
    if not 0.0 < pi < 1.0:
        raise CalibrationFailure(f"Censoring rate must lie in (0, 1), got {pi}")

    def gap(log_bound: float) -> float:
        return censoring_probability(hazards, np.exp(log_bound)) - pi

    lo = np.log(1.0 / (CALIBRATION_SPAN * hazards.max()))
    hi = np.log(CALIBRATION_SPAN / hazards.min())
    if gap(lo) * gap(hi) > 0:
        raise CalibrationFailure(f"Cannot bracket censoring rate {pi} for the given hazards")
    root = bisect(gap, lo, hi, xtol=CALIBRATION_XTOL)
    bound = float(np.exp(root))
    logger.debug(f"Censoring bound v={bound:.6g} for target rate {pi}")
    return bound


# =============================================================================
# Generation
# =============================================================================

def _draw_covariates(spec: SimModelSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.covariate_law is CovariateLaw.UNIFORM:
        return rng.uniform(0.0, 1.0, size=(spec.n, spec.p))
    return rng.normal(0.0, spec.sigma, size=(spec.n, spec.p))


def _draw_coefficients(spec: SimModelSpec, rng: np.random.Generator) -> Tuple[np.ndarray, bool]:
    if spec.coefficients is not None:
        return np.asarray(spec.coefficients, dtype=float), False
    coefficients = np.zeros(spec.p)
    coefficients[:spec.n_nonzero] = rng.uniform(-1.0, 1.0, size=spec.n_nonzero)
    return coefficients, True


def generate(spec: SimModelSpec) -> Tuple[SurvivalData, GroundTruth]:
    """
    Draw one dataset from ``spec``.

    Draw order is fixed (covariates, coefficients, out-of-region hazards,
    event times, censoring times), so a spec and seed determine the
    dataset bit for bit.
    """
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, SIMULATION_STREAM]))
    X = _draw_covariates(spec, rng)
    coefficients, drawn = _draw_coefficients(spec, rng)

    eta = X @ coefficients
    planted = None
    if spec.planted_box is not None:
        planted = spec.planted_box.contains(X)
        outside = rng.uniform(0.0, 1.0, size=spec.n)
        eta = np.where(planted, eta, outside)

    hazards = np.exp(eta)
    true_times = rng.exponential(1.0 / hazards)

    if spec.censoring_rate == 0.0:
        bound = float('inf')
        censor_times = np.full(spec.n, np.inf)
        times, events = true_times, np.ones(spec.n, dtype=np.int8)
    else:
        bound = calibrate_censoring(hazards, spec.censoring_rate)
        censor_times = rng.uniform(0.0, bound, size=spec.n)
        events = (true_times <= censor_times).astype(np.int8)
        times = np.minimum(true_times, censor_times)

    data = SurvivalData(times=times, events=events, covariates=X)
    truth = GroundTruth(
        true_times=true_times,
        censor_times=censor_times,
        linear_predictor=eta,
        coefficients=coefficients,
        censoring_bound=bound,
        planted_membership=planted,
        coefficients_drawn=drawn,
        sigma_defaulted=spec.covariate_law is CovariateLaw.NORMAL and spec.sigma == 1.0,
    )
    logger.info(
        f"Generated model {spec.model_id}: n={spec.n}, p={spec.p}, "
        f"censored {1.0 - data.n_events / data.n:.3f} (target {spec.censoring_rate})"
    )
    return data, truth


def misclassification_rate(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of rows whose predicted in-box membership disagrees with the truth"""
    predicted = np.asarray(predicted, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if predicted.shape != truth.shape:
        raise ValueError(f"Membership shapes differ: {predicted.shape} vs {truth.shape}")
    if predicted.size == 0:
        return 0.0
    return float(np.mean(predicted != truth))
