"""
Survival Data Models
====================
Immutable containers for right-censored time-to-event data and the
estimator outputs built from them.

Usage:
    from models import SurvivalData

    data = SurvivalData(times=[1.0, 2.0], events=[1, 0], covariates=[[0.1], [0.4]])
    print(data.n, data.p, data.n_events)
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import DataValidationError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


# =============================================================================
# SurvivalData
# =============================================================================

@dataclass(frozen=True, eq=False)
class SurvivalData:
    """Observed times, event indicators and covariate matrix for n subjects"""
    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray
    covariate_names: Tuple[str, ...] = ()

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        raw_events = np.asarray(self.events).ravel()
        covariates = np.asarray(self.covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(-1, 1)

        n = times.shape[0]
        if n < 1:
            raise DataValidationError("SurvivalData needs at least one observation")
        if raw_events.shape[0] != n or covariates.shape[0] != n:
            raise DataValidationError(
                f"Length mismatch: times={n}, events={raw_events.shape[0]}, "
                f"covariate rows={covariates.shape[0]}"
            )
        if covariates.ndim != 2 or covariates.shape[1] < 1:
            raise DataValidationError("Covariate matrix must be n x p with p >= 1")
        if not np.all(np.isfinite(times)) or np.any(times < 0):
            raise DataValidationError("All times must be finite and >= 0")
        if not np.all(np.isin(raw_events, (0, 1))):
            raise DataValidationError("Event indicators must be 0 or 1")
        if not np.all(np.isfinite(covariates)):
            raise DataValidationError("Covariates must be finite")

        names = tuple(self.covariate_names) or tuple(
            f"x{j + 1}" for j in range(covariates.shape[1])
        )
        if len(names) != covariates.shape[1]:
            raise DataValidationError(
                f"Expected {covariates.shape[1]} covariate names, got {len(names)}"
            )

        object.__setattr__(self, 'times', _frozen(times))
        object.__setattr__(self, 'events', _frozen(raw_events.astype(np.int8)))
        object.__setattr__(self, 'covariates', _frozen(covariates))
        object.__setattr__(self, 'covariate_names', names)

    # --- Shape ---

    @property
    def n(self) -> int:
        return int(self.times.shape[0])

    @property
    def p(self) -> int:
        return int(self.covariates.shape[1])

    @property
    def n_events(self) -> int:
        return int(self.events.sum())

    @property
    def event_mask(self) -> np.ndarray:
        return self.events.astype(bool)

    # --- Derivation ---

    def subset(self, index: Sequence[int]) -> 'SurvivalData':
        """Rows selected by an index array or boolean mask"""
        index = np.asarray(index)
        return SurvivalData(
            times=self.times[index],
            events=self.events[index],
            covariates=self.covariates[index],
            covariate_names=self.covariate_names,
        )

    def with_outcomes(self, times: np.ndarray, events: np.ndarray) -> 'SurvivalData':
        """Same covariates, different (time, event) pairs"""
        return SurvivalData(
            times=times,
            events=events,
            covariates=self.covariates,
            covariate_names=self.covariate_names,
        )

    def select_covariates(self, columns: Sequence[int]) -> 'SurvivalData':
        columns = list(columns)
        return SurvivalData(
            times=self.times,
            events=self.events,
            covariates=self.covariates[:, columns],
            covariate_names=tuple(self.covariate_names[j] for j in columns),
        )

    def summary(self) -> Dict:
        return {
            'n': self.n,
            'p': self.p,
            'events': self.n_events,
            'censored_fraction': round(1.0 - self.n_events / self.n, 4),
        }


# =============================================================================
# Estimator outputs
# =============================================================================

@dataclass(frozen=True, eq=False)
class RiskTable:
    """
    Distinct event times with deaths and at-risk counts.

    When a grouping was supplied, deaths_in / at_risk_in hold the g=1
    ("in-box") split; the g=2 split is the difference.
    """
    event_times: np.ndarray
    deaths: np.ndarray
    at_risk: np.ndarray
    last_time: float
    deaths_in: Optional[np.ndarray] = None
    at_risk_in: Optional[np.ndarray] = None

    @property
    def n_times(self) -> int:
        return int(self.event_times.shape[0])

    @property
    def grouped(self) -> bool:
        return self.deaths_in is not None

    @property
    def deaths_out(self) -> np.ndarray:
        return self.deaths - self.deaths_in

    @property
    def at_risk_out(self) -> np.ndarray:
        return self.at_risk - self.at_risk_in


@dataclass(frozen=True, eq=False)
class StepCurve:
    """
    Right-continuous step function.

    Before the first breakpoint the curve equals its start value: 1 for a
    survival curve, 0 for a cumulative hazard.
    """
    breakpoints: np.ndarray
    values: np.ndarray
    end_time: float
    kind: str = 'survival'

    @property
    def start_value(self) -> float:
        return 1.0 if self.kind == 'survival' else 0.0

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side='right') - 1
        padded = np.concatenate(([self.start_value], np.asarray(self.values, dtype=float)))
        out = padded[idx + 1]
        return out if out.ndim else float(out)

    def as_survival(self) -> 'StepCurve':
        """Cumulative hazard surfaced as exp(-H)"""
        if self.kind == 'survival':
            return self
        return StepCurve(self.breakpoints, np.exp(-self.values), self.end_time, 'survival')

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind,
            'breakpoints': self.breakpoints.tolist(),
            'values': self.values.tolist(),
            'end_time': self.end_time,
        }


@dataclass(frozen=True)
class CoxFit:
    """One-covariate Cox fit of the box indicator"""
    eta: float
    separated: bool = False
    converged: bool = True
    iterations: int = 0
    loglik: float = float('nan')


@dataclass(frozen=True)
class KmEndPoints:
    """Kaplan-Meier end points; EFT/EFP only when a horizon was requested"""
    meft: float
    mefp: float
    eft: Optional[float] = None
    efp: Optional[float] = None
    eft_reached: bool = False
    efp_reached: bool = False

    def to_dict(self) -> Dict:
        return {
            'meft': self.meft,
            'mefp': self.mefp,
            'eft': self.eft,
            'efp': self.efp,
            'eft_reached': self.eft_reached,
            'efp_reached': self.efp_reached,
        }


@dataclass
class EndPoints:
    """
    Box end-point statistics at one step.

    Undefined values are NaN with a reason code in ``reasons``.
    """
    lhr: float
    lrt: float
    cer: float
    meft: float
    mefp: float
    lhr_separated: bool = False
    reasons: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'lhr': self.lhr,
            'lrt': self.lrt,
            'cer': self.cer,
            'meft': self.meft,
            'mefp': self.mefp,
            'lhr_separated': self.lhr_separated,
            'reasons': dict(self.reasons),
        }
