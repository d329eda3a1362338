"""
Risk Tables
===========
Distinct event times, deaths and at-risk counts, optionally split by a
binary grouping.

RiskSetIndex precomputes, once per set of rows, where each observation
sits relative to the distinct event times. Splitting by any mask is then
two bincounts, which keeps candidate evaluation inside the peeling loop
linear in n.

Convention: an observation censored at an event time is still at risk at
that time.
"""

import logging
from typing import Optional

import numpy as np

from models import NoEventsError, DataValidationError, RiskTable, SurvivalData

logger = logging.getLogger(__name__)


class RiskSetIndex:
    """Event-time positions of a fixed set of (time, event) pairs"""

    def __init__(self, times: np.ndarray, events: np.ndarray):
        self.times = np.asarray(times, dtype=float)
        self.events = np.asarray(events).astype(bool)
        self.n = int(self.times.shape[0])
        self.event_times = np.unique(self.times[self.events])
        self.last_time = float(self.times.max()) if self.n else float('nan')

        # Number of event times <= t_i, i.e. the at-risk reach of each row
        self.reach = np.searchsorted(self.event_times, self.times, side='right')
        # Index of the row's own time among event times (valid for events only)
        self.event_slot = np.searchsorted(self.event_times, self.times, side='left')

        self.at_risk = self._at_risk(np.ones(self.n, dtype=bool))
        self.deaths = self._deaths(np.ones(self.n, dtype=bool))

    @property
    def n_times(self) -> int:
        return int(self.event_times.shape[0])

    @property
    def n_events(self) -> int:
        return int(self.events.sum())

    def _at_risk(self, mask: np.ndarray) -> np.ndarray:
        counts = np.bincount(self.reach[mask], minlength=self.n_times + 1)
        return np.cumsum(counts[::-1])[::-1][1:]

    def _deaths(self, mask: np.ndarray) -> np.ndarray:
        return np.bincount(self.event_slot[mask & self.events], minlength=self.n_times)[: self.n_times]

    def split(self, group: np.ndarray):
        """(deaths_in, at_risk_in) for the rows where ``group`` is true"""
        group = np.asarray(group).astype(bool)
        return self._deaths(group), self._at_risk(group)

    def table(self, group: Optional[np.ndarray] = None) -> RiskTable:
        if group is None:
            return RiskTable(self.event_times, self.deaths, self.at_risk, self.last_time)
        deaths_in, at_risk_in = self.split(group)
        return RiskTable(
            self.event_times,
            self.deaths,
            self.at_risk,
            self.last_time,
            deaths_in=deaths_in,
            at_risk_in=at_risk_in,
        )

    def cumulative_hazard_in(self, group: np.ndarray) -> np.ndarray:
        """
        Group-conditional Nelson-Aalen value at every row's own time.

        Rows outside the group get the value at their time as well; callers
        select the rows they need.
        """
        deaths_in, at_risk_in = self.split(group)
        with np.errstate(divide='ignore', invalid='ignore'):
            increments = np.where(at_risk_in > 0, deaths_in / np.maximum(at_risk_in, 1), 0.0)
        cumulative = np.concatenate(([0.0], np.cumsum(increments)))
        return cumulative[self.reach]


def build_risk_table(
    data: SurvivalData,
    group: Optional[np.ndarray] = None,
    allow_empty: bool = False,
) -> RiskTable:
    """
    Risk table of a dataset, optionally split by a binary grouping.

    Args:
        data: Survival data
        group: Optional 0/1 array of length n; 1 marks the in-box group
        allow_empty: Return an empty table instead of raising when there
            are no events

    Raises:
        NoEventsError: If every observation is censored
        DataValidationError: If ``group`` is malformed
    """
    if group is not None:
        group = np.asarray(group)
        if group.shape != (data.n,):
            raise DataValidationError(f"Group has length {group.shape}, expected {data.n}")
        if not np.all(np.isin(group, (0, 1))):
            raise DataValidationError("Group labels must be 0 or 1")
    if data.n_events == 0 and not allow_empty:
        raise NoEventsError(f"All {data.n} observations are censored")
    return RiskSetIndex(data.times, data.events).table(group)
