"""Day-indexed marketplace state for a hypothetical or replayed schedule.

A task is "open" on every day of its registration window, i.e. on days
``start <= d <= start + registration_window``.  All rates and similarity
aggregates below are derived from those windows; the optional probe argument
excludes the arriving task itself from its own platform view.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Task, TaskCatalog
from .similarity import SimilarityMatrix


@dataclass(frozen=True)
class ScheduledTask:
    """A task bound to a start day on the schedule axis."""

    task: Task
    start: int

    @property
    def registration_end(self) -> int:
        return self.start + self.task.registration_window

    @property
    def arrival_span(self) -> int:
        """Days this task keeps a worker pool busy, for arrival-rate purposes.

        Zero-duration tasks fall back to their registration window so the
        arrival-rate denominator stays positive.
        """
        return self.task.duration if self.task.duration > 0 else self.task.registration_window


class PlatformState:
    """Read-only marketplace view over [0, horizon].

    Built once per schedule under evaluation; exposes the per-day open set,
    similarity aggregates, the task arrival rate, the empirical failure ratio,
    and two-day-lookahead projections of open-task count and similarity.
    """

    def __init__(
        self,
        scheduled: Sequence[ScheduledTask],
        horizon: int,
        similarity: SimilarityMatrix | None = None,
        arrival_rate_uses_registration_window: bool = False,
    ):
        self.entries = tuple(scheduled)
        self.horizon = int(horizon)
        self.similarity = similarity
        self._ids = tuple(e.task.task_id for e in self.entries)
        self._index = {tid: i for i, tid in enumerate(self._ids)}
        n = len(self.entries)
        self._starts = np.array([e.start for e in self.entries], dtype=np.int64)
        self._reg_ends = np.array([e.registration_end for e in self.entries], dtype=np.int64)
        if arrival_rate_uses_registration_window:
            spans = [e.task.registration_window for e in self.entries]
        else:
            spans = [e.arrival_span for e in self.entries]
        self._spans = np.array(spans, dtype=np.int64)
        self._has_valid = np.array(
            [e.task.valid_submissions >= 1 for e in self.entries], dtype=bool
        )
        if similarity is not None:
            self._sim_rows = np.array([similarity.index_of(tid) for tid in self._ids])
        else:
            self._sim_rows = np.arange(n)

    # -- open set ---------------------------------------------------------

    def _open_mask(self, day: int, exclude: str | None = None) -> np.ndarray:
        mask = (self._starts <= day) & (day <= self._reg_ends)
        if exclude is not None and exclude in self._index:
            mask = mask.copy()
            mask[self._index[exclude]] = False
        return mask

    def open_ids(self, day: int, exclude: str | None = None) -> tuple[str, ...]:
        mask = self._open_mask(day, exclude)
        return tuple(self._ids[i] for i in np.flatnonzero(mask))

    def open_task_count(self, day: int, exclude: str | None = None) -> int:
        """Number of tasks open for registration on ``day``."""
        return int(np.count_nonzero(self._open_mask(day, exclude)))

    # -- similarity aggregates --------------------------------------------

    def _require_similarity(self) -> SimilarityMatrix:
        if self.similarity is None:
            raise ValueError("this platform state was built without a similarity matrix")
        return self.similarity

    def _sims_to(self, probe_id: str, mask: np.ndarray) -> np.ndarray:
        sim = self._require_similarity()
        probe_row = sim.index_of(probe_id)
        cols = self._sim_rows[mask]
        return sim.values[probe_row, cols]

    def avg_similarity(self, day: int, probe_id: str) -> float:
        """Mean similarity between the probe task and the open set; 0 if empty."""
        mask = self._open_mask(day, exclude=probe_id)
        if not mask.any():
            return 0.0
        return float(np.mean(self._sims_to(probe_id, mask)))

    def pairwise_avg_similarity(self, day: int, exclude: str | None = None) -> float:
        """Mean similarity over unordered open pairs; 0 when fewer than 2 open."""
        sim = self._require_similarity()
        rows = self._sim_rows[self._open_mask(day, exclude)]
        if len(rows) <= 1:
            return 0.0
        sub = sim.values[np.ix_(rows, rows)]
        upper = sub[np.triu_indices(len(rows), k=1)]
        return float(np.mean(upper))

    # -- rates and ratios ---------------------------------------------------

    def empirical_failure_ratio(self, day: int, exclude: str | None = None) -> float:
        """Fraction of the open set that never received a valid submission."""
        mask = self._open_mask(day, exclude)
        total = int(np.count_nonzero(mask))
        if total == 0:
            return 0.0
        return 1.0 - int(np.count_nonzero(self._has_valid & mask)) / total

    def arrival_rate(self, day: int, exclude: str | None = None) -> float:
        """Open-task count divided by the open tasks' total duration, per day."""
        mask = self._open_mask(day, exclude)
        total = int(np.count_nonzero(mask))
        if total == 0:
            return 0.0
        return total / float(np.sum(self._spans[mask]))

    # -- projections ---------------------------------------------------------

    def _still_open_mask(self, day: int, delta: int, exclude: str | None = None) -> np.ndarray:
        return self._open_mask(day, exclude) & (self._reg_ends >= day + delta)

    def future_open_tasks(self, day: int, delta: int, exclude: str | None = None) -> float:
        """Projected open-task count ``delta`` days ahead.

        Tasks whose windows still cover the future day, plus the current
        arrival rate times the lookahead.
        """
        still = int(np.count_nonzero(self._still_open_mask(day, delta, exclude)))
        return still + self.arrival_rate(day, exclude) * delta

    def future_avg_similarity(self, day: int, delta: int, probe_id: str | None = None) -> float:
        """Projected mean similarity ``delta`` days ahead.

        Weighted mean of the still-open tasks' similarity and the current
        day's similarity carried by the projected arrivals.  With a probe the
        aggregates are probe-relative; otherwise pairwise means are used.
        """
        exclude = probe_id
        still_mask = self._still_open_mask(day, delta, exclude)
        still = int(np.count_nonzero(still_mask))
        if probe_id is not None:
            ats_now = self.avg_similarity(day, probe_id)
            ats_still = (
                float(np.mean(self._sims_to(probe_id, still_mask))) if still else 0.0
            )
        else:
            ats_now = self.pairwise_avg_similarity(day)
            rows = self._sim_rows[still_mask]
            if still > 1:
                sub = self._require_similarity().values[np.ix_(rows, rows)]
                ats_still = float(np.mean(sub[np.triu_indices(still, k=1)]))
            else:
                ats_still = 0.0
        arrivals = self.arrival_rate(day, exclude) * delta
        denominator = still + arrivals
        if denominator <= 0:
            return 0.0
        return (still * ats_still + arrivals * ats_now) / denominator

    # -- series ---------------------------------------------------------------

    def daily_series(self) -> dict[str, np.ndarray]:
        """Per-day NOT/ATS/arrival-rate/failure series over [0, horizon]."""
        days = self.horizon + 1
        series = {
            "open_tasks": np.zeros(days, dtype=np.int64),
            "avg_similarity": np.zeros(days),
            "arrival_rate": np.zeros(days),
            "failure_ratio": np.zeros(days),
        }
        for day in range(days):
            series["open_tasks"][day] = self.open_task_count(day)
            if self.similarity is not None:
                series["avg_similarity"][day] = self.pairwise_avg_similarity(day)
            series["arrival_rate"][day] = self.arrival_rate(day)
            series["failure_ratio"][day] = self.empirical_failure_ratio(day)
        return series


def historical_state(
    catalog: TaskCatalog,
    similarity: SimilarityMatrix | None = None,
    arrival_rate_uses_registration_window: bool = False,
) -> PlatformState:
    """Replay a catalog at its historical registration days."""
    scheduled = [ScheduledTask(t, t.registration_start) for t in catalog.tasks]
    horizon = max((t.submission_end for t in catalog.tasks), default=0)
    return PlatformState(
        scheduled,
        horizon,
        similarity,
        arrival_rate_uses_registration_window=arrival_rate_uses_registration_window,
    )
