import numpy as np
import pytest

from crowdsched.model import TaskCatalog
from crowdsched.platform import PlatformState, ScheduledTask, historical_state
from crowdsched.similarity import SimilarityMatrix, similarity_matrix
from helpers import make_task, random_catalog


def state_of(entries, horizon=60, sim=None, **kwargs):
    return PlatformState(entries, horizon, sim, **kwargs)


def forced_matrix(ids, value=0.6, probe_row=None):
    """A matrix with a constant off-diagonal similarity (optionally a custom
    probe row/column)."""
    n = len(ids)
    values = np.full((n, n), value)
    np.fill_diagonal(values, 1.0)
    if probe_row is not None:
        values[0, 1:] = probe_row
        values[1:, 0] = probe_row
    return SimilarityMatrix(tuple(ids), values)


class TestOpenTasks:
    def test_empty_platform(self):
        assert state_of([]).open_task_count(3) == 0

    def test_probe_alone_sees_nothing(self):
        entry = ScheduledTask(make_task(task_id="t1"), 4)
        state = state_of([entry])
        assert state.open_task_count(4, exclude="t1") == 0

    def test_three_overlapping_windows_match_interval_scan(self):
        entries = [
            ScheduledTask(make_task(task_id="a", registration_end=6, submission_end=10), 0),
            ScheduledTask(make_task(task_id="b", registration_end=4, submission_end=9), 3),
            ScheduledTask(make_task(task_id="c", registration_end=2, submission_end=8), 5),
        ]
        state = state_of(entries)
        day = 5
        brute = sum(
            1 for e in entries if e.start <= day <= e.start + e.task.registration_window
        )
        assert brute == 3
        assert state.open_task_count(day) == brute

    def test_matches_brute_force_on_random_fixture(self):
        rng = np.random.default_rng(1)
        catalog = random_catalog(rng, 15)
        entries = [ScheduledTask(t, int(rng.integers(0, 30))) for t in catalog.tasks]
        state = state_of(entries, horizon=80)
        for day in range(0, 60, 3):
            brute = sum(
                1 for e in entries if e.start <= day <= e.start + e.task.registration_window
            )
            assert state.open_task_count(day) == brute


class TestAvgSimilarity:
    def test_empty_open_set(self):
        probe = make_task(task_id="p")
        state = state_of([ScheduledTask(probe, 0)], sim=forced_matrix(["p"]))
        assert state.avg_similarity(0, "p") == 0.0

    def test_single_identical_open_task(self):
        ids = ["p", "q"]
        entries = [ScheduledTask(make_task(task_id=i), 0) for i in ids]
        state = state_of(entries, sim=forced_matrix(ids, value=1.0))
        assert state.avg_similarity(0, "p") == 1.0

    def test_five_open_tasks_at_sixty_percent(self):
        ids = ["probe"] + [f"o{i}" for i in range(5)]
        entries = [ScheduledTask(make_task(task_id=i, registration_end=3), 0) for i in ids]
        state = state_of(entries, sim=forced_matrix(ids, value=0.6))
        assert state.avg_similarity(0, "probe") == pytest.approx(0.60)

    def test_pairwise_mean_zero_when_one_open(self):
        ids = ["a", "b"]
        entries = [ScheduledTask(make_task(task_id="a"), 0),
                   ScheduledTask(make_task(task_id="b"), 40)]
        state = state_of(entries, horizon=80, sim=forced_matrix(ids))
        assert state.pairwise_avg_similarity(0) == 0.0


class TestEmpiricalFailure:
    def make_state(self, valid_flags):
        entries = [
            ScheduledTask(
                make_task(
                    task_id=f"t{i}",
                    registrations=5,
                    submissions=3 if flag else 0,
                    valid_submissions=1 if flag else 0,
                ),
                0,
            )
            for i, flag in enumerate(valid_flags)
        ]
        return state_of(entries)

    def test_all_valid(self):
        assert self.make_state([True] * 4).empirical_failure_ratio(0) == 0.0

    def test_none_valid(self):
        assert self.make_state([False] * 4).empirical_failure_ratio(0) == 1.0

    def test_six_open_five_valid_rounds_to_seventeen_percent(self):
        ratio = self.make_state([True] * 5 + [False]).empirical_failure_ratio(0)
        assert ratio == pytest.approx(1 - 5 / 6)
        assert round(ratio, 2) == 0.17

    def test_empty_day(self):
        assert self.make_state([True]).empirical_failure_ratio(50) == 0.0


class TestArrivalRate:
    def test_empty(self):
        assert state_of([]).arrival_rate(0) == 0.0

    def test_two_tasks_duration_ten(self):
        entries = [
            ScheduledTask(make_task(task_id=f"t{i}", registration_end=2, submission_end=10), 0)
            for i in range(2)
        ]
        assert state_of(entries).arrival_rate(0) == pytest.approx(0.1)

    def test_single_fourteen_day_task(self):
        entry = ScheduledTask(make_task(task_id="t", registration_end=2, submission_end=14), 0)
        assert state_of([entry]).arrival_rate(0) == pytest.approx(1 / 14)

    def test_zero_duration_falls_back_to_registration_window(self):
        zero = make_task(task_id="z", registration_start=0, registration_end=0,
                         submission_end=0)
        assert zero.duration == 0
        entry = ScheduledTask(zero, 0)
        # registration window floors at one day
        assert state_of([entry]).arrival_rate(0) == pytest.approx(1.0)

    def test_registration_window_mode(self):
        entries = [
            ScheduledTask(make_task(task_id=f"t{i}", registration_end=4, submission_end=10), 0)
            for i in range(2)
        ]
        state = state_of(entries, arrival_rate_uses_registration_window=True)
        assert state.arrival_rate(0) == pytest.approx(2 / 8)


class TestProjections:
    def fixture(self):
        # three open tasks on day 0, duration 2 each -> arrival rate 0.5
        entries = [
            ScheduledTask(
                make_task(task_id=f"t{i}", registration_start=0, registration_end=2,
                          submission_end=2),
                0,
            )
            for i in range(3)
        ]
        return state_of(entries, sim=forced_matrix([f"t{i}" for i in range(3)]))

    def test_zero_lookahead_equals_open_count(self):
        state = self.fixture()
        assert state.future_open_tasks(0, 0) == state.open_task_count(0) == 3

    def test_projection_adds_arrivals(self):
        state = self.fixture()
        assert state.arrival_rate(0) == pytest.approx(0.5)
        # all three windows cover day 2: 3 + 0.5 * 2
        assert state.future_open_tasks(0, 2) == pytest.approx(4.0)

    def test_empty_platform_projects_zero(self):
        assert state_of([]).future_open_tasks(0, 2) == 0.0

    def test_future_similarity_zero_lookahead_identity(self):
        state = self.fixture()
        assert state.future_avg_similarity(0, 0, probe_id=None) == pytest.approx(
            state.pairwise_avg_similarity(0)
        )

    def test_future_similarity_weighted_mean(self):
        # Probe sees three open tasks (sims .4, .4, 1.0 -> mean .6); the 1.0
        # one closes before day+2 so the still-open mean is .4; arrival rate
        # 0.5 over two days projects one arrival carrying the current mean.
        ids = ["p", "a", "b", "c"]
        entries = [
            ScheduledTask(make_task(task_id="p", registration_end=2, submission_end=9), 0),
            ScheduledTask(make_task(task_id="a", registration_end=2, submission_end=2), 2),
            ScheduledTask(make_task(task_id="b", registration_end=2, submission_end=2), 2),
            ScheduledTask(make_task(task_id="c", registration_end=2, submission_end=2), 0),
        ]
        values = np.full((4, 4), 0.4)
        np.fill_diagonal(values, 1.0)
        values[0, 3] = values[3, 0] = 1.0
        sim = SimilarityMatrix(tuple(ids), values)
        state = state_of(entries, sim=sim)
        day = 2
        assert state.open_task_count(day, exclude="p") == 3
        assert state.avg_similarity(day, "p") == pytest.approx(0.6)
        assert state.arrival_rate(day, exclude="p") == pytest.approx(0.5)
        got = state.future_avg_similarity(day, 2, probe_id="p")
        assert got == pytest.approx((2 * 0.4 + 1.0 * 0.6) / 3)

    def test_bounds_on_random_fixtures(self):
        rng = np.random.default_rng(4)
        catalog = random_catalog(rng, 10)
        sim = similarity_matrix(catalog.tasks, catalog.norms)
        entries = [ScheduledTask(t, int(rng.integers(0, 20))) for t in catalog.tasks]
        state = state_of(entries, horizon=70, sim=sim)
        for day in range(0, 50, 5):
            for delta in (0, 1, 2):
                assert state.future_open_tasks(day, delta) >= 0
                assert 0.0 <= state.future_avg_similarity(day, delta) <= 1.0
            assert state.arrival_rate(day) >= 0
            assert 0.0 <= state.empirical_failure_ratio(day) <= 1.0


class TestDailySeries:
    def test_series_invariants(self):
        rng = np.random.default_rng(8)
        catalog = random_catalog(rng, 8)
        sim = similarity_matrix(catalog.tasks, catalog.norms)
        state = historical_state(catalog, sim)
        series = state.daily_series()
        for day in range(state.horizon + 1):
            assert series["open_tasks"][day] == state.open_task_count(day)
            if series["open_tasks"][day] <= 1:
                assert series["avg_similarity"][day] == 0.0
            assert 0.0 <= series["failure_ratio"][day] <= 1.0
