import numpy as np
import pytest

from crowdsched.errors import ComparisonError, EnumerationGuardError
from crowdsched.model import TaskCatalog, build_project
from crowdsched.oracle import (
    ExactFront,
    compare_fronts,
    count_feasible_schedules,
    enumerate_schedules,
    exact_front,
    hypervolume,
    shared_reference_point,
)
from crowdsched.scheduler import GAConfig, build_context, evaluate, evolve
from helpers import constant_model, make_task, mock_model, oracle_project, random_project


def simple_project(n=1, duration=5, edges=(), horizon=10):
    tasks = [
        make_task(task_id=f"t{i}", registration_end=min(2, duration), submission_end=duration)
        for i in range(n)
    ]
    catalog = TaskCatalog.from_tasks(tasks)
    return build_project(catalog, catalog.task_ids, list(edges), max_horizon=horizon)


class TestEnumerate:
    def test_single_task_three_days(self):
        project = simple_project(n=1, horizon=2)
        schedules = list(enumerate_schedules(project))
        assert sorted(s.tolist() for s in schedules) == [[0], [1], [2]]

    def test_two_independent_tasks(self):
        project = simple_project(n=2, horizon=1)
        assert count_feasible_schedules(project) == 4

    def test_chain_counts_match_direct_loop(self):
        project = simple_project(n=2, duration=1, edges=[("t0", "t1")], horizon=3)
        brute = sum(
            1
            for s0 in range(4)
            for s1 in range(4)
            if s1 >= s0 + 1 + 1
        )
        assert brute == 3
        assert count_feasible_schedules(project) == brute

    def test_each_schedule_unique_and_feasible(self):
        rng = np.random.default_rng(13)
        project, _ = oracle_project(rng)
        seen = set()
        for starts in enumerate_schedules(project):
            key = tuple(starts.tolist())
            assert key not in seen
            seen.add(key)
            for i, j in project.edges:
                assert starts[j] >= starts[i] + project.tasks[i].duration + 1

    def test_task_guard(self):
        project = simple_project(n=9, horizon=3)
        with pytest.raises(EnumerationGuardError):
            list(enumerate_schedules(project))

    def test_horizon_guard(self):
        project = simple_project(n=2, horizon=16)
        with pytest.raises(EnumerationGuardError):
            list(enumerate_schedules(project))

    def test_estimate_limit_guard_reports_estimate(self):
        project = simple_project(n=6, horizon=12)
        with pytest.raises(EnumerationGuardError) as err:
            list(enumerate_schedules(project, limit=1000))
        assert err.value.estimate == pytest.approx(13.0 ** 6)


class TestExactFront:
    def test_single_task_singleton(self):
        project = simple_project(n=1, duration=5, horizon=4)
        front = exact_front(project, constant_model(0.5))
        assert len(front) == 1
        assert front.objectives[0].tolist() == [5.0, 0.0, 0.5]

    def test_duplicates_deduplicated(self):
        # all schedules have identical objectives under a constant model with
        # no overlap effects; the front collapses to one representative
        project = simple_project(n=1, duration=5, horizon=6)
        front = exact_front(project, constant_model(0.3))
        assert len(front) == 1

    def test_matches_independent_full_scan(self):
        rng = np.random.default_rng(15)
        project, _ = oracle_project(rng)
        model = mock_model(seed=3)
        config = GAConfig()
        front = exact_front(project, model, config)

        ctx = build_context(project, model, config)
        rows = []
        for starts in enumerate_schedules(project):
            _, fitness = evaluate(ctx, starts)
            rows.append(tuple(fitness))
        rows = np.array(sorted(set(rows)))
        keep = []
        for i, candidate in enumerate(rows):
            dominated = any(
                np.all(rows[j] <= candidate) and np.any(rows[j] < candidate)
                for j in range(len(rows))
                if j != i
            )
            if not dominated:
                keep.append(tuple(candidate))
        assert sorted(tuple(o) for o in front.objectives.tolist()) == sorted(keep)

    def test_idempotent(self):
        rng = np.random.default_rng(16)
        project, _ = oracle_project(rng)
        model = mock_model()
        first = exact_front(project, model)
        second = exact_front(project, model)
        assert first.starts == second.starts
        assert np.array_equal(first.objectives, second.objectives)


class TestHypervolume:
    def test_single_point_3d(self):
        volume = hypervolume(np.array([[1.0, 2.0, 3.0]]), np.array([2.0, 4.0, 5.0]))
        assert volume == pytest.approx(1.0 * 2.0 * 2.0)

    def test_two_point_union_2d(self):
        points = np.array([[1.0, 3.0], [2.0, 1.0]])
        assert hypervolume(points, np.array([4.0, 4.0])) == pytest.approx(7.0)

    def test_dominated_point_adds_nothing(self):
        base = np.array([[1.0, 1.0, 1.0]])
        extra = np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])
        reference = np.array([3.0, 3.0, 3.0])
        assert hypervolume(base, reference) == pytest.approx(hypervolume(extra, reference))

    def test_point_outside_reference_ignored(self):
        points = np.array([[1.0, 1.0, 5.0]])
        assert hypervolume(points, np.array([2.0, 2.0, 2.0])) == 0.0

    def test_monotone_under_union(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a = rng.random((6, 3))
            b = np.vstack([a, rng.random((3, 3))])
            reference = shared_reference_point(b)
            assert hypervolume(b, reference) >= hypervolume(a, reference) - 1e-12

    def test_matches_monte_carlo(self):
        rng = np.random.default_rng(22)
        points = rng.random((5, 3))
        reference = np.array([1.2, 1.2, 1.2])
        exact = hypervolume(points, reference)
        samples = rng.uniform(0, 1.2, size=(200_000, 3))
        hits = np.zeros(len(samples), dtype=bool)
        for p in points:
            hits |= np.all(samples >= p, axis=1)
        estimate = hits.mean() * 1.2 ** 3
        assert exact == pytest.approx(estimate, rel=0.02)


class TestCompareFronts:
    def front_from(self, objectives):
        return ExactFront(
            project_id="p",
            starts=tuple((i,) for i in range(len(objectives))),
            objectives=np.asarray(objectives, dtype=float),
        )

    def test_identical_fronts_perfect_scores(self):
        objectives = np.array([[3.0, 0.1, 0.4], [5.0, 0.0, 0.2]])
        report = compare_fronts(objectives, self.front_from(objectives))
        assert report.nondominated_fraction == 1.0
        assert report.hypervolume_ratio == pytest.approx(1.0)
        assert report.max_regret == 0.0

    def test_subset_keeping_extremes(self):
        exact = np.array([[3.0, 0.3, 0.4], [4.0, 0.2, 0.3], [5.0, 0.0, 0.2]])
        found = exact[[0, 2]]
        report = compare_fronts(found, self.front_from(exact))
        assert report.nondominated_fraction == 1.0
        assert report.hypervolume_ratio <= 1.0
        assert report.max_regret == 0.0

    def test_dominated_member_detected(self):
        exact = np.array([[3.0, 0.0, 0.1]])
        found = np.array([[3.0, 0.0, 0.1], [4.0, 0.5, 0.2]])
        report = compare_fronts(found, self.front_from(exact))
        assert report.nondominated_fraction == pytest.approx(0.5)

    def test_project_mismatch_raises(self):
        rng = np.random.default_rng(23)
        project, _ = random_project(rng, 4)
        model = mock_model()
        result = evolve(project, model, GAConfig(population_size=8, generations=5, seed=0))
        other = self.front_from(np.array([[1.0, 0.0, 0.0]]))
        with pytest.raises(ComparisonError):
            compare_fronts(result, other)

    def test_evolved_front_on_small_instance(self):
        rng = np.random.default_rng(24)
        project, _ = oracle_project(rng)
        model = mock_model(seed=11)
        config = GAConfig(population_size=100, generations=200, seed=7)
        found = evolve(project, model, config)
        exact = exact_front(project, model, config)
        report = compare_fronts(found, exact)
        assert report.nondominated_fraction >= 0.95
        assert report.hypervolume_ratio >= 0.95
