"""Shared fixture builders for the test suite."""

from __future__ import annotations

from datetime import date

import numpy as np

from crowdsched.model import Task, TaskCatalog, build_project
from crowdsched.predictor import PredictorModel, init_model

TYPES = ("code", "design", "assembly", "test_suite")
TECHS = ("python", "java", "js", "sql", "ios", "android")
PLATFORMS = ("web", "mobile", "desktop")
WORDS = (
    "build", "rest", "api", "ui", "refactor", "database", "widget", "report",
    "mobile", "login", "dashboard", "export", "schema", "queue", "cache",
)


def make_task(
    task_id="t0",
    registration_start=0,
    registration_end=2,
    submission_end=14,
    prize=250.0,
    task_type="code",
    technologies=("python",),
    platforms=("web",),
    requirement_text="build rest api",
    registrations=5,
    submissions=2,
    valid_submissions=1,
    status=None,
    total_prize=-1.0,
) -> Task:
    if status is None:
        status = "completed" if valid_submissions >= 1 else "failed"
    return Task(
        task_id=task_id,
        registration_start=registration_start,
        registration_end=registration_end,
        submission_end=submission_end,
        prize=float(prize),
        task_type=task_type,
        technologies=frozenset(technologies),
        platforms=frozenset(platforms),
        requirement_text=requirement_text,
        registrations=registrations,
        submissions=submissions,
        valid_submissions=valid_submissions,
        status=status,
        total_prize=float(total_prize),
    )


def random_task(rng: np.random.Generator, index: int, **overrides) -> Task:
    start = int(rng.integers(0, 40))
    duration = int(rng.integers(2, 21))
    window = min(int(rng.integers(1, 6)), duration)
    registrations = int(rng.integers(0, 12))
    submissions = int(rng.integers(0, registrations + 1))
    valid = int(rng.integers(0, submissions + 1))
    n_words = int(rng.integers(1, 7))
    defaults = dict(
        task_id=f"t{index}",
        registration_start=start,
        registration_end=start + window,
        submission_end=start + duration,
        prize=float(rng.integers(50, 2500)),
        task_type=str(rng.choice(TYPES)),
        technologies=tuple(rng.choice(TECHS, size=int(rng.integers(0, 4)), replace=False)),
        platforms=tuple(rng.choice(PLATFORMS, size=int(rng.integers(1, 3)), replace=False)),
        requirement_text=" ".join(rng.choice(WORDS, size=n_words)),
        registrations=registrations,
        submissions=submissions,
        valid_submissions=valid,
    )
    defaults.update(overrides)
    return make_task(**defaults)


def random_catalog(rng: np.random.Generator, n: int) -> TaskCatalog:
    return TaskCatalog.from_tasks(
        [random_task(rng, i) for i in range(n)], epoch=date(2014, 1, 1)
    )


def random_project(rng: np.random.Generator, n_tasks: int | None = None, *, horizon=None,
                   max_duration=5, edge_probability=0.5):
    """A random DAG project with small durations and a generous horizon."""
    n = n_tasks or int(rng.integers(4, 7))
    tasks = []
    for i in range(n):
        start = int(rng.integers(0, 10))
        duration = int(rng.integers(2, max_duration + 1))
        window = min(int(rng.integers(1, 4)), duration)
        tasks.append(
            random_task(
                rng,
                i,
                registration_start=start,
                registration_end=start + window,
                submission_end=start + duration,
            )
        )
    catalog = TaskCatalog.from_tasks(tasks, epoch=date(2014, 1, 1))
    edges = []
    for j in range(1, n):
        if rng.random() < edge_probability:
            i = int(rng.integers(0, j))
            edges.append((f"t{i}", f"t{j}"))
    if horizon is None:
        horizon = sum(t.duration + 1 for t in tasks)
    return build_project(catalog, catalog.task_ids, edges, max_horizon=horizon), catalog


def oracle_project(rng: np.random.Generator):
    """Small instance sized for exhaustive enumeration (4-6 tasks, horizon <= 12)."""
    from crowdsched.scheduler import earliest_schedule

    while True:
        n = int(rng.integers(4, 7))
        tasks = []
        for i in range(n):
            start = int(rng.integers(0, 6))
            duration = int(rng.integers(2, 5))
            window = min(int(rng.integers(1, 4)), duration)
            tasks.append(
                random_task(
                    rng,
                    i,
                    registration_start=start,
                    registration_end=start + window,
                    submission_end=start + duration,
                )
            )
        catalog = TaskCatalog.from_tasks(tasks, epoch=date(2014, 1, 1))
        edges = []
        for j in range(1, n):
            if rng.random() < 0.6:
                i = int(rng.integers(max(0, j - 3), j))
                edges.append((f"t{i}", f"t{j}"))
        project = build_project(catalog, catalog.task_ids, edges, max_horizon=30)
        earliest = earliest_schedule(project)
        horizon = int(earliest.max()) + int(rng.integers(3, 5))
        if horizon > 12:
            continue
        return build_project(catalog, catalog.task_ids, edges, max_horizon=horizon), catalog


def mock_model(seed: int = 7, dims=(4, 8, 4, 1)) -> PredictorModel:
    """Deterministic untrained network with plausible feature scaling."""
    return init_model(
        dims=dims,
        rng=np.random.default_rng(seed),
        feature_min=[0.0, 0.0, 0.0, 0.0],
        feature_max=[20.0, 2500.0, 10.0, 1.0],
    )


def structured_mock_model(seed: int = 0) -> PredictorModel:
    """A handcrafted single-layer predictor with a meaningful landscape.

    Failure rises steeply with the open-task count and mildly with average
    similarity and duration, and falls with prize - the shape a trained
    predictor exhibits - so search quality is measured against an objective
    with real signal instead of random-network noise in the fourth decimal.
    """
    rng = np.random.default_rng(seed)
    base = np.array([[1.0, -0.6, 3.0, 1.2]])
    jitter = rng.uniform(-0.25, 0.25, size=(1, 4))
    return PredictorModel(
        dims=(4, 1),
        weights=(base + jitter,),
        biases=(np.array([-1.5 + float(rng.uniform(-0.2, 0.2))]),),
        feature_min=np.zeros(4),
        feature_max=np.array([20.0, 2500.0, 10.0, 1.0]),
    )


def constant_model(probability: float) -> PredictorModel:
    """A model that predicts the same probability for every input."""
    model = init_model(dims=(4, 4, 1), rng=np.random.default_rng(0))
    weights = tuple(np.zeros_like(w) for w in model.weights)
    biases = list(np.zeros_like(b) for b in model.biases)
    logit = float(np.log(probability / (1.0 - probability)))
    biases[-1] = np.array([logit])
    return PredictorModel(
        dims=model.dims,
        weights=weights,
        biases=tuple(biases),
        feature_min=model.feature_min,
        feature_max=model.feature_max,
    )


def motivating_project():
    """A 19-task fixture with a 110-day historical span.

    The shape mirrors a real marketplace project where repeated repostings of
    a handful of tasks stretched an 11-task plan into 19 postings over 110
    days; here only the counts, the overall span, and a mostly-14-day life
    cycle matter.
    """
    rng = np.random.default_rng(42)
    tasks = []
    n = 19
    for i in range(n):
        if i == 0:
            start = 0
        elif i == n - 1:
            start = 96
        else:
            start = int(rng.integers(2, 92))
        duration = 14
        window = int(rng.integers(2, 6))
        failed = i in (1, 3, 7, 10, 12, 13, 14, 16)
        tasks.append(
            random_task(
                rng,
                i,
                registration_start=start,
                registration_end=start + window,
                submission_end=start + duration,
                registrations=6,
                submissions=0 if failed else 3,
                valid_submissions=0 if failed else 1,
            )
        )
    catalog = TaskCatalog.from_tasks(tasks, epoch=date(2014, 1, 1))
    edges = [("t0", "t1"), ("t1", "t4"), ("t4", "t9"), ("t2", "t5"), ("t5", "t9")]
    project = build_project(catalog, catalog.task_ids, edges)
    return project, catalog


def ablation_project():
    """11 similar tasks competing for the same worker pool.

    High mutual similarity plus overlapping registration windows makes the
    similarity repair bite, so runs with and without it diverge visibly.
    """
    rng = np.random.default_rng(11)
    tasks = []
    for i in range(11):
        start = int(rng.integers(0, 8))
        duration = int(rng.integers(4, 8))
        tasks.append(
            random_task(
                rng,
                i,
                registration_start=start,
                registration_end=start + int(rng.integers(2, 5)),
                submission_end=start + duration,
                prize=float(300 + 10 * i),
                task_type="code",
                technologies=("python", "sql"),
                platforms=("web",),
                requirement_text="build rest api endpoint for dashboard",
            )
        )
    catalog = TaskCatalog.from_tasks(tasks, epoch=date(2014, 1, 1))
    edges = [("t0", "t3"), ("t1", "t4"), ("t3", "t7"), ("t5", "t8")]
    project = build_project(catalog, catalog.task_ids, edges, max_horizon=40)
    return project, catalog
