"""Exhaustive ground truth for small instances.

Enumerates every dependency-feasible schedule, evaluates each one through the
same pipeline the evolutionary scheduler uses, and reduces to the exact
Pareto front.  The domination filter here is an independent O(n^2) scan on
purpose - it must not share code with the scheduler's non-dominated sort so
front comparisons can catch bugs in either side.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as kernels
from .errors import ComparisonError, EnumerationGuardError
from .model import Project, Task
from .predictor import PredictorModel
from .scheduler import (
    EvalContext,
    GAConfig,
    ParetoResult,
    build_context,
    _project_arrays,
)

MAX_ORACLE_TASKS = 8
MAX_ORACLE_HORIZON = 15
DEFAULT_ENUMERATION_LIMIT = 10**7


def _guard(project: Project, horizon: int, max_tasks: int, max_horizon: int, limit: int):
    n = len(project.tasks)
    estimate = float(horizon + 1) ** n
    if n > max_tasks:
        raise EnumerationGuardError(
            f"{n} tasks exceeds the enumeration guard of {max_tasks}", estimate
        )
    if horizon > max_horizon:
        raise EnumerationGuardError(
            f"horizon {horizon} exceeds the enumeration guard of {max_horizon}", estimate
        )
    if estimate > limit:
        raise EnumerationGuardError(
            f"estimated {estimate:.3g} schedules exceeds the limit of {limit:.3g}", estimate
        )


def enumerate_schedules(
    project: Project,
    horizon: int | None = None,
    max_tasks: int = MAX_ORACLE_TASKS,
    max_horizon: int = MAX_ORACLE_HORIZON,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> Iterator[np.ndarray]:
    """Yield every dependency-feasible start vector in [0, horizon]^n once.

    Tasks are assigned in topological order so each partial assignment can
    start from the earliest day its predecessors allow.
    """
    horizon = project.max_horizon if horizon is None else int(horizon)
    _guard(project, horizon, max_tasks, max_horizon, limit)
    n = len(project.tasks)
    if n == 0:
        return
    topo, _, _, durations, _, _ = _project_arrays(project)
    preds = project.predecessors

    starts = np.zeros(n, dtype=np.int64)

    def assign(position: int) -> Iterator[np.ndarray]:
        if position == n:
            yield starts.copy()
            return
        task = int(topo[position])
        low = 0
        for p in preds[task]:
            low = max(low, int(starts[p] + durations[p] + 1))
        for day in range(low, horizon + 1):
            starts[task] = day
            yield from assign(position + 1)

    yield from assign(0)


def count_feasible_schedules(project: Project, horizon: int | None = None, **guards) -> int:
    return sum(1 for _ in enumerate_schedules(project, horizon, **guards))


@dataclass(frozen=True)
class ExactFront:
    """All non-dominated (starts, objectives) pairs of the full schedule space."""

    project_id: str
    starts: tuple[tuple[int, ...], ...]
    objectives: np.ndarray

    def __len__(self) -> int:
        return len(self.starts)


def _nondominated_filter(objectives: np.ndarray) -> np.ndarray:
    """Independent pairwise domination scan; returns kept row indices.

    Broadcast all-pairs comparison rather than the scheduler's rank peeling,
    so the two sides of an oracle comparison never share a code path.
    """
    f = np.asarray(objectives, dtype=np.float64)
    weakly = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    strictly = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dominated = np.any(weakly & strictly, axis=0)
    return np.flatnonzero(~dominated)


def _dominates(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def exact_front(
    project: Project,
    model: PredictorModel,
    config: GAConfig = GAConfig(),
    background: Sequence[Task] = (),
    horizon: int | None = None,
    chunk_size: int = 2048,
    **guards,
) -> ExactFront:
    """Evaluate every feasible schedule and keep the non-dominated set.

    Evaluation goes through the scheduler's own pipeline so the comparison
    with an evolved front isolates search quality.  Duplicate objective rows
    collapse to the earliest start vector seen.
    """
    ctx = build_context(project, model, config, background)
    horizon = project.max_horizon if horizon is None else int(horizon)

    kept_starts: list[np.ndarray] = []
    kept_objs: list[np.ndarray] = []
    chunk: list[np.ndarray] = []

    def flush():
        nonlocal kept_starts, kept_objs
        if not chunk:
            return
        genes = np.stack(chunk)
        chunk.clear()
        _, effective, fitness = kernels.evaluate_batch(ctx, genes)
        local = _nondominated_filter(fitness)
        pool_objs = kept_objs + [fitness[i] for i in local]
        pool_starts = kept_starts + [effective[i] for i in local]
        objs = np.stack(pool_objs)
        keep = _nondominated_filter(objs)
        kept_objs = [objs[i] for i in keep]
        kept_starts = [pool_starts[i] for i in keep]

    for starts in enumerate_schedules(project, horizon, **guards):
        chunk.append(starts)
        if len(chunk) >= chunk_size:
            flush()
    flush()

    if not kept_objs:
        raise ComparisonError("no feasible schedules to build an exact front from")

    objectives = np.stack(kept_objs)
    # Deduplicate equal objective rows, keeping the lexicographically
    # smallest start vector for determinism.
    order = np.lexsort(
        tuple(np.array([tuple(s) for s in kept_starts]).T[::-1])
        + tuple(objectives.T[::-1])
    )
    seen: dict[tuple, tuple[int, ...]] = {}
    for i in order:
        key = tuple(objectives[i])
        if key not in seen:
            seen[key] = tuple(int(v) for v in kept_starts[i])
    pairs = sorted(seen.items())
    return ExactFront(
        project_id=project.project_id,
        starts=tuple(s for _, s in pairs),
        objectives=np.array([k for k, _ in pairs], dtype=np.float64),
    )


# -- hypervolume -----------------------------------------------------------------


def hypervolume(objectives: np.ndarray, reference: np.ndarray) -> float:
    """Dominated hypervolume for 2- or 3-objective minimization.

    Points at or beyond the reference in any coordinate contribute nothing.
    """
    points = np.asarray(objectives, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("objectives must be a 2-D array")
    points = points[np.all(points < reference, axis=1)]
    if points.shape[0] == 0:
        return 0.0
    if points.shape[1] == 2:
        return _hv2(points, reference)
    if points.shape[1] == 3:
        return _hv3(points, reference)
    raise ValueError("hypervolume supports 2 or 3 objectives")


def _hv2(points: np.ndarray, reference: np.ndarray) -> float:
    keep = _nondominated_filter(points)
    pts = points[keep]
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    area = 0.0
    prev_y = reference[1]
    for x, y in pts:
        if y >= prev_y:
            continue
        area += (reference[0] - x) * (prev_y - y)
        prev_y = y
    return area


def _hv3(points: np.ndarray, reference: np.ndarray) -> float:
    levels = np.unique(points[:, 2])
    volume = 0.0
    for k, z in enumerate(levels):
        depth = (levels[k + 1] if k + 1 < len(levels) else reference[2]) - z
        slab = points[points[:, 2] <= z][:, :2]
        volume += _hv2(slab, reference[:2]) * depth
    return volume


def shared_reference_point(*objective_sets: np.ndarray) -> np.ndarray:
    """Componentwise worst across the given sets, scaled out by 10 percent.

    A small absolute offset keeps zero-valued objectives from collapsing the
    reference onto the front.
    """
    stacked = np.vstack([np.asarray(o, dtype=np.float64) for o in objective_sets])
    worst = stacked.max(axis=0)
    return worst * 1.1 + 1e-9


# -- front comparison ---------------------------------------------------------------


@dataclass(frozen=True)
class FrontComparison:
    nondominated_fraction: float
    hypervolume_ratio: float
    max_regret: float
    per_objective_regret: tuple[float, ...]
    found_size: int
    exact_size: int

    def to_dict(self) -> dict:
        return {
            "schema": "crowdsched-oracle-report v1",
            "nondominated_fraction": self.nondominated_fraction,
            "hypervolume_ratio": self.hypervolume_ratio,
            "max_regret": self.max_regret,
            "per_objective_regret": list(self.per_objective_regret),
            "found_size": self.found_size,
            "exact_size": self.exact_size,
        }


def compare_fronts(found: ParetoResult | np.ndarray, exact: ExactFront) -> FrontComparison:
    """Score an evolved front against the exhaustive one.

    Reports the fraction of found members no exact point strictly dominates,
    the hypervolume ratio under a shared reference point, and the worst
    per-objective gap between the fronts' best values.
    """
    if isinstance(found, ParetoResult):
        if found.project_id != exact.project_id:
            raise ComparisonError(
                f"fronts describe different projects: {found.project_id!r} "
                f"vs {exact.project_id!r}"
            )
        found_objs = found.objective_matrix()
    else:
        found_objs = np.asarray(found, dtype=np.float64)
    if found_objs.size == 0:
        raise ComparisonError("found front is empty")

    exact_objs = exact.objectives
    good = sum(
        1
        for row in found_objs
        if not any(_dominates(e, row) for e in exact_objs)
    )
    fraction = good / len(found_objs)

    reference = shared_reference_point(found_objs, exact_objs)
    hv_exact = hypervolume(exact_objs, reference)
    hv_found = hypervolume(found_objs, reference)
    ratio = hv_found / hv_exact if hv_exact > 0 else 1.0

    regrets = tuple(
        float(max(0.0, found_objs[:, m].min() - exact_objs[:, m].min()))
        for m in range(found_objs.shape[1])
    )
    return FrontComparison(
        nondominated_fraction=float(fraction),
        hypervolume_ratio=float(ratio),
        max_regret=float(max(regrets)),
        per_objective_regret=regrets,
        found_size=int(len(found_objs)),
        exact_size=int(len(exact_objs)),
    )
