"""NSGA-II evolutionary scheduler.

Chromosomes are integer start-day vectors, one gene per project task.  Every
chromosome passes through two repairs before evaluation: a dependency repair
(raise each start above its predecessors' finish days) and an optional
similarity repair (postpone overlapping tasks whose similarity falls outside
the target band).  Fitness is the triple

    [project duration, similarity cost, mean predicted failure]

where similarity cost is the relative duration added by the similarity
repair, and the failure term takes, per task, the lowest predicted failure
over the arrival day and the two days after it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as kernels
from .errors import ConfigError, InfeasibleProjectError
from .model import Project, Task
from .platform import PlatformState, ScheduledTask
from .predictor import PredictorModel, best_start_day
from .similarity import SimilarityMatrix, similarity_matrix


class FitnessTriple(NamedTuple):
    duration: float
    similarity_cost: float
    failure: float


OBJECTIVE_NAMES = ("duration_days", "similarity_cost", "failure_probability")


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 200
    crossover_probability: float = 0.9
    variation_probability: float = 0.1
    tournament_size: int = 2
    seed: int = 0
    similarity_target: float = 0.6
    similarity_tolerance: float = 0.05
    similarity_repair: bool = True
    arrival_rate_uses_registration_window: bool = False
    threads: int = 1

    def validate(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise ConfigError("population size must be even and >= 4")
        for name in ("crossover_probability", "variation_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.tournament_size < 2:
            raise ConfigError("tournament size must be >= 2")
        if not 0.0 <= self.similarity_target <= 1.0:
            raise ConfigError("similarity target must lie in [0, 1]")
        if self.similarity_tolerance < 0:
            raise ConfigError("similarity tolerance must be >= 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


# -- dependency arrays ---------------------------------------------------------


@lru_cache(maxsize=128)
def _project_arrays(project: Project):
    """CSR predecessor structure plus earliest/latest feasible starts."""
    n = len(project.tasks)
    durations = np.array([t.duration for t in project.tasks], dtype=np.int64)
    topo = np.array(project.topo_order, dtype=np.int64)
    pred_ptr = np.zeros(n + 1, dtype=np.int64)
    flat: list[int] = []
    for j in range(n):
        flat.extend(project.predecessors[j])
        pred_ptr[j + 1] = len(flat)
    pred_idx = np.array(flat, dtype=np.int64)

    horizon = project.max_horizon
    latest = np.full(n, horizon, dtype=np.int64)
    for j in reversed(topo):
        for succ in range(n):
            if j in project.predecessors[succ]:
                latest[j] = min(latest[j], latest[succ] - durations[j] - 1)

    earliest = np.zeros(n, dtype=np.int64)
    for j in topo:
        for p in project.predecessors[j]:
            earliest[j] = max(earliest[j], earliest[p] + durations[p] + 1)
    return topo, pred_ptr, pred_idx, durations, latest, earliest


def earliest_schedule(project: Project) -> np.ndarray:
    """The zero-slack schedule: every task as early as dependencies allow."""
    return _project_arrays(project)[5].copy()


def is_feasible(project: Project) -> bool:
    _, _, _, _, latest, earliest = _project_arrays(project)
    return bool(np.all(earliest <= latest))


# -- evaluation context ---------------------------------------------------------


@dataclass
class EvalContext:
    """Packed arrays consumed by the kernel backends."""

    project: Project
    model: PredictorModel
    background: tuple[Task, ...]
    sim_matrix: SimilarityMatrix
    n: int
    m: int
    horizon: int
    topo: np.ndarray
    pred_ptr: np.ndarray
    pred_idx: np.ndarray
    durations: np.ndarray
    latest: np.ndarray
    earliest: np.ndarray
    reg_len: np.ndarray
    spans: np.ndarray
    dur_f: np.ndarray
    prizes: np.ndarray
    bg_start: np.ndarray
    bg_reg_end: np.ndarray
    bg_spans: np.ndarray
    sim: np.ndarray
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    layer_dims: np.ndarray
    w_flat: np.ndarray
    b_flat: np.ndarray
    feat_min: np.ndarray
    feat_max: np.ndarray
    sim_lo: float
    sim_hi: float
    sim_enabled: bool
    max_passes: int
    arrival_rate_uses_registration_window: bool


def build_context(
    project: Project,
    model: PredictorModel,
    config: GAConfig = GAConfig(),
    background: Sequence[Task] = (),
) -> EvalContext:
    """Precompute every array the evaluation kernels need.

    Raises InfeasibleProjectError when no schedule fits inside the horizon.
    """
    topo, pred_ptr, pred_idx, durations, latest, earliest = _project_arrays(project)
    if np.any(earliest > latest):
        bad = int(np.flatnonzero(earliest > latest)[0])
        raise InfeasibleProjectError(
            f"task {project.tasks[bad].task_id!r} cannot start by day "
            f"{int(latest[bad])} within horizon {project.max_horizon}"
        )

    background = tuple(background)
    all_tasks = project.tasks + background
    ids = [t.task_id for t in all_tasks]
    if len(set(ids)) != len(ids):
        raise ConfigError("background task ids collide with project task ids")
    sim_matrix = similarity_matrix(all_tasks, project.norms)

    n = len(project.tasks)
    reg_len = np.array([t.registration_window for t in project.tasks], dtype=np.int64)
    if config.arrival_rate_uses_registration_window:
        spans = reg_len.copy()
        bg_spans = np.array([t.registration_window for t in background], dtype=np.int64)
    else:
        spans = np.array(
            [ScheduledTask(t, 0).arrival_span for t in project.tasks], dtype=np.int64
        )
        bg_spans = np.array(
            [ScheduledTask(t, 0).arrival_span for t in background], dtype=np.int64
        )
    bg_start = np.array([t.registration_start for t in background], dtype=np.int64)
    bg_reg_end = np.array(
        [t.registration_start + t.registration_window for t in background], dtype=np.int64
    )

    layer_dims = np.array(model.dims, dtype=np.int64)
    w_flat = np.concatenate([w.ravel() for w in model.weights])
    b_flat = np.concatenate(model.biases)

    return EvalContext(
        project=project,
        model=model,
        background=background,
        sim_matrix=sim_matrix,
        n=n,
        m=len(background),
        horizon=project.max_horizon,
        topo=topo,
        pred_ptr=pred_ptr,
        pred_idx=pred_idx,
        durations=durations,
        latest=latest,
        earliest=earliest,
        reg_len=reg_len,
        spans=spans,
        dur_f=durations.astype(np.float64),
        prizes=np.array([model.task_prize(t) for t in project.tasks], dtype=np.float64),
        bg_start=bg_start,
        bg_reg_end=bg_reg_end,
        bg_spans=bg_spans,
        sim=np.ascontiguousarray(sim_matrix.values),
        weights=model.weights,
        biases=model.biases,
        layer_dims=layer_dims,
        w_flat=w_flat,
        b_flat=b_flat,
        feat_min=np.asarray(model.feature_min, dtype=np.float64),
        feat_max=np.asarray(model.feature_max, dtype=np.float64),
        sim_lo=config.similarity_target - config.similarity_tolerance,
        sim_hi=config.similarity_target + config.similarity_tolerance,
        sim_enabled=config.similarity_repair,
        max_passes=n,
        arrival_rate_uses_registration_window=config.arrival_rate_uses_registration_window,
    )


# -- chromosome operators --------------------------------------------------------


def repair_dependencies(starts: Sequence[int], project: Project) -> np.ndarray:
    """Raise starts until every finish-to-start edge holds (total repair)."""
    topo, pred_ptr, pred_idx, durations, latest, _ = _project_arrays(project)
    ctx = _RepairView(topo, pred_ptr, pred_idx, durations, latest)
    return kernels.repair_batch(ctx, np.asarray(starts, dtype=np.int64))[0]


def repair_similarity(
    starts: Sequence[int],
    project: Project,
    sim_matrix: SimilarityMatrix,
    config: GAConfig = GAConfig(),
) -> np.ndarray:
    """Postpone overlapping off-band pairs, then re-repair dependencies."""
    topo, pred_ptr, pred_idx, durations, latest, _ = _project_arrays(project)
    n = len(project.tasks)
    ctx = _RepairView(
        topo,
        pred_ptr,
        pred_idx,
        durations,
        latest,
        n=n,
        reg_len=np.array([t.registration_window for t in project.tasks], dtype=np.int64),
        sim=np.ascontiguousarray(sim_matrix.values[:n, :n]),
        sim_lo=config.similarity_target - config.similarity_tolerance,
        sim_hi=config.similarity_target + config.similarity_tolerance,
        max_passes=n,
    )
    repaired, _, _ = kernels.similarity_repair_batch(ctx, np.asarray(starts, dtype=np.int64))
    return repaired[0]


class _RepairView:
    """Minimal attribute bag accepted by the repair kernels."""

    def __init__(self, topo, pred_ptr, pred_idx, durations, latest, **extra):
        self.topo = topo
        self.pred_ptr = pred_ptr
        self.pred_idx = pred_idx
        self.durations = durations
        self.latest = latest
        for key, value in extra.items():
            setattr(self, key, value)


def dependencies_satisfied(starts: Sequence[int], project: Project) -> bool:
    """Independent scan of every edge; used by tests and sanity checks."""
    starts = list(starts)
    return all(
        starts[j] >= starts[i] + project.tasks[i].duration + 1 for i, j in project.edges
    )


def crossover_two_point(
    parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Swap the segment between two ordered cut points; parents of length < 2
    are copied unchanged."""
    n = len(parent_a)
    if n != len(parent_b):
        raise ValueError("parents must have equal length")
    if n < 2:
        return parent_a.copy(), parent_b.copy()
    cut_a, cut_b = sorted(int(c) for c in rng.choice(n + 1, size=2, replace=False))
    child_a = parent_a.copy()
    child_b = parent_b.copy()
    child_a[cut_a:cut_b] = parent_b[cut_a:cut_b]
    child_b[cut_a:cut_b] = parent_a[cut_a:cut_b]
    return child_a, child_b


def shuffle_genes(starts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Swap each gene, selected with probability 1/length, with a uniformly
    chosen position (possibly itself)."""
    s = np.array(starts, dtype=np.int64)
    n = len(s)
    for i in range(n):
        if rng.random() < 1.0 / n:
            j = int(rng.integers(0, n))
            s[i], s[j] = s[j], s[i]
    return s


def mutate_shuffle(
    starts: np.ndarray, rng: np.random.Generator, config: GAConfig
) -> np.ndarray:
    """Apply the shuffle with the per-chromosome variation probability."""
    if rng.random() >= config.variation_probability:
        return np.array(starts, dtype=np.int64)
    return shuffle_genes(starts, rng)


def init_population(
    project: Project, config: GAConfig, rng: np.random.Generator
) -> np.ndarray:
    """Seed one zero-slack chromosome; the rest are uniform random, repaired."""
    if config.population_size < 1:
        raise ConfigError("population size must be >= 1")
    if not is_feasible(project):
        raise InfeasibleProjectError(
            f"project {project.project_id!r} has no feasible schedule within "
            f"horizon {project.max_horizon}"
        )
    n = len(project.tasks)
    genes = np.empty((config.population_size, n), dtype=np.int64)
    genes[0] = earliest_schedule(project)
    if config.population_size > 1:
        genes[1:] = rng.integers(
            0, project.max_horizon + 1, size=(config.population_size - 1, n), dtype=np.int64
        )
    topo, pred_ptr, pred_idx, durations, latest, _ = _project_arrays(project)
    return kernels.repair_batch(
        _RepairView(topo, pred_ptr, pred_idx, durations, latest), genes
    )


# -- NSGA-II machinery -------------------------------------------------------------


def fast_nondominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Fronts of indices, best first (minimization in every objective)."""
    ranks = kernels.pareto_ranks(np.asarray(objectives, dtype=np.float64))
    return [np.flatnonzero(ranks == r) for r in range(int(ranks.max()) + 1)]


def crowding_distance(front_objectives: np.ndarray) -> np.ndarray:
    """NSGA-II crowding distance within one front.

    Boundary members per objective get infinity; interior members accumulate
    normalized neighbor gaps; a zero-range objective contributes nothing.
    """
    f = np.asarray(front_objectives, dtype=np.float64)
    n = f.shape[0]
    if n <= 2:
        return np.full(n, np.inf)
    distance = np.zeros(n)
    for m in range(f.shape[1]):
        order = np.argsort(f[:, m], kind="stable")
        values = f[order, m]
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        value_range = values[-1] - values[0]
        if value_range > 0:
            gaps = (values[2:] - values[:-2]) / value_range
            interior = order[1:-1]
            finite = np.isfinite(distance[interior])
            distance[interior[finite]] += gaps[finite]
    return distance


def _population_crowding(objectives: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    crowding = np.empty(len(ranks))
    for rank in range(int(ranks.max()) + 1):
        idx = np.flatnonzero(ranks == rank)
        crowding[idx] = crowding_distance(objectives[idx])
    return crowding


def _tournament(
    rng: np.random.Generator, ranks: np.ndarray, crowding: np.ndarray, size: int
) -> int:
    contenders = rng.integers(0, len(ranks), size=size)
    best = [int(contenders[0])]
    for raw in contenders[1:]:
        c = int(raw)
        leader = best[0]
        if ranks[c] < ranks[leader] or (
            ranks[c] == ranks[leader] and crowding[c] > crowding[leader]
        ):
            best = [c]
        elif ranks[c] == ranks[leader] and crowding[c] == crowding[leader]:
            best.append(c)
    if len(best) == 1:
        return best[0]
    return int(best[rng.integers(0, len(best))])


def select_parents(
    objectives: np.ndarray, rng: np.random.Generator, config: GAConfig
) -> list[tuple[int, int]]:
    """Binary (or k-ary) crowded tournaments; one pair per two offspring."""
    ranks = kernels.pareto_ranks(np.asarray(objectives, dtype=np.float64))
    crowding = _population_crowding(objectives, ranks)
    pairs = []
    for _ in range(config.population_size // 2):
        pairs.append(
            (
                _tournament(rng, ranks, crowding, config.tournament_size),
                _tournament(rng, ranks, crowding, config.tournament_size),
            )
        )
    return pairs


def _survivor_selection(objectives: np.ndarray, capacity: int) -> np.ndarray:
    """Standard NSGA-II truncation of the parents+offspring pool."""
    ranks = kernels.pareto_ranks(objectives)
    keep: list[int] = []
    for rank in range(int(ranks.max()) + 1):
        front = np.flatnonzero(ranks == rank)
        if len(keep) + len(front) <= capacity:
            keep.extend(int(i) for i in front)
            if len(keep) == capacity:
                break
            continue
        crowd = crowding_distance(objectives[front])
        order = np.argsort(-crowd, kind="stable")
        remaining = capacity - len(keep)
        keep.extend(int(front[i]) for i in order[:remaining])
        break
    return np.array(keep, dtype=np.int64)


def _evaluate_population(ctx: EvalContext, genes: np.ndarray, threads: int):
    if threads <= 1 or genes.shape[0] < 2 * threads:
        return kernels.evaluate_batch(ctx, genes)
    slices = np.array_split(np.arange(genes.shape[0]), threads)
    genotype = np.empty_like(genes)
    effective = np.empty_like(genes)
    fitness = np.empty((genes.shape[0], 3))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            (sl, pool.submit(kernels.evaluate_batch, ctx, genes[sl])) for sl in slices if sl.size
        ]
        for sl, fut in futures:
            part_geno, part_eff, part_fit = fut.result()
            genotype[sl] = part_geno
            effective[sl] = part_eff
            fitness[sl] = part_fit
    return genotype, effective, fitness


def evaluate(ctx: EvalContext, starts: Sequence[int]) -> tuple[np.ndarray, FitnessTriple]:
    """Objectives for one chromosome.

    Returns the effective (fully repaired) schedule and its fitness.
    """
    _, effective, fitness = kernels.evaluate_batch(ctx, np.asarray(starts, dtype=np.int64))
    return effective[0], FitnessTriple(*(float(v) for v in fitness[0]))


# -- results -----------------------------------------------------------------------


@dataclass(frozen=True)
class TaskDiagnostics:
    task_id: str
    start_day: int
    best_day: int
    predicted_failure: float
    open_tasks_on_arrival: int
    avg_similarity_on_arrival: float


@dataclass(frozen=True)
class ParetoMember:
    starts: tuple[int, ...]
    fitness: FitnessTriple
    diagnostics: tuple[TaskDiagnostics, ...]


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    front_size: int
    best_duration: float
    best_similarity_cost: float
    best_failure: float
    front_objectives: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class ParetoResult:
    project_id: str
    seed: int
    members: tuple[ParetoMember, ...]
    generations: tuple[GenerationStats, ...]

    def objective_matrix(self) -> np.ndarray:
        return np.array([m.fitness for m in self.members], dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "schema": "crowdsched-pareto v1",
            "project_id": self.project_id,
            "seed": self.seed,
            "objectives": list(OBJECTIVE_NAMES),
            "members": [
                {
                    "starts": list(m.starts),
                    "fitness": {
                        "duration_days": m.fitness.duration,
                        "similarity_cost": m.fitness.similarity_cost,
                        "failure_probability": m.fitness.failure,
                    },
                    "tasks": [
                        {
                            "task_id": d.task_id,
                            "start_day": d.start_day,
                            "best_day": d.best_day,
                            "predicted_failure": d.predicted_failure,
                            "open_tasks_on_arrival": d.open_tasks_on_arrival,
                            "avg_similarity_on_arrival": d.avg_similarity_on_arrival,
                        }
                        for d in m.diagnostics
                    ],
                }
                for m in self.members
            ],
            "generations": [
                {
                    "generation": g.generation,
                    "front_size": g.front_size,
                    "best_duration": g.best_duration,
                    "best_similarity_cost": g.best_similarity_cost,
                    "best_failure": g.best_failure,
                    "front_objectives": [list(t) for t in g.front_objectives],
                }
                for g in self.generations
            ],
        }


def _member_diagnostics(ctx: EvalContext, starts: np.ndarray) -> tuple[TaskDiagnostics, ...]:
    scheduled = [ScheduledTask(t, int(s)) for t, s in zip(ctx.project.tasks, starts)]
    scheduled += [ScheduledTask(t, t.registration_start) for t in ctx.background]
    state = PlatformState(
        scheduled,
        ctx.horizon,
        ctx.sim_matrix,
        arrival_rate_uses_registration_window=ctx.arrival_rate_uses_registration_window,
    )
    out = []
    for task, start in zip(ctx.project.tasks, starts):
        day = int(start)
        chosen_day, prob = best_start_day(ctx.model, task, day, state)
        out.append(
            TaskDiagnostics(
                task_id=task.task_id,
                start_day=day,
                best_day=chosen_day,
                predicted_failure=prob,
                open_tasks_on_arrival=state.open_task_count(day, exclude=task.task_id),
                avg_similarity_on_arrival=state.avg_similarity(day, task.task_id),
            )
        )
    return tuple(out)


def _generation_stats(generation: int, objectives: np.ndarray) -> GenerationStats:
    ranks = kernels.pareto_ranks(objectives)
    front = objectives[ranks == 0]
    unique = np.unique(front, axis=0)
    return GenerationStats(
        generation=generation,
        front_size=int(front.shape[0]),
        best_duration=float(objectives[:, 0].min()),
        best_similarity_cost=float(objectives[:, 1].min()),
        best_failure=float(objectives[:, 2].min()),
        front_objectives=tuple(tuple(float(v) for v in row) for row in unique),
    )


def _collect_front(ctx: EvalContext, effective: np.ndarray, objectives: np.ndarray):
    """First-front members keyed by their effective (recommended) schedules."""
    ranks = kernels.pareto_ranks(objectives)
    idx = np.flatnonzero(ranks == 0)
    seen: set[tuple[int, ...]] = set()
    members = []
    for i in idx:
        starts = tuple(int(v) for v in effective[i])
        if starts in seen:
            continue
        seen.add(starts)
        members.append(
            ParetoMember(
                starts=starts,
                fitness=FitnessTriple(*(float(v) for v in objectives[i])),
                diagnostics=_member_diagnostics(ctx, effective[i]),
            )
        )
    members.sort(key=lambda m: (m.fitness, m.starts))
    return tuple(members)


def evolve(
    project: Project,
    model: PredictorModel,
    config: GAConfig = GAConfig(),
    background: Sequence[Task] = (),
) -> ParetoResult:
    """Run the generational loop and return the final non-dominated front.

    Fully deterministic for a fixed (project, model, config, background):
    all randomness flows from ``config.seed`` through one generator, and
    fitness evaluation is pure, so thread count does not affect results.
    """
    config.validate()
    ctx = build_context(project, model, config, background)
    rng = np.random.default_rng(config.seed)

    genes = init_population(project, config, rng)
    genes, effective, objectives = _evaluate_population(ctx, genes, config.threads)
    stats = [_generation_stats(0, objectives)]

    half = config.population_size // 2
    for generation in range(1, config.generations + 1):
        ranks = kernels.pareto_ranks(objectives)
        crowding = _population_crowding(objectives, ranks)
        offspring = np.empty_like(genes)
        for pair in range(half):
            i1 = _tournament(rng, ranks, crowding, config.tournament_size)
            i2 = _tournament(rng, ranks, crowding, config.tournament_size)
            if rng.random() < config.crossover_probability:
                child_a, child_b = crossover_two_point(genes[i1], genes[i2], rng)
            else:
                child_a, child_b = genes[i1].copy(), genes[i2].copy()
            offspring[2 * pair] = mutate_shuffle(child_a, rng, config)
            offspring[2 * pair + 1] = mutate_shuffle(child_b, rng, config)

        offspring, offspring_eff, offspring_fit = _evaluate_population(
            ctx, offspring, config.threads
        )
        pool_genes = np.vstack([genes, offspring])
        pool_eff = np.vstack([effective, offspring_eff])
        pool_fit = np.vstack([objectives, offspring_fit])
        keep = _survivor_selection(pool_fit, config.population_size)
        genes = pool_genes[keep]
        effective = pool_eff[keep]
        objectives = pool_fit[keep]
        stats.append(_generation_stats(generation, objectives))

    return ParetoResult(
        project_id=project.project_id,
        seed=config.seed,
        members=_collect_front(ctx, effective, objectives),
        generations=tuple(stats),
    )


def evolve_multi(
    project: Project,
    model: PredictorModel,
    config: GAConfig = GAConfig(),
    runs: int = 1,
    background: Sequence[Task] = (),
) -> ParetoResult:
    """Repeated-runs mode: union of per-run fronts, re-filtered.

    Run seeds derive deterministically from ``config.seed``.  Per-generation
    statistics are dropped in the merged result.
    """
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    if runs == 1:
        return evolve(project, model, config, background)
    from dataclasses import replace

    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(config.seed).spawn(runs)]
    all_members: list[ParetoMember] = []
    for seed in seeds:
        result = evolve(project, model, replace(config, seed=seed), background)
        all_members.extend(result.members)

    objectives = np.array([m.fitness for m in all_members])
    ranks = kernels.pareto_ranks(objectives)
    seen: set[tuple[int, ...]] = set()
    merged = []
    for i in np.flatnonzero(ranks == 0):
        member = all_members[i]
        if member.starts in seen:
            continue
        seen.add(member.starts)
        merged.append(member)
    merged.sort(key=lambda m: (m.fitness, m.starts))
    return ParetoResult(
        project_id=project.project_id,
        seed=config.seed,
        members=tuple(merged),
        generations=(),
    )


def schedule_acceleration(final_duration: float, recommended_duration: float) -> float:
    """Relative duration reduction versus the historical plan, in percent."""
    if final_duration <= 0:
        raise ValueError("final duration must be positive")
    return 100.0 * (final_duration - recommended_duration) / final_duration
