#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-python fallback.

Times the four kernel entry points on a synthetic mid-sized project, plus a
full evolve run per backend.  Run from the repository root:

    python3 benchmarks/bench_backends.py [--tasks 12] [--population 100]
"""

import argparse
import contextlib
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from crowdsched import _kernels
from crowdsched.scheduler import GAConfig, build_context, evolve
from helpers import mock_model, random_project

KERNEL_NAMES = ("repair_batch", "similarity_repair_batch", "evaluate_batch", "pareto_ranks")


@contextlib.contextmanager
def active_backend(name):
    """Temporarily route the dispatch module's entry points to one backend."""
    backend = _kernels.get_backend(name)
    saved = {fn: getattr(_kernels, fn) for fn in KERNEL_NAMES}
    for fn in KERNEL_NAMES:
        setattr(_kernels, fn, getattr(backend, fn))
    try:
        yield backend
    finally:
        for fn, original in saved.items():
            setattr(_kernels, fn, original)


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--tasks", type=int, default=12)
    parser.add_argument("--population", type=int, default=100)
    parser.add_argument("--generations", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    project, _ = random_project(rng, args.tasks)
    model = mock_model(seed=args.seed)
    config = GAConfig(
        population_size=args.population, generations=args.generations, seed=args.seed
    )
    ctx = build_context(project, model, config)
    genes = rng.integers(
        0, project.max_horizon + 1, size=(args.population, args.tasks), dtype=np.int64
    )
    objectives = rng.random((2 * args.population, 3))

    backends = _kernels.available_backends()
    if backends == ["python"]:
        print("compiled backend not built; benchmarking the fallback only")

    rows = []
    for name in backends:
        backend = _kernels.get_backend(name)
        repaired = backend.repair_batch(ctx, genes)
        rows.append(
            (
                name,
                time_call(backend.repair_batch, ctx, genes),
                time_call(backend.similarity_repair_batch, ctx, repaired),
                time_call(backend.evaluate_batch, ctx, genes),
                time_call(backend.pareto_ranks, objectives),
            )
        )

    header = f"{'backend':<10}{'repair':>13}{'sim_repair':>13}{'evaluate':>13}{'ranks':>13}"
    print(f"kernel batch timings ({args.population} chromosomes, {args.tasks} tasks)")
    print(header)
    print("-" * len(header))
    for name, *timings in rows:
        cells = "".join(f"{t * 1e3:>11.3f}ms" for t in timings)
        print(f"{name:<10}{cells}")
    if len(rows) == 2:
        speedups = [p / c for c, p in zip(rows[0][1:], rows[1][1:])]
        print("speedup   " + "".join(f"{s:>12.1f}x" for s in speedups))

    print()
    print(f"evolve: {args.tasks} tasks, pop {args.population}, {args.generations} generations")
    for name in backends:
        with active_backend(name):
            start = time.perf_counter()
            result = evolve(project, model, config)
            elapsed = time.perf_counter() - start
        print(f"  {name:<10}{elapsed:>8.2f}s  (front size {len(result.members)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
