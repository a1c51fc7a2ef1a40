"""Pure numpy implementation of the hot evaluation kernels.

This is the fallback backend; `_speedups.pyx` implements the same four entry
points with identical semantics.  Any change here must be mirrored there (the
backend parity tests compare them element by element).

All kernels read precomputed arrays off an evaluation context object:
dependency CSR (`topo`, `pred_ptr`, `pred_idx`), per-task day counts
(`durations`, `reg_len`, `latest`, `spans`), background windows, the combined
similarity matrix (project rows first), and the packed predictor.
"""

from __future__ import annotations

import numpy as np


def repair_batch(ctx, genes: np.ndarray) -> np.ndarray:
    """Dependency repair: cap genes to feasible bounds, then raise each start
    above every predecessor's finish in topological order."""
    g = np.atleast_2d(np.asarray(genes, dtype=np.int64))
    starts = np.clip(g, 0, ctx.latest[None, :])
    for j in ctx.topo:
        for p in ctx.pred_idx[ctx.pred_ptr[j]: ctx.pred_ptr[j + 1]]:
            need = starts[:, p] + ctx.durations[p] + 1
            np.maximum(starts[:, j], need, out=starts[:, j])
    return starts


def _similarity_passes(ctx, s: np.ndarray) -> tuple[int, bool]:
    """Postponement passes on one start vector, in place.

    Overlapping pairs whose similarity falls outside the target band push the
    longer-window task to the other's registration end (capped to its latest
    feasible start).  Returns (number of passes that changed something,
    whether a fixpoint was confirmed within the pass budget).
    """
    n = ctx.n
    reg_len = ctx.reg_len
    latest = ctx.latest
    sim = ctx.sim
    lo, hi = ctx.sim_lo, ctx.sim_hi
    for done in range(ctx.max_passes + 1):
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                end_i = s[i] + reg_len[i]
                end_j = s[j] + reg_len[j]
                if s[i] > end_j or s[j] > end_i:
                    continue
                score = sim[i, j]
                if lo <= score <= hi:
                    continue
                if reg_len[i] > reg_len[j]:
                    mover, target = i, end_j
                else:
                    mover, target = j, end_i
                if target > latest[mover]:
                    target = latest[mover]
                if target > s[mover]:
                    s[mover] = target
                    changed = True
        if not changed:
            return done, True
    return ctx.max_passes + 1, False


def similarity_repair_batch(ctx, starts: np.ndarray):
    """Similarity postponement followed by a final dependency repair.

    Returns (repaired starts, per-row pass counts, per-row convergence flags).
    """
    s = np.atleast_2d(np.asarray(starts, dtype=np.int64)).copy()
    rows = s.shape[0]
    passes = np.zeros(rows, dtype=np.int64)
    converged = np.zeros(rows, dtype=np.uint8)
    for r in range(rows):
        p, ok = _similarity_passes(ctx, s[r])
        passes[r] = p
        converged[r] = 1 if ok else 0
    return repair_batch(ctx, s), passes, converged


def _forward_rows(ctx, x: np.ndarray) -> np.ndarray:
    """Batch forward pass on raw feature rows: min-max scaling, rectified
    hidden layers, sigmoid output clipped away from exact 0/1."""
    span = ctx.feat_max - ctx.feat_min
    safe = np.where(span > 0, span, 1.0)
    a = np.clip((x - ctx.feat_min) / safe, 0.0, 1.0)
    a = np.where(span > 0, a, 0.5)
    last = len(ctx.weights) - 1
    for layer, (w, b) in enumerate(zip(ctx.weights, ctx.biases)):
        z = a @ w.T + b
        if layer == last:
            z = np.clip(z, -30.0, 30.0)
            a = 1.0 / (1.0 + np.exp(-z))
        else:
            a = np.maximum(z, 0.0)
    return a[:, 0]


def _failure_objective(ctx, starts: np.ndarray) -> np.ndarray:
    """Mean over tasks of the lowest predicted failure across the task's
    arrival day and up to two lookahead days."""
    pop, n = starts.shape
    reg_ends = starts + ctx.reg_len[None, :]
    total = np.zeros(pop)
    for i in range(n):
        d = starts[:, i:i + 1]
        open_proj = (starts <= d) & (d <= reg_ends)
        open_proj[:, i] = False
        if ctx.m:
            open_bg = (ctx.bg_start[None, :] <= d) & (d <= ctx.bg_reg_end[None, :])
        else:
            open_bg = np.zeros((pop, 0), dtype=bool)

        count = open_proj.sum(axis=1) + open_bg.sum(axis=1)
        sim_row = ctx.sim[i]
        sim_sum = open_proj @ sim_row[:n] + open_bg @ sim_row[n:]
        span_sum = open_proj @ ctx.spans + open_bg @ ctx.bg_spans
        has_open = count > 0
        ats_now = np.where(has_open, sim_sum / np.maximum(count, 1), 0.0)
        rate = np.where(has_open, count / np.maximum(span_sum, 1), 0.0)

        day = starts[:, i].astype(np.float64)
        best = np.empty(pop)
        for delta in range(3):
            future = d + delta
            still_proj = open_proj & (reg_ends >= future)
            still_bg = open_bg & (ctx.bg_reg_end[None, :] >= future)
            still = still_proj.sum(axis=1) + still_bg.sum(axis=1)
            still_sum = still_proj @ sim_row[:n] + still_bg @ sim_row[n:]
            ats_still = np.where(still > 0, still_sum / np.maximum(still, 1), 0.0)
            arrivals = rate * delta
            projected_open = still + arrivals
            denom = still + arrivals
            ats_future = np.where(
                denom > 0, (still * ats_still + arrivals * ats_now) / np.where(denom > 0, denom, 1.0), 0.0
            )
            x = np.empty((pop, 4))
            x[:, 0] = ctx.dur_f[i]
            x[:, 1] = ctx.prizes[i]
            x[:, 2] = projected_open
            x[:, 3] = ats_future
            p = _forward_rows(ctx, x)
            if delta == 0:
                best[:] = p
            else:
                valid = (day + delta) <= ctx.horizon
                better = valid & (p < best)
                best[better] = p[better]
        total += best
    return total / n


def evaluate_batch(ctx, genes: np.ndarray):
    """Full objective pipeline for a batch of chromosomes.

    Returns (genotype, effective, fitness): the dependency-repaired genotype
    kept by the evolutionary loop, the similarity-postponed schedule actually
    being recommended, and the fitness matrix [duration, similarity cost,
    failure] measured on the effective schedule.  The genotype deliberately
    excludes the postponements so they cannot ratchet through generations.
    """
    s0 = repair_batch(ctx, genes)
    d0 = (s0 + ctx.durations[None, :]).max(axis=1) - s0.min(axis=1)
    if ctx.sim_enabled and ctx.n > 1:
        s1, _, _ = similarity_repair_batch(ctx, s0)
    else:
        s1 = s0
    d1 = (s1 + ctx.durations[None, :]).max(axis=1) - s1.min(axis=1)
    sim_cost = np.maximum(0.0, (d1 - d0) / np.maximum(1, d0))
    failure = _failure_objective(ctx, s1)
    fitness = np.empty((s1.shape[0], 3))
    fitness[:, 0] = d1
    fitness[:, 1] = sim_cost
    fitness[:, 2] = failure
    return s0, s1, fitness


def pareto_ranks(objectives: np.ndarray) -> np.ndarray:
    """Non-dominated sorting ranks (0 = first front), minimization."""
    f = np.asarray(objectives, dtype=np.float64)
    n = f.shape[0]
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dominates = le & lt  # [i, j]: i dominates j
    counts = dominates.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=np.int64)
    rank = 0
    current = np.flatnonzero(counts == 0)
    while current.size:
        ranks[current] = rank
        counts = counts - dominates[current].sum(axis=0)
        counts[current] = -1
        rank += 1
        current = np.flatnonzero((counts == 0) & (ranks == -1))
    return ranks
