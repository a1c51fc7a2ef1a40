# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Semantics mirror ``crowdsched._kernels_py`` exactly; the backend parity tests
compare the two element by element.  Keep both in sync.
"""

from libc.math cimport exp

import numpy as np


# -- dependency repair -----------------------------------------------------------


cdef inline void _repair_row(
    long long[:, ::1] s, Py_ssize_t r,
    long long[::1] topo, long long[::1] pred_ptr, long long[::1] pred_idx,
    long long[::1] durations, long long[::1] latest, Py_ssize_t n,
) noexcept nogil:
    cdef Py_ssize_t t, j, pi, p
    cdef long long v, need
    for t in range(n):
        v = s[r, t]
        if v < 0:
            v = 0
        if v > latest[t]:
            v = latest[t]
        s[r, t] = v
    for t in range(n):
        j = topo[t]
        for pi in range(pred_ptr[j], pred_ptr[j + 1]):
            p = pred_idx[pi]
            need = s[r, p] + durations[p] + 1
            if need > s[r, j]:
                s[r, j] = need


def repair_batch(ctx, genes):
    """Cap genes to feasible bounds, then raise starts in topological order."""
    g = np.atleast_2d(np.array(genes, dtype=np.int64, copy=True, order="C"))
    cdef long long[:, ::1] s = g
    cdef long long[::1] topo = ctx.topo
    cdef long long[::1] pred_ptr = ctx.pred_ptr
    cdef long long[::1] pred_idx = ctx.pred_idx
    cdef long long[::1] durations = ctx.durations
    cdef long long[::1] latest = ctx.latest
    cdef Py_ssize_t pop = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    cdef Py_ssize_t r
    with nogil:
        for r in range(pop):
            _repair_row(s, r, topo, pred_ptr, pred_idx, durations, latest, n)
    return g


# -- similarity postponement -------------------------------------------------------


cdef inline long long _sim_passes_row(
    long long[:, ::1] s, Py_ssize_t r,
    long long[::1] reg_len, long long[::1] latest,
    double[:, ::1] sim, double lo, double hi,
    Py_ssize_t n, long long max_passes, unsigned char* converged,
) noexcept nogil:
    cdef long long done, end_i, end_j, target
    cdef Py_ssize_t i, j, mover
    cdef double score
    cdef bint changed
    for done in range(max_passes + 1):
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                end_i = s[r, i] + reg_len[i]
                end_j = s[r, j] + reg_len[j]
                if s[r, i] > end_j or s[r, j] > end_i:
                    continue
                score = sim[i, j]
                if lo <= score <= hi:
                    continue
                if reg_len[i] > reg_len[j]:
                    mover = i
                    target = end_j
                else:
                    mover = j
                    target = end_i
                if target > latest[mover]:
                    target = latest[mover]
                if target > s[r, mover]:
                    s[r, mover] = target
                    changed = True
        if not changed:
            converged[0] = 1
            return done
    converged[0] = 0
    return max_passes + 1


def similarity_repair_batch(ctx, starts):
    """Postponement passes to a fixpoint, then a final dependency repair."""
    g = np.atleast_2d(np.array(starts, dtype=np.int64, copy=True, order="C"))
    cdef long long[:, ::1] s = g
    cdef long long[::1] topo = ctx.topo
    cdef long long[::1] pred_ptr = ctx.pred_ptr
    cdef long long[::1] pred_idx = ctx.pred_idx
    cdef long long[::1] durations = ctx.durations
    cdef long long[::1] latest = ctx.latest
    cdef long long[::1] reg_len = ctx.reg_len
    cdef double[:, ::1] sim = ctx.sim
    cdef double lo = ctx.sim_lo
    cdef double hi = ctx.sim_hi
    cdef long long max_passes = ctx.max_passes
    cdef Py_ssize_t pop = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]

    passes_np = np.zeros(pop, dtype=np.int64)
    converged_np = np.zeros(pop, dtype=np.uint8)
    cdef long long[::1] passes = passes_np
    cdef unsigned char[::1] converged = converged_np
    cdef Py_ssize_t r
    with nogil:
        for r in range(pop):
            passes[r] = _sim_passes_row(
                s, r, reg_len, latest, sim, lo, hi, n, max_passes, &converged[r]
            )
            _repair_row(s, r, topo, pred_ptr, pred_idx, durations, latest, n)
    return g, passes_np, converged_np


# -- network forward ---------------------------------------------------------------


cdef inline double _forward_features(
    double[::1] w_flat, double[::1] b_flat, long long[::1] dims,
    double[::1] feat_min, double[::1] feat_max,
    double* x, double* buf_a, double* buf_b,
) noexcept nogil:
    cdef Py_ssize_t n_layers = dims.shape[0] - 1
    cdef Py_ssize_t layer, o, k, n_in, n_out
    cdef long long w_off = 0, b_off = 0
    cdef double z, span, v
    cdef double* a = buf_a
    cdef double* b = buf_b
    cdef double* tmp
    for k in range(dims[0]):
        span = feat_max[k] - feat_min[k]
        if span > 0:
            v = (x[k] - feat_min[k]) / span
            if v < 0:
                v = 0
            if v > 1:
                v = 1
        else:
            v = 0.5
        a[k] = v
    for layer in range(n_layers):
        n_in = dims[layer]
        n_out = dims[layer + 1]
        for o in range(n_out):
            z = b_flat[b_off + o]
            for k in range(n_in):
                z += w_flat[w_off + o * n_in + k] * a[k]
            if layer == n_layers - 1:
                if z > 30.0:
                    z = 30.0
                if z < -30.0:
                    z = -30.0
                b[o] = 1.0 / (1.0 + exp(-z))
            else:
                b[o] = z if z > 0 else 0.0
        w_off += n_out * n_in
        b_off += n_out
        tmp = a
        a = b
        b = tmp
    return a[0]


# -- full objective pipeline ----------------------------------------------------------


def evaluate_batch(ctx, genes):
    """Repairs, similarity cost, and the mean best-of-three-days failure.

    Returns (genotype, effective, fitness); see the fallback's docstring.
    """
    g = np.atleast_2d(np.array(genes, dtype=np.int64, copy=True, order="C"))
    eff = g.copy()
    cdef long long[:, ::1] geno = g
    cdef long long[:, ::1] s = eff
    cdef long long[::1] topo = ctx.topo
    cdef long long[::1] pred_ptr = ctx.pred_ptr
    cdef long long[::1] pred_idx = ctx.pred_idx
    cdef long long[::1] durations = ctx.durations
    cdef long long[::1] latest = ctx.latest
    cdef long long[::1] reg_len = ctx.reg_len
    cdef long long[::1] spans = ctx.spans
    cdef long long[::1] bg_start = ctx.bg_start
    cdef long long[::1] bg_reg_end = ctx.bg_reg_end
    cdef long long[::1] bg_spans = ctx.bg_spans
    cdef double[::1] dur_f = ctx.dur_f
    cdef double[::1] prizes = ctx.prizes
    cdef double[:, ::1] sim = ctx.sim
    cdef long long[::1] dims = ctx.layer_dims
    cdef double[::1] w_flat = ctx.w_flat
    cdef double[::1] b_flat = ctx.b_flat
    cdef double[::1] feat_min = ctx.feat_min
    cdef double[::1] feat_max = ctx.feat_max
    cdef double lo = ctx.sim_lo
    cdef double hi = ctx.sim_hi
    cdef long long horizon = ctx.horizon
    cdef long long max_passes = ctx.max_passes
    cdef bint sim_enabled = 1 if ctx.sim_enabled else 0
    cdef Py_ssize_t pop = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    cdef Py_ssize_t m = bg_start.shape[0]

    fitness_np = np.empty((pop, 3), dtype=np.float64)
    cdef double[:, ::1] fitness = fitness_np

    max_width = int(max(ctx.layer_dims))
    buf_a_np = np.empty(max_width, dtype=np.float64)
    buf_b_np = np.empty(max_width, dtype=np.float64)
    cdef double[::1] buf_a = buf_a_np
    cdef double[::1] buf_b = buf_b_np

    cdef Py_ssize_t r, i, j, delta
    cdef long long d0_lo, d0_hi, d1_lo, d1_hi, d, e, finish
    cdef long long count, span_sum, still0, still1, still2
    cdef unsigned char conv
    cdef double sim_sum, ssum0, ssum1, ssum2, sim_ij
    cdef double ats_now, rate, arrivals, denom, ats_still, ats_future, p, best
    cdef double failure_sum
    cdef double still_f
    cdef long long still_counts[3]
    cdef double still_sums[3]
    cdef double x[4]

    with nogil:
        for r in range(pop):
            _repair_row(geno, r, topo, pred_ptr, pred_idx, durations, latest, n)
            for i in range(n):
                s[r, i] = geno[r, i]
            d0_lo = s[r, 0]
            d0_hi = s[r, 0] + durations[0]
            for i in range(1, n):
                if s[r, i] < d0_lo:
                    d0_lo = s[r, i]
                finish = s[r, i] + durations[i]
                if finish > d0_hi:
                    d0_hi = finish
            if sim_enabled and n > 1:
                _sim_passes_row(s, r, reg_len, latest, sim, lo, hi, n, max_passes, &conv)
                _repair_row(s, r, topo, pred_ptr, pred_idx, durations, latest, n)
            d1_lo = s[r, 0]
            d1_hi = s[r, 0] + durations[0]
            for i in range(1, n):
                if s[r, i] < d1_lo:
                    d1_lo = s[r, i]
                finish = s[r, i] + durations[i]
                if finish > d1_hi:
                    d1_hi = finish
            fitness[r, 0] = <double>(d1_hi - d1_lo)
            fitness[r, 1] = (<double>((d1_hi - d1_lo) - (d0_hi - d0_lo))) / (
                <double>(d0_hi - d0_lo) if d0_hi - d0_lo > 1 else 1.0
            )
            if fitness[r, 1] < 0.0:
                fitness[r, 1] = 0.0

            failure_sum = 0.0
            for i in range(n):
                d = s[r, i]
                count = 0
                span_sum = 0
                sim_sum = 0.0
                for delta in range(3):
                    still_counts[delta] = 0
                    still_sums[delta] = 0.0
                for j in range(n):
                    if j == i:
                        continue
                    e = s[r, j] + reg_len[j]
                    if s[r, j] <= d and d <= e:
                        sim_ij = sim[i, j]
                        count += 1
                        sim_sum += sim_ij
                        span_sum += spans[j]
                        for delta in range(3):
                            if e >= d + delta:
                                still_counts[delta] += 1
                                still_sums[delta] += sim_ij
                for j in range(m):
                    e = bg_reg_end[j]
                    if bg_start[j] <= d and d <= e:
                        sim_ij = sim[i, n + j]
                        count += 1
                        sim_sum += sim_ij
                        span_sum += bg_spans[j]
                        for delta in range(3):
                            if e >= d + delta:
                                still_counts[delta] += 1
                                still_sums[delta] += sim_ij
                if count > 0:
                    ats_now = sim_sum / <double>count
                    rate = <double>count / <double>span_sum
                else:
                    ats_now = 0.0
                    rate = 0.0
                best = 2.0
                for delta in range(3):
                    if delta > 0 and d + delta > horizon:
                        break
                    arrivals = rate * <double>delta
                    still_f = <double>still_counts[delta]
                    if still_counts[delta] > 0:
                        ats_still = still_sums[delta] / still_f
                    else:
                        ats_still = 0.0
                    denom = still_f + arrivals
                    if denom > 0:
                        ats_future = (still_f * ats_still + arrivals * ats_now) / denom
                    else:
                        ats_future = 0.0
                    x[0] = dur_f[i]
                    x[1] = prizes[i]
                    x[2] = still_f + arrivals
                    x[3] = ats_future
                    p = _forward_features(
                        w_flat, b_flat, dims, feat_min, feat_max, x, &buf_a[0], &buf_b[0]
                    )
                    if delta == 0 or p < best:
                        best = p
                failure_sum += best
            fitness[r, 2] = failure_sum / <double>n
    return g, eff, fitness_np


# -- non-dominated sorting ------------------------------------------------------------


def pareto_ranks(objectives):
    """Non-dominated sorting ranks (0 = first front), minimization."""
    f_np = np.ascontiguousarray(objectives, dtype=np.float64)
    cdef double[:, ::1] f = f_np
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t m = f.shape[1]

    dom_np = np.zeros((n, n), dtype=np.uint8)
    counts_np = np.zeros(n, dtype=np.int64)
    ranks_np = np.full(n, -1, dtype=np.int64)
    frontier_np = np.empty((2, n), dtype=np.int64)
    cdef unsigned char[:, ::1] dom = dom_np
    cdef long long[::1] counts = counts_np
    cdef long long[::1] ranks = ranks_np
    cdef long long[:, ::1] frontier = frontier_np

    cdef Py_ssize_t i, j, k, t, cur, nxt, n_cur, n_nxt
    cdef long long rank
    cdef bint le, lt
    with nogil:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                le = True
                lt = False
                for k in range(m):
                    if f[i, k] > f[j, k]:
                        le = False
                        break
                    elif f[i, k] < f[j, k]:
                        lt = True
                if le and lt:
                    dom[i, j] = 1
                    counts[j] += 1
        cur = 0
        nxt = 1
        n_cur = 0
        for i in range(n):
            if counts[i] == 0:
                frontier[cur, n_cur] = i
                n_cur += 1
        rank = 0
        while n_cur > 0:
            n_nxt = 0
            for t in range(n_cur):
                i = frontier[cur, t]
                ranks[i] = rank
                counts[i] = -1
            for t in range(n_cur):
                i = frontier[cur, t]
                for j in range(n):
                    if dom[i, j]:
                        counts[j] -= 1
                        if counts[j] == 0:
                            frontier[nxt, n_nxt] = j
                            n_nxt += 1
            cur, nxt = nxt, cur
            n_cur = n_nxt
            rank += 1
    return ranks_np
