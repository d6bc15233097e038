"""Compiled generational loop for the weight optimizer.

Importing this module requires numba; genetic.py catches the ImportError
and falls back to its numpy path. The draw protocol (one Generator scalar
per decision, in a fixed order) matches the numpy path exactly.
"""

import numpy as np
from numba import njit

RESTART_EPSILON = 1e-6
ZERO_SUM_EPSILON = 1e-12


@njit
def _normalize_inplace(w):
    total = 0.0
    for i in range(w.size):
        if w[i] < 0.0:
            w[i] = 0.0
        total += w[i]
    if total <= ZERO_SUM_EPSILON:
        uniform = 1.0 / w.size
        for i in range(w.size):
            w[i] = uniform
    else:
        for i in range(w.size):
            w[i] /= total


@njit
def _fitness(S, y, w):
    m = S.shape[0]
    total = 0.0
    for r in range(m):
        acc = 0.0
        for c in range(S.shape[1]):
            acc += S[r, c] * w[c]
        d = acc - y[r]
        total += d * d
    return total / m


@njit
def _collapsed(pop):
    for i in range(pop.shape[0]):
        for k in range(i + 1, pop.shape[0]):
            dist = 0.0
            for c in range(pop.shape[1]):
                dist += abs(pop[i, c] - pop[k, c])
            if dist >= RESTART_EPSILON:
                return False
    return True


@njit
def run_kernel(S, y, pop_size, max_iter, tol, threshold, gen):
    m = S.shape[0]
    length = S.shape[1]
    pop = np.empty((pop_size, length))
    for p in range(pop_size):
        for i in range(length):
            pop[p, i] = gen.random()
        _normalize_inplace(pop[p])

    fit = np.empty(pop_size)
    for p in range(pop_size):
        fit[p] = _fitness(S, y, pop[p])
    best_idx = 0
    for p in range(1, pop_size):
        if fit[p] < fit[best_idx]:
            best_idx = p
    best_w = pop[best_idx].copy()
    best_fit = fit[best_idx]
    trace = np.empty(max_iter)
    trace[0] = best_fit
    gens = 1

    child_a = np.empty(length)
    child_b = np.empty(length)
    while gens < max_iter and best_fit >= tol:
        new_pop = np.empty((pop_size, length))
        new_pop[0] = best_w
        if _collapsed(pop):
            for p in range(1, pop_size):
                for i in range(length):
                    new_pop[p, i] = gen.random()
                _normalize_inplace(new_pop[p])
        else:
            worst = 0
            for p in range(1, pop_size):
                if fit[p] > fit[worst]:
                    worst = p
            pool = np.empty((pop_size - 1, length))
            k = 0
            for p in range(pop_size):
                if p != worst:
                    pool[k] = pop[p]
                    k += 1
            slot = 1
            while slot < pop_size:
                i1 = int(gen.random() * pool.shape[0])
                i2 = int(gen.random() * pool.shape[0])
                split = int(gen.random() * (length + 1))
                for c in range(length):
                    if c < split:
                        child_a[c] = pool[i1, c]
                        child_b[c] = pool[i2, c]
                    else:
                        child_a[c] = pool[i2, c]
                        child_b[c] = pool[i1, c]
                _normalize_inplace(child_a)
                _normalize_inplace(child_b)
                pos = int(gen.random() * length)
                if gen.random() < threshold:
                    child_a[pos] = gen.random()
                    _normalize_inplace(child_a)
                new_pop[slot] = child_a
                slot += 1
                if slot < pop_size:
                    pos = int(gen.random() * length)
                    if gen.random() < threshold:
                        child_b[pos] = gen.random()
                        _normalize_inplace(child_b)
                    new_pop[slot] = child_b
                    slot += 1
        pop = new_pop
        for p in range(pop_size):
            fit[p] = _fitness(S, y, pop[p])
        gen_best = 0
        for p in range(1, pop_size):
            if fit[p] < fit[gen_best]:
                gen_best = p
        if fit[gen_best] < best_fit:
            best_fit = fit[gen_best]
            best_w = pop[gen_best].copy()
        trace[gens] = best_fit
        gens += 1
    return best_w, best_fit, trace[:gens], gens
