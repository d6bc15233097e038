"""Micro genetic-programming weight optimizer.

The genotype is a weight vector on the simplex, the phenotype its mean
squared error against a labeled training set. Populations are tiny (5 to
11), the global best survives every purge, and a collapsed population is
restarted around the elite. Single-point crossover and single-position
mutation are the only variation operators, both followed by simplex
renormalization with a uniform fallback for all-zero children.

Two interchangeable backends implement the generational loop: a compiled
kernel (numba) and a plain numpy path. Selection happens through the
KGLF_BACKEND environment variable, defaulting to the compiled kernel when
importable. Both draw scalars from numpy Generator streams in the same
order, and each is deterministic under its seed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .graph import KnowledgeGraph
from .metrics import MetricEnsemble
from .training import TrainingSet, score_matrix
from .weights import WeightVector

try:
    from . import _gp_numba
except ImportError:  # numba not installed
    _gp_numba = None

RESTART_EPSILON = 1e-6
ZERO_SUM_EPSILON = 1e-12


class GPError(Exception):
    """Invalid optimizer configuration or empty training input."""


def backend_name() -> str:
    """Active backend: 'numba' unless unavailable or overridden by KGLF_BACKEND."""
    forced = os.environ.get("KGLF_BACKEND", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        if _gp_numba is None:
            raise GPError("KGLF_BACKEND=numba but numba is not importable")
        return "numba"
    if forced:
        raise GPError("unknown KGLF_BACKEND value: %s" % forced)
    return "numba" if _gp_numba is not None else "numpy"


@dataclass(frozen=True)
class GPConfig:
    population_size: int = 7
    max_iterations: int = 1000
    tolerance: float = 1e-3
    mutation_threshold: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        if not 5 <= self.population_size <= 11:
            raise GPError("population size must stay within the micro band 5..11")
        if self.max_iterations < 1:
            raise GPError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise GPError("tolerance must be >= 0")
        if not 0.0 <= self.mutation_threshold <= 1.0:
            raise GPError("mutation threshold is a probability")


@dataclass
class GPRunReport:
    best_weights: WeightVector
    best_fitness: float
    iterations_used: int
    fitness_trace: list[float] = field(default_factory=list)


# -- genetic operators --------------------------------------------------------


def _normalize_inplace(w: np.ndarray) -> None:
    np.clip(w, 0.0, None, out=w)
    total = w.sum()
    if total <= ZERO_SUM_EPSILON:
        w[:] = 1.0 / w.size  # all-zero child falls back to the uniform vector
    else:
        w /= total


def _crossover(a: np.ndarray, b: np.ndarray, gen: np.random.Generator):
    split = int(gen.random() * (a.size + 1))
    child_a = np.concatenate((a[:split], b[split:]))
    child_b = np.concatenate((b[:split], a[split:]))
    _normalize_inplace(child_a)
    _normalize_inplace(child_b)
    return child_a, child_b


def _mutate_inplace(w: np.ndarray, threshold: float, gen: np.random.Generator) -> None:
    pos = int(gen.random() * w.size)
    if gen.random() < threshold:
        w[pos] = gen.random()
        _normalize_inplace(w)


def crossover(parent_a: WeightVector, parent_b: WeightVector, rng_seed: int):
    """Single-point crossover with suffix swap; children are renormalized."""
    if len(parent_a) != len(parent_b):
        raise GPError("parents must have equal length")
    gen = np.random.default_rng(rng_seed)
    ca, cb = _crossover(parent_a.values.copy(), parent_b.values.copy(), gen)
    return WeightVector(ca), WeightVector(cb)


def mutate(w: WeightVector, threshold: float, rng_seed: int) -> WeightVector:
    """Replace one uniformly chosen position with probability `threshold`."""
    if not 0.0 <= threshold <= 1.0:
        raise GPError("threshold is a probability")
    gen = np.random.default_rng(rng_seed)
    out = w.values.copy()
    _mutate_inplace(out, threshold, gen)
    return WeightVector(out)


def select(population: list[tuple[WeightVector, float]]) -> list[tuple[WeightVector, float]]:
    """Drop the least fit individual (highest error, ties by lowest index)."""
    if not population:
        raise GPError("select needs a non-empty population")
    worst = 0
    for idx, (_w, fit) in enumerate(population):
        if fit > population[worst][1]:
            worst = idx
    return [entry for idx, entry in enumerate(population) if idx != worst]


# -- generational loop, numpy path ---------------------------------------------


def _collapsed(pop: np.ndarray) -> bool:
    for i in range(pop.shape[0]):
        for k in range(i + 1, pop.shape[0]):
            if np.sum(np.abs(pop[i] - pop[k])) >= RESTART_EPSILON:
                return False
    return True


def _run_numpy(S, y, pop_size, max_iter, tol, threshold, gen):
    m, length = S.shape
    pop = np.empty((pop_size, length))
    for p in range(pop_size):
        for i in range(length):
            pop[p, i] = gen.random()
        _normalize_inplace(pop[p])

    def fitness_of(w):
        diff = S @ w - y
        return float(diff @ diff) / m

    fit = np.array([fitness_of(pop[p]) for p in range(pop_size)])
    best_idx = int(np.argmin(fit))
    best_w = pop[best_idx].copy()
    best_fit = float(fit[best_idx])
    trace = [best_fit]

    while len(trace) < max_iter and best_fit >= tol:
        new_pop = np.empty_like(pop)
        new_pop[0] = best_w
        if _collapsed(pop):
            # diversity collapse: keep the elite, randomize everyone else
            for p in range(1, pop_size):
                for i in range(length):
                    new_pop[p, i] = gen.random()
                _normalize_inplace(new_pop[p])
        else:
            worst = int(np.argmax(fit))
            pool = np.delete(pop, worst, axis=0)
            slot = 1
            while slot < pop_size:
                i1 = int(gen.random() * pool.shape[0])
                i2 = int(gen.random() * pool.shape[0])
                ca, cb = _crossover(pool[i1], pool[i2], gen)
                for child in (ca, cb):
                    if slot >= pop_size:
                        break
                    _mutate_inplace(child, threshold, gen)
                    new_pop[slot] = child
                    slot += 1
        pop = new_pop
        fit = np.array([fitness_of(pop[p]) for p in range(pop_size)])
        gen_best = int(np.argmin(fit))
        if fit[gen_best] < best_fit:
            best_fit = float(fit[gen_best])
            best_w = pop[gen_best].copy()
        trace.append(best_fit)
    return best_w, best_fit, np.array(trace), len(trace)


def run_gp(
    g: KnowledgeGraph,
    ensemble: MetricEnsemble,
    training_set: TrainingSet,
    config: GPConfig,
    scores: np.ndarray | None = None,
    backend: str | None = None,
) -> GPRunReport:
    """Optimize the ensemble's weight vector against the training set."""
    if not training_set.instances:
        raise GPError("training set is empty")
    if scores is None:
        scores = score_matrix(g, ensemble, training_set)
    labels = training_set.labels()
    gen = np.random.default_rng(config.rng_seed)
    chosen = backend or backend_name()
    if chosen == "numba" and _gp_numba is None:
        raise GPError("numba backend requested but not importable")
    runner = _gp_numba.run_kernel if chosen == "numba" else _run_numpy
    best_w, best_fit, trace, gens = runner(
        np.ascontiguousarray(scores),
        np.ascontiguousarray(labels),
        config.population_size,
        config.max_iterations,
        config.tolerance,
        config.mutation_threshold,
        gen,
    )
    return GPRunReport(
        best_weights=WeightVector(np.asarray(best_w)),
        best_fitness=float(best_fit),
        iterations_used=int(gens),
        fitness_trace=[float(x) for x in trace],
    )
