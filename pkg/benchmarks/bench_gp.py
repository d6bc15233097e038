"""Timing comparison of the two optimizer backends.

Runs the same training problem through the jit kernel and the plain
numpy path, several sizes, and prints a small table. Run directly:

    python3 benchmarks/bench_gp.py
"""

from __future__ import annotations

import time

import numpy as np

from kglf.genetic import GPConfig, run_gp
from kglf.metrics import EXISTENCE, default_ensemble
from kglf.synth import SyntheticSpec, generate
from kglf.training import SILVER, build_training_set, score_matrix


def bench(backend: str, g, ensemble, training_set, scores, iterations: int) -> tuple:
    config = GPConfig(max_iterations=iterations, tolerance=0.0, rng_seed=7)
    t0 = time.perf_counter()
    report = run_gp(g, ensemble, training_set, config, scores=scores, backend=backend)
    elapsed = time.perf_counter() - t0
    return elapsed, report


def main() -> None:
    g, _hidden = generate(SyntheticSpec(rng_seed=3))
    ensemble = default_ensemble(EXISTENCE)
    training_set = build_training_set(g, EXISTENCE, SILVER, 40, rng_seed=11)
    scores = score_matrix(g, ensemble, training_set)

    print("%8s %10s %12s %12s %9s" % ("iters", "backend", "seconds", "best_mse", "gens"))
    for iterations in (200, 1000, 5000):
        rows = {}
        for backend in ("numba", "numpy"):
            try:
                elapsed, report = bench(backend, g, ensemble, training_set, scores, iterations)
            except RuntimeError as exc:
                print("%8d %10s   unavailable (%s)" % (iterations, backend, exc))
                continue
            rows[backend] = (elapsed, report)
            print(
                "%8d %10s %12.4f %12.6f %9d"
                % (iterations, backend, elapsed, report.best_fitness, report.iterations_used)
            )
        if len(rows) == 2:
            speedup = rows["numpy"][0] / rows["numba"][0]
            drift = abs(rows["numpy"][1].best_fitness - rows["numba"][1].best_fitness)
            print("%8s %10s %12.2fx %12.2e  (speedup, |mse diff|)" % ("", "ratio", speedup, drift))


if __name__ == "__main__":
    main()
