"""Benchmark: compiled kernels vs the pure-Python twin.

Times the two hot loops (12-step cyclic sweeps and 6-step stationary
runs) on identical seeded batches and confirms the results agree
bit-for-bit before reporting the speedup.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from ._rng import trial_rng
from .analysis import sample_patterned
from .strategy import ordering_i1


def _batch(trials: int, seed: int) -> np.ndarray:
    mats = np.empty((trials, 16), dtype=np.float64)
    for t in range(trials):
        mats[t] = sample_patterned(trial_rng(seed, t))
    return mats


def run_bench(trials: int = 20000, seed: int = 0) -> str:
    impls = kernels.implementations()
    pairs = kernels.pairs_array(ordering_i1())
    base = _batch(trials, seed)
    lines = [f"kernel benchmark: {trials} matrices, seed {seed}"]
    results = {}
    for name, impl in impls:
        mats = base.copy()
        t0 = time.perf_counter()
        impl.sweep_batch(mats, 4, pairs, 12, 0)
        t_sweep = time.perf_counter() - t0

        mats2 = base.copy()
        kmax = 6
        state = [np.empty((trials, kmax + 1)) for _ in range(6)]
        ang = [np.empty((trials, kmax)) for _ in range(2)]
        t0 = time.perf_counter()
        impl.t_run_batch(mats2, kmax, *state, *ang)
        t_trun = time.perf_counter() - t0

        results[name] = (mats, mats2, t_sweep, t_trun)
        lines.append(
            f"  {name:>8}: sweep12 {t_sweep * 1e3:9.1f} ms   "
            f"t-run6 {t_trun * 1e3:9.1f} ms"
        )
    if len(results) == 2:
        py, comp = results["python"], results["compiled"]
        identical = (np.array_equal(py[0], comp[0])
                     and np.array_equal(py[1], comp[1]))
        lines.append(f"  bitwise identical results: {identical}")
        lines.append(
            f"  speedup: sweep12 x{py[2] / comp[2]:.1f}, "
            f"t-run6 x{py[3] / comp[3]:.1f}"
        )
    else:
        lines.append("  compiled extension not available; python twin only")
    return "\n".join(lines) + "\n"
