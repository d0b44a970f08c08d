"""Hardware kernel selection: compiled extension or pure-Python twin.

The compiled module is preferred when importable; set the environment
variable ``JACOBI4_FORCE_PYTHON=1`` to force the fallback.  Both
implementations are bit-identical by contract (see tests), so which one
runs never changes a result.
"""

from __future__ import annotations

import os

import numpy as np

from .strategy import PivotOrdering

if os.environ.get("JACOBI4_FORCE_PYTHON"):
    from . import _kernel_py as _impl

    COMPILED = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _kernel_py as _impl

        COMPILED = False


def backend() -> str:
    return "compiled" if COMPILED else "python"


def pairs_array(ordering: PivotOrdering) -> np.ndarray:
    return np.array([[p.i, p.j] for p in ordering.pairs], dtype=np.int64)


def sweep_batch(mats: np.ndarray, n: int, pairs: np.ndarray, nsteps: int,
                start: int = 0) -> None:
    _impl.sweep_batch(mats, n, pairs, nsteps, start)


def offnorms(mats: np.ndarray, n: int) -> np.ndarray:
    out = np.empty(mats.shape[0], dtype=np.float64)
    _impl.offnorm_batch(mats, n, out)
    return out


def t_run_batch(mats: np.ndarray, kmax: int) -> dict[str, np.ndarray]:
    """Stationary-parallel-step run over a batch of flat 4x4 buffers.

    Returns state arrays of shape (trials, kmax+1) for off-norm, the four
    pivot-position values and the diagonal combination, plus angle arrays
    of shape (trials, kmax).  ``mats`` is advanced in place.
    """
    trials = mats.shape[0]
    state = {
        name: np.empty((trials, kmax + 1), dtype=np.float64)
        for name in ("S", "b13", "b24", "b14", "b23", "bq")
    }
    phi = np.empty((trials, kmax), dtype=np.float64)
    psi = np.empty((trials, kmax), dtype=np.float64)
    _impl.t_run_batch(
        mats, kmax, state["S"], state["b13"], state["b24"], state["b14"],
        state["b23"], state["bq"], phi, psi,
    )
    state["phi"] = phi
    state["psi"] = psi
    return state


def implementations():
    """(name, module) pairs of every available implementation (for the
    benchmark and the agreement tests)."""
    from . import _kernel_py

    out = [("python", _kernel_py)]
    try:
        from . import _speedups  # type: ignore[attr-defined]

        out.append(("compiled", _speedups))
    except ImportError:
        pass
    return out
