"""Pure-Python hardware kernels over flat float lists.

This is the fallback twin of the compiled extension ``_speedups``: the
two must agree bit-for-bit, so every arithmetic expression here appears
in the same order there (and the extension is built with
-ffp-contract=off).  Matrices are row-major length-n*n buffers.
"""

from __future__ import annotations

import math

SQRT_HALF = math.sqrt(0.5)
QUARTER_PI = math.pi / 4


def jacobi_step_flat(a, n: int, i: int, j: int) -> float:
    """One Jacobi step in place; returns the rotation angle."""
    aij = a[i * n + j]
    if aij == 0.0:
        return 0.0
    x = a[i * n + i] - a[j * n + j]
    if x == 0.0:
        if aij > 0.0:
            phi = QUARTER_PI
            t = 1.0
            c = SQRT_HALF
            s = SQRT_HALF
        else:
            phi = -QUARTER_PI
            t = -1.0
            c = SQRT_HALF
            s = -SQRT_HALF
    else:
        y = 2.0 * aij
        if x > 0.0:
            phi = 0.5 * math.atan2(y, x)
        else:
            phi = 0.5 * math.atan2(-y, -x)
        c = math.cos(phi)
        s = math.sin(phi)
        t = math.tan(phi)
    a[i * n + i] = a[i * n + i] + t * aij
    a[j * n + j] = a[j * n + j] - t * aij
    a[i * n + j] = 0.0
    a[j * n + i] = 0.0
    for r in range(n):
        if r != i and r != j:
            ari = a[r * n + i]
            arj = a[r * n + j]
            u = c * ari + s * arj
            v = c * arj - s * ari
            a[r * n + i] = u
            a[i * n + r] = u
            a[r * n + j] = v
            a[j * n + r] = v
    return phi


def off_norm_flat(a, n: int) -> float:
    total = 0.0
    for r in range(n):
        for s in range(r + 1, n):
            v = a[r * n + s]
            total = total + v * v
    return math.sqrt(total)


def _neg(v: float) -> float:
    # keep annihilated zeros positive
    return -v if v != 0.0 else 0.0


def t_step_flat(a) -> tuple[float, float]:
    """One stationary parallel step on a flat 4x4 buffer; returns angles."""
    phi = jacobi_step_flat(a, 4, 0, 2)
    psi = jacobi_step_flat(a, 4, 1, 3)
    # conjugation by Q = [e1 e3 e4 -e2]: exact entry shuffle with signs
    x01, x02, x03 = a[1], a[2], a[3]
    x12, x13 = a[6], a[7]
    x23 = a[11]
    x00, x11, x22, x33 = a[0], a[5], a[10], a[15]
    a[0] = x00
    a[5] = x22
    a[10] = x33
    a[15] = x11
    a[1] = x02
    a[4] = x02
    a[2] = x03
    a[8] = x03
    n01 = _neg(x01)
    a[3] = n01
    a[12] = n01
    a[6] = x23
    a[9] = x23
    n12 = _neg(x12)
    a[7] = n12
    a[13] = n12
    n13 = _neg(x13)
    a[11] = n13
    a[14] = n13
    return phi, psi


# -- batch drivers over numpy (trials, n*n) buffers --

def sweep_batch(mats, n: int, pairs, nsteps: int, start: int = 0) -> None:
    """Advance every matrix by nsteps cyclic Jacobi steps, in place."""
    npairs = len(pairs)
    plist = [(int(pairs[k, 0]), int(pairs[k, 1])) for k in range(npairs)]
    for t in range(mats.shape[0]):
        a = mats[t].tolist()
        for k in range(nsteps):
            i, j = plist[(start + k) % npairs]
            jacobi_step_flat(a, n, i, j)
        mats[t] = a


def offnorm_batch(mats, n: int, out) -> None:
    for t in range(mats.shape[0]):
        out[t] = off_norm_flat(mats[t].tolist(), n)


def t_run_batch(mats, kmax: int, s, b13, b24, b14, b23, bq, phi, psi) -> None:
    """Run kmax stationary parallel steps on every 4x4 buffer, recording
    per-state off-norms, pivot values, the diagonal combination
    a11-a22-a33+a44, and per-step angles.  State arrays have kmax+1
    columns, angle arrays kmax."""
    for t in range(mats.shape[0]):
        a = mats[t].tolist()
        for k in range(kmax + 1):
            s[t, k] = off_norm_flat(a, 4)
            b13[t, k] = a[2]
            b24[t, k] = a[7]
            b14[t, k] = a[3]
            b23[t, k] = a[6]
            bq[t, k] = a[0] - a[5] - a[10] + a[15]
            if k < kmax:
                ph, ps = t_step_flat(a)
                phi[t, k] = ph
                psi[t, k] = ps
        mats[t] = a
