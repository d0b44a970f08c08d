"""Jacobi rotation steps, sweeps, and the stationary parallel-step operator.

All routines are generic over a scalar context (hardware or big float).
The update sequence inside a step is a contract shared verbatim with the
flat hardware kernels in ``_kernel_py`` / ``_speedups``: diagonal entries
move by ``+/- tan(phi) * pivot``, the pivot is set exactly to zero, and
every other row entry r is replaced by

    u = c*a[r][i] + s*a[r][j]      (new column i)
    v = c*a[r][j] - s*a[r][i]      (new column j)

At the angle pole (equal diagonal entries) the step uses tan = +/-1 and
cos = |sin| = sqrt(1/2) exactly, so the symmetric pole case is free of
trigonometric rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import SymMatrix, conjugate_signed_perm, off_norm, q_rotation
from .strategy import PivotOrdering, PivotPair


@dataclass(frozen=True)
class PlaneRotation:
    i: int
    j: int
    phi: object


@dataclass(frozen=True)
class StepRecord:
    """One Jacobi step: pivot pair, angle, annihilated value, off-norm after."""

    index: int
    pair: PivotPair
    phi: object
    pivot: object
    off_norm_after: object


T_BRACE = (PivotPair(0, 2), PivotPair(1, 3))


def _rotation_params(aij, x, ctx):
    """(phi, c, s, t) for pivot value aij and diagonal difference x != None.

    Caller guarantees aij != 0.  Must be evaluated inside ctx.active().
    """
    if x == 0:
        h = ctx.sqrt_half()
        one = ctx.one()
        if aij > 0:
            return ctx.pi() / 4, h, h, one
        return -(ctx.pi() / 4), h, -h, -one
    phi = ctx.atan2_half(2 * aij, x)
    return phi, ctx.cos(phi), ctx.sin(phi), ctx.tan(phi)


def _step_inplace(a, n, i, j, ctx):
    """Apply one Jacobi step to the row-list matrix a; returns (phi, c, s,
    pivot).  Zero pivot is a no-op with phi = 0 ("skip it")."""
    aij = a[i][j]
    if aij == 0:
        z = ctx.zero()
        return z, ctx.one(), z, aij
    phi, c, s, t = _rotation_params(aij, a[i][i] - a[j][j], ctx)
    a[i][i] = a[i][i] + t * aij
    a[j][j] = a[j][j] - t * aij
    z = ctx.zero()
    a[i][j] = z
    a[j][i] = z
    for r in range(n):
        if r != i and r != j:
            ari = a[r][i]
            arj = a[r][j]
            u = c * ari + s * arj
            v = c * arj - s * ari
            a[r][i] = u
            a[i][r] = u
            a[r][j] = v
            a[j][r] = v
    return phi, c, s, aij


def jacobi_angle(a: SymMatrix, pair: PivotPair, ctx):
    """Rotation angle for the pivot pair: atan2_half(2*a_ij, a_ii - a_jj),
    zero whenever the pivot element is zero."""
    with ctx.active():
        aij = a.a[pair.i][pair.j]
        if aij == 0:
            return ctx.zero()
        return ctx.atan2_half(2 * aij, a.a[pair.i][pair.i] - a.a[pair.j][pair.j])


def apply_jacobi_step(a: SymMatrix, pair: PivotPair, ctx):
    """One Jacobi similarity step; returns (new matrix, PlaneRotation)."""
    out = a.copy()
    with ctx.active():
        phi, _, _, _ = _step_inplace(out.a, out.n, pair.i, pair.j, ctx)
    return out, PlaneRotation(pair.i, pair.j, phi)


def apply_parallel_step(a: SymMatrix, brace, ctx):
    """Two commuting Jacobi steps executed as one parallel step."""
    p, q = brace
    if not p.disjoint(q):
        raise ValueError(f"pairs {p} and {q} do not commute")
    out = a.copy()
    with ctx.active():
        _step_inplace(out.a, out.n, p.i, p.j, ctx)
        _step_inplace(out.a, out.n, q.i, q.j, ctx)
    return out


def sweep(a: SymMatrix, ordering: PivotOrdering, cycles: int, ctx):
    """Run cycles * N Jacobi steps through a cyclic ordering.

    Returns (matrix, records) where records holds one StepRecord per step.
    """
    if not ordering.is_cyclic():
        raise ValueError("sweep requires a cyclic ordering")
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    out = a.copy()
    records = []
    k = 0
    with ctx.active():
        for _ in range(cycles):
            for pair in ordering.pairs:
                phi, _, _, pivot = _step_inplace(out.a, out.n, pair.i, pair.j, ctx)
                records.append(
                    StepRecord(k, pair, phi, pivot, off_norm(out, ctx))
                )
                k += 1
    return out, records


def sweep_steps(a: SymMatrix, ordering: PivotOrdering, nsteps: int, ctx,
                start: int = 0):
    """Run an exact number of steps of the cyclic strategy, starting at
    cyclic position ``start``.  Returns (matrix, records)."""
    if not ordering.is_cyclic():
        raise ValueError("sweep requires a cyclic ordering")
    period = len(ordering.pairs)
    out = a.copy()
    records = []
    with ctx.active():
        for k in range(nsteps):
            pair = ordering.pairs[(start + k) % period]
            phi, _, _, pivot = _step_inplace(out.a, out.n, pair.i, pair.j, ctx)
            records.append(StepRecord(k, pair, phi, pivot, off_norm(out, ctx)))
    return out, records


def parallel_angles(records) -> list[tuple]:
    """Group a step-angle log into per-parallel-step angle pairs."""
    if len(records) % 2:
        raise ValueError("odd number of steps cannot be grouped in braces")
    return [
        (records[m].phi, records[m + 1].phi) for m in range(0, len(records), 2)
    ]


def t_operator(a: SymMatrix, ctx):
    """One stationary parallel step: annihilate (1,3) and (2,4), then
    conjugate by the signed permutation Q so the pivot positions repeat.

    Returns (matrix, phi, psi).  When both pivots vanish this is exactly
    the Q similarity (no arithmetic on the entries).
    """
    if a.n != 4:
        raise ValueError("the parallel-step operator is defined for order 4")
    out = a.copy()
    p, q = T_BRACE
    with ctx.active():
        phi, _, _, _ = _step_inplace(out.a, 4, p.i, p.j, ctx)
        psi, _, _, _ = _step_inplace(out.a, 4, q.i, q.j, ctx)
    return conjugate_signed_perm(out, q_rotation()), phi, psi


def t_iterate(a: SymMatrix, k: int, ctx) -> SymMatrix:
    """k-fold application of the stationary parallel-step operator."""
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    out = a.copy()
    for _ in range(k):
        out, _, _ = t_operator(out, ctx)
    return out


@dataclass
class SolveResult:
    matrix: SymMatrix
    basis: list
    cycles: int
    converged: bool
    off_norm_initial: object
    off_norm_final: object


def solve(a: SymMatrix, ordering: PivotOrdering, ctx, threshold_rel=None,
          max_cycles: int = 60) -> SolveResult:
    """Diagonalize by cyclic sweeps until off_norm <= threshold_rel *
    off_norm(A), accumulating the rotation product."""
    if not ordering.is_cyclic():
        raise ValueError("solve requires a cyclic ordering")
    if threshold_rel is None:
        threshold_rel = ctx.tol(2)
    n = a.n
    out = a.copy()
    one, zero = ctx.one(), ctx.zero()
    basis = [[one if r == s else zero for s in range(n)] for r in range(n)]
    with ctx.active():
        s0 = off_norm(out, ctx)
        target = threshold_rel * s0
        cycles = 0
        s_cur = s0
        while s_cur > target and cycles < max_cycles:
            for pair in ordering.pairs:
                phi, c, s, _ = _step_inplace(out.a, n, pair.i, pair.j, ctx)
                if phi == 0:
                    continue
                i, j = pair.i, pair.j
                for r in range(n):
                    vri = basis[r][i]
                    vrj = basis[r][j]
                    basis[r][i] = c * vri + s * vrj
                    basis[r][j] = c * vrj - s * vri
            cycles += 1
            s_cur = off_norm(out, ctx)
    return SolveResult(out, basis, cycles, bool(s_cur <= target), s0, s_cur)


def jacobi_eigenvalues(a: SymMatrix, ctx, max_cycles: int = 60):
    """Eigenvalues by running the row-cyclic method to convergence
    (self-consistent oracle), returned sorted ascending."""
    from .strategy import serial_rowwise

    res = solve(a, serial_rowwise(a.n), ctx, ctx.tol(2), max_cycles)
    return sorted(res.matrix.diag())
