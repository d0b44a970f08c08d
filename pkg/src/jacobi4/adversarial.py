"""Slow-convergence generators and the experiments built on them.

The 4x4 family H(eps) loses less than 17*eps of its squared off-norm over
one full cycle of the leading parallel strategy; the block construction
extends that to any order n >= 4 with a cyclic strategy whose extra
angles are all exactly zero.  Working precision is auto-selected as
max(30, ceil(4*|log10 eps|) + 30) digits: the analysis manipulates
quantities down to eps^3, and the showcase matrix needs far more
headroom than its 100-digit display suggests (its step-1 rotation angle
is derived from a 1e-78 diagonal gap, so relative error there is
amplified by ~1e49 into the entries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import SweepTrace, TheoremReport, trace_t_run
from .core import SymMatrix, off_norm, off_norm_sq
from .kernel import sweep_steps
from .scalar import Precision, context, format_truncated
from .strategy import PivotOrdering, PivotPair, ordering_i1

EXAMPLE_EPS = "1e-52"
EXAMPLE_MIN_DIGITS = 100
SLOW_EPS_MAX = 1e-5


def auto_digits(eps: float) -> int:
    """Working decimal digits for experiments at scale eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return max(30, math.ceil(4.0 * abs(math.log10(eps))) + 30)


def example_matrix_H(ctx) -> SymMatrix:
    """The 100-digit showcase matrix: eps = 1e-52, p1 = eps,
    p2 = eps*sqrt(eps).  Requires a big-float context of at least 100
    digits so the entries are representable."""
    if ctx.precision.kind != "big" or ctx.decimal_digits < EXAMPLE_MIN_DIGITS:
        raise ValueError(
            f"insufficient precision: need >= {EXAMPLE_MIN_DIGITS} decimal digits"
        )
    with ctx.active():
        eps = ctx.convert(EXAMPLE_EPS)
        p1 = eps
        p2 = eps * ctx.sqrt(eps)
        one = ctx.one()
        m = SymMatrix.zeros(4, ctx)
        m.a[0][0] = one + p1 + p2
        m.a[1][1] = one + p2
        m.a[2][2] = one + p1
        m.a[3][3] = one
        m.set_sym(0, 1, ctx.zero())
        m.set_sym(0, 2, eps + p1)
        m.set_sym(0, 3, -one + p1)
        m.set_sym(1, 2, one)
        m.set_sym(1, 3, -eps)
        m.set_sym(2, 3, ctx.zero())
    return m


def slow_matrix_H(eps, ctx) -> SymMatrix:
    """The slow-convergence matrix H(eps) for 0 < eps <= 1e-5; its zero
    pattern sits at (1,2) and (3,4)."""
    with ctx.active():
        eps = ctx.convert(eps)
        if not (eps > 0 and eps <= ctx.convert(f"{SLOW_EPS_MAX:g}")):
            raise ValueError("eps must lie in (0, 1e-5]")
        se = ctx.sqrt(eps)
        e15 = eps * se
        one = ctx.one()
        m = SymMatrix.zeros(4, ctx)
        m.a[0][0] = eps + e15
        m.a[1][1] = e15
        m.a[2][2] = eps
        m.a[3][3] = ctx.zero()
        m.set_sym(0, 2, 2 * eps)
        m.set_sym(0, 3, -one + eps)
        m.set_sym(1, 2, one)
        m.set_sym(1, 3, -eps)
    return m


def verify_slow_sweep(eps_text: str, digits: int | None = None) -> TheoremReport:
    """One cycle on H(eps) keeps S^2 above (1 - 17*eps) of its start.

    Also checks the first-parallel-step reduction S^2(B) - S^2(B^(1)) =
    5*eps^2 to relative 1e-20, and logs the observed per-eps constant.
    """
    eps_f = float(eps_text)
    if digits is None:
        digits = auto_digits(eps_f)
    if digits < auto_digits(eps_f):
        raise ValueError(
            f"insufficient precision for eps={eps_text}: need >= "
            f"{auto_digits(eps_f)} digits"
        )
    precision = Precision.big(digits)
    ctx = context(precision)
    with ctx.active():
        eps = ctx.from_decimal(eps_text)
        h = slow_matrix_H(eps, ctx)
        s0sq = off_norm_sq(h, ctx)
        i1 = ordering_i1()
        b1, _ = sweep_steps(h, i1, 2, ctx)
        s1sq = off_norm_sq(b1, ctx)
        first_drop = s0sq - s1sq
        expect = 5 * (eps * eps)
        checkpoint_err = float(abs(first_drop / expect - 1))
        b6, _ = sweep_steps(b1, i1, 4, ctx, start=2)
        s6sq = off_norm_sq(b6, ctx)
        bound = (1 - 17 * eps) * s0sq
        slow_ok = bool(s6sq > bound)
        observed_c = (1 - s6sq / s0sq) / eps
        constant_ok = bool(observed_c > 0) and bool(observed_c <= 17)
        checkpoint_ok = checkpoint_err <= 1e-20
        return TheoremReport(
            suite="prop52",
            passed=slow_ok and checkpoint_ok and constant_ok,
            precision=precision.spec(),
            worst=float(observed_c),
            details={
                "eps": eps_text,
                "digits": digits,
                "slow_bound_holds": slow_ok,
                "observed_constant": ctx.to_decimal(observed_c),
                "checkpoint_rel_err": checkpoint_err,
                "checkpoint_tol": 1e-20,
            },
        )


def slow_matrix_general(eps_text: str, n: int,
                        digits: int | None = None):
    """Block matrix of order n >= 4 plus the cyclic ordering under which
    one full cycle barely reduces the off-norm.

    The leading 4x4 block is H(eps') with eps' = (2*eps - eps^2)/17 for
    eps < 1e-5 (capped at the 1e-5 value otherwise); the trailing block
    is diagonal and all coupling entries are zero, so every angle outside
    the leading block vanishes identically.  Returns (matrix, ordering,
    context).
    """
    if n < 4:
        raise ValueError("order must be >= 4")
    eps_f = float(eps_text)
    if not 0.0 < eps_f < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    eps_prime_f = (2 * min(eps_f, 1e-5)) / 17  # scale only, for digit choice
    if digits is None:
        digits = auto_digits(eps_prime_f)
    ctx = context(Precision.big(digits))
    with ctx.active():
        eps = ctx.from_decimal(eps_text)
        cap = ctx.from_decimal("1e-5")
        e = eps if eps < cap else cap
        eps_prime = (2 * e - e * e) / 17
        h = slow_matrix_H(eps_prime, ctx)
        m = SymMatrix.zeros(n, ctx)
        for r in range(4):
            for s in range(4):
                m.a[r][s] = h.a[r][s]
        for r in range(4, n):
            m.a[r][r] = ctx.convert(r - 2)  # 2, 3, ..., n-3
    pairs = list(ordering_i1().pairs)
    pairs += [PivotPair(i, j) for i in range(4, n) for j in range(i + 1, n)]
    pairs += [PivotPair(i, j) for i in range(4) for j in range(4, n)]
    return m, PivotOrdering(n, tuple(pairs)), ctx


def verify_general_slow(n: int, eps_text: str,
                        digits: int | None = None) -> TheoremReport:
    """One full cycle on the order-n construction: S(A^(N)) > (1-eps)S(A),
    with every angle outside the leading 4x4 block exactly zero."""
    m, ordering, ctx = slow_matrix_general(eps_text, n, digits)
    with ctx.active():
        eps = ctx.from_decimal(eps_text)
        s_in = off_norm(m, ctx)
        nsteps = len(ordering.pairs)
        out, records = sweep_steps(m, ordering, nsteps, ctx)
        s_out = off_norm(out, ctx)
        outside_zero = all(
            rec.phi == 0
            for rec in records
            if rec.pair.j >= 4
        )
        bound = (1 - eps) * s_in
        passed = bool(s_out > bound) and outside_zero
        return TheoremReport(
            suite="thm53",
            passed=passed,
            precision=ctx.precision.spec(),
            worst=float(s_out / s_in),
            details={
                "n": n,
                "eps": eps_text,
                "digits": ctx.decimal_digits,
                "cycle_steps": nsteps,
                "ratio": ctx.to_decimal(s_out / s_in),
                "required_ratio": ctx.to_decimal(1 - eps),
                "outside_angles_all_zero": outside_zero,
            },
        )


def slow_matrix_general_dense(eps_text: str, n: int,
                              digits: int | None = None):
    """Experimental dense-coupling variant: nonzero trailing and coupling
    blocks, with Frobenius norms eps^nu and eps^2 of the leading
    off-norm and trailing diagonal entries pushed outside the leading
    block's spectrum.  No sharp guarantee is claimed; used by the
    `adversarial general --dense` experiment only."""
    if n <= 4:
        raise ValueError("the dense variant needs order > 4")
    eps_f = float(eps_text)
    if not 0.0 < eps_f < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    half = eps_f / 2.0
    eps_prime_f = (2 * min(half, 1e-5)) / 17
    if digits is None:
        digits = auto_digits(eps_prime_f)
    ctx = context(Precision.big(digits))
    nu = 3
    while n * eps_f ** (nu - 2) >= 1.0:
        nu += 1
    with ctx.active():
        eps = ctx.from_decimal(eps_text)
        cap = ctx.from_decimal("1e-5")
        e = eps / 2
        if not e < cap:
            e = cap
        eps_prime = (2 * e - e * e) / 17
        h = slow_matrix_H(eps_prime, ctx)
        s11 = off_norm(h, ctx)
        fro11 = ctx.sqrt(off_norm_sq(h, ctx) * 2
                         + sum(d * d for d in h.diag()))
        m = SymMatrix.zeros(n, ctx)
        for r in range(4):
            for s in range(4):
                m.a[r][s] = h.a[r][s]
        cpl = eps ** nu * s11 / ctx.sqrt(ctx.convert(4 * (n - 4)))
        for r in range(4):
            for s in range(4, n):
                m.set_sym(r, s, cpl)
        tail_pairs = (n - 4) * (n - 5) // 2
        if tail_pairs:
            off22 = eps * eps * s11 / (2 * ctx.sqrt(ctx.convert(tail_pairs)))
            for r in range(4, n):
                for s in range(r + 1, n):
                    m.set_sym(r, s, off22)
        for idx, r in enumerate(range(4, n)):
            m.a[r][r] = fro11 + 1 + idx
    pairs = list(ordering_i1().pairs)
    pairs += [PivotPair(i, j) for i in range(4, n) for j in range(i + 1, n)]
    pairs += [PivotPair(i, j) for i in range(4) for j in range(4, n)]
    return m, PivotOrdering(n, tuple(pairs)), ctx


@dataclass
class TableRow:
    k: int
    pair: tuple[int, int]
    s_digits: str


def reproduce_example_table(digits: int = 100, steps: int = 8):
    """Off-norm table of the showcase matrix under the leading strategy,
    each value truncated to 50 significant figures.

    ``digits`` is the requested (display-contract) precision, minimum
    100; the working precision is auto-raised (see module docstring).
    Returns (initial off-norm string, rows).
    """
    if digits < EXAMPLE_MIN_DIGITS:
        raise ValueError(f"insufficient precision: need >= {EXAMPLE_MIN_DIGITS}")
    working = max(digits, auto_digits(float(EXAMPLE_EPS)))
    ctx = context(Precision.big(working))
    h = example_matrix_H(ctx)
    i1 = ordering_i1()
    rows = []
    with ctx.active():
        s0 = format_truncated(off_norm(h, ctx), 50)
        cur = h
        for k in range(1, steps + 1):
            pair = i1.pairs[(k - 1) % 6]
            cur, recs = sweep_steps(cur, i1, 1, ctx, start=(k - 1) % 6)
            rows.append(TableRow(k, pair.one_based(),
                                 format_truncated(recs[0].off_norm_after, 50)))
    return s0, rows


def example_trace(kmax: int = 6, digits: int = 100) -> SweepTrace:
    """Stationary-run trace of the showcase matrix (for the identity
    suite); same precision handling as the table."""
    working = max(digits, auto_digits(float(EXAMPLE_EPS)))
    ctx = context(Precision.big(working))
    return trace_t_run(example_matrix_H(ctx), kmax, ctx)


def slow_trace(eps_text: str, kmax: int = 3,
               digits: int | None = None) -> SweepTrace:
    """Stationary-run trace of H(eps) at auto precision."""
    if digits is None:
        digits = auto_digits(float(eps_text))
    ctx = context(Precision.big(digits))
    with ctx.active():
        h = slow_matrix_H(ctx.from_decimal(eps_text), ctx)
    return trace_t_run(h, kmax, ctx)
