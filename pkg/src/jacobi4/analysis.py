"""Trace extraction and executable verification of the convergence
identities and named results.

A stationary-parallel-step run B^(0), B^(1), ... on a patterned matrix
(zero (1,2)/(3,4) entries) is traced step by step: off-norm, the four
pivot-position values, the diagonal combination b11-b22-b33+b44, the
normalized quantities delta_k, nu_k, nu_k^-, and the per-step angle pair.
The identity checkers then recompute both sides of each relation from the
trace alone.

Slack convention: identity checks use tol = 10^(4-d) relative to the
initial off-norm (1e-12 in hardware); matrix-agreement checks use
1e-12 in hardware and 10^(6-d) in d-digit big floats.  Violations are
normalized so 0 means exact.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._rng import trial_rng
from .core import SymMatrix, conjugate_signed_perm, off_norm, p12, p34, q_rotation
from .kernel import sweep_steps, t_operator
from .scalar import Precision, context
from .strategy import ordering_i1, ordering_i2

IDENTITY_NAMES = (
    "new1", "b14pmb23", "nu_recursion", "prva", "pom2", "pom2_b",
    "parallelogram", "tancotan", "b14_b23_gap", "monotone",
)

MAIN_THEOREM_EPS = 1e-5


def identity_tol(ctx):
    return ctx.tol(4)


def matrix_tol(ctx):
    # hardware: 1e-12 absolute on O(1) entries; big: 10^(6-d)
    return ctx.tol(4) if ctx.precision.kind == "hw" else ctx.tol(6)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class SweepTrace:
    """Per-parallel-step record of a stationary run."""

    kmax: int
    s0: object
    S: list
    b13: list
    b24: list
    b14: list
    b23: list
    bq: list
    delta: list
    nu_plus: list
    nu_minus: list
    phi: list
    psi: list
    ctx: object = field(repr=False, default=None)

    def to_csv(self) -> str:
        """CSV with one row per state k.  The pivot columns give the
        leading pivot pair of parallel step k in the untransformed cyclic
        process (its brace partner is implied); the angles are those of
        the transition into state k, blank at k = 0."""
        ctx = self.ctx
        lead = ordering_i1().pairs
        lines = ["k,pivot_i,pivot_j,S,delta,nu_plus,nu_minus,b_quantity,phi,psi"]
        for k in range(self.kmax + 1):
            if k == 0:
                pi = pj = phi = psi = ""
            else:
                pair = lead[(2 * (k - 1)) % 6]
                pi, pj = pair.i + 1, pair.j + 1
                phi = ctx.to_decimal(self.phi[k - 1])
                psi = ctx.to_decimal(self.psi[k - 1])
            lines.append(
                f"{k},{pi},{pj},{ctx.to_decimal(self.S[k])},"
                f"{ctx.to_decimal(self.delta[k])},{ctx.to_decimal(self.nu_plus[k])},"
                f"{ctx.to_decimal(self.nu_minus[k])},{ctx.to_decimal(self.bq[k])},"
                f"{phi},{psi}"
            )
        return "\n".join(lines) + "\n"


def trace_t_run(a: SymMatrix, kmax: int, ctx) -> SweepTrace:
    """Run kmax stationary parallel steps, recording the full trace.

    Requires order 4 and the zero pattern at (1,2) and (3,4).  When the
    initial off-norm is zero the normalized quantities are defined as 0.
    """
    if a.n != 4:
        raise ValueError("traces are defined for order 4")
    if not (a.a[0][1] == 0 and a.a[2][3] == 0):
        raise ValueError("pattern violation: entries (1,2) and (3,4) must be zero")
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    tr = SweepTrace(kmax, None, [], [], [], [], [], [], [], [], [], [], [], ctx)
    cur = a.copy()
    with ctx.active():
        s0 = off_norm(cur, ctx)
        tr.s0 = s0
        zero = ctx.zero()
        for k in range(kmax + 1):
            b13, b24 = cur.a[0][2], cur.a[1][3]
            b14, b23 = cur.a[0][3], cur.a[1][2]
            tr.S.append(off_norm(cur, ctx))
            tr.b13.append(b13)
            tr.b24.append(b24)
            tr.b14.append(b14)
            tr.b23.append(b23)
            tr.bq.append(cur.a[0][0] - cur.a[1][1] - cur.a[2][2] + cur.a[3][3])
            if s0 > 0:
                tr.delta.append(ctx.sqrt(b13 * b13 + b24 * b24) / s0)
                tr.nu_plus.append(abs(b14 + b23) / s0)
                tr.nu_minus.append(abs(b14 - b23) / s0)
            else:
                tr.delta.append(zero)
                tr.nu_plus.append(zero)
                tr.nu_minus.append(zero)
            if k < kmax:
                cur, phi_k, psi_k = t_operator(cur, ctx)
                tr.phi.append(phi_k)
                tr.psi.append(psi_k)
    return tr


# ---------------------------------------------------------------------------
# identity checks on a generic trace
# ---------------------------------------------------------------------------

def identity_report(tr: SweepTrace) -> dict[str, float]:
    """Max normalized violation per identity over the whole trace."""
    ctx = tr.ctx
    viol = {name: 0.0 for name in IDENTITY_NAMES}
    if not (tr.s0 > 0):
        return viol

    def bump(name, v):
        fv = float(v)
        if fv > viol[name]:
            viol[name] = fv

    with ctx.active():
        s0 = tr.s0
        s0sq = s0 * s0
        sqrt2 = ctx.sqrt(ctx.convert(2))
        for k in range(1, tr.kmax + 1):
            b13p, b24p = tr.b13[k - 1], tr.b24[k - 1]
            b14p, b23p = tr.b14[k - 1], tr.b23[k - 1]
            b13n, b24n = tr.b13[k], tr.b24[k]
            b14n, b23n = tr.b14[k], tr.b23[k]
            phi, psi = tr.phi[k - 1], tr.psi[k - 1]
            cphi, sphi = ctx.cos(phi), ctx.sin(phi)
            cpsi, spsi = ctx.cos(psi), ctx.sin(psi)
            sq_prev = tr.S[k - 1] * tr.S[k - 1]
            sq_next = tr.S[k] * tr.S[k]

            bump("new1", abs(sq_next - (sq_prev - (b13p * b13p + b24p * b24p))) / s0sq)
            bump("new1", abs(sq_next - (b14p * b14p + b23p * b23p)) / s0sq)

            sin_pp = ctx.sin(psi + phi)
            sin_pm = ctx.sin(psi - phi)
            bump("b14pmb23", abs((b14n + b23n) + (b14p + b23p) * sin_pp) / s0)
            bump("b14pmb23", abs((b14n - b23n) + (b14p - b23p) * sin_pm) / s0)
            bump("nu_recursion",
                 abs(tr.nu_plus[k] - abs(sin_pp) * tr.nu_plus[k - 1]))
            bump("nu_recursion",
                 abs(tr.nu_minus[k] - abs(sin_pm) * tr.nu_minus[k - 1]))

            cos_d = ctx.cos(phi - psi)
            rhs = (b14p * b14p + b23p * b23p) * (cos_d * cos_d) \
                - 2 * ((b14p + b23p) * (b14p + b23p)) * cphi * cpsi * sphi * spsi
            bump("prva", abs((b13n * b13n + b24n * b24n) - rhs) / s0sq)

            bump("pom2", abs((b13n - b24n) - (b14p + b23p) * ctx.cos(phi + psi)) / s0)
            bump("pom2_b", abs((b13n + b24n) - (b14p - b23p) * cos_d) / s0)

            for z in (phi, psi):
                if z != 0:
                    t = ctx.tan(z)
                    q = abs(t + (1 - t * t) / (2 * t))
                    if q < 1:
                        bump("tancotan", 1 - q)

            gap = abs(abs(b14p) - abs(b23p)) - sqrt2 * tr.delta[k] * s0
            if gap > 0:
                bump("b14_b23_gap", gap / s0)

            if tr.S[k] > tr.S[k - 1]:
                bump("monotone", (tr.S[k] - tr.S[k - 1]) / s0)

        for k in range(tr.kmax + 1):
            b13n, b24n = tr.b13[k], tr.b24[k]
            su = b13n + b24n
            dv = b13n - b24n
            rhs = 2 * (tr.delta[k] * tr.delta[k]) * s0sq - dv * dv
            bump("parallelogram", abs(su * su - rhs) / s0sq)
    return viol


def check_identity_new1(tr: SweepTrace) -> bool:
    return identity_report(tr)["new1"] <= float(identity_tol(tr.ctx))


def check_identity_pm(tr: SweepTrace) -> bool:
    rep = identity_report(tr)
    tol = float(identity_tol(tr.ctx))
    return rep["b14pmb23"] <= tol and rep["nu_recursion"] <= tol


def check_identity_prva(tr: SweepTrace) -> bool:
    return identity_report(tr)["prva"] <= float(identity_tol(tr.ctx))


def check_identity_pom2(tr: SweepTrace) -> bool:
    rep = identity_report(tr)
    tol = float(identity_tol(tr.ctx))
    return max(rep["pom2"], rep["pom2_b"], rep["parallelogram"]) <= tol


def check_tancot_bound(tr: SweepTrace) -> bool:
    return identity_report(tr)["tancotan"] <= float(identity_tol(tr.ctx))


def check_b14_b23_gap(tr: SweepTrace) -> bool:
    return identity_report(tr)["b14_b23_gap"] <= float(identity_tol(tr.ctx))


def batch_identity_violations(state: dict[str, np.ndarray]) -> dict[str, float]:
    """Vectorized twin of identity_report over kernels.t_run_batch arrays."""
    S = state["S"]
    s0 = S[:, 0]
    keep = s0 > 0
    viol = {name: 0.0 for name in IDENTITY_NAMES}
    if not np.any(keep):
        return viol
    S = S[keep]
    b13, b24 = state["b13"][keep], state["b24"][keep]
    b14, b23 = state["b14"][keep], state["b23"][keep]
    phi, psi = state["phi"][keep], state["psi"][keep]
    s0 = s0[keep][:, None]
    s0sq = s0 * s0

    delta = np.sqrt(b13 * b13 + b24 * b24) / s0
    nu_p = np.abs(b14 + b23) / s0
    nu_m = np.abs(b14 - b23) / s0

    def mx(x):
        return float(np.max(x)) if x.size else 0.0

    sq = S * S
    sq_prev, sq_next = sq[:, :-1], sq[:, 1:]
    p = slice(None, -1)
    nx = slice(1, None)

    viol["new1"] = max(
        mx(np.abs(sq_next - (sq_prev - (b13[:, p] ** 2 + b24[:, p] ** 2))) / s0sq),
        mx(np.abs(sq_next - (b14[:, p] ** 2 + b23[:, p] ** 2)) / s0sq),
    )

    sin_pp = np.sin(psi + phi)
    sin_pm = np.sin(psi - phi)
    viol["b14pmb23"] = max(
        mx(np.abs((b14[:, nx] + b23[:, nx]) + (b14[:, p] + b23[:, p]) * sin_pp) / s0),
        mx(np.abs((b14[:, nx] - b23[:, nx]) + (b14[:, p] - b23[:, p]) * sin_pm) / s0),
    )
    viol["nu_recursion"] = max(
        mx(np.abs(nu_p[:, nx] - np.abs(sin_pp) * nu_p[:, p])),
        mx(np.abs(nu_m[:, nx] - np.abs(sin_pm) * nu_m[:, p])),
    )

    cphi, sphi = np.cos(phi), np.sin(phi)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    cos_d = np.cos(phi - psi)
    rhs = (b14[:, p] ** 2 + b23[:, p] ** 2) * cos_d ** 2 \
        - 2.0 * (b14[:, p] + b23[:, p]) ** 2 * cphi * cpsi * sphi * spsi
    viol["prva"] = mx(np.abs((b13[:, nx] ** 2 + b24[:, nx] ** 2) - rhs) / s0sq)

    viol["pom2"] = mx(
        np.abs((b13[:, nx] - b24[:, nx]) - (b14[:, p] + b23[:, p]) * np.cos(phi + psi)) / s0
    )
    viol["pom2_b"] = mx(
        np.abs((b13[:, nx] + b24[:, nx]) - (b14[:, p] - b23[:, p]) * cos_d) / s0
    )

    su = b13 + b24
    dv = b13 - b24
    viol["parallelogram"] = mx(np.abs(su * su - (2.0 * delta * delta * s0sq - dv * dv)) / s0sq)

    ang = np.concatenate([phi.ravel(), psi.ravel()])
    ang = ang[ang != 0.0]
    if ang.size:
        t = np.tan(ang)
        q = np.abs(t + (1.0 - t * t) / (2.0 * t))
        viol["tancotan"] = mx(np.maximum(0.0, 1.0 - q))

    gap = np.abs(np.abs(b14[:, p]) - np.abs(b23[:, p])) - math.sqrt(2.0) * delta[:, nx] * s0
    viol["b14_b23_gap"] = mx(np.maximum(0.0, gap) / s0)

    viol["monotone"] = mx(np.maximum(0.0, (S[:, nx] - S[:, p]) / s0))
    return viol


# ---------------------------------------------------------------------------
# samplers (flat 16-entry float matrices; the single source for both the
# hardware batches and the big-float loops)
# ---------------------------------------------------------------------------

def _place_patterned(d, off):
    d0, d1, d2, d3 = d
    o02, o03, o12, o13 = off
    return [
        d0, 0.0, o02, o03,
        0.0, d1, o12, o13,
        o02, o12, d2, 0.0,
        o03, o13, 0.0, d3,
    ]


def sample_patterned(rng) -> list[float]:
    """Uniform [-1,1) entries with the (1,2)/(3,4) zero pattern.
    Draw order: four diagonal entries, then (1,3),(1,4),(2,3),(2,4)."""
    d = [rng.sym_uniform() for _ in range(4)]
    o02, o03 = rng.sym_uniform(), rng.sym_uniform()
    o12, o13 = rng.sym_uniform(), rng.sym_uniform()
    return _place_patterned(d, (o02, o03, o12, o13))


def sample_general(rng) -> list[float]:
    """Uniform [-1,1) full symmetric matrix.  Draw order: diagonal, then
    strict upper row-major."""
    d = [rng.sym_uniform() for _ in range(4)]
    o = [rng.sym_uniform() for _ in range(6)]
    o01, o02, o03, o12, o13, o23 = o
    return [
        d[0], o01, o02, o03,
        o01, d[1], o12, o13,
        o02, o12, d[2], o23,
        o03, o13, o23, d[3],
    ]


def h_eps_flat(eps: float) -> list[float]:
    """Hardware-precision slow-convergence matrix for the sampler families."""
    se = math.sqrt(eps)
    return _place_patterned(
        (eps + eps * se, eps * se, eps, 0.0),
        (2.0 * eps, -1.0 + eps, 1.0, -eps),
    )


def sample_main_theorem(rng, idx: int) -> list[float]:
    """Trial family mix for the two-cycle contraction theorem: 8/10
    uniform patterned, 1/10 near-diagonal (off-entries scaled 1e-8), 1/10
    slow-family H(eps) with eps = 10^(-5-5u), perturbed by eps^2-scale
    noise on the free entries (exact H(eps) when idx % 30 == 9)."""
    m = idx % 10
    if m <= 7:
        return sample_patterned(rng)
    if m == 8:
        a = sample_patterned(rng)
        for pos in (2, 3, 6, 7):
            a[pos] *= 1e-8
        a[8], a[12], a[9], a[13] = a[2], a[3], a[6], a[7]
        return a
    u = rng.uniform()
    eps = 10.0 ** (-5.0 - 5.0 * u)
    a = h_eps_flat(eps)
    if idx % 30 != 9:
        noise = eps * eps
        d = [a[0] + noise * rng.sym_uniform(), a[5] + noise * rng.sym_uniform(),
             a[10] + noise * rng.sym_uniform(), a[15] + noise * rng.sym_uniform()]
        off = [a[2] + noise * rng.sym_uniform(), a[3] + noise * rng.sym_uniform(),
               a[6] + noise * rng.sym_uniform(), a[7] + noise * rng.sym_uniform()]
        a = _place_patterned(d, tuple(off))
    return a


LEMMA_CASES = {
    1: ((3, 6), 2, "diagonal"),   # (1,4)=(2,3)=0 -> A^(2) diagonal
    2: ((2, 7), 4, "diagonal"),   # (1,3)=(2,4)=0 -> A^(4) diagonal
    3: ((2,), 4, "half"),
    4: ((7,), 4, "half"),
    5: ((3,), 4, "half"),
    6: ((6,), 4, "half"),
}


def sample_lemma_case(rng, case: int) -> list[float]:
    a = sample_patterned(rng)
    positions, _, _ = LEMMA_CASES[case]
    for pos in positions:
        a[pos] = 0.0
        r, s = divmod(pos, 4)
        a[s * 4 + r] = 0.0
    return a


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class TheoremReport:
    suite: str
    passed: bool
    precision: str
    seed: int | None = None
    trials: int | None = None
    worst: object = None
    details: dict = field(default_factory=dict)
    counterexample: dict | None = None

    def to_json_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "passed": self.passed,
            "precision": self.precision,
            "seed": self.seed,
            "trials": self.trials,
            "worst": self.worst,
            "details": self.details,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def headline(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" worst={self.worst}" if self.worst is not None else ""
        return f"{status} {self.suite} [{self.precision}]{extra}"


def _counterexample(entries_flat, ctx, seed, trial, note) -> dict:
    return {
        "seed": seed,
        "trial": trial,
        "note": note,
        "matrix": [ctx.to_decimal(v) for v in entries_flat],
    }


def _matrix_from_flat(flat, ctx) -> SymMatrix:
    vals = [ctx.convert(v) for v in flat]
    return SymMatrix(4, [vals[4 * r:4 * r + 4] for r in range(4)])


def _chunks(trials: int, jobs: int):
    jobs = max(1, min(jobs, trials)) if trials else 1
    step = (trials + jobs - 1) // jobs
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def _map_chunks(fn, trials: int, jobs: int):
    spans = _chunks(trials, jobs)
    if len(spans) == 1:
        return [fn(*spans[0])]
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        return list(pool.map(lambda se: fn(*se), spans))


def _require_positive_trials(trials: int):
    if trials <= 0:
        raise ValueError("trials must be positive")


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

def verify_identities(trials: int, seed: int, precision: Precision,
                      kmax: int = 6, jobs: int = 1) -> TheoremReport:
    """Unconditional trace identities on random patterned matrices."""
    _require_positive_trials(trials)
    ctx = context(precision)
    tol = float(identity_tol(ctx))

    if precision.kind == "hw":
        def chunk(lo, hi):
            mats = np.empty((hi - lo, 16), dtype=np.float64)
            for t in range(lo, hi):
                mats[t - lo] = sample_patterned(trial_rng(seed, t))
            return batch_identity_violations(kernels.t_run_batch(mats, kmax))

        parts = _map_chunks(chunk, trials, jobs)
        worst = {n: max(p[n] for p in parts) for n in IDENTITY_NAMES}
    else:
        worst = {n: 0.0 for n in IDENTITY_NAMES}
        for t in range(trials):
            a = _matrix_from_flat(sample_patterned(trial_rng(seed, t)), ctx)
            rep = identity_report(trace_t_run(a, kmax, ctx))
            for n in IDENTITY_NAMES:
                worst[n] = max(worst[n], rep[n])

    passed = all(v <= tol for v in worst.values())
    return TheoremReport(
        suite="identities", passed=passed, precision=precision.spec(),
        seed=seed, trials=trials, worst=max(worst.values()),
        details={"tol": tol, "kmax": kmax, "max_violation": worst},
    )


def verify_theorem_main(trials: int, seed: int, precision: Precision,
                        jobs: int = 1) -> TheoremReport:
    """Two cycles of the leading parallel strategy contract the off-norm
    by at least 1e-5 on every patterned matrix."""
    _require_positive_trials(trials)
    ctx = context(precision)
    bound = 1.0 - MAIN_THEOREM_EPS
    o1 = kernels.pairs_array(ordering_i1())

    if precision.kind == "hw":
        def chunk(lo, hi):
            mats = np.empty((hi - lo, 16), dtype=np.float64)
            for t in range(lo, hi):
                mats[t - lo] = sample_main_theorem(trial_rng(seed, t), t)
            s_in = kernels.offnorms(mats, 4)
            kernels.sweep_batch(mats, 4, o1, 12)
            s_out = kernels.offnorms(mats, 4)
            keep = s_in > 0.0
            if not np.any(keep):
                return -1.0, -1, 0
            ratios = s_out[keep] / s_in[keep]
            pos = int(np.argmax(ratios))
            return float(ratios[pos]), lo + int(np.nonzero(keep)[0][pos]), int(keep.sum())

        parts = _map_chunks(chunk, trials, jobs)
        worst, worst_trial, used = -1.0, -1, 0
        for w, wt, u in parts:
            used += u
            if w > worst:
                worst, worst_trial = w, wt
    else:
        worst, worst_trial, used = -1.0, -1, 0
        i1 = ordering_i1()
        with ctx.active():
            for t in range(trials):
                a = _matrix_from_flat(sample_main_theorem(trial_rng(seed, t), t), ctx)
                s_in = off_norm(a, ctx)
                if not (s_in > 0):
                    continue
                used += 1
                out, _ = sweep_steps(a, i1, 12, ctx)
                ratio = float(off_norm(out, ctx) / s_in)
                if ratio > worst:
                    worst, worst_trial = ratio, t

    passed = worst <= bound
    ce = None
    if not passed:
        flat = sample_main_theorem(trial_rng(seed, worst_trial), worst_trial)
        ce = _counterexample(flat, ctx, seed, worst_trial,
                             f"off-norm ratio after 12 steps = {worst!r}")
    return TheoremReport(
        suite="thm36", passed=passed, precision=precision.spec(), seed=seed,
        trials=trials, worst=worst,
        details={"bound": bound, "worst_trial": worst_trial,
                 "nonzero_trials": used},
        counterexample=ce,
    )


def verify_lemma_special_cases(trials: int, seed: int, precision: Precision,
                               jobs: int = 1) -> TheoremReport:
    """Six zero-pattern special cases: diagonality after one or two
    parallel steps, or the 1/2 off-norm-squared reduction."""
    _require_positive_trials(trials)
    ctx = context(precision)
    tol = float(matrix_tol(ctx))
    o1 = kernels.pairs_array(ordering_i1())
    i1 = ordering_i1()
    details = {}
    passed = True
    worst_overall = 0.0

    for case, (_, nsteps, kind) in LEMMA_CASES.items():
        if precision.kind == "hw":
            def chunk(lo, hi, case=case, nsteps=nsteps, kind=kind):
                mats = np.empty((hi - lo, 16), dtype=np.float64)
                for t in range(lo, hi):
                    mats[t - lo] = sample_lemma_case(trial_rng(seed, t), case)
                s_in = kernels.offnorms(mats, 4)
                kernels.sweep_batch(mats, 4, o1, nsteps)
                s_out = kernels.offnorms(mats, 4)
                if kind == "diagonal":
                    return float(np.max(s_out)) if s_out.size else 0.0
                keep = s_in > 0.0
                if not np.any(keep):
                    return 0.0
                return float(np.max((s_out[keep] / s_in[keep]) ** 2))

            worst = max(_map_chunks(chunk, trials, jobs))
        else:
            worst = 0.0
            with ctx.active():
                for t in range(trials):
                    a = _matrix_from_flat(sample_lemma_case(trial_rng(seed, t), case), ctx)
                    s_in = off_norm(a, ctx)
                    out, _ = sweep_steps(a, i1, nsteps, ctx)
                    s_out = off_norm(out, ctx)
                    if kind == "diagonal":
                        worst = max(worst, float(s_out))
                    elif s_in > 0:
                        worst = max(worst, float((s_out / s_in) ** 2))

        if kind == "diagonal":
            ok = worst <= tol
            details[f"case{case}_max_offnorm"] = worst
        else:
            ok = worst <= 0.5 * (1.0 + tol)
            details[f"case{case}_max_ratio_sq"] = worst
        passed = passed and ok
        worst_overall = max(worst_overall, worst)

    return TheoremReport(
        suite="lemma37", passed=passed, precision=precision.spec(), seed=seed,
        trials=trials, worst=worst_overall, details={"tol": tol, **details},
    )


def _conj_batch(mats: np.ndarray, sp) -> np.ndarray:
    perm = np.array([i for i, _ in sp.images])
    signs = np.array([s for _, s in sp.images], dtype=np.float64)
    m3 = mats.reshape(-1, 4, 4)
    out = m3[:, perm[:, None], perm[None, :]] * (signs[:, None] * signs[None, :])
    return np.ascontiguousarray(out.reshape(mats.shape))


def verify_prop_34(trials: int, seed: int, precision: Precision,
                   kmax: int = 6, jobs: int = 1) -> TheoremReport:
    """Stationary runs agree with the cyclic process: T^k(A) equals the
    Q^k-conjugated 2k-step iterate, entrywise, for k <= kmax."""
    _require_positive_trials(trials)
    ctx = context(precision)
    tol = float(matrix_tol(ctx))
    q = q_rotation()
    o1 = kernels.pairs_array(ordering_i1())
    i1 = ordering_i1()

    if precision.kind == "hw":
        def chunk(lo, hi):
            mats = np.empty((hi - lo, 16), dtype=np.float64)
            for t in range(lo, hi):
                mats[t - lo] = sample_patterned(trial_rng(seed, t))
            tmats = mats.copy()
            jmats = mats.copy()
            dev = 0.0
            sta = 0.0
            for k in range(1, kmax + 1):
                kernels.t_run_batch(tmats, 1)
                kernels.sweep_batch(jmats, 4, o1, 2, start=2 * (k - 1))
                conj = _conj_batch(jmats, q.power(k))
                dev = max(dev, float(np.max(np.abs(tmats - conj))))
                sta = max(sta, float(np.max(np.abs(
                    kernels.offnorms(tmats, 4) - kernels.offnorms(jmats, 4)))))
            return dev, sta

        parts = _map_chunks(chunk, trials, jobs)
        dev = max(p[0] for p in parts)
        sta = max(p[1] for p in parts)
    else:
        dev, sta = 0.0, 0.0
        with ctx.active():
            for t in range(trials):
                a = _matrix_from_flat(sample_patterned(trial_rng(seed, t)), ctx)
                tmat = a.copy()
                jmat = a.copy()
                for k in range(1, kmax + 1):
                    tmat, _, _ = t_operator(tmat, ctx)
                    jmat, _ = sweep_steps(jmat, i1, 2, ctx, start=2 * (k - 1))
                    conj = conjugate_signed_perm(jmat, q.power(k))
                    for r in range(4):
                        for s in range(4):
                            dev = max(dev, float(abs(tmat.a[r][s] - conj.a[r][s])))
                    sta = max(sta, float(abs(off_norm(tmat, ctx) - off_norm(jmat, ctx))))

    passed = dev <= tol
    return TheoremReport(
        suite="prop34", passed=passed, precision=precision.spec(), seed=seed,
        trials=trials, worst=dev,
        details={"tol": tol, "kmax": kmax, "max_offnorm_gap": sta},
    )


def verify_prop_32(trials: int, seed: int, precision: Precision,
                   jobs: int = 1) -> TheoremReport:
    """Permutational equivalence at the process level: running the second
    strategy on A and the first on P^T A P stay P-conjugate after every
    parallel step, for both transpositions P."""
    _require_positive_trials(trials)
    ctx = context(precision)
    tol = float(matrix_tol(ctx))
    o1 = kernels.pairs_array(ordering_i1())
    o2 = kernels.pairs_array(ordering_i2())
    i1, i2 = ordering_i1(), ordering_i2()
    perms = {"P12": p12(), "P34": p34()}
    details = {"tol": tol}
    dev_all = 0.0

    for name, p in perms.items():
        if precision.kind == "hw":
            def chunk(lo, hi, p=p):
                mats = np.empty((hi - lo, 16), dtype=np.float64)
                for t in range(lo, hi):
                    mats[t - lo] = sample_general(trial_rng(seed, t))
                run2 = mats.copy()
                run1 = _conj_batch(mats, p)
                dev = 0.0
                for r in range(1, 4):
                    kernels.sweep_batch(run2, 4, o2, 2, start=2 * (r - 1))
                    kernels.sweep_batch(run1, 4, o1, 2, start=2 * (r - 1))
                    dev = max(dev, float(np.max(np.abs(run1 - _conj_batch(run2, p)))))
                return dev

            dev = max(_map_chunks(chunk, trials, jobs))
        else:
            dev = 0.0
            with ctx.active():
                for t in range(trials):
                    a = _matrix_from_flat(sample_general(trial_rng(seed, t)), ctx)
                    run2 = a.copy()
                    run1 = conjugate_signed_perm(a, p)
                    for r in range(1, 4):
                        run2, _ = sweep_steps(run2, i2, 2, ctx, start=2 * (r - 1))
                        run1, _ = sweep_steps(run1, i1, 2, ctx, start=2 * (r - 1))
                        conj = conjugate_signed_perm(run2, p)
                        for rr in range(4):
                            for ss in range(4):
                                dev = max(dev, float(abs(run1.a[rr][ss] - conj.a[rr][ss])))
        details[f"max_dev_{name}"] = dev
        dev_all = max(dev_all, dev)

    return TheoremReport(
        suite="prop32", passed=dev_all <= tol, precision=precision.spec(),
        seed=seed, trials=trials, worst=dev_all, details=details,
    )
