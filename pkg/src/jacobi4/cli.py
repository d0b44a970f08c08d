"""Command-line front end.

Exit codes: 0 all checks passed / command succeeded, 1 a verification
check failed (a counterexample artifact is embedded in the report),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import adversarial, analysis, kernels
from .core import SymMatrix, off_norm
from .kernel import solve as kernel_solve
from .scalar import Precision, context
from .strategy import (
    NAMED_ORDERINGS,
    PivotOrdering,
    enumerate_parallel_orderings,
    ordering_i1,
    serial_rowwise,
    shift_classes,
    shift_equivalent,
    strategy_matrix,
)

DEFAULT_PROP52_EPS = ("1e-6", "1e-8", "1e-10")
DEFAULT_THM53_N = (5, 6, 8)
DEFAULT_THM53_EPS = ("1e-2", "1e-3")

SUITES = ("thm36", "lemma37", "prop32", "prop34", "identities",
          "prop52", "thm53", "all")


def _precision(text: str) -> Precision:
    try:
        return Precision.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacobi4",
        description="Cyclic Jacobi eigensolver for symmetric matrices under "
                    "parallel pivot strategies, with verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prec = argparse.ArgumentParser(add_help=False)
    prec.add_argument("--precision", type=_precision, default=Precision.hardware(),
                      help="hw or big:<digits> (default hw)")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("json", "csv", "text"), default="text")
    out.add_argument("--out", default=None, help="write output to a file")

    p_solve = sub.add_parser("solve", parents=[prec, out],
                             help="diagonalize a matrix by cyclic sweeps")
    p_solve.add_argument("--matrix", required=True, help="matrix JSON file")
    p_solve.add_argument("--strategy", default="serial-rowwise",
                         help="I1|I2|O1p|O1pp|O2p|O2pp|serial-rowwise")
    p_solve.add_argument("--ordering-file", default=None,
                         help="custom cyclic ordering JSON (overrides --strategy)")
    p_solve.add_argument("--cycles", type=int, default=60,
                         help="maximum number of cycles")
    p_solve.add_argument("--threshold", default=None,
                         help="stop when off-norm <= threshold * initial "
                              "(default 10^(2-d))")

    p_trace = sub.add_parser("trace", parents=[prec, out],
                             help="trace a stationary parallel-step run")
    p_trace.add_argument("--matrix", required=True)
    p_trace.add_argument("--steps", type=int, default=6)

    p_verify = sub.add_parser("verify", parents=[prec, out],
                              help="run a verification suite")
    p_verify.add_argument("--suite", choices=SUITES, required=True)
    p_verify.add_argument("--trials", type=int, default=10000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--kmax", type=int, default=6)
    p_verify.add_argument("--eps", action="append", default=None,
                          help="epsilon for prop52/thm53 (repeatable)")
    p_verify.add_argument("--n", action="append", type=int, default=None,
                          help="order for thm53 (repeatable)")

    p_strat = sub.add_parser("strategies",
                             help="enumerate/classify parallel orderings")
    strat_sub = p_strat.add_subparsers(dest="strat_cmd", required=True)
    strat_sub.add_parser("enumerate", parents=[out])
    p_matrix = strat_sub.add_parser("matrix", parents=[out])
    p_matrix.add_argument("name", choices=sorted(NAMED_ORDERINGS))
    p_classify = strat_sub.add_parser("classify", parents=[out])
    p_classify.add_argument("file", help="ordering JSON file")

    p_adv = sub.add_parser("adversarial",
                           help="slow-convergence experiments")
    adv_sub = p_adv.add_subparsers(dest="adv_cmd", required=True)
    p_table = adv_sub.add_parser("table", parents=[out])
    p_table.add_argument("--digits", type=int, default=100)
    p_table.add_argument("--steps", type=int, default=8)
    p_hb = adv_sub.add_parser("hbound", parents=[out])
    p_hb.add_argument("--eps", default="1e-8")
    p_hb.add_argument("--digits", type=int, default=None)
    p_gen = adv_sub.add_parser("general", parents=[out])
    p_gen.add_argument("--n", type=int, default=6)
    p_gen.add_argument("--eps", default="1e-3")
    p_gen.add_argument("--digits", type=int, default=None)
    p_gen.add_argument("--dense", action="store_true",
                       help="experimental dense-coupling variant")

    p_bench = sub.add_parser("bench", help="compare kernel backends")
    p_bench.add_argument("--trials", type=int, default=20000)
    p_bench.add_argument("--seed", type=int, default=0)

    return parser


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_matrix(path: str, ctx) -> SymMatrix:
    with open(path) as fh:
        return SymMatrix.from_json(fh.read(), ctx)


def _resolve_ordering(args, n: int) -> PivotOrdering:
    if args.ordering_file:
        with open(args.ordering_file) as fh:
            ordering = PivotOrdering.from_json(fh.read(), n)
        if not ordering.is_cyclic():
            raise ValueError(
                "custom ordering is not cyclic (every pair exactly once)"
            )
        return ordering
    name = args.strategy
    if name == "serial-rowwise":
        return serial_rowwise(n)
    if name in NAMED_ORDERINGS:
        if n != 4:
            raise ValueError(f"strategy {name} requires order 4, got {n}")
        return NAMED_ORDERINGS[name]()
    raise ValueError(f"unknown strategy {name!r}")


def _cmd_solve(args) -> int:
    ctx = context(args.precision)
    matrix = _load_matrix(args.matrix, ctx)
    ordering = _resolve_ordering(args, matrix.n)
    threshold = None
    if args.threshold is not None:
        threshold = ctx.from_decimal(args.threshold)
    res = kernel_solve(matrix, ordering, ctx, threshold, args.cycles)
    doc = {
        "eigenvalues": [ctx.to_decimal(v) for v in res.matrix.diag()],
        "rotation": [[ctx.to_decimal(v) for v in row] for row in res.basis],
        "matrix": [[ctx.to_decimal(v) for v in row] for row in res.matrix.a],
        "off_norm_initial": ctx.to_decimal(res.off_norm_initial),
        "off_norm": ctx.to_decimal(res.off_norm_final),
        "cycles": res.cycles,
        "converged": res.converged,
        "strategy_length": len(ordering.pairs),
        "precision": args.precision.spec(),
    }
    if args.format == "text":
        lines = [
            f"eigenvalue estimates: {', '.join(doc['eigenvalues'])}",
            f"off-norm: {doc['off_norm_initial']} -> {doc['off_norm']}",
            f"cycles: {res.cycles} (converged: {res.converged})",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_trace(args) -> int:
    ctx = context(args.precision)
    matrix = _load_matrix(args.matrix, ctx)
    tr = analysis.trace_t_run(matrix, args.steps, ctx)
    if args.format == "json":
        doc = {
            "kmax": tr.kmax,
            "S": [ctx.to_decimal(v) for v in tr.S],
            "delta": [ctx.to_decimal(v) for v in tr.delta],
            "nu_plus": [ctx.to_decimal(v) for v in tr.nu_plus],
            "nu_minus": [ctx.to_decimal(v) for v in tr.nu_minus],
            "b_quantity": [ctx.to_decimal(v) for v in tr.bq],
            "phi": [ctx.to_decimal(v) for v in tr.phi],
            "psi": [ctx.to_decimal(v) for v in tr.psi],
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    else:
        _emit(tr.to_csv(), args.out)
    return 0


def _verify_reports(args) -> list:
    suite = args.suite
    reports = []
    random_suites = {
        "thm36": analysis.verify_theorem_main,
        "lemma37": analysis.verify_lemma_special_cases,
        "prop32": analysis.verify_prop_32,
        "prop34": analysis.verify_prop_34,
        "identities": analysis.verify_identities,
    }
    wanted = SUITES[:-1] if suite == "all" else (suite,)
    for name in wanted:
        if name in random_suites:
            fn = random_suites[name]
            if name == "identities":
                reports.append(fn(args.trials, args.seed, args.precision,
                                  kmax=args.kmax, jobs=args.jobs))
            elif name == "prop34":
                reports.append(fn(args.trials, args.seed, args.precision,
                                  kmax=args.kmax, jobs=args.jobs))
            else:
                reports.append(fn(args.trials, args.seed, args.precision,
                                  jobs=args.jobs))
        elif name == "prop52":
            digits = (args.precision.decimal_digits
                      if args.precision.kind == "big" else None)
            for eps in args.eps or DEFAULT_PROP52_EPS:
                reports.append(adversarial.verify_slow_sweep(eps, digits))
        elif name == "thm53":
            digits = (args.precision.decimal_digits
                      if args.precision.kind == "big" else None)
            for n in args.n or DEFAULT_THM53_N:
                for eps in args.eps or DEFAULT_THM53_EPS:
                    reports.append(adversarial.verify_general_slow(n, eps, digits))
    return reports


def _cmd_verify(args) -> int:
    reports = _verify_reports(args)
    passed = all(r.passed for r in reports)
    if args.format == "json":
        doc = {
            "passed": passed,
            "reports": [r.to_json_dict() for r in reports],
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    else:
        _emit("".join(r.headline() + "\n" for r in reports), args.out)
    return 0 if passed else 1


def _render_strategy_matrix(m) -> str:
    cells = [["*" if v < 0 else str(v) for v in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells) + "\n"


def _cmd_strategies(args) -> int:
    if args.strat_cmd == "enumerate":
        orderings = enumerate_parallel_orderings(4)
        classes = shift_classes(orderings)
        if args.format == "json":
            doc = {
                "count": len(orderings),
                "classes": [
                    [[list(p.one_based()) for p in o.pairs] for o in cls]
                    for cls in classes
                ],
            }
            _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
        else:
            lines = [f"{len(orderings)} parallel orderings in "
                     f"{len(classes)} shift-equivalence classes"]
            for ci, cls in enumerate(classes, 1):
                lines.append(f"class {ci}:")
                lines.extend(f"  {o!r}" for o in cls)
            _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.strat_cmd == "matrix":
        ordering = NAMED_ORDERINGS[args.name]()
        _emit(_render_strategy_matrix(strategy_matrix(ordering)), args.out)
        return 0
    # classify
    with open(args.file) as fh:
        ordering = PivotOrdering.from_json(fh.read(), 4)
    label = "unclassified"
    for name, builder in NAMED_ORDERINGS.items():
        if shift_equivalent(ordering, builder()):
            label = ("class of I1" if name in ("I1", "O1p", "O1pp")
                     else "class of I2")
            break
    if args.format == "json":
        _emit(json.dumps({"class": label}, sort_keys=True) + "\n", args.out)
    else:
        _emit(label + "\n", args.out)
    return 0


def _cmd_adversarial(args) -> int:
    if args.adv_cmd == "table":
        s0, rows = adversarial.reproduce_example_table(args.digits, args.steps)
        if args.format == "csv":
            lines = ["k,pivot_i,pivot_j,S"]
            lines += [f"{r.k},{r.pair[0]},{r.pair[1]},{r.s_digits}" for r in rows]
            _emit("\n".join(lines) + "\n", args.out)
        else:
            lines = [f"S(H) = {s0}"]
            lines += [f"k={r.k:<2d} ({r.pair[0]},{r.pair[1]})  {r.s_digits}"
                      for r in rows]
            _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.adv_cmd == "hbound":
        report = adversarial.verify_slow_sweep(args.eps, args.digits)
    else:
        if args.dense:
            m, ordering, ctx = adversarial.slow_matrix_general_dense(
                args.eps, args.n, args.digits)
            from .kernel import sweep_steps

            with ctx.active():
                s_in = off_norm(m, ctx)
                out, _ = sweep_steps(m, ordering, len(ordering.pairs), ctx)
                ratio = off_norm(out, ctx) / s_in
            report = analysis.TheoremReport(
                suite="thm53-dense", passed=True,
                precision=ctx.precision.spec(), worst=float(ratio),
                details={"n": args.n, "eps": args.eps, "experiment_only": True,
                         "ratio": ctx.to_decimal(ratio)},
            )
        else:
            report = adversarial.verify_general_slow(args.n, args.eps, args.digits)
    if args.format == "json":
        _emit(json.dumps(report.to_json_dict(), sort_keys=True) + "\n", args.out)
    else:
        _emit(report.headline() + "\n", args.out)
    return 0 if report.passed else 1


def _cmd_bench(args) -> int:
    from .bench import run_bench

    sys.stdout.write(run_bench(args.trials, args.seed))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "trace":
            return _cmd_trace(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "strategies":
            return _cmd_strategies(args)
        if args.command == "adversarial":
            return _cmd_adversarial(args)
        if args.command == "bench":
            return _cmd_bench(args)
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())
