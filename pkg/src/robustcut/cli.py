"""Command-line front end.

Subcommands mirror the pipeline stages: ``solve`` (relaxation -> factor ->
rounding -> report), ``verify`` (solve + certification against the
brute-force oracle), ``round`` (rounding statistics for a solved factor),
``gen`` (reproducible random instances and uncertainty sets), and ``bench``
(timing smoke across sizes; timings go to stderr only).

Reports are JSON with sorted keys and no wall-clock content, so identical
inputs + seed reproduce them byte-for-byte.  Exit codes: 0 success, 1 parse
or validation error, 2 solver non-convergence, 3 certification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Optional

import numpy as np

from . import gen as genmod
from .instances import (ALLEQUAL, DICUT, MAXCUT, DomainError, Instance,
                        ParseError, allequal_value, cut_value, dicut_value,
                        instance_to_json, load_instance, term_coefficients)
from .numerics import InfeasibleError, NumericError, UnboundedError
from .oracle import allequal_quadratic_matrix, certify_sandwich
from .robust import SaddleSolution, SolverConfig, solve_robust
from .rounding import (CROSSOVER_GAMMA, RoundConfig, allequal_round,
                       best_of_roundings, expected_allequal_exact,
                       expected_cut_exact, expected_dicut_exact,
                       large_cut_ratio, negative_weight_bound, round_cut,
                       sign_round_psd)
from .sdp import term_gram_coefficients
from .uncertainty import (SINGLETON, UncertaintySpec, load_spec,
                          singleton_spec, spec_to_json)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NO_CONVERGE = 2
EXIT_CERT_FAIL = 3


class _CliError(Exception):
    """Raised for anything that should terminate with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; contract says 1
        raise _CliError(message)


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_inputs(args) -> tuple[Instance, UncertaintySpec, dict]:
    inst = load_instance(args.instance)
    meta = {"instance_digest": _digest(args.instance)}
    if getattr(args, "spec", None):
        spec = load_spec(args.spec)
        meta["spec_digest"] = _digest(args.spec)
    else:
        spec = singleton_spec(inst.nominal_weights())
        meta["spec_digest"] = None
    return inst, spec, meta


def _solver_config(args) -> SolverConfig:
    return SolverConfig(gap_tol=args.gap_tol, max_iter=args.max_iter,
                        rank=args.rank, restarts=args.restarts, seed=args.seed)


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stderr_time(label: str, seconds: float) -> None:
    print(f"[time] {label}: {seconds:.3f}s", file=sys.stderr)


def _round_pipeline(inst: Instance, sol: SaddleSolution, seed: int,
                    trials: int) -> dict:
    """Rounding stage shared by solve/round: best-of-`trials` draws evaluated
    at the worst-case weights, plus the exact expectation."""
    cfg = RoundConfig(seed=seed, trials=trials)
    if inst.kind == ALLEQUAL:
        A = allequal_quadratic_matrix(inst, sol.worst)
        z = sign_round_psd(A, sol.factor, RoundConfig(seed=seed, trials=max(8, trials)))
        best_v, best_x, best_t = -np.inf, None, 0
        for t in range(trials):
            x = allequal_round(z, inst.arity, cfg, trial=t)
            v = allequal_value(inst, x, sol.worst)
            if v > best_v:
                best_v, best_x, best_t = v, x, t
        expected = expected_allequal_exact(inst, z, sol.worst)
        return {"cut": [int(s) for s in best_x], "value": best_v,
                "trial": best_t, "expected_exact": expected,
                "seed_vector": [int(s) for s in z]}
    cut, value, trial = best_of_roundings(inst, sol.factor, sol.worst, cfg)
    if inst.kind == MAXCUT:
        expected = expected_cut_exact(inst, sol.factor, sol.worst)
    else:
        expected = expected_dicut_exact(inst, sol.factor, sol.worst)
    return {"cut": [int(s) for s in cut], "value": value, "trial": trial,
            "expected_exact": expected}


def _write_csv(path: str, inst: Instance, sol: SaddleSolution, cut) -> None:
    """Per-term table: endpoints/literals, worst weight, relaxed coefficient,
    rounded contribution."""
    coef = term_gram_coefficients(inst, sol.factor)
    contrib = term_coefficients(inst, np.asarray(cut))
    with open(path, "w") as fh:
        fh.write("term,spec,worst_weight,relaxed_coef,rounded_coef\n")
        if inst.kind == ALLEQUAL:
            labels = ["|".join(str(s * (v + 1)) for v, s in lits)
                      for lits, _ in inst.clauses]
        else:
            labels = [f"{i}->{j}" if inst.kind == DICUT else f"{i}-{j}"
                      for i, j, _ in inst.edges]
        for t, label in enumerate(labels):
            fh.write(f"{t},{label},{float(sol.worst[t])!r},"
                     f"{float(coef[t])!r},{float(contrib[t])!r}\n")


def cmd_solve(args) -> int:
    inst, spec, meta = _load_inputs(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sol = solve_robust(inst, spec, cfg)
    _stderr_time("solve", time.perf_counter() - t0)
    report = {
        "command": "solve",
        **meta,
        "kind": inst.kind,
        "n": inst.n,
        "m": inst.m,
        "seed": args.seed,
        "solver": {
            "value": sol.value,
            "iterations": sol.report.iterations,
            "residual": sol.report.residual,
            "converged": sol.report.converged,
        },
        "worst_weights": [float(w) for w in sol.worst],
    }
    if not sol.report.converged:
        _emit(report, args.out)
        return EXIT_NO_CONVERGE
    t0 = time.perf_counter()
    report["rounding"] = _round_pipeline(inst, sol, args.seed, args.trials)
    _stderr_time("round", time.perf_counter() - t0)
    if args.csv:
        _write_csv(args.csv, inst, sol, report["rounding"]["cut"])
    _emit(report, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst, spec, meta = _load_inputs(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sol = solve_robust(inst, spec, cfg)
    _stderr_time("solve", time.perf_counter() - t0)
    if args.corrupt_value:
        sol.value += args.corrupt_value  # negative-control hook for tests
    report = {
        "command": "verify",
        **meta,
        "kind": inst.kind,
        "n": inst.n,
        "seed": args.seed,
        "solver": {
            "value": sol.value,
            "iterations": sol.report.iterations,
            "residual": sol.report.residual,
            "converged": sol.report.converged,
        },
    }
    if not sol.report.converged:
        _emit(report, args.out)
        return EXIT_NO_CONVERGE
    t0 = time.perf_counter()
    cert = certify_sandwich(inst, spec, sol, samples=args.samples, seed=args.seed)
    _stderr_time("certify", time.perf_counter() - t0)
    report["certification"] = {
        "ok": cert.ok,
        "ratio": cert.ratio,
        "oracle_value": cert.oracle_value,
        "solver_value": cert.solver_value,
        "checks": [{"name": c.name, "passed": c.passed, "lhs": c.lhs, "rhs": c.rhs}
                   for c in cert.checks],
    }
    failures = not cert.ok
    if inst.kind == MAXCUT:
        report["appendix"] = _appendix_checks(inst, spec, sol)
        gates = [c for c in report["appendix"]["checks"] if c["gating"]]
        failures = failures or any(not c["passed"] for c in gates)
    _emit(report, args.out)
    return EXIT_CERT_FAIL if failures else EXIT_OK


def _appendix_checks(inst: Instance, spec: UncertaintySpec,
                     sol: SaddleSolution) -> dict:
    """Large-cut ratio diagnostics (informational) and the shifted guarantee
    for signed weights (gating, exact)."""
    coef = term_gram_coefficients(inst, sol.factor)
    total = float(np.sum(sol.worst))
    relaxed = float(coef @ sol.worst)
    checks = []
    info = {"relative_cut": None, "large_cut_ratio": None}
    if total > 0.0 and not inst.signed:
        a_tilde = relaxed / total
        info["relative_cut"] = a_tilde
        if a_tilde >= CROSSOVER_GAMMA:
            info["large_cut_ratio"] = large_cut_ratio(a_tilde)
    if inst.signed and spec.kind == SINGLETON:
        expected = expected_cut_exact(inst, sol.factor, sol.worst)
        w_minus = float(np.sum(np.minimum(sol.worst, 0.0)))
        ok = negative_weight_bound(expected, w_minus, sol.value)
        checks.append({"name": "shifted_signed_bound", "passed": bool(ok),
                       "lhs": expected - w_minus,
                       "rhs": 0.878 * (sol.value - w_minus), "gating": True})
    return {"checks": checks, **info}


def cmd_round(args) -> int:
    inst, spec, meta = _load_inputs(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sol = solve_robust(inst, spec, cfg)
    _stderr_time("solve", time.perf_counter() - t0)
    if not sol.report.converged:
        return EXIT_NO_CONVERGE
    rcfg = RoundConfig(seed=args.seed, trials=args.trials)
    per_trial = []
    for t in range(args.trials):
        if inst.kind == ALLEQUAL:
            A = allequal_quadratic_matrix(inst, sol.worst)
            z = sign_round_psd(A, sol.factor, RoundConfig(seed=args.seed, trials=8))
            x = allequal_round(z, inst.arity, rcfg, trial=t)
            per_trial.append(allequal_value(inst, x, sol.worst))
        else:
            y = round_cut(inst, sol.factor, rcfg, trial=t)
            value_fn = cut_value if inst.kind == MAXCUT else dicut_value
            per_trial.append(value_fn(inst, y, sol.worst))
    report = {
        "command": "round",
        **meta,
        "seed": args.seed,
        "trials": args.trials,
        "solver_value": sol.value,
        "per_trial": per_trial,
        "best": max(per_trial),
        "mean": float(np.mean(per_trial)),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.spec_kind:
        if not args.instance:
            raise _CliError("gen --spec requires --instance to anchor the set")
        inst = load_instance(args.instance)
        if args.spec_kind == "singleton":
            spec = genmod.singleton_for(inst)
        elif args.spec_kind == "box":
            spec = genmod.box_for(inst, args.width)
        elif args.spec_kind == "ellipsoid":
            spec = genmod.ellipsoid_for(inst, args.spread, seed=args.seed)
        else:
            spec = genmod.wasserstein_for(inst, args.scenarios, args.radius,
                                          seed=args.seed)
        text = spec_to_json(spec)
    else:
        if args.kind == "cycle":
            inst = genmod.cycle_instance(args.n, kind=args.graph, weight=args.weight)
        elif args.kind == "complete":
            inst = genmod.complete_instance(args.n, weight=args.weight)
        elif args.kind == "gnp":
            inst = genmod.gnp_instance(args.n, args.p, args.seed, kind=args.graph,
                                       w_low=args.w_low, w_high=args.w_high)
        elif args.kind == "allequal":
            inst = genmod.random_allequal_instance(args.n, args.k, args.m, args.seed,
                                                   w_low=args.w_low,
                                                   w_high=args.w_high)
        else:
            raise _CliError("gen: pass --kind or --spec")
        text = instance_to_json(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = []
    for n in sizes:
        inst = genmod.gnp_instance(n, 0.5, args.seed)
        spec = genmod.singleton_for(inst)
        cfg = SolverConfig(seed=args.seed, max_iter=args.max_iter)
        t0 = time.perf_counter()
        sol = solve_robust(inst, spec, cfg)
        dt = time.perf_counter() - t0
        _stderr_time(f"solve n={n} m={inst.m}", dt)
        rows.append({"n": n, "m": inst.m, "value": sol.value,
                     "iterations": sol.report.iterations,
                     "converged": sol.report.converged})
    _emit({"command": "bench", "seed": args.seed, "rows": rows}, args.out)
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance file (JSON or edge list)")
    p.add_argument("--spec", help="uncertainty-set file (default: singleton at nominal)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=16, help="rounding draws")
    p.add_argument("--rank", type=int, default=0, help="factor rank (0 = auto)")
    p.add_argument("--gap-tol", type=float, default=1e-6, dest="gap_tol")
    p.add_argument("--max-iter", type=int, default=300, dest="max_iter")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustcut",
                     description="Robust max-cut via semidefinite relaxation "
                                 "and hyperplane rounding.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="solve + round, emit a JSON report")
    _add_solver_flags(p)
    p.add_argument("--csv", help="also write a per-term contribution table")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="solve and certify against brute force")
    _add_solver_flags(p)
    p.add_argument("--samples", type=int, default=20,
                   help="feasible weight samples for the lower sandwich")
    p.add_argument("--corrupt-value", type=float, default=0.0,
                   dest="corrupt_value", help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("round", help="rounding statistics for a solved factor")
    _add_solver_flags(p)
    p.set_defaults(fn=cmd_round)

    p = sub.add_parser("gen", help="generate instances / uncertainty sets")
    p.add_argument("--kind", choices=["cycle", "complete", "gnp", "allequal"])
    p.add_argument("--spec", dest="spec_kind",
                   choices=["singleton", "box", "ellipsoid", "wasserstein"])
    p.add_argument("--instance", help="anchor instance for --spec")
    p.add_argument("--graph", choices=[MAXCUT, DICUT], default=MAXCUT)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--k", type=int, default=3, help="clause arity (allequal)")
    p.add_argument("--m", type=int, default=8, help="clause count (allequal)")
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--w-low", type=float, default=0.5, dest="w_low")
    p.add_argument("--w-high", type=float, default=1.5, dest="w_high")
    p.add_argument("--width", type=float, default=0.2, help="box half-width factor")
    p.add_argument("--spread", type=float, default=0.5, help="ellipsoid semi-axis factor")
    p.add_argument("--scenarios", type=int, default=3)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="timing smoke across sizes (times on stderr)")
    p.add_argument("--sizes", default="6,10,14")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=300, dest="max_iter")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (_CliError, ParseError, DomainError, NumericError, InfeasibleError,
            UnboundedError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
