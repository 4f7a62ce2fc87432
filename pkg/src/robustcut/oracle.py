"""Ground-truth oracles and certification.

``brute_force_robust`` enumerates every cut/assignment (2^(n-1) after fixing
the first coordinate where the objective allows it) and calls the exact inner
minimization oracles per candidate -- no shortcuts, no shared math with the
solvers it certifies beyond the uncertainty oracles themselves.

``certify_sandwich`` verifies, for a solved saddle and its rounding, the
two-sided guarantee:

* lower half:   exact expected rounded value at the worst (and sampled
  feasible) weights >= ratio * brute-force robust value,
* upper half:   the worst-case value of any fixed rounded solution never
  exceeds the brute-force robust value,

plus the relaxation bound (solver value >= brute force) and consistency of
the reported saddle value with a fresh inner minimization at the factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import streams
from .instances import (ALLEQUAL, DICUT, MAXCUT, DomainError, Instance,
                        term_coefficients)
from .robust import SaddleSolution, inner_worst
from .rounding import (ALLEQUAL_COEF, APPROX_RATIO_DICUT, APPROX_RATIO_MAXCUT,
                       RoundConfig, allequal_round, expected_allequal_exact,
                       expected_cut_exact, expected_dicut_exact, round_cut,
                       sign_round_psd)
from .sdp import GramFactor, term_gram_coefficients
from .uncertainty import (SINGLETON, WASSERSTEIN, UncertaintySpec,
                          require_valid, sample_feasible, worst_case_mean,
                          worst_case_weights)

BRUTE_FORCE_LIMIT = 24


@dataclass
class OracleResult:
    best: np.ndarray      # maximizing cut/assignment
    worst: np.ndarray     # inner minimizing weights at the maximizer
    value: float          # max-min value
    enumerated: int


def enumerate_signs(n: int, fix_first: bool) -> Iterator[np.ndarray]:
    """All +-1 vectors of length n (first coordinate pinned to +1 when the
    objective is flip-symmetric)."""
    free = n - 1 if fix_first else n
    y = np.empty(n, dtype=int)
    for bits in range(1 << free):
        if fix_first:
            y[0] = 1
            for i in range(free):
                y[i + 1] = 1 if (bits >> i) & 1 else -1
        else:
            for i in range(free):
                y[i] = 1 if (bits >> i) & 1 else -1
        yield y


def brute_force_robust(inst: Instance, spec: UncertaintySpec) -> OracleResult:
    """Exact robust optimum by enumeration: max over cuts of the exact inner
    minimum.  Guarded at n <= 24."""
    if inst.n > BRUTE_FORCE_LIMIT:
        raise DomainError(f"brute force: n = {inst.n} exceeds limit {BRUTE_FORCE_LIMIT}")
    require_valid(spec, inst)
    fix_first = inst.kind != DICUT  # directed objective is not flip-symmetric
    best_v = -np.inf
    best_y = None
    best_w = None
    count = 0
    for y in enumerate_signs(inst.n, fix_first):
        count += 1
        coef = term_coefficients(inst, y)
        if spec.kind == WASSERSTEIN:
            _, w, v = worst_case_mean(spec, coef)
        else:
            w, v = worst_case_weights(spec, coef)
        if v > best_v:
            best_v = v
            best_y = y.copy()
            best_w = w
    return OracleResult(best=best_y, worst=best_w, value=float(best_v),
                        enumerated=count)


def mc_expected_cut(inst: Instance, factor: GramFactor, w, trials: int,
                    seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the rounded cut value over
    `trials` hyperplane draws (trial t = row t of the seeded draw block)."""
    if inst.kind not in (MAXCUT, DICUT):
        raise DomainError(f"mc_expected_cut: instance kind is {inst.kind}")
    U = np.asarray(factor.U, dtype=float)
    w = np.asarray(w, dtype=float)
    rng = streams.stream(seed, streams.TAG_MC, 1)
    vals = np.empty(trials)
    i, j = inst.endpoints()
    done = 0
    chunk = max(1, min(trials, 1 << 14))
    while done < trials:
        b = min(chunk, trials - done)
        R = rng.standard_normal((b, U.shape[0]))
        S = np.where(R @ U >= 0.0, 1.0, -1.0)
        if inst.kind == MAXCUT:
            cross = (1.0 - S[:, i] * S[:, j]) / 2.0
        else:
            Y = S[:, 1:] * S[:, :1]  # orient by the reference column
            cross = (1.0 + Y[:, i]) * (1.0 - Y[:, j]) / 4.0
        vals[done:done + b] = cross @ w
        done += b
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def mc_allequal_value(inst: Instance, z: np.ndarray, w, trials: int,
                      seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo mean/stderr of the satisfied weight under the biased
    assignment scheme seeded from sign vector z."""
    if inst.kind != ALLEQUAL:
        raise DomainError(f"mc_allequal_value: instance kind is {inst.kind}")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    k = inst.arity
    p_plus = (1.0 + math.sqrt(2.0 / k) * z) / 2.0
    rng = streams.stream(seed, streams.TAG_MC, 1)
    draws = rng.random((trials, inst.n))
    X = np.where(draws < p_plus, 1.0, -1.0)
    vals = np.zeros(trials)
    for (lits, _), wc in zip(inst.clauses, w):
        vidx = np.array([v for v, _ in lits])
        sgns = np.array([s for _, s in lits], dtype=float)
        lit_vals = X[:, vidx] * sgns
        sat = np.abs(lit_vals.sum(axis=1)) == k
        vals += wc * sat
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    lhs: float
    rhs: float


@dataclass
class SandwichReport:
    ok: bool
    ratio: float
    solver_value: float
    oracle_value: float
    checks: list[Check] = field(default_factory=list)


def guarantee_ratio(inst: Instance) -> float:
    if inst.kind == MAXCUT:
        return APPROX_RATIO_MAXCUT
    if inst.kind == DICUT:
        return APPROX_RATIO_DICUT
    return ALLEQUAL_COEF * inst.arity / (2.0 ** inst.arity)


def certify_sandwich(inst: Instance, spec: UncertaintySpec, sol: SaddleSolution,
                     cuts: Optional[list[np.ndarray]] = None, samples: int = 20,
                     seed: int = 0, tol: float = 1e-6) -> SandwichReport:
    """Certify the approximation sandwich around a solved saddle.

    Every inequality is checked with exact (closed-form or LP) quantities;
    nothing here depends on Monte-Carlo noise or wall-clock.
    """
    oracle = brute_force_robust(inst, spec)
    ratio = guarantee_ratio(inst)
    checks: list[Check] = []
    scale = max(1.0, abs(oracle.value))

    # relaxation bound: the relaxed saddle dominates the exact one
    checks.append(Check("relaxation_bound", sol.value >= oracle.value - tol * scale,
                        sol.value, oracle.value))

    # saddle consistency: reported value equals a fresh inner minimization
    _, fresh, _ = inner_worst(inst, spec, sol.factor)
    checks.append(Check("saddle_consistency", abs(fresh - sol.value) <= tol * scale,
                        sol.value, fresh))

    rng = streams.stream(seed, streams.TAG_SAMPLE, 7)
    exact_tol = 1e-9 * scale

    if inst.kind == ALLEQUAL:
        A = allequal_quadratic_matrix(inst, sol.worst)
        z = sign_round_psd(A, sol.factor, RoundConfig(seed=seed, trials=32))
        expected = expected_allequal_exact(inst, z, sol.worst)
        checks.append(Check("lower_sandwich[worst]",
                            expected >= ratio * oracle.value - exact_tol,
                            expected, ratio * oracle.value))
        test_points = [allequal_round(z, inst.arity, RoundConfig(seed=seed), trial=t)
                       for t in range(4)] if cuts is None else cuts
    else:
        expected_fn = expected_cut_exact if inst.kind == MAXCUT else expected_dicut_exact
        weights = [("worst", sol.worst)]
        if spec.kind != SINGLETON and samples > 0:
            for s, wv in enumerate(sample_feasible(spec, rng, samples)):
                weights.append((f"sample{s}", wv))
        for label, wv in weights:
            expected = expected_fn(inst, sol.factor, wv)
            checks.append(Check(f"lower_sandwich[{label}]",
                                expected >= ratio * oracle.value - exact_tol,
                                expected, ratio * oracle.value))
        if cuts is None:
            test_points = [round_cut(inst, sol.factor, RoundConfig(seed=seed), trial=t)
                           for t in range(4)]
        else:
            test_points = cuts

    # upper half: the worst case of any fixed rounded solution is dominated
    # by the robust optimum
    for t, y in enumerate(test_points):
        coef = term_coefficients(inst, y)
        if spec.kind == WASSERSTEIN:
            _, _, v = worst_case_mean(spec, coef)
        else:
            _, v = worst_case_weights(spec, coef)
        checks.append(Check(f"upper_sandwich[round{t}]",
                            v <= oracle.value + exact_tol, v, oracle.value))

    ok = all(c.passed for c in checks)
    return SandwichReport(ok=ok, ratio=ratio, solver_value=sol.value,
                          oracle_value=oracle.value, checks=checks)


def allequal_quadratic_matrix(inst: Instance, w) -> np.ndarray:
    """PSD matrix A = sum_C w_C a_C a_C^T whose quadratic form counts signed
    clause agreement: z^T A z = sum_C w_C (sum_{i in C} s_i z_i)^2."""
    if inst.kind != ALLEQUAL:
        raise DomainError(f"allequal_quadratic_matrix: instance kind is {inst.kind}")
    w = np.asarray(w, dtype=float)
    A = np.zeros((inst.n, inst.n))
    for (lits, _), wc in zip(inst.clauses, w):
        a = np.zeros(inst.n)
        for v, s in lits:
            a[v] = s
        A += wc * np.outer(a, a)
    return A
