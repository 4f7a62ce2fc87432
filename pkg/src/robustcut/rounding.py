"""Randomized rounding schemes and the closed-form quantities that certify
them.

Facts used throughout (r uniform on the unit sphere, u, v, w unit vectors):

* P[sgn(u.r) != sgn(v.r)] = arccos(u.v) / pi
* P[sgn(u.r) = sgn(v.r) = sgn(w.r)]
    = 1 - (arccos(u.v) + arccos(u.w) + arccos(v.w)) / (2 pi)
* arccos(t)/pi >= (alpha/2)(1 - t) on [-1, 1] with alpha ~ 0.87856 (the
  guaranteed cut ratio; certificates below use the round 0.878 bound)
* the directed-cut analogue holds with beta ~ 0.79607 (0.796 used below)
* sign rounding of a factor U against a PSD matrix A achieves
  z^T A z >= (2/pi) <A, U^T U> in expectation, hence best-of-draws
* biased assignment x_i = +1 with prob (1 + sqrt(2/k) z_i)/2 turns a sign
  vector into a k-ary all-equal assignment with guarantee factor 0.88 k / 2^k
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import streams
from .instances import ALLEQUAL, DICUT, MAXCUT, DomainError, Instance
from .sdp import GramFactor, _check_factor

APPROX_RATIO_MAXCUT = 0.878
APPROX_RATIO_DICUT = 0.796
ALLEQUAL_COEF = 0.88
CROSSOVER_GAMMA = 0.84458  # above this relative cut size the h-based bound wins


@dataclass
class RoundConfig:
    seed: int = 0
    trials: int = 1


# ---------------------------------------------------------------------------
# hyperplane rounding
# ---------------------------------------------------------------------------

def hyperplane_round(factor: GramFactor, cfg: RoundConfig, trial: int = 0) -> np.ndarray:
    """One rounding draw: signs of the columns against a uniform hyperplane.

    Trial t of a seed uses the dedicated stream (seed, ROUND, t); ties
    (u_i . r == 0) resolve to +1.
    """
    U = np.asarray(factor.U, dtype=float)
    rng = streams.stream(cfg.seed, streams.TAG_ROUND, trial)
    r = rng.standard_normal(U.shape[0])
    nrm = np.linalg.norm(r)
    if nrm > 0.0:
        r = r / nrm
    return np.where(U.T @ r >= 0.0, 1, -1).astype(int)


def round_cut(inst: Instance, factor: GramFactor, cfg: RoundConfig,
              trial: int = 0) -> np.ndarray:
    """Round a factor to a +-1 vector for the instance's vertices.

    For dicut factors the reference column fixes the orientation: the cut is
    s_0 * s_{i+1} so the reference itself always lands on the +1 side.
    """
    if inst.kind == ALLEQUAL:
        raise DomainError("round_cut: allequal uses sign_round_psd + allequal_round")
    s = hyperplane_round(factor, cfg, trial)
    if inst.kind == DICUT:
        return (s[0] * s[1:]).astype(int)
    return s


def best_of_roundings(inst: Instance, factor: GramFactor, w: np.ndarray,
                      cfg: RoundConfig) -> tuple[np.ndarray, float, int]:
    """Best cut among cfg.trials independent rounding draws, by value at w."""
    from .instances import cut_value, dicut_value  # local to avoid cycle noise

    value_of = cut_value if inst.kind == MAXCUT else dicut_value
    best_y = None
    best_v = -np.inf
    best_t = 0
    for t in range(max(1, cfg.trials)):
        y = round_cut(inst, factor, cfg, trial=t)
        v = value_of(inst, y, w)
        if v > best_v:
            best_y, best_v, best_t = y, v, t
    return best_y, float(best_v), best_t


# ---------------------------------------------------------------------------
# exact expectations
# ---------------------------------------------------------------------------

def _pair_dots(inst: Instance, U: np.ndarray) -> np.ndarray:
    i, j = inst.endpoints()
    off = 1 if inst.kind == DICUT else 0
    return np.clip(np.einsum("ri,ri->i", U[:, i + off], U[:, j + off]), -1.0, 1.0)


def expected_cut_exact(inst: Instance, factor: GramFactor, w) -> float:
    """Exact expected cut weight of hyperplane rounding:
    sum_e w_e arccos(u_i . u_j) / pi.  Signed weights are allowed (the
    formula is linear in w)."""
    if inst.kind != MAXCUT:
        raise DomainError(f"expected_cut_exact: instance kind is {inst.kind}")
    U = _check_factor(inst, factor)
    w = np.asarray(w, dtype=float)
    return float(w @ (np.arccos(_pair_dots(inst, U)) / math.pi))


def expected_dicut_exact(inst: Instance, factor: GramFactor, w) -> float:
    """Exact expected directed-cut weight of reference-oriented rounding.

    Arc i -> j is cut when i agrees with the reference and j does not:
    P = (arccos(u0.u_j) + arccos(u_i.u_j) - arccos(u0.u_i)) / (2 pi).
    """
    if inst.kind != DICUT:
        raise DomainError(f"expected_dicut_exact: instance kind is {inst.kind}")
    U = _check_factor(inst, factor)
    w = np.asarray(w, dtype=float)
    i, j = inst.endpoints()
    u0 = U[:, 0]
    a = np.clip(U[:, i + 1].T @ u0, -1.0, 1.0)
    b = np.clip(U[:, j + 1].T @ u0, -1.0, 1.0)
    c = _pair_dots(inst, U)
    probs = (np.arccos(b) + np.arccos(c) - np.arccos(a)) / (2.0 * math.pi)
    return float(w @ probs)


def expected_allequal_exact(inst: Instance, z: np.ndarray, w) -> float:
    """Exact expected satisfied weight of the biased assignment built from a
    sign vector z: each clause holds when all literal values agree, and the
    variables flip independently."""
    if inst.kind != ALLEQUAL:
        raise DomainError(f"expected_allequal_exact: instance kind is {inst.kind}")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    k = inst.arity
    p_plus = (1.0 + math.sqrt(2.0 / k) * z) / 2.0
    total = 0.0
    for (lits, _), wc in zip(inst.clauses, w):
        q = np.array([p_plus[v] if s > 0 else 1.0 - p_plus[v] for v, s in lits])
        total += wc * (float(np.prod(q)) + float(np.prod(1.0 - q)))
    return float(total)


# ---------------------------------------------------------------------------
# ratio functions
# ---------------------------------------------------------------------------

def alpha_ratio(t):
    """(arccos(t)/pi) / ((1-t)/2): the pointwise cut ratio of hyperplane
    rounding against the relaxation term.

    Minimum ~0.87856 near t ~ -0.689; equals 1 at t in {-1, 0}; diverges to
    +inf as t -> 1 (both sides vanish, the numerator slower).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < -1.0 - 1e-12) or np.any(t > 1.0 + 1e-12):
        raise DomainError("alpha_ratio: argument outside [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    num = np.arccos(t) / math.pi
    den = (1.0 - t) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.inf)
    if out.ndim == 0:
        return float(out)
    return out


def large_cut_ratio(a_tilde: float) -> float:
    """h(A)/A with h(t) = arccos(1 - 2t)/pi: the sharper guarantee available
    when the relative relaxed cut A is large (above ~0.84458 it exceeds the
    flat 0.878... bound)."""
    a_tilde = float(a_tilde)
    if not 0.0 < a_tilde <= 1.0:
        raise DomainError(f"large_cut_ratio: relative cut size must be in (0, 1], got {a_tilde}")
    h = math.acos(1.0 - 2.0 * a_tilde) / math.pi
    return h / a_tilde


def negative_weight_bound(expected_cut: float, w_minus: float, val_rp: float,
                          ratio: float = APPROX_RATIO_MAXCUT) -> bool:
    """Shifted guarantee for signed weights: with W- the total negative
    weight, checks  (expected - W-) >= ratio * (val - W-)."""
    if w_minus > 1e-12:
        raise DomainError(f"negative_weight_bound: W- must be <= 0, got {w_minus}")
    return bool(expected_cut - w_minus >= ratio * (val_rp - w_minus) - 1e-9)


def dicut_triple_prob(ui, uj, uk) -> float:
    """Probability that three unit vectors land on the same side of a uniform
    hyperplane."""
    ui = np.asarray(ui, dtype=float)
    uj = np.asarray(uj, dtype=float)
    uk = np.asarray(uk, dtype=float)
    for name, u in (("ui", ui), ("uj", uj), ("uk", uk)):
        if abs(float(np.linalg.norm(u)) - 1.0) > 1e-6:
            raise DomainError(f"dicut_triple_prob: {name} is not a unit vector")
    s = sum(math.acos(min(1.0, max(-1.0, float(a @ b))))
            for a, b in ((ui, uj), (ui, uk), (uj, uk)))
    return 1.0 - s / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# dicut ratio search
# ---------------------------------------------------------------------------

@dataclass
class RatioSearchResult:
    ratio: float      # smallest estimated P / denom over the grid
    stderr: float     # standard error of the estimate at that pair
    index: int        # grid index attaining the minimum
    prob: float       # estimated arc probability there
    denom: float      # relaxation term (1 + u0.ui - u0.uj - ui.uj)/4 there


def feasible_pair_grid(count: int, seed: int, dim: int = 3,
                       min_denom: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Rejection-sample (u_i, u_j) pairs against a fixed reference direction
    satisfying the four sign-pattern inequalities of the directed relaxation
    (u0.ui + u0.uj + ui.uj >= -1 under all four sign flips of (ui, uj)) and a
    denominator bounded away from zero."""
    rng = streams.stream(seed, streams.TAG_SAMPLE, 0)
    u0 = np.zeros(dim)
    u0[0] = 1.0
    pairs = np.empty((count, 2, dim))
    got = 0
    while got < count:
        block = rng.standard_normal((4 * (count - got), 2, dim))
        block /= np.linalg.norm(block, axis=2, keepdims=True)
        a = block[:, 0, 0]
        b = block[:, 1, 0]
        c = np.einsum("nd,nd->n", block[:, 0], block[:, 1])
        ok = ((a + b + c >= -1.0) & (a - b - c >= -1.0) &
              (-a + b - c >= -1.0) & (-a - b + c >= -1.0) &
              ((1.0 + a - b - c) / 4.0 >= min_denom))
        take = block[ok][:count - got]
        pairs[got:got + len(take)] = take
        got += len(take)
    return u0, pairs


def uniform_arc_indicator(u0: np.ndarray, ui: np.ndarray, uj: np.ndarray,
                          draws: np.ndarray) -> np.ndarray:
    """Per-draw indicator that the arc (i -> j) is cut under plain hyperplane
    rounding: i sides with the reference, j does not."""
    s0 = draws @ u0 >= 0.0
    si = draws @ ui >= 0.0
    sj = draws @ uj >= 0.0
    return ((s0 == si) & (sj != s0)).astype(float)


def dicut_biased_ratio_search(u0: np.ndarray, pairs: np.ndarray, cfg: RoundConfig,
                              prob: Optional[Callable[..., np.ndarray]] = None,
                              ) -> RatioSearchResult:
    """Monte-Carlo minimum of  P(arc cut) / relaxation term  over a pair grid.

    ``prob`` is a pluggable per-draw indicator (defaults to the uniform
    scheme); all pairs share one block of common draws, so for the uniform
    scheme the minimum estimate sits within a few standard errors of the true
    directed-cut constant ~0.79607.
    """
    if prob is None:
        prob = uniform_arc_indicator
    u0 = np.asarray(u0, dtype=float)
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 3 or pairs.shape[1] != 2 or pairs.shape[2] != u0.shape[0]:
        raise DomainError(f"pairs: expected shape (npairs, 2, {u0.shape[0]})")
    T = max(1, cfg.trials)
    rng = streams.stream(cfg.seed, streams.TAG_MC, 0)
    draws = rng.standard_normal((T, u0.shape[0]))
    best = RatioSearchResult(np.inf, 0.0, -1, 0.0, 0.0)
    for idx in range(pairs.shape[0]):
        ui, uj = pairs[idx, 0], pairs[idx, 1]
        denom = (1.0 + float(u0 @ ui) - float(u0 @ uj) - float(ui @ uj)) / 4.0
        if denom <= 1e-12:
            continue  # excluded: relaxation term vanishes
        ind = prob(u0, ui, uj, draws)
        p_hat = float(np.mean(ind))
        ratio = p_hat / denom
        if ratio < best.ratio:
            se = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / T) / denom
            best = RatioSearchResult(ratio, se, idx, p_hat, denom)
    if best.index < 0:
        raise DomainError("ratio search: no pair with a positive relaxation term")
    return best


# ---------------------------------------------------------------------------
# allequal pipeline pieces
# ---------------------------------------------------------------------------

def sign_round_psd(A: np.ndarray, factor: GramFactor, cfg: RoundConfig) -> np.ndarray:
    """Sign vector z with  z^T A z >= (2/pi) <A, U^T U>  for PSD A.

    The bound holds in expectation over hyperplane draws, so best-of-draws
    reaches it quickly; draws continue past cfg.trials if needed, up to 100x,
    after which a NumericError is raised (practically unreachable for PSD A).
    """
    from .numerics import NumericError

    A = np.asarray(A, dtype=float)
    U = np.asarray(factor.U, dtype=float)
    n = U.shape[1]
    if A.shape != (n, n):
        raise DomainError(f"A: expected shape ({n}, {n}), got {A.shape}")
    target = (2.0 / math.pi) * float(np.sum(A * (U.T @ U)))
    scale = 1.0 + abs(target)
    trials = max(1, cfg.trials)
    best_z = None
    best_v = -np.inf
    for t in range(100 * trials):
        rng = streams.stream(cfg.seed, streams.TAG_ROUND, t)
        r = rng.standard_normal(U.shape[0])
        z = np.where(U.T @ r >= 0.0, 1.0, -1.0)
        v = float(z @ A @ z)
        if v > best_v:
            best_v, best_z = v, z
        if t + 1 >= trials and best_v >= target - 1e-9 * scale:
            return best_z.astype(int)
    raise NumericError(
        f"sign_round_psd: best value {best_v:.6g} below target {target:.6g} "
        f"after {100 * trials} draws")


def allequal_round(z: np.ndarray, k: int, cfg: RoundConfig, trial: int = 0) -> np.ndarray:
    """Biased assignment from a sign vector: x_i = +1 with probability
    (1 + sqrt(2/k) z_i)/2.  Deterministic (x = z) at k = 2."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.abs(z) == 1.0):
        raise DomainError("allequal_round: z must be a +-1 vector")
    if k < 2:
        raise DomainError(f"allequal_round: arity {k} < 2")
    p_plus = (1.0 + math.sqrt(2.0 / k) * z) / 2.0
    rng = streams.stream(cfg.seed, streams.TAG_ROUND, trial)
    draws = rng.random(len(z))
    return np.where(draws < p_plus, 1, -1).astype(int)
