"""Low-rank semidefinite relaxation solver.

The relaxation replaces each +-1 variable by a unit vector u_i; the feasible
set is the elliptope {Y psd, diag Y = 1} represented through its Gram factor
U (columns u_i).  For a fixed weight vector the objective is linear in Y:

* maxcut:   sum_e w_e (1 - u_i.u_j)/2
* dicut:    sum_a w_a (1 + u0.u_i - u0.u_j - u_i.u_j)/4   (u0 = reference column)
* allequal: sum_C w_C ||sum_{i in C} s_i u_i||^2 / k^2

Block-coordinate ascent: each column is repeatedly set to the unit vector
maximizing its (linear) local term, which is monotone in the objective.  With
rank ceil(sqrt(2n)) + 1 and a few random restarts this reliably reaches the
global optimum at the scales this package targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import streams
from .instances import ALLEQUAL, DICUT, MAXCUT, DomainError, Instance


@dataclass
class GramFactor:
    """Unit-column factor U (shape rank x ncols).

    For dicut factors ``reference`` is True and column 0 is the reference
    direction u0; problem vertex i lives in column i+1.  Otherwise column i
    is vertex/variable i.
    """

    U: np.ndarray
    reference: bool = False

    @property
    def rank(self) -> int:
        return self.U.shape[0]

    @property
    def ncols(self) -> int:
        return self.U.shape[1]


@dataclass
class SolveReport:
    value: float
    iterations: int
    residual: float
    converged: bool


def default_rank(ncols: int) -> int:
    """ceil(sqrt(2 n)) + 1: above the barrier where low-rank ascent admits
    spurious local maxima."""
    return int(math.ceil(math.sqrt(2.0 * ncols))) + 1


def factor_columns(inst: Instance) -> int:
    return inst.n + 1 if inst.kind == DICUT else inst.n


def _check_factor(inst: Instance, factor: GramFactor) -> np.ndarray:
    U = np.asarray(factor.U, dtype=float)
    want = factor_columns(inst)
    if U.ndim != 2 or U.shape[1] != want:
        raise DomainError(f"factor: expected {want} columns for {inst.kind}, got shape {U.shape}")
    if inst.kind == DICUT and not factor.reference:
        raise DomainError("factor: dicut factor must carry a reference column")
    return U


def term_gram_coefficients(inst: Instance, factor: GramFactor) -> np.ndarray:
    """Per-term relaxation coefficients at a factor (the factor multiplying
    each weight in the relaxed objective).  All entries are >= 0 up to
    roundoff; they reduce to :func:`instances.term_coefficients` at integral
    factors."""
    U = _check_factor(inst, factor)
    if inst.kind == MAXCUT:
        i, j = inst.endpoints()
        dots = np.einsum("ri,ri->i", U[:, i], U[:, j])
        return (1.0 - dots) / 2.0
    if inst.kind == DICUT:
        i, j = inst.endpoints()
        u0 = U[:, 0]
        a = U[:, i + 1].T @ u0
        b = U[:, j + 1].T @ u0
        c = np.einsum("ri,ri->i", U[:, i + 1], U[:, j + 1])
        return (1.0 + a - b - c) / 4.0
    coefs = np.empty(inst.m)
    k = inst.arity
    for t, (lits, _) in enumerate(inst.clauses):
        s = sum(sgn * U[:, v] for v, sgn in lits)
        coefs[t] = float(s @ s) / (k * k)
    return coefs


def relaxed_value(inst: Instance, factor: GramFactor, w: np.ndarray) -> float:
    """Relaxation objective at (factor, w)."""
    w = np.asarray(w, dtype=float)
    return float(term_gram_coefficients(inst, factor) @ w)


def sdp_objective(inst: Instance, factor: GramFactor, w: np.ndarray) -> float:
    """Alias of :func:`relaxed_value` (the elliptope objective)."""
    return relaxed_value(inst, factor, w)


def objective_gradient(inst: Instance, factor: GramFactor, w: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the relaxed objective in the factor columns."""
    U = _check_factor(inst, factor)
    w = np.asarray(w, dtype=float)
    G = np.zeros_like(U)
    if inst.kind == MAXCUT:
        i, j = inst.endpoints()
        half = w / 2.0
        np.add.at(G.T, i, -(half[:, None] * U[:, j].T))
        np.add.at(G.T, j, -(half[:, None] * U[:, i].T))
    elif inst.kind == DICUT:
        i, j = inst.endpoints()
        q = w / 4.0
        u0 = U[:, 0]
        np.add.at(G.T, i + 1, q[:, None] * (u0[None, :] - U[:, j + 1].T))
        np.add.at(G.T, j + 1, q[:, None] * (-u0[None, :] - U[:, i + 1].T))
        G[:, 0] += (U[:, i + 1] - U[:, j + 1]) @ q
    else:
        k2 = float(inst.arity ** 2)
        for (lits, _), wc in zip(inst.clauses, w):
            s = sum(sgn * U[:, v] for v, sgn in lits)
            for v, sgn in lits:
                G[:, v] += (2.0 * wc * sgn / k2) * s
    return G


def _random_unit_columns(rank: int, ncols: int, rng: np.random.Generator) -> np.ndarray:
    U = rng.standard_normal((rank, ncols))
    U /= np.linalg.norm(U, axis=0)
    return U


def _ascent_pass_maxcut(U, nbrs, nw):
    moved = 0.0
    for i in range(len(nbrs)):
        if nbrs[i].size == 0:
            continue
        g = -(U[:, nbrs[i]] @ nw[i])
        nrm = np.linalg.norm(g)
        if nrm > 0.0:
            g /= nrm
            moved = max(moved, float(np.max(np.abs(g - U[:, i]))))
            U[:, i] = g
    return moved


def _ascent_pass_dicut(U, out_nbrs, out_w, in_nbrs, in_w):
    # column 0 is the reference; vertex i sits in column i+1
    n = U.shape[1] - 1
    moved = 0.0
    for col in range(n + 1):
        if col == 0:
            g = np.zeros(U.shape[0])
            for i in range(n):
                if out_nbrs[i].size:
                    g += U[:, i + 1] * out_w[i].sum() - U[:, out_nbrs[i] + 1] @ out_w[i]
        else:
            i = col - 1
            g = np.zeros(U.shape[0])
            if out_nbrs[i].size:
                g += U[:, 0] * out_w[i].sum() - U[:, out_nbrs[i] + 1] @ out_w[i]
            if in_nbrs[i].size:
                g += -U[:, 0] * in_w[i].sum() - U[:, in_nbrs[i] + 1] @ in_w[i]
        nrm = np.linalg.norm(g)
        if nrm > 0.0:
            g /= nrm
            moved = max(moved, float(np.max(np.abs(g - U[:, col]))))
            U[:, col] = g
    return moved


def _ascent_pass_allequal(U, var_clauses, clause_vars, clause_signs, w):
    # m_C = sum of signed member vectors, maintained incrementally
    sums = [U[:, clause_vars[t]] @ clause_signs[t] for t in range(len(clause_vars))]
    moved = 0.0
    for i in range(U.shape[1]):
        g = np.zeros(U.shape[0])
        for t, s in var_clauses[i]:
            g += (w[t] * s) * (sums[t] - s * U[:, i])
        nrm = np.linalg.norm(g)
        if nrm > 0.0:
            g /= nrm
            moved = max(moved, float(np.max(np.abs(g - U[:, i]))))
            old = U[:, i].copy()
            U[:, i] = g
            for t, s in var_clauses[i]:
                sums[t] += s * (g - old)
    return moved


def solve_elliptope_max(inst: Instance, w: np.ndarray, rank: int = 0,
                        tol: float = 1e-9, max_iter: int = 2000,
                        restarts: int = 3, seed: int = 0,
                        start: GramFactor | None = None) -> tuple[GramFactor, SolveReport]:
    """Maximize the relaxed objective over the elliptope at fixed weights.

    Runs `restarts` seeded random starts (plus an optional warm start) of
    block-coordinate ascent and keeps the best.  Converged means the relative
    objective improvement of a full sweep stayed below `tol` for two
    consecutive sweeps before `max_iter` was hit.  Identical (instance, w,
    seed, rank) inputs reproduce the factor bitwise.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (inst.m,):
        raise DomainError(f"weights: expected shape ({inst.m},), got {w.shape}")
    ncols = factor_columns(inst)
    if rank <= 0:
        rank = default_rank(ncols)

    if inst.kind == MAXCUT:
        i_idx, j_idx = inst.endpoints()
        nbrs, nw = [], []
        for v in range(inst.n):
            mask_i = i_idx == v
            mask_j = j_idx == v
            nbrs.append(np.concatenate([j_idx[mask_i], i_idx[mask_j]]))
            nw.append(np.concatenate([w[mask_i], w[mask_j]]))
        step = lambda U: _ascent_pass_maxcut(U, nbrs, nw)
    elif inst.kind == DICUT:
        i_idx, j_idx = inst.endpoints()
        out_nbrs, out_w, in_nbrs, in_w = [], [], [], []
        for v in range(inst.n):
            mask_o = i_idx == v
            mask_in = j_idx == v
            out_nbrs.append(j_idx[mask_o])
            out_w.append(w[mask_o] / 4.0)
            in_nbrs.append(i_idx[mask_in])
            in_w.append(w[mask_in] / 4.0)
        step = lambda U: _ascent_pass_dicut(U, out_nbrs, out_w, in_nbrs, in_w)
    elif inst.kind == ALLEQUAL:
        clause_vars = [np.array([v for v, _ in lits], dtype=int) for lits, _ in inst.clauses]
        clause_signs = [np.array([s for _, s in lits], dtype=float) for lits, _ in inst.clauses]
        var_clauses: list[list[tuple[int, float]]] = [[] for _ in range(inst.n)]
        for t, (lits, _) in enumerate(inst.clauses):
            for v, s in lits:
                var_clauses[v].append((t, float(s)))
        step = lambda U: _ascent_pass_allequal(U, var_clauses, clause_vars, clause_signs, w)
    else:
        raise DomainError(f"unknown instance kind {inst.kind}")

    def run(U0: np.ndarray) -> tuple[np.ndarray, SolveReport]:
        U = U0.copy()
        fac = GramFactor(U, reference=(inst.kind == DICUT))
        val = relaxed_value(inst, fac, w)
        stall = 0
        residual = 0.0
        for sweep in range(1, max_iter + 1):
            moved = step(U)
            new = relaxed_value(inst, fac, w)
            residual = abs(new - val) / max(1.0, abs(new))
            val = new
            if moved == 0.0:  # exact fixed point
                return U, SolveReport(val, sweep, 0.0, True)
            if residual < tol:
                stall += 1
                if stall >= 2:
                    return U, SolveReport(val, sweep, residual, True)
            else:
                stall = 0
        return U, SolveReport(val, max_iter, residual, False)

    starts: list[np.ndarray] = []
    if start is not None:
        U0 = _check_factor(inst, start).copy()
        if U0.shape[0] != rank:
            pad = np.zeros((rank, ncols))
            r = min(rank, U0.shape[0])
            pad[:r] = U0[:r]
            nrm = np.linalg.norm(pad, axis=0)
            dead = nrm == 0.0
            if np.any(dead):  # column lost all mass in truncation
                pad[0, dead] = 1.0
                nrm[dead] = 1.0
            U0 = pad / nrm
        starts.append(U0)
    for r in range(restarts):
        rng = streams.stream(seed, streams.TAG_SOLVER_INIT, r)
        starts.append(_random_unit_columns(rank, ncols, rng))
    if not starts:
        rng = streams.stream(seed, streams.TAG_SOLVER_INIT, 0)
        starts.append(_random_unit_columns(rank, ncols, rng))

    best_U = None
    best_rep = None
    for U0 in starts:
        U, rep = run(U0)
        if best_rep is None or rep.value > best_rep.value:
            best_U, best_rep = U, rep
    assert best_U is not None and best_rep is not None
    return GramFactor(best_U, reference=(inst.kind == DICUT)), best_rep
