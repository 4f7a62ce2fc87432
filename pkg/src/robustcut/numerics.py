"""Dense numerical kernels: PSD factorization, matrix square root, and a
two-phase simplex solver with exact duals.

Matrices are plain ``numpy.ndarray``; everything here is deterministic for a
fixed input (no randomized pivoting, Bland's rule throughout).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class NumericError(ArithmeticError):
    """Numerical contract violation (asymmetry, indefiniteness, ...)."""


class InfeasibleError(RuntimeError):
    """LP feasible region is empty."""


class UnboundedError(RuntimeError):
    """LP objective is unbounded below."""


# ---------------------------------------------------------------------------
# PSD factorizations
# ---------------------------------------------------------------------------

def _check_symmetric(M: np.ndarray, tol: float, what: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NumericError(f"{what}: expected a square matrix, got shape {M.shape}")
    skew = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if skew > tol:
        raise NumericError(f"{what}: not symmetric (max |M - M^T| = {skew:.3e})")
    return 0.5 * (M + M.T)


def cholesky_gram(Y: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Factor a correlation-like PSD matrix Y as U^T U with unit columns.

    Outer-product Cholesky with pivot clamping: pivots in [-tol, tol] are
    treated as exact zeros (rank deficiency), pivots below -tol raise
    :class:`NumericError` naming the offending pivot.  Columns of the returned
    U are renormalized to unit norm, so diag(U^T U) = 1 exactly.
    """
    Y = _check_symmetric(Y, tol, "cholesky_gram")
    n = Y.shape[0]
    bad = np.flatnonzero(np.abs(np.diag(Y) - 1.0) > tol)
    if bad.size:
        k = int(bad[0])
        raise NumericError(f"cholesky_gram: diag[{k}] = {Y[k, k]:.6g} != 1 within tol")
    L = np.zeros_like(Y)
    for k in range(n):
        d = Y[k, k] - float(L[k, :k] @ L[k, :k])
        if d < -tol:
            raise NumericError(
                f"cholesky_gram: matrix not positive semidefinite (pivot {k} = {d:.3e})")
        if d <= tol:
            L[k, k] = 0.0
            continue
        L[k, k] = np.sqrt(d)
        if k + 1 < n:
            L[k + 1:, k] = (Y[k + 1:, k] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
    U = L.T.copy()
    norms = np.linalg.norm(U, axis=0)
    if np.any(norms <= 0.0):
        k = int(np.flatnonzero(norms <= 0.0)[0])
        raise NumericError(f"cholesky_gram: zero column {k} (diag should be 1)")
    return U / norms


def sqrt_psd(Q: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-tol*scale, 0) are clamped to zero; anything more negative
    raises :class:`NumericError`.
    """
    Q = np.asarray(Q, dtype=float)
    scale = 1.0 + (float(np.max(np.abs(Q))) if Q.size else 0.0)
    Q = _check_symmetric(Q, max(tol, 1e-12) * scale, "sqrt_psd")
    lam, V = np.linalg.eigh(Q)
    scale = max(1.0, float(lam[-1])) if lam.size else 1.0
    if lam.size and lam[0] < -tol * scale:
        raise NumericError(f"sqrt_psd: negative eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam, 0.0, None)
    return (V * np.sqrt(lam)) @ V.T


# ---------------------------------------------------------------------------
# linear programming
# ---------------------------------------------------------------------------

SENSES = (">=", "<=", "=")


@dataclass
class LpProblem:
    """min c.x  s.t.  A x (>=|<=|=) b  componentwise per `senses`, x >= lb.

    Lower bounds default to zero; upper bounds, if needed, are expressed as
    rows so that every constraint carries an exact dual multiplier.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: Sequence[str]
    lb: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        m, n = self.A.shape
        if self.c.shape != (n,):
            raise ValueError(f"c: expected shape ({n},), got {self.c.shape}")
        if self.b.shape != (m,):
            raise ValueError(f"b: expected shape ({m},), got {self.b.shape}")
        self.senses = tuple(self.senses)
        if len(self.senses) != m:
            raise ValueError(f"senses: expected {m} entries, got {len(self.senses)}")
        for s in self.senses:
            if s not in SENSES:
                raise ValueError(f"senses: unknown sense {s!r}")
        if self.lb is None:
            self.lb = np.zeros(n)
        else:
            self.lb = np.asarray(self.lb, dtype=float)
            if self.lb.shape != (n,):
                raise ValueError(f"lb: expected shape ({n},), got {self.lb.shape}")
            if not np.all(np.isfinite(self.lb)):
                raise ValueError("lb: bounds must be finite")


@dataclass
class LpResult:
    x: np.ndarray
    value: float
    dual: np.ndarray
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv = T[row]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * piv
    basis[row] = col


def _run_simplex(T: np.ndarray, basis: np.ndarray, allowed: np.ndarray,
                 tol: float, max_pivots: int) -> int:
    """Bland-rule simplex iterations on a tableau in canonical form.

    Entering: lowest-index allowed column with reduced cost < -tol.  Leaving:
    minimum-ratio row, ties broken by lowest basis index.  Returns the pivot
    count; raises UnboundedError when a descent column has no blocking row.
    """
    m = T.shape[0] - 1
    pivots = 0
    while True:
        cand_cols = np.flatnonzero(allowed & (T[-1, :-1] < -tol))
        if cand_cols.size == 0:
            return pivots
        enter = int(cand_cols[0])
        col = T[:m, enter]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise UnboundedError(f"unbounded: column {enter} has no blocking row")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        cand = rows[ratios <= best + tol * (1.0 + abs(best))]
        leave = int(cand[np.argmin(basis[cand])])
        _pivot(T, basis, leave, enter)
        pivots += 1
        if pivots > max_pivots:
            raise NumericError(f"simplex: pivot limit {max_pivots} exceeded")


def simplex_solve(lp: LpProblem, tol: float = 1e-9) -> LpResult:
    """Solve an :class:`LpProblem` by the dense two-phase simplex method.

    Returns the Bland-first optimal vertex, the objective value, and one dual
    multiplier per input row (sign convention: duals of ``>=`` rows are >= 0,
    of ``<=`` rows <= 0, of ``=`` rows free, so that value = b.dual whenever
    lb = 0).  Strong duality holds to machine precision at the returned point.
    """
    m, n = lp.A.shape
    # shift lower bounds to zero
    b = lp.b - lp.A @ lp.lb
    # slack/surplus columns
    ns = sum(1 for s in lp.senses if s != "=")
    A_std = np.zeros((m, n + ns))
    A_std[:, :n] = lp.A
    k = n
    slack_col = [-1] * m
    for i, s in enumerate(lp.senses):
        if s == "<=":
            A_std[i, k] = 1.0
            slack_col[i] = k
            k += 1
        elif s == ">=":
            A_std[i, k] = -1.0
            slack_col[i] = k
            k += 1
    # flip rows to make rhs nonnegative
    flip = np.where(b < 0.0, -1.0, 1.0)
    A_std *= flip[:, None]
    b = b * flip
    # initial basis: a +1 slack column where available, else an artificial
    ncols = n + ns
    ident_col = np.empty(m, dtype=int)
    basis = np.empty(m, dtype=int)
    art_cols = []
    art_extra = []
    for i in range(m):
        sc = slack_col[i]
        if sc >= 0 and A_std[i, sc] > 0.5:
            basis[i] = sc
            ident_col[i] = sc
        else:
            art_extra.append(i)
    A_full = np.zeros((m, ncols + len(art_extra)))
    A_full[:, :ncols] = A_std
    for a, i in enumerate(art_extra):
        col = ncols + a
        A_full[i, col] = 1.0
        basis[i] = col
        ident_col[i] = col
        art_cols.append(col)
    total = A_full.shape[1]
    art_mask = np.zeros(total, dtype=bool)
    art_mask[art_cols] = True

    T = np.zeros((m + 1, total + 1))
    T[:m, :total] = A_full
    T[:m, -1] = b
    max_pivots = 2000 + 50 * (m + total)

    # phase 1: drive out artificials
    pivots = 0
    if art_cols:
        T[-1, :] = 0.0
        T[-1, art_cols] = 1.0
        for i in range(m):
            if art_mask[basis[i]]:
                T[-1] -= T[i]
        pivots += _run_simplex(T, basis, np.ones(total, dtype=bool), tol, max_pivots)
        feas = -T[-1, -1]
        if feas > 1e-7 * (1.0 + float(np.abs(b).sum())):
            raise InfeasibleError(f"infeasible: phase-1 residual {feas:.3e}")
        # pivot remaining zero-level artificials out where possible
        for i in range(m):
            if art_mask[basis[i]]:
                cand = np.flatnonzero(~art_mask & (np.abs(T[i, :total]) > tol))
                if cand.size:
                    _pivot(T, basis, i, int(cand[0]))
                    pivots += 1

    # phase 2: original objective
    cost = np.zeros(total)
    cost[:n] = lp.c
    T[-1, :total] = cost
    T[-1, -1] = 0.0
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            T[-1] -= cb * T[i]
    pivots += _run_simplex(T, basis, ~art_mask, tol, max_pivots)

    x_std = np.zeros(total)
    x_std[basis] = T[:m, -1]
    x = x_std[:n] + lp.lb
    value = float(lp.c @ x)
    # duals read off the reduced costs of the initial identity columns
    y_tilde = -T[-1, ident_col]
    dual = y_tilde * flip
    return LpResult(x=x, value=value, dual=dual, iterations=pivots)
