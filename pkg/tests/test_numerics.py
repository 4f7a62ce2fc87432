"""Dense linear-algebra and LP kernels.

The simplex solver is cross-checked against an independent brute-force
vertex enumerator (solve square subsystems of active constraints, keep the
feasible ones) so the two routes share no code.
"""

import itertools

import numpy as np
import pytest

from robustcut import streams
from robustcut.numerics import (InfeasibleError, LpProblem, NumericError,
                                UnboundedError, cholesky_gram, simplex_solve,
                                sqrt_psd)


def vertex_enum_min(c, A, b, senses):
    """Minimize c @ x over {x >= 0, A x (senses) b} by enumerating basic
    points: every square system drawn from constraint rows and x_i = 0
    planes.  Exponential and proud of it."""
    m, n = A.shape
    rows = [(A[i], b[i]) for i in range(m)]
    rows += [(np.eye(n)[i], 0.0) for i in range(n)]
    best, best_x = np.inf, None
    for subset in itertools.combinations(range(len(rows)), n):
        M = np.array([rows[i][0] for i in subset])
        rhs = np.array([rows[i][1] for i in subset])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs)
        if np.any(x < -1e-9):
            continue
        ax = A @ x
        ok = all((ax[i] >= b[i] - 1e-9) if s == ">=" else
                 (ax[i] <= b[i] + 1e-9) if s == "<=" else
                 (abs(ax[i] - b[i]) <= 1e-9)
                 for i, s in enumerate(senses))
        if ok and c @ x < best:
            best, best_x = c @ x, x
    return best, best_x


# ---------------------------------------------------------------------------
# cholesky_gram
# ---------------------------------------------------------------------------

def test_cholesky_identity():
    U = cholesky_gram(np.eye(3))
    assert np.allclose(U.T @ U, np.eye(3), atol=1e-12)


def test_cholesky_all_ones_rank_one():
    U = cholesky_gram(np.ones((3, 3)))
    # rank-1 Gram matrix: all columns coincide
    assert np.allclose(U.T @ U, 1.0, atol=1e-10)
    assert np.allclose(U[:, 0:1], U, atol=1e-10)


def test_cholesky_round_trip_random():
    rng = streams.stream(5, streams.TAG_GEN, 0)
    for _ in range(25):
        r = int(rng.integers(1, 6))
        n = int(rng.integers(2, 9))
        U0 = rng.standard_normal((r, n))
        U0 /= np.linalg.norm(U0, axis=0)
        Y = U0.T @ U0
        U = cholesky_gram(Y)
        assert np.max(np.abs(U.T @ U - Y)) <= 1e-10
        assert np.allclose(np.linalg.norm(U, axis=0), 1.0, atol=1e-10)


def test_cholesky_rejects_indefinite():
    Y = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3, -1
    with pytest.raises(NumericError, match="pivot"):
        cholesky_gram(Y)


def test_cholesky_rejects_asymmetric_and_bad_diag():
    with pytest.raises(NumericError):
        cholesky_gram(np.array([[1.0, 0.5], [0.2, 1.0]]))
    with pytest.raises(NumericError):
        cholesky_gram(np.array([[2.0, 0.0], [0.0, 1.0]]))


# ---------------------------------------------------------------------------
# sqrt_psd
# ---------------------------------------------------------------------------

def test_sqrt_psd_basics():
    assert np.allclose(sqrt_psd(np.eye(3)), np.eye(3), atol=1e-12)
    assert np.allclose(sqrt_psd(4.0 * np.eye(2)), 2.0 * np.eye(2), atol=1e-12)
    assert np.allclose(sqrt_psd(np.diag([1.0, 4.0, 9.0])),
                       np.diag([1.0, 2.0, 3.0]), atol=1e-12)


def test_sqrt_psd_round_trip_random():
    rng = streams.stream(7, streams.TAG_GEN, 0)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        B = rng.standard_normal((n, n))
        Q = B @ B.T + 0.1 * np.eye(n)
        S = sqrt_psd(Q)
        assert np.allclose(S, S.T, atol=1e-12)
        assert np.max(np.abs(S @ S - Q)) <= 1e-10 * max(1.0, np.abs(Q).max())


def test_sqrt_psd_rejects_negative_eigenvalue():
    with pytest.raises(NumericError):
        sqrt_psd(np.array([[1.0, 0.0], [0.0, -0.5]]))


# ---------------------------------------------------------------------------
# simplex
# ---------------------------------------------------------------------------

def test_lp_hand_example():
    # min x1 + x2  s.t.  x1 + 2 x2 >= 2, x >= 0  ->  value 1 at (0, 1)
    lp = LpProblem(c=np.array([1.0, 1.0]), A=np.array([[1.0, 2.0]]),
                   b=np.array([2.0]), senses=(">=",))
    res = simplex_solve(lp)
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(res.x, [0.0, 1.0], atol=1e-10)


def test_lp_box_monotone():
    # l <= w <= u with c >= 0 -> minimizer at the lower corner
    l = np.array([0.5, 1.0, 0.0])
    u = np.array([1.5, 2.0, 1.0])
    c = np.array([2.0, 1.0, 3.0])
    A = np.vstack([np.eye(3), -np.eye(3)])
    b = np.concatenate([l, -u])
    res = simplex_solve(LpProblem(c=c, A=A, b=b, senses=(">=",) * 6))
    assert np.allclose(res.x, l, atol=1e-9)
    assert res.value == pytest.approx(c @ l)


def test_lp_infeasible():
    A = np.array([[1.0], [-1.0]])
    b = np.array([1.0, -0.0])  # w >= 1 and w <= 0
    with pytest.raises(InfeasibleError):
        simplex_solve(LpProblem(c=np.array([1.0]), A=A, b=b, senses=(">=", ">=")))


def test_lp_unbounded():
    lp = LpProblem(c=np.array([-1.0]), A=np.array([[1.0]]), b=np.array([0.0]),
                   senses=(">=",))
    with pytest.raises(UnboundedError):
        simplex_solve(lp)


def test_lp_equality_sense():
    # min x1 + 3 x2 s.t. x1 + x2 = 2 -> (2, 0)
    lp = LpProblem(c=np.array([1.0, 3.0]), A=np.array([[1.0, 1.0]]),
                   b=np.array([2.0]), senses=("=",))
    res = simplex_solve(lp)
    assert res.value == pytest.approx(2.0)
    assert np.allclose(res.x, [2.0, 0.0], atol=1e-9)


def random_bounded_lp(rng):
    """Feasible-by-construction LP: box rows keep it bounded, extra random
    >= rows pass through a known interior point."""
    n = int(rng.integers(1, 5))
    x0 = rng.uniform(0.5, 1.5, size=n)
    rows, rhs, senses = [], [], []
    for i in range(n):  # x_i <= cap (keeps the region bounded)
        e = np.zeros(n)
        e[i] = 1.0
        rows.append(e)
        rhs.append(float(x0[i] + rng.uniform(0.5, 2.0)))
        senses.append("<=")
    for _ in range(int(rng.integers(0, 3))):
        a = rng.standard_normal(n)
        rows.append(a)
        rhs.append(float(a @ x0 - rng.uniform(0.0, 1.0)))  # slack at x0
        senses.append(">=")
    c = rng.uniform(-1.0, 2.0, size=n)
    return LpProblem(c=c, A=np.array(rows), b=np.array(rhs),
                     senses=tuple(senses))


def test_lp_matches_vertex_enumeration():
    rng = streams.stream(13, streams.TAG_GEN, 0)
    for _ in range(40):
        lp = random_bounded_lp(rng)
        res = simplex_solve(lp)
        ref, _ = vertex_enum_min(lp.c, lp.A, lp.b, lp.senses)
        assert res.value == pytest.approx(ref, abs=1e-8)


def test_lp_strong_duality():
    rng = streams.stream(17, streams.TAG_GEN, 0)
    for _ in range(40):
        lp = random_bounded_lp(rng)
        res = simplex_solve(lp)
        assert res.dual @ lp.b == pytest.approx(res.value, abs=1e-8)
        # dual sign convention: >= rows yield y >= 0, <= rows y <= 0
        for i, s in enumerate(lp.senses):
            if s == ">=":
                assert res.dual[i] >= -1e-9
            elif s == "<=":
                assert res.dual[i] <= 1e-9


def test_lp_dual_feasibility():
    # reduced costs: c - A^T y >= 0 at optimum (x >= 0 problems)
    rng = streams.stream(19, streams.TAG_GEN, 0)
    for _ in range(25):
        lp = random_bounded_lp(rng)
        res = simplex_solve(lp)
        reduced = lp.c - lp.A.T @ res.dual
        assert np.all(reduced >= -1e-8)


def test_lp_rejects_inconsistent_shapes():
    with pytest.raises(ValueError):
        LpProblem(c=np.array([1.0]), A=np.array([[1.0, 2.0]]),
                  b=np.array([1.0]), senses=(">=",))
    with pytest.raises(ValueError):
        LpProblem(c=np.array([1.0, 2.0]), A=np.array([[1.0, 2.0]]),
                  b=np.array([1.0]), senses=(">=", "<="))
    with pytest.raises(ValueError):
        LpProblem(c=np.array([1.0]), A=np.array([[1.0]]), b=np.array([1.0]),
                  senses=("!!",))
