"""Uncertainty sets over edge/clause weight vectors and their exact
worst-case oracles.

Four set kinds, all living in per-term weight space (dimension m = number of
edges, arcs, or clauses):

* ``singleton``    -- one fixed weight vector;
* ``polyhedral``   -- {w : A w >= b, w >= 0}, worst case by simplex LP with a
  matching explicit dual (max b.p s.t. A^T p <= coef, p >= 0) for
  cross-checking strong duality;
* ``ellipsoidal``  -- {w : (w-w0)^T Q^{-1} (w-w0) <= a}, worst case in closed
  form  w* = w0 - sqrt(a) Q coef / ||Q^{1/2} coef||  (boundary-active);
* ``wasserstein``  -- ball of radius r0 around an empirical distribution on a
  finite support, under a ground metric; the worst-case *mean* weight vector
  comes from a small transport LP over couplings.

The oracle argument ``coef`` is the per-term coefficient vector of the
(relaxed) objective, i.e. the inner problem is  min_w  coef . w  over the set.
Coefficients are nonnegative for every scheme this package produces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .instances import DomainError, Instance, ParseError
from .numerics import (InfeasibleError, LpProblem, NumericError, UnboundedError,
                       simplex_solve, sqrt_psd)

SINGLETON = "singleton"
POLYHEDRAL = "polyhedral"
ELLIPSOIDAL = "ellipsoidal"
WASSERSTEIN = "wasserstein"
SET_KINDS = (SINGLETON, POLYHEDRAL, ELLIPSOIDAL, WASSERSTEIN)

_ZERO_COEF = 1e-14


@dataclass
class UncertaintySpec:
    kind: str
    # singleton
    weights: Optional[np.ndarray] = None
    # polyhedral
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    # ellipsoidal
    w0: Optional[np.ndarray] = None
    Q: Optional[np.ndarray] = None
    a: float = 0.0
    # wasserstein
    support: Optional[np.ndarray] = None
    empirical: Optional[np.ndarray] = None
    radius: float = 0.0
    metric: Optional[np.ndarray] = None
    auto_metric: bool = False  # metric was derived as d_ij = ||s_i - s_j||_1

    def dim(self) -> int:
        """Dimension of the weight space the set lives in."""
        if self.kind == SINGLETON:
            return len(self.weights)
        if self.kind == POLYHEDRAL:
            return self.A.shape[1]
        if self.kind == ELLIPSOIDAL:
            return len(self.w0)
        return self.support.shape[1]


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


def singleton_spec(weights) -> UncertaintySpec:
    return UncertaintySpec(kind=SINGLETON, weights=np.asarray(weights, dtype=float))


def polyhedral_spec(A, b) -> UncertaintySpec:
    return UncertaintySpec(kind=POLYHEDRAL, A=np.atleast_2d(np.asarray(A, dtype=float)),
                           b=np.atleast_1d(np.asarray(b, dtype=float)))


def box_spec(lower, upper) -> UncertaintySpec:
    """Polyhedral box {l <= w <= u} as stacked rows (w >= l, -w >= -u)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m = len(lower)
    eye = np.eye(m)
    return polyhedral_spec(np.vstack([eye, -eye]), np.concatenate([lower, -upper]))


def ellipsoidal_spec(w0, Q, a) -> UncertaintySpec:
    return UncertaintySpec(kind=ELLIPSOIDAL, w0=np.asarray(w0, dtype=float),
                           Q=np.atleast_2d(np.asarray(Q, dtype=float)), a=float(a))


def wasserstein_spec(support, empirical, radius, metric="l1") -> UncertaintySpec:
    support = np.atleast_2d(np.asarray(support, dtype=float))
    auto = isinstance(metric, str)
    if auto:
        if metric != "l1":
            raise DomainError(f"metric: unknown auto-metric {metric!r}")
        metric_m = np.abs(support[:, None, :] - support[None, :, :]).sum(axis=2)
    else:
        metric_m = np.atleast_2d(np.asarray(metric, dtype=float))
    return UncertaintySpec(kind=WASSERSTEIN, support=support,
                           empirical=np.asarray(empirical, dtype=float),
                           radius=float(radius), metric=metric_m, auto_metric=auto)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_set(spec: UncertaintySpec, inst: Instance | None = None,
                 m: int | None = None) -> ValidationReport:
    """Check structural and domain invariants; returns every violation found.

    After a clean validation each set kind is a nonempty, bounded subset of
    the nonnegative orthant (distributions, for wasserstein).
    """
    v: list[str] = []
    if m is None and inst is not None:
        m = inst.m
    if spec.kind not in SET_KINDS:
        return ValidationReport(False, [f"kind: unknown set kind {spec.kind!r}"])
    dim = spec.dim()
    if m is not None and dim != m:
        v.append(f"dim: set dimension {dim} != instance term count {m}")

    if spec.kind == SINGLETON:
        if np.any(spec.weights < 0.0):
            v.append("weights: negative entry in singleton weights")
    elif spec.kind == POLYHEDRAL:
        if spec.b.shape != (spec.A.shape[0],):
            v.append(f"b: expected shape ({spec.A.shape[0]},), got {spec.b.shape}")
        else:
            # declared per-coordinate lower bounds (rows proportional to
            # +e_i) must not rely on the implicit w >= 0 clamp
            for r in range(spec.A.shape[0]):
                row = spec.A[r]
                nz = np.flatnonzero(np.abs(row) > 1e-12)
                if len(nz) == 1 and row[nz[0]] > 0.0:
                    lower = spec.b[r] / row[nz[0]]
                    if lower < -1e-9:
                        v.append(f"polyhedron: negative declared lower bound "
                                 f"{lower!r} for weight {int(nz[0])}")
            try:
                simplex_solve(LpProblem(np.zeros(dim), spec.A, spec.b,
                                        [">="] * spec.A.shape[0]))
            except InfeasibleError:
                v.append("polyhedron: empty feasible set")
            if not v:
                try:
                    simplex_solve(LpProblem(-np.ones(dim), spec.A, spec.b,
                                            [">="] * spec.A.shape[0]))
                except UnboundedError:
                    v.append("polyhedron: unbounded (no finite weight cap)")
    elif spec.kind == ELLIPSOIDAL:
        if spec.Q.shape != (dim, dim):
            v.append(f"Q: expected shape ({dim}, {dim}), got {spec.Q.shape}")
        else:
            if np.max(np.abs(spec.Q - spec.Q.T)) > 1e-9 * (1.0 + np.max(np.abs(spec.Q))):
                v.append("Q: not symmetric")
            else:
                eig = np.linalg.eigvalsh(spec.Q)
                if eig[0] <= 0.0:
                    v.append(f"Q: not positive definite (min eigenvalue {eig[0]:.3e})")
        if spec.a <= 0.0:
            v.append(f"a: radius parameter must be positive, got {spec.a}")
        if not v:
            reach = spec.w0 - np.sqrt(spec.a * np.diag(spec.Q))
            if np.any(reach < -1e-9):
                k = int(np.argmin(reach))
                v.append(f"ellipsoid: negative weights reachable at index {k} "
                         f"(w0[{k}] - sqrt(a Q[{k},{k}]) = {reach[k]:.3e})")
    else:  # wasserstein
        k = spec.support.shape[0]
        if np.any(spec.support < 0.0):
            v.append("support: negative weight entry in a support point")
        if spec.empirical.shape != (k,):
            v.append(f"empirical: expected shape ({k},), got {spec.empirical.shape}")
        else:
            if np.any(spec.empirical < 0.0):
                v.append("empirical: negative probability")
            if abs(float(spec.empirical.sum()) - 1.0) > 1e-9:
                v.append(f"empirical: probabilities sum to {float(spec.empirical.sum())!r}, not 1")
        if spec.radius < 0.0:
            v.append(f"radius: must be >= 0, got {spec.radius}")
        if spec.metric.shape != (k, k):
            v.append(f"metric: expected shape ({k}, {k}), got {spec.metric.shape}")
        else:
            if np.any(spec.metric < 0.0) or np.max(np.abs(np.diag(spec.metric))) > 1e-12:
                v.append("metric: must be nonnegative with zero diagonal")
            if np.max(np.abs(spec.metric - spec.metric.T)) > 1e-12:
                v.append("metric: not symmetric")
    return ValidationReport(not v, v)


def require_valid(spec: UncertaintySpec, inst: Instance | None = None,
                  m: int | None = None) -> None:
    rep = validate_set(spec, inst, m)
    if not rep.ok:
        raise DomainError("invalid uncertainty set: " + "; ".join(rep.violations))


# ---------------------------------------------------------------------------
# worst-case oracles
# ---------------------------------------------------------------------------

def _check_coef(spec: UncertaintySpec, coef) -> np.ndarray:
    coef = np.asarray(coef, dtype=float)
    dim = spec.dim()
    if coef.shape != (dim,):
        raise DomainError(f"coef: expected shape ({dim},), got {coef.shape}")
    if np.any(coef < -1e-9):
        raise DomainError(f"coef: negative coefficient {coef.min():.3e}")
    return np.clip(coef, 0.0, None)


def worst_case_weights(spec: UncertaintySpec, coef) -> tuple[np.ndarray, float]:
    """Exact minimizer of coef . w over the set; returns (w*, value).

    A zero coefficient vector is degenerate (every point is optimal); the
    documented representative is returned: the singleton point, the
    polyhedron's Bland-first feasible vertex, the ellipsoid center, or the
    empirical mean.
    """
    coef = _check_coef(spec, coef)
    degenerate = float(coef.max(initial=0.0)) <= _ZERO_COEF

    if spec.kind == SINGLETON:
        w = spec.weights.copy()
        return w, float(coef @ w)

    if spec.kind == POLYHEDRAL:
        res = simplex_solve(LpProblem(coef, spec.A, spec.b, [">="] * spec.A.shape[0]))
        return res.x, res.value

    if spec.kind == ELLIPSOIDAL:
        if degenerate:
            return spec.w0.copy(), 0.0
        q = spec.Q @ coef
        denom = float(np.sqrt(coef @ q))
        w = spec.w0 - np.sqrt(spec.a) * q / denom
        return w, float(coef @ w)

    # wasserstein: worst mean weights
    _, mean_w, value = worst_case_mean(spec, coef)
    return mean_w, value


def worst_case_mean(spec: UncertaintySpec, coef) -> tuple[np.ndarray, np.ndarray, float]:
    """Worst distribution inside a Wasserstein ball for a linear objective.

    Minimizes  sum_i p_i (coef . s_i)  over distributions p on the support
    whose transport distance to the empirical distribution is at most the
    radius.  Solved as an LP over couplings K >= 0 with column marginals fixed
    to the empirical weights and transport cost sum d_ij K_ij <= r0.  Returns
    (p*, mean weights, value).
    """
    if spec.kind != WASSERSTEIN:
        raise DomainError(f"worst_case_mean: set kind is {spec.kind}")
    coef = _check_coef(spec, coef)
    k = spec.support.shape[0]
    if float(coef.max(initial=0.0)) <= _ZERO_COEF:
        p = spec.empirical.copy()
        return p, spec.support.T @ p, 0.0
    costs = spec.support @ coef  # cost of landing on each support point
    nvar = k * k
    c = np.repeat(costs, k)  # K flattened row-major: index i*k + j
    rows = []
    rhs = []
    senses = []
    for j in range(k):
        row = np.zeros(nvar)
        row[j::k] = 1.0  # sum_i K_ij = empirical_j
        rows.append(row)
        rhs.append(spec.empirical[j])
        senses.append("=")
    rows.append(spec.metric.reshape(-1))
    rhs.append(spec.radius)
    senses.append("<=")
    res = simplex_solve(LpProblem(c, np.array(rows), np.array(rhs), senses))
    K = res.x.reshape(k, k)
    p = K.sum(axis=1)
    return p, spec.support.T @ p, float(costs @ p)


def dual_polyhedral_value(spec: UncertaintySpec, coef) -> float:
    """Value of the dual LP  max b.p  s.t.  A^T p <= coef, p >= 0.

    Equals the primal worst case by strong duality; computed through an
    independent simplex run for cross-checking.
    """
    if spec.kind != POLYHEDRAL:
        raise DomainError(f"dual_polyhedral_value: set kind is {spec.kind}")
    coef = _check_coef(spec, coef)
    res = simplex_solve(LpProblem(-spec.b, spec.A.T, coef, ["<="] * spec.dim()))
    return -res.value


# ---------------------------------------------------------------------------
# feasible sampling (for certification sweeps)
# ---------------------------------------------------------------------------

def sample_feasible(spec: UncertaintySpec, rng: np.random.Generator,
                    count: int) -> np.ndarray:
    """Draw `count` feasible weight vectors (mean weights for wasserstein).

    Not uniform -- just well-spread feasible points for inequality sweeps.
    """
    dim = spec.dim()
    if spec.kind == SINGLETON:
        return np.tile(spec.weights, (count, 1))

    if spec.kind == ELLIPSOIDAL:
        root = sqrt_psd(spec.Q)
        z = rng.standard_normal((count, dim))
        z /= np.maximum(np.linalg.norm(z, axis=1, keepdims=True), 1e-300)
        rho = rng.random(count) ** (1.0 / dim)
        pts = spec.w0 + np.sqrt(spec.a) * (rho[:, None] * z) @ root.T
        return np.clip(pts, 0.0, None)  # clip roundoff-level negatives

    if spec.kind == POLYHEDRAL:
        nrows = spec.A.shape[0]
        start = simplex_solve(LpProblem(np.zeros(dim), spec.A, spec.b, [">="] * nrows)).x
        out = np.empty((count, dim))
        w = start.copy()
        for t in range(count):
            for _ in range(2 * dim):  # a few hit-and-run steps between samples
                d = rng.standard_normal(dim)
                lo, hi = _chord(spec.A, spec.b, w, d)
                if hi <= lo:
                    continue
                w = w + rng.uniform(lo, hi) * d
            out[t] = np.clip(w, 0.0, None)
        return out

    # wasserstein: mix the empirical mean with random transport-feasible vertices
    out = np.empty((count, dim))
    emp_mean = spec.support.T @ spec.empirical
    for t in range(count):
        g = rng.random(spec.support.shape[0])
        _, mean_v, _ = worst_case_mean(spec, _vertex_coef(spec, g))
        lam = rng.random()
        out[t] = lam * emp_mean + (1.0 - lam) * mean_v
    return out


def _vertex_coef(spec: UncertaintySpec, g: np.ndarray) -> np.ndarray:
    """A nonnegative coefficient vector whose per-point costs equal g (up to a
    shift), used to steer the transport LP toward varied vertices."""
    # solve support @ coef ~ g in least squares, then shift into the orthant
    coef, *_ = np.linalg.lstsq(spec.support, g, rcond=None)
    coef = coef - coef.min() + 1e-3
    return coef


def _chord(A: np.ndarray, b: np.ndarray, w: np.ndarray, d: np.ndarray,
           eps: float = 1e-12) -> tuple[float, float]:
    """Step range t so that w + t d stays in {A x >= b, x >= 0}."""
    lo, hi = -np.inf, np.inf
    Ad = A @ d
    slack = A @ w - b
    for r in range(len(b)):
        if Ad[r] < -eps:
            hi = min(hi, slack[r] / -Ad[r])
        elif Ad[r] > eps:
            lo = max(lo, -slack[r] / Ad[r])
    for i in range(len(w)):
        if d[i] < -eps:
            hi = min(hi, w[i] / -d[i])
        elif d[i] > eps:
            lo = max(lo, -w[i] / d[i])
    return lo, hi


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def spec_from_dict(d: dict) -> UncertaintySpec:
    if not isinstance(d, dict):
        raise ParseError("spec: expected a JSON object")
    kind = d.get("kind")
    if kind not in SET_KINDS:
        raise ParseError(f"kind: expected one of {SET_KINDS}, got {kind!r}")
    try:
        if kind == SINGLETON:
            return singleton_spec(d["weights"])
        if kind == POLYHEDRAL:
            return polyhedral_spec(d["A"], d["b"])
        if kind == ELLIPSOIDAL:
            return ellipsoidal_spec(d["w0"], d["Q"], d["a"])
        return wasserstein_spec(d["support"], d["empirical"], d["radius"],
                                d.get("metric", "l1"))
    except KeyError as exc:
        raise ParseError(f"spec field missing: {exc.args[0]}") from exc


def parse_spec(text: str) -> UncertaintySpec:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"spec JSON: {exc}") from exc
    return spec_from_dict(d)


def spec_to_dict(spec: UncertaintySpec) -> dict:
    d: dict = {"kind": spec.kind}
    if spec.kind == SINGLETON:
        d["weights"] = spec.weights.tolist()
    elif spec.kind == POLYHEDRAL:
        d["A"] = spec.A.tolist()
        d["b"] = spec.b.tolist()
    elif spec.kind == ELLIPSOIDAL:
        d["w0"] = spec.w0.tolist()
        d["Q"] = spec.Q.tolist()
        d["a"] = spec.a
    else:
        d["support"] = spec.support.tolist()
        d["empirical"] = spec.empirical.tolist()
        d["radius"] = spec.radius
        d["metric"] = "l1" if spec.auto_metric else spec.metric.tolist()
    return d


def spec_to_json(spec: UncertaintySpec) -> str:
    return json.dumps(spec_to_dict(spec), sort_keys=True, indent=2) + "\n"


def load_spec(path: str) -> UncertaintySpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())
