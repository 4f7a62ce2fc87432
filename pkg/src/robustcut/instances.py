"""Problem instances: weighted graphs (Max-Cut, Max-DiCut) and Max k-AllEqual
clause systems, plus cut/assignment evaluators and file formats.

JSON schema (1-based vertex ids on disk, 0-based in memory)::

    {"kind": "maxcut",  "n": 5, "edges": [[1, 2, 1.0], ...]}
    {"kind": "dicut",   "n": 3, "edges": [[1, 2, 1.0], ...]}      # [i, j, w] = arc i -> j
    {"kind": "allequal","n": 4, "clauses": [{"literals": [1, -2, 3], "weight": 1.0}, ...]}

An optional top-level ``"signed": true`` permits negative weights (used by the
shifted-bound evaluators); otherwise negative weights are a domain error.

Plain-text edge lists (``i j w`` per line, ``#`` comments) are accepted for the
two graph kinds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAXCUT = "maxcut"
DICUT = "dicut"
ALLEQUAL = "allequal"
KINDS = (MAXCUT, DICUT, ALLEQUAL)


class ParseError(ValueError):
    """Malformed instance text/JSON; message names the offending field."""


class DomainError(ValueError):
    """Structurally valid input with out-of-domain values."""


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance.

    ``edges`` holds ``(i, j, w)`` with 0-based endpoints; unordered with
    ``i < j`` for maxcut, ordered (arc ``i -> j``) for dicut.  ``clauses``
    holds ``(literals, w)`` where each literal is ``(variable, sign)`` with a
    0-based variable index and sign in {-1, +1}.  ``arity`` is the common
    clause length k (0 for the graph kinds).
    """

    n: int
    kind: str
    edges: tuple[tuple[int, int, float], ...] = ()
    clauses: tuple[tuple[tuple[tuple[int, int], ...], float], ...] = ()
    arity: int = 0
    signed: bool = False

    @property
    def m(self) -> int:
        """Number of weighted terms (edges, arcs, or clauses)."""
        return len(self.clauses) if self.kind == ALLEQUAL else len(self.edges)

    def nominal_weights(self) -> np.ndarray:
        if self.kind == ALLEQUAL:
            return np.array([w for _, w in self.clauses], dtype=float)
        return np.array([w for _, _, w in self.edges], dtype=float)

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint index arrays (graph kinds only)."""
        if self.kind == ALLEQUAL:
            raise DomainError("endpoints(): instance kind is allequal")
        i = np.array([e[0] for e in self.edges], dtype=int)
        j = np.array([e[1] for e in self.edges], dtype=int)
        return i, j


def graph_instance(n: int, kind: str, edges: Iterable[tuple[int, int, float]],
                   signed: bool = False) -> Instance:
    """Build a validated maxcut/dicut instance from 0-based edges."""
    if kind not in (MAXCUT, DICUT):
        raise DomainError(f"kind: expected maxcut or dicut, got {kind!r}")
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n: expected positive integer, got {n!r}")
    seen: set[tuple[int, int]] = set()
    out = []
    for idx, (i, j, w) in enumerate(edges):
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise DomainError(f"edges[{idx}]: endpoint out of range for n={n}")
        if i == j:
            raise DomainError(f"edges[{idx}]: self-loop ({i}, {j})")
        if kind == MAXCUT and i > j:
            i, j = j, i
        if (i, j) in seen:
            raise DomainError(f"edges[{idx}]: duplicate edge ({i}, {j})")
        seen.add((i, j))
        if w < 0 and not signed:
            raise DomainError(f"edges[{idx}]: negative weight {w} without signed flag")
        out.append((i, j, w))
    return Instance(n=n, kind=kind, edges=tuple(out), signed=signed)


def allequal_instance(n: int, clauses: Iterable[tuple[Sequence[int], float]],
                      signed: bool = False) -> Instance:
    """Build a validated allequal instance.

    ``clauses`` yields ``(literals, weight)`` with literals as signed 1-based
    variable ids (the on-disk convention): ``-3`` means "not x3".
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n: expected positive integer, got {n!r}")
    out = []
    arity = 0
    for idx, (lits, w) in enumerate(clauses):
        w = float(w)
        if w < 0 and not signed:
            raise DomainError(f"clauses[{idx}]: negative weight {w} without signed flag")
        if len(lits) < 2:
            raise DomainError(f"clauses[{idx}]: arity {len(lits)} < 2")
        if arity == 0:
            arity = len(lits)
        elif len(lits) != arity:
            raise DomainError(f"clauses[{idx}]: arity {len(lits)} != {arity} (must be constant)")
        norm = []
        vars_seen = set()
        for lit in lits:
            lit = int(lit)
            if lit == 0 or abs(lit) > n:
                raise DomainError(f"clauses[{idx}]: literal {lit} out of range for n={n}")
            v = abs(lit) - 1
            if v in vars_seen:
                raise DomainError(f"clauses[{idx}]: repeated variable {abs(lit)}")
            vars_seen.add(v)
            norm.append((v, 1 if lit > 0 else -1))
        out.append((tuple(norm), w))
    if not out:
        raise DomainError("clauses: empty clause list")
    return Instance(n=n, kind=ALLEQUAL, clauses=tuple(out), arity=arity, signed=signed)


# ---------------------------------------------------------------------------
# parsing / serialization
# ---------------------------------------------------------------------------

def instance_from_dict(d: dict) -> Instance:
    if not isinstance(d, dict):
        raise ParseError("instance: expected a JSON object")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind: expected one of {KINDS}, got {kind!r}")
    if "n" not in d:
        raise ParseError("n: missing")
    try:
        n = int(d["n"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"n: not an integer ({d['n']!r})") from exc
    signed = bool(d.get("signed", False))
    if kind == ALLEQUAL:
        raw = d.get("clauses")
        if not isinstance(raw, list):
            raise ParseError("clauses: missing or not a list")
        cl = []
        for idx, c in enumerate(raw):
            if not isinstance(c, dict) or "literals" not in c or "weight" not in c:
                raise ParseError(f"clauses[{idx}]: expected object with literals and weight")
            cl.append((c["literals"], c["weight"]))
        return allequal_instance(n, cl, signed=signed)
    raw = d.get("edges")
    if not isinstance(raw, list):
        raise ParseError("edges: missing or not a list")
    edges = []
    for idx, e in enumerate(raw):
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise ParseError(f"edges[{idx}]: expected [i, j, w]")
        i, j, w = e
        edges.append((int(i) - 1, int(j) - 1, float(w)))
    return graph_instance(n, kind, edges, signed=signed)


def parse_instance(text: str) -> Instance:
    """Parse an instance from JSON text."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"instance JSON: {exc}") from exc
    return instance_from_dict(d)


def parse_edge_list(text: str, kind: str = MAXCUT) -> Instance:
    """Parse a plain ``i j w`` edge list (1-based ids, ``#`` comments)."""
    edges = []
    n = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'i j w', got {body!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if i < 1 or j < 1:
            raise ParseError(f"line {lineno}: vertex ids are 1-based, got {i}, {j}")
        n = max(n, i, j)
        edges.append((i - 1, j - 1, w))
    if not edges:
        raise ParseError("edge list: no edges")
    return graph_instance(n, kind, edges)


def instance_to_dict(inst: Instance) -> dict:
    d: dict = {"kind": inst.kind, "n": inst.n}
    if inst.kind == ALLEQUAL:
        d["clauses"] = [
            {"literals": [s * (v + 1) for v, s in lits], "weight": w}
            for lits, w in inst.clauses
        ]
    else:
        d["edges"] = [[i + 1, j + 1, w] for i, j, w in inst.edges]
    if inst.signed:
        d["signed"] = True
    return d


def instance_to_json(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=2) + "\n"


def load_instance(path: str) -> Instance:
    """Load an instance from a ``.json`` file or a plain edge-list file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_instance(text)
    return parse_edge_list(text)


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------

def check_cut(inst: Instance, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=int)
    if y.shape != (inst.n,):
        raise DomainError(f"cut: expected shape ({inst.n},), got {y.shape}")
    if not np.all(np.abs(y) == 1):
        raise DomainError("cut: entries must be +-1")
    return y


def _weights(inst: Instance, w) -> np.ndarray:
    if w is None:
        return inst.nominal_weights()
    w = np.asarray(w, dtype=float)
    if w.shape != (inst.m,):
        raise DomainError(f"weights: expected shape ({inst.m},), got {w.shape}")
    return w


def cut_value(inst: Instance, y: np.ndarray, w=None) -> float:
    """Total weight of edges crossing the cut: sum_{(i,j)} w_ij (1 - y_i y_j)/2."""
    if inst.kind != MAXCUT:
        raise DomainError(f"cut_value: instance kind is {inst.kind}")
    y = check_cut(inst, y)
    w = _weights(inst, w)
    i, j = inst.endpoints()
    return float(np.dot(w, (1.0 - y[i] * y[j]) / 2.0))


def dicut_value(inst: Instance, y: np.ndarray, w=None) -> float:
    """Total weight of arcs i -> j with y_i = +1 and y_j = -1."""
    if inst.kind != DICUT:
        raise DomainError(f"dicut_value: instance kind is {inst.kind}")
    y = check_cut(inst, y)
    w = _weights(inst, w)
    i, j = inst.endpoints()
    return float(np.dot(w, (1.0 + y[i]) * (1.0 - y[j]) / 4.0))


def clause_satisfied(lits: tuple[tuple[int, int], ...], x: np.ndarray) -> bool:
    """A clause holds when all its literal values agree (all +1 or all -1)."""
    vals = [s * x[v] for v, s in lits]
    return all(v == vals[0] for v in vals)


def allequal_value(inst: Instance, x: np.ndarray, w=None) -> float:
    """Total weight of satisfied all-equal clauses under assignment x in {-1,+1}^n."""
    if inst.kind != ALLEQUAL:
        raise DomainError(f"allequal_value: instance kind is {inst.kind}")
    x = check_cut(inst, x)
    w = _weights(inst, w)
    total = 0.0
    for (lits, _), wc in zip(inst.clauses, w):
        if clause_satisfied(lits, x):
            total += wc
    return float(total)


def term_coefficients(inst: Instance, y: np.ndarray) -> np.ndarray:
    """Per-term contribution coefficients of a fixed cut/assignment.

    Entry e is the factor multiplying w_e in the objective: (1 - y_i y_j)/2
    for maxcut edges, the forward-arc indicator for dicut, the satisfied
    indicator for allequal.  Always in [0, 1].
    """
    y = check_cut(inst, y)
    if inst.kind == MAXCUT:
        i, j = inst.endpoints()
        return (1.0 - (y[i] * y[j]).astype(float)) / 2.0
    if inst.kind == DICUT:
        i, j = inst.endpoints()
        return (1.0 + y[i]) * (1.0 - y[j]) / 4.0
    return np.array([1.0 if clause_satisfied(lits, y) else 0.0
                     for lits, _ in inst.clauses])


def total_weight(inst: Instance, w=None) -> float:
    return float(np.sum(_weights(inst, w)))
