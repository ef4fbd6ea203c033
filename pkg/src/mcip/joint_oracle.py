"""Exact joint probability tables for small Markov networks.

A table is built as the normalised product of clique potentials and can then
be queried for conditional independence by direct evaluation of conditional
probabilities.  This is a brute-force reference meant for desk-scale graphs
(at most 2**20 cells); it backs the numeric checks of the mutual
independence and Markov-property relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from collections.abc import Mapping, Sequence

import numpy as np

from ._validation import check_members
from .ci import (
    CIStatement,
    MutualCIStatement,
    local_relations,
    mcip_relations,
    pairwise_relations,
    separation_relations,
    weak_union_expand,
)
from .exceptions import InputError
from .graph import UndirectedGraph, enumerate_maximal_cliques

MAX_CELLS = 2 ** 20
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CliquePotential:
    """A nonnegative factor over ``scope``; ``values`` has one axis per scope variable."""

    scope: tuple
    values: np.ndarray

    def __post_init__(self):
        scope = tuple(str(v) for v in self.scope)
        if len(set(scope)) != len(scope):
            raise InputError(f"potential scope repeats a variable: {scope}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != len(scope):
            raise InputError(
                f"potential over {scope} needs {len(scope)} axes, got {values.ndim}")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise InputError(f"potential over {scope} has negative or non-finite values")
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class JointTable:
    """A dense joint distribution; axis i of ``probabilities`` is ``variables[i]``."""

    variables: tuple
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        variables = tuple((str(name), int(k)) for name, k in self.variables)
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != tuple(k for _, k in variables):
            raise InputError(
                f"table shape {probs.shape} does not match levels "
                f"{[k for _, k in variables]}")
        if np.any(probs < 0):
            raise InputError("probabilities must be nonnegative")
        total = math.fsum(probs.ravel())
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probabilities", probs)

    @property
    def labels(self) -> tuple:
        return tuple(name for name, _ in self.variables)

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.probabilities > 0))

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown variable {label!r}") from None


def _check_cells(levels: Sequence[int]) -> None:
    cells = math.prod(levels)
    if cells > MAX_CELLS:
        raise InputError(f"joint table would have {cells} cells (limit {MAX_CELLS})")


def _normalise(raw: np.ndarray) -> np.ndarray:
    z = math.fsum(raw.ravel())
    if not z > 0:
        raise InputError("potentials multiply to zero everywhere; cannot normalise")
    return raw / z


def _expand(values: np.ndarray, scope: Sequence[str], labels: Sequence[str]) -> np.ndarray:
    """Broadcast a factor over ``scope`` to the full axis layout of ``labels``."""
    order = sorted(range(len(scope)), key=lambda i: labels.index(scope[i]))
    v = np.transpose(values, order)
    shape = [1] * len(labels)
    for i in order:
        shape[labels.index(scope[i])] = values.shape[i]
    return v.reshape(shape)


def from_clique_potentials(
    g: UndirectedGraph,
    levels: Mapping[str, int],
    potentials: Sequence[CliquePotential],
) -> JointTable:
    """Normalised product of clique potentials over ``g``.

    Each potential is multiplied into the first maximal clique (canonical
    order) containing its scope; maximal cliques left without a potential get
    an all-ones factor.
    """
    labels = list(g.vertices)
    lv = []
    for v in labels:
        if v not in levels:
            raise InputError(f"no level count for variable {v!r}")
        k = int(levels[v])
        if k < 2:
            raise InputError(f"variable {v!r} needs at least 2 levels, got {k}")
        lv.append(k)
    _check_cells(lv)
    cliques = enumerate_maximal_cliques(g)
    factors = [None] * len(cliques)
    for pot in potentials:
        scope = check_members(labels, pot.scope)
        for x, y in combinations(pot.scope, 2):
            if not g.has_edge(x, y):
                raise InputError(f"potential scope {pot.scope} is not a clique ({x}, {y} not adjacent)")
        want = tuple(int(levels[v]) for v in pot.scope)
        if pot.values.shape != want:
            raise InputError(f"potential over {pot.scope} has shape {pot.values.shape}, expected {want}")
        i = next(i for i, c in enumerate(cliques) if scope <= c)
        f = _expand(pot.values, pot.scope, labels)
        factors[i] = f if factors[i] is None else factors[i] * f
    raw = np.ones(lv)
    for f in factors:
        if f is not None:
            raw = raw * f
    return JointTable(tuple(zip(labels, lv)), _normalise(raw))


def marginalize(t: JointTable, keep) -> JointTable:
    """Sum out every variable not in ``keep``; remaining axes keep table order."""
    keep = check_members(t.labels, keep, what="variable")
    drop = tuple(i for i, name in enumerate(t.labels) if name not in keep)
    probs = t.probabilities.sum(axis=drop) if drop else t.probabilities.copy()
    variables = tuple(v for v in t.variables if v[0] in keep)
    return JointTable(variables, probs / math.fsum(np.ravel(probs)))


def _grouped(t: JointTable, groups: Sequence[frozenset]) -> np.ndarray:
    """Marginal over the union of ``groups``, one flattened axis per group."""
    axes = []
    for grp in groups:
        axes.append(sorted(t.axis(v) for v in grp))
    used = [a for grp in axes for a in grp]
    drop = tuple(i for i in range(len(t.labels)) if i not in used)
    p = t.probabilities.sum(axis=drop) if drop else t.probabilities
    remaining = [i for i in range(len(t.labels)) if i in used]
    p = np.transpose(p, [remaining.index(a) for a in used])
    sizes = [math.prod(t.variables[a][1] for a in grp) for grp in axes]
    return p.reshape(sizes)


def _conditionals(t: JointTable, blocks, given):
    """Per positive-mass conditioning cell, the joint conditional over the blocks."""
    p = _grouped(t, [*blocks, given])
    pc = p.reshape(-1, p.shape[-1]).sum(axis=0)
    for c in range(p.shape[-1]):
        if pc[c] > 0:
            yield p[..., c] / pc[c]


def check_ci(t: JointTable, s: CIStatement, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``P(A, B | C) = P(A | C) P(B | C)`` holds cellwise within ``tol``.

    Conditioning cells of zero probability are skipped.
    """
    check_members(t.labels, s.variables, what="variable")
    for cond in _conditionals(t, [s.left, s.right], s.given):
        outer = np.outer(cond.sum(axis=1), cond.sum(axis=0))
        if np.max(np.abs(cond - outer)) > tol:
            return False
    return True


def check_mcip(t: JointTable, m: MutualCIStatement, tol: float = DEFAULT_TOL) -> bool:
    """Whether the blocks' joint conditional factorises into single-block conditionals."""
    check_members(t.labels, m.variables, what="variable")
    k = len(m.blocks)
    for cond in _conditionals(t, m.blocks, m.given):
        prod = np.ones(cond.shape)
        for i in range(k):
            others = tuple(j for j in range(k) if j != i)
            prod = prod * cond.sum(axis=others, keepdims=True)
        if np.max(np.abs(cond - prod)) > tol:
            return False
    return True


def random_graph(rng: np.random.Generator, n_vertices: int, edge_prob: float = 0.5) -> UndirectedGraph:
    labels = [f"X{i + 1}" for i in range(n_vertices)]
    edges = [(x, y) for x, y in combinations(labels, 2) if rng.random() < edge_prob]
    return UndirectedGraph(labels, edges)


def random_positive_table(
    rng: np.random.Generator,
    g: UndirectedGraph,
    n_levels: int = 2,
    low: float = 0.1,
    high: float = 1.0,
) -> JointTable:
    """Factorised table with one uniform(low, high) potential per maximal clique."""
    levels = {v: n_levels for v in g.vertices}
    pots = []
    for c in enumerate_maximal_cliques(g):
        scope = g.ordered(c)
        pots.append(CliquePotential(scope, rng.uniform(low, high, size=(n_levels,) * len(scope))))
    return from_clique_potentials(g, levels, pots)


def coupled_table(g: UndirectedGraph, x: str, y: str) -> JointTable:
    """Binary table with ``x == y`` almost surely and every other variable uniform."""
    labels = list(g.vertices)
    raw = np.ones([2] * len(labels))
    ix, iy = labels.index(x), labels.index(y)
    idx = np.indices(raw.shape)
    raw[idx[ix] != idx[iy]] = 0.0
    return JointTable(tuple((v, 2) for v in labels), _normalise(raw))


@dataclass
class VerificationReport:
    graphs: int = 0
    checks: dict = field(default_factory=lambda: {
        "mcip": 0, "pairwise": 0, "local": 0, "global": 0, "mcip_implies_pairwise": 0})
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "graphs": self.graphs,
            "checks": dict(self.checks),
            "failures": list(self.failures),
            "passed": self.passed,
        }


def verify_network(g: UndirectedGraph, t: JointTable, report: VerificationReport,
                   tol: float = DEFAULT_TOL, case: str = "") -> None:
    """Check every relation family of ``g`` against ``t``; record into ``report``."""
    report.graphs += 1

    def record(kind, stmt, ok):
        report.checks[kind] += 1
        if not ok:
            report.failures.append({"case": case, "kind": kind, "statement": str(stmt)})

    for m in mcip_relations(g):
        ok = check_mcip(t, m, tol)
        record("mcip", m, ok)
        if ok:
            for s in weak_union_expand(m):
                record("mcip_implies_pairwise", s, check_ci(t, s, tol))
    for s in pairwise_relations(g):
        record("pairwise", s, check_ci(t, s, tol))
    for s in local_relations(g):
        record("local", s, check_ci(t, s, tol))
    for s in separation_relations(g):
        record("global", s, check_ci(t, s, tol))


def verify_ensemble(
    n_graphs: int = 100,
    max_vertices: int = 6,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    inject_coupling: bool = False,
) -> VerificationReport:
    """Random strictly positive binary networks checked against every relation family.

    With ``inject_coupling`` an extra path graph ``a - b - c`` whose table
    forces ``a == c`` is checked first; it must fail (negative control).
    """
    if max_vertices < 1:
        raise InputError("max_vertices must be at least 1")
    rng = np.random.default_rng(seed)
    report = VerificationReport()
    if inject_coupling:
        g = UndirectedGraph("abc", [("a", "b"), ("b", "c")])
        verify_network(g, coupled_table(g, "a", "c"), report, tol, case="coupled")
    low = min(2, max_vertices)
    for i in range(n_graphs):
        g = random_graph(rng, int(rng.integers(low, max_vertices + 1)))
        verify_network(g, random_positive_table(rng, g), report, tol, case=f"graph {i}")
    return report


__all__ = [
    "CliquePotential",
    "JointTable",
    "MAX_CELLS",
    "from_clique_potentials",
    "marginalize",
    "check_ci",
    "check_mcip",
    "random_graph",
    "random_positive_table",
    "coupled_table",
    "VerificationReport",
    "verify_network",
    "verify_ensemble",
]
