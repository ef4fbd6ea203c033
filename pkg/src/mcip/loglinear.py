"""Hierarchical log-linear models for multi-way contingency tables.

Three fitting routes are provided:

* ``fit_mcip`` -- the closed form for a model in which the blocks of a
  partition are mutually independent given the remaining variables,
  ``m(x) = prod_i n(x_Bi, x_S) / n(x_S)^(k-1)``;
* ``fit_decomposable`` -- clique and separator marginals of a chordal graph;
* ``fit_ipf`` -- iterative proportional fitting for any generating class.

Every fit is scored with Pearson's X^2 and the deviance G^2 against the
chi-square distribution with structurally counted degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from collections.abc import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_label_set, check_disjoint, check_members, check_nonempty
from .chisquare import chi_square_sf
from .exceptions import DegenerateFitError, InputError
from .graph import UndirectedGraph, enumerate_maximal_cliques, is_decomposable


class ContingencyTable:
    """Cell counts over categorical variables.

    Parameters
    ----------
    variables : sequence of (str, sequence of str)
        Variable labels with their ordered level names; axis ``i`` of
        ``counts`` belongs to ``variables[i]``.
    counts : array_like
        Nonnegative reals, so observed and fitted tables share this type.
    """

    def __init__(self, variables, counts):
        self.variables = tuple((str(name), tuple(str(x) for x in levels)) for name, levels in variables)
        labels = [name for name, _ in self.variables]
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate variable labels in {labels}")
        for name, levels in self.variables:
            if len(set(levels)) != len(levels) or not levels:
                raise InputError(f"variable {name!r} has empty or repeated levels {levels}")
        counts = np.array(counts, dtype=float)
        if counts.shape != self.shape:
            raise InputError(f"counts have shape {counts.shape}, levels imply {self.shape}")
        if np.any(counts < 0) or not np.all(np.isfinite(counts)):
            raise InputError("counts must be finite and nonnegative")
        counts.setflags(write=False)
        self.counts = counts

    @property
    def labels(self) -> tuple:
        return tuple(name for name, _ in self.variables)

    @property
    def shape(self) -> tuple:
        return tuple(len(levels) for _, levels in self.variables)

    @property
    def levels(self) -> dict:
        """Level count per variable."""
        return {name: len(levels) for name, levels in self.variables}

    @property
    def total(self) -> float:
        return math.fsum(self.counts.ravel())

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown variable {label!r}") from None

    def with_counts(self, counts) -> "ContingencyTable":
        return ContingencyTable(self.variables, counts)

    def same_structure(self, other: "ContingencyTable") -> bool:
        return self.variables == other.variables

    def cells(self):
        """Yield ``(level names, count)`` for every cell in C order."""
        names = [levels for _, levels in self.variables]
        for idx in np.ndindex(*self.shape):
            yield tuple(names[i][j] for i, j in enumerate(idx)), float(self.counts[idx])

    def marginal(self, keep) -> "ContingencyTable":
        return marginal(self, keep)

    def _sum_keepdims(self, keep) -> np.ndarray:
        drop = tuple(i for i, name in enumerate(self.labels) if name not in keep)
        return self.counts.sum(axis=drop, keepdims=True) if drop else self.counts

    @classmethod
    def from_records(cls, records, labels: Sequence[str] | None = None,
                     levels: Mapping[str, Sequence[str]] | None = None) -> "ContingencyTable":
        """Cross-tabulate categorical observations, one row per record.

        Level order is taken from ``levels`` when given, else sorted.
        """
        if labels is None:
            labels = getattr(records, "columns", None)
        rows = records.to_numpy() if hasattr(records, "to_numpy") else records
        rows = [tuple(str(x) for x in r) for r in rows]
        if not rows:
            raise InputError("no records to tabulate")
        width = len(rows[0])
        if labels is None:
            labels = [f"V{i + 1}" for i in range(width)]
        labels = [str(x) for x in labels]
        if any(len(r) != width for r in rows) or width != len(labels):
            raise InputError("records have inconsistent widths")
        variables = []
        for i, name in enumerate(labels):
            if levels is not None and name in levels:
                lv = [str(x) for x in levels[name]]
            else:
                lv = sorted({r[i] for r in rows})
            variables.append((name, lv))
        counts = np.zeros([len(lv) for _, lv in variables])
        pos = [{x: j for j, x in enumerate(lv)} for _, lv in variables]
        for r in rows:
            try:
                counts[tuple(pos[i][x] for i, x in enumerate(r))] += 1
            except KeyError as exc:
                raise InputError(f"record {r} uses an undeclared level {exc}") from None
        return cls(variables, counts)

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.counts, other.counts)

    def __repr__(self):
        return f"ContingencyTable(variables={list(self.labels)}, shape={self.shape}, total={self.total:g})"


@dataclass(frozen=True)
class FitResult:
    """A fitted table with goodness-of-fit statistics.

    ``trace`` holds the largest generator-marginal discrepancy after each
    IPF cycle and is empty for closed-form fits.
    """

    fitted: ContingencyTable
    x2: float
    g2: float
    df: int
    p_value_x2: float
    p_value_g2: float
    iterations: int
    converged: bool
    model: str = ""
    generators: tuple = ()
    trace: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "generators": [sorted(g) for g in self.generators],
            "x2": self.x2,
            "g2": self.g2,
            "df": self.df,
            "p_value_x2": self.p_value_x2,
            "p_value_g2": self.p_value_g2,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def marginal(t: ContingencyTable, keep) -> ContingencyTable:
    """Sum the counts over every variable not in ``keep``."""
    keep = check_members(t.labels, keep, what="variable")
    drop = tuple(i for i, name in enumerate(t.labels) if name not in keep)
    counts = t.counts.sum(axis=drop) if drop else t.counts.copy()
    return ContingencyTable([v for v in t.variables if v[0] in keep], counts)


def _check_pair(observed: ContingencyTable, fitted: ContingencyTable) -> None:
    if not observed.same_structure(fitted):
        raise InputError("observed and fitted tables have different variable structure")
    if np.any(fitted.counts < 0):
        raise InputError("fitted counts must be nonnegative")


def pearson_x2(observed: ContingencyTable, fitted: ContingencyTable) -> float:
    """Pearson's statistic; cells with zero expected and zero observed count add nothing."""
    _check_pair(observed, fitted)
    o, e = observed.counts.ravel(), fitted.counts.ravel()
    zero = e == 0
    if np.any(o[zero] > 0):
        raise DegenerateFitError("a cell with positive observed count has zero fitted count")
    pos = ~zero
    return math.fsum(((o[pos] - e[pos]) ** 2 / e[pos]).tolist())


def g2(observed: ContingencyTable, fitted: ContingencyTable) -> float:
    """Deviance ``2 sum O ln(O/E)`` with ``0 ln 0 = 0``."""
    _check_pair(observed, fitted)
    o, e = observed.counts.ravel(), fitted.counts.ravel()
    pos = o > 0
    if np.any(e[pos] == 0):
        raise DegenerateFitError("a cell with positive observed count has zero fitted count")
    return 2.0 * math.fsum((o[pos] * np.log(o[pos] / e[pos])).tolist())


def _level_counts(levels) -> dict:
    if isinstance(levels, ContingencyTable):
        return levels.levels
    if isinstance(levels, Mapping):
        return {str(k): int(v) for k, v in levels.items()}
    raise InputError("levels must be a mapping of variable to level count")


def degrees_of_freedom(levels, generators: Iterable[Iterable[str]]) -> int:
    """Residual degrees of freedom of a hierarchical log-linear model.

    Number of cells minus the number of free parameters, where each distinct
    subset of a generator (the empty set included) contributes the product of
    ``levels - 1`` over its variables.
    """
    lv = _level_counts(levels)
    gens = [check_members(lv, gen, what="variable") for gen in generators]
    if not gens:
        raise InputError("need at least one generator")
    terms = set()
    for gen in gens:
        members = sorted(gen)
        for r in range(len(members) + 1):
            terms.update(frozenset(c) for c in combinations(members, r))
    params = sum(math.prod(lv[v] - 1 for v in term) for term in terms)
    return math.prod(lv.values()) - params


def _result(observed, fitted_counts, generators, model, iterations=0, converged=True, trace=()):
    fitted = observed.with_counts(fitted_counts)
    df = degrees_of_freedom(observed, generators)
    x2 = pearson_x2(observed, fitted)
    dev = g2(observed, fitted)
    if df > 0:
        p_x2, p_g2 = chi_square_sf(x2, df), chi_square_sf(dev, df)
    else:
        # saturated: the fit reproduces the data, nothing to test
        p_x2 = p_g2 = 1.0
    return FitResult(
        fitted=fitted, x2=x2, g2=dev, df=df, p_value_x2=p_x2, p_value_g2=p_g2,
        iterations=iterations, converged=converged, model=model,
        generators=tuple(frozenset(gen) for gen in generators), trace=tuple(trace))


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    num, den = np.broadcast_arrays(num, den)
    out = np.zeros(num.shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def fit_mcip(t: ContingencyTable, blocks: Sequence[Iterable[str]], given: Iterable[str] = ()) -> FitResult:
    """Closed-form fit of mutual independence of ``blocks`` given ``given``.

    ``blocks`` and ``given`` must partition the table's variables.  A cell
    whose conditioning marginal ``n(x_S)`` is zero is fitted as zero.
    """
    blks = [check_members(t.labels, b, what="variable") for b in blocks]
    s = check_members(t.labels, given, what="variable")
    if len(blks) < 2:
        raise InputError("need at least two blocks")
    check_nonempty(**{f"block {i}": b for i, b in enumerate(blks)})
    check_disjoint(given=s, **{f"block {i}": b for i, b in enumerate(blks)})
    covered = s.union(*blks)
    if covered != set(t.labels):
        raise InputError(f"blocks and given do not cover {sorted(set(t.labels) - covered)}")
    k = len(blks)
    num = np.ones(t.shape)
    for b in blks:
        num = num * t._sum_keepdims(b | s)
    den = t._sum_keepdims(s) ** (k - 1)
    generators = [b | s for b in blks]
    return _result(t, _safe_divide(num, den), generators, "mcip")


def fit_decomposable(t: ContingencyTable, g: UndirectedGraph) -> FitResult:
    """Closed-form fit of the graphical model of a chordal graph ``g``.

    Uses observed clique marginals over separator marginals along a running
    intersection ordering of the maximal cliques.
    """
    if set(g.vertices) != set(t.labels):
        raise InputError(
            f"graph vertices {sorted(g.vertices)} differ from table variables {sorted(t.labels)}")
    dec = is_decomposable(g)
    if not dec:
        raise InputError("graph is not decomposable; use fit_ipf for this model")
    total = t.total
    num = np.full(t.shape, total)
    den = np.ones(t.shape)
    for clique in dec.cliques:
        num = num * (t._sum_keepdims(clique) / total)
    for sep in dec.separators[1:]:
        if sep:
            den = den * (t._sum_keepdims(sep) / total)
    return _result(t, _safe_divide(num, den), list(dec.cliques), "decomposable")


def fit_ipf(t: ContingencyTable, generators: Sequence[Iterable[str]],
            tol: float = 1e-8, max_iter: int = 1000) -> FitResult:
    """Iterative proportional fitting from a uniform table.

    Each cycle rescales the fit to match every generator marginal in turn.
    Stops once the largest absolute marginal discrepancy after a cycle is at
    most ``tol``, or after ``max_iter`` cycles; non-convergence is reported
    through ``converged`` rather than raised.
    """
    gens = [check_members(t.labels, gen, what="variable") for gen in generators]
    if not gens:
        raise InputError("need at least one generator")
    targets = [t._sum_keepdims(gen) for gen in gens]
    fit = np.full(t.shape, t.total / t.counts.size)
    trace = []
    converged = False
    cycles = 0
    while cycles < max_iter:
        cycles += 1
        for gen, target in zip(gens, targets):
            drop = tuple(i for i, name in enumerate(t.labels) if name not in gen)
            current = fit.sum(axis=drop, keepdims=True) if drop else fit
            fit = fit * _safe_divide(target, current)
        gap = 0.0
        for gen, target in zip(gens, targets):
            drop = tuple(i for i, name in enumerate(t.labels) if name not in gen)
            current = fit.sum(axis=drop, keepdims=True) if drop else fit
            gap = max(gap, float(np.max(np.abs(current - target))))
        trace.append(gap)
        if gap <= tol:
            converged = True
            break
    return _result(t, fit, gens, "ipf", iterations=cycles, converged=converged, trace=trace)


def graph_generators(g: UndirectedGraph) -> list[frozenset]:
    """The generating class of a graphical model: its maximal cliques."""
    return enumerate_maximal_cliques(g)


class LogLinearModel(BaseEstimator):
    """Estimator wrapper around the three fitting routes.

    Parameters
    ----------
    model : {"ipf", "decomposable", "mcip"}, default="ipf"
    graph : UndirectedGraph, optional
        Required for ``"decomposable"``; for ``"ipf"`` its maximal cliques
        are the generators unless ``generators`` is given.
    generators : list of sets of str, optional
    blocks : list of sets of str, optional
        Mutually independent blocks for ``"mcip"``.
    given : set of str, optional
        Conditioning set for ``"mcip"``; defaults to every other variable.
    tol, max_iter :
        IPF stopping rule.

    Attributes
    ----------
    table_ : ContingencyTable
        The observed table.
    result_ : FitResult
    fitted_ : ContingencyTable
    x2_, g2_, df_, p_value_, n_iter_, converged_
    """

    def __init__(self, model="ipf", graph=None, generators=None, blocks=None,
                 given=None, tol=1e-8, max_iter=1000):
        self.model = model
        self.graph = graph
        self.generators = generators
        self.blocks = blocks
        self.given = given
        self.tol = tol
        self.max_iter = max_iter

    def _as_table(self, X):
        if isinstance(X, ContingencyTable):
            return X
        return ContingencyTable.from_records(X)

    def fit(self, X, y=None):
        """Fit to a ContingencyTable or to categorical records (rows = observations)."""
        table = self._as_table(X)
        if self.model == "mcip":
            if not self.blocks:
                raise InputError("model='mcip' needs blocks")
            blocks = [as_label_set(b) for b in self.blocks]
            given = (as_label_set(self.given) if self.given is not None
                     else frozenset(table.labels).difference(*blocks))
            result = fit_mcip(table, blocks, given)
        elif self.model == "decomposable":
            if self.graph is None:
                raise InputError("model='decomposable' needs a graph")
            result = fit_decomposable(table, self.graph)
        elif self.model == "ipf":
            if self.generators is not None:
                gens = self.generators
            elif self.graph is not None:
                gens = graph_generators(self.graph)
            else:
                raise InputError("model='ipf' needs generators or a graph")
            result = fit_ipf(table, gens, tol=self.tol, max_iter=self.max_iter)
        else:
            raise InputError(f"unknown model {self.model!r}")
        self.table_ = table
        self.result_ = result
        self.fitted_ = result.fitted
        self.x2_ = result.x2
        self.g2_ = result.g2
        self.df_ = result.df
        self.p_value_ = result.p_value_x2
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        return self

    def score_samples(self, X) -> np.ndarray:
        """Log probability of each categorical record under the fitted cell probabilities."""
        if not hasattr(self, "result_"):
            from sklearn.exceptions import NotFittedError
            raise NotFittedError("LogLinearModel is not fitted yet")
        probs = self.fitted_.counts / self.fitted_.total
        rows = X.to_numpy() if hasattr(X, "to_numpy") else X
        pos = [{x: j for j, x in enumerate(lv)} for _, lv in self.fitted_.variables]
        out = []
        for r in rows:
            try:
                idx = tuple(pos[i][str(x)] for i, x in enumerate(r))
            except KeyError as exc:
                raise InputError(f"record {tuple(r)} has unseen level {exc}") from None
            p = probs[idx]
            out.append(math.log(p) if p > 0 else -math.inf)
        return np.array(out)

    def score(self, X, y=None) -> float:
        """Total log-likelihood of the records."""
        return float(np.sum(self.score_samples(X)))


__all__ = [
    "ContingencyTable",
    "FitResult",
    "marginal",
    "pearson_x2",
    "g2",
    "degrees_of_freedom",
    "fit_mcip",
    "fit_decomposable",
    "fit_ipf",
    "graph_generators",
    "LogLinearModel",
]
