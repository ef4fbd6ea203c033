"""Conditional-independence tests for Gaussian graphical models.

A missing edge ``u - v`` in a Gaussian graphical model means the partial
correlation of ``u`` and ``v`` given the rest is zero.  The single-edge test
uses the deviance ``-n log(1 - r^2)`` referred to chi-square with one degree
of freedom.  For jointly normal variables pairwise conditional independence
within a set implies mutual conditional independence, which is what
``mcip_gaussian_check`` reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from collections.abc import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import (
    as_label_set,
    check_data_array,
    check_disjoint,
    check_members,
    check_probability,
    column_labels,
)
from .chisquare import chi_square_sf
from .exceptions import InputError, NumericError, SingularMatrixError

SINGULAR_RTOL = 1e-12

NORMALITY_RATIONALE = (
    "for jointly normal variables, zero partial correlation is equivalent to "
    "conditional independence, and pairwise conditional independence within "
    "a set given the same conditioning set implies mutual conditional "
    "independence")


@dataclass(frozen=True)
class DataMatrix:
    """``n`` observations of ``p`` labelled real variables."""

    variables: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        variables = tuple(str(v) for v in self.variables)
        values = check_data_array(self.values, min_rows=1)
        if values.shape[1] != len(variables):
            raise InputError(f"{len(variables)} labels for {values.shape[1]} columns")
        if len(set(variables)) != len(variables):
            raise InputError(f"duplicate variable labels in {variables}")
        values.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, X, labels: Sequence[str] | None = None) -> "DataMatrix":
        if isinstance(X, DataMatrix):
            return X
        arr = np.asarray(X.to_numpy() if hasattr(X, "to_numpy") else X, dtype=float)
        if arr.ndim != 2:
            raise InputError(f"expected a 2-D data matrix, got shape {arr.shape}")
        if labels is None:
            labels = column_labels(X, arr.shape[1])
        return cls(tuple(labels), arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def index(self, label: str) -> int:
        try:
            return self.variables.index(label)
        except ValueError:
            raise InputError(f"unknown variable {label!r}") from None


def covariance(d: DataMatrix) -> np.ndarray:
    """Sample covariance with denominator ``n - 1``."""
    if d.n < 2:
        raise InputError(f"covariance needs at least 2 observations, got {d.n}")
    centred = d.values - d.values.mean(axis=0)
    cov = centred.T @ centred / (d.n - 1)
    return (cov + cov.T) / 2.0


def invert(matrix, labels: Sequence[str] | None = None) -> np.ndarray:
    """Gauss-Jordan inversion with partial pivoting.

    A pivot smaller than ``1e-12`` times the largest absolute entry of the
    input marks the matrix as singular.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InputError(f"cannot invert a matrix of shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    aug = np.hstack([a, np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if scale == 0.0 or abs(aug[piv, col]) < SINGULAR_RTOL * scale:
            where = f" over {list(labels)}" if labels is not None else ""
            raise SingularMatrixError(f"covariance submatrix{where} is singular")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0.0:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:]


def partial_correlation(cov, u: str, v: str, given: Iterable[str] = (),
                        labels: Sequence[str] | None = None) -> float:
    """Partial correlation of ``u`` and ``v`` given ``given``.

    Computed from the inverse ``W`` of the covariance submatrix over
    ``{u, v} + given`` as ``-W[u, v] / sqrt(W[u, u] W[v, v])``.  Variables
    are named by ``labels`` (default ``V1 .. Vp``).
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InputError(f"covariance must be square, got shape {cov.shape}")
    labels = list(labels) if labels is not None else [f"V{i + 1}" for i in range(cov.shape[0])]
    if len(labels) != cov.shape[0]:
        raise InputError(f"{len(labels)} labels for a {cov.shape[0]}x{cov.shape[0]} covariance")
    u, v = str(u), str(v)
    given = check_members(labels, given, what="variable")
    check_members(labels, [u, v], what="variable")
    if u == v:
        raise InputError(f"partial correlation needs two distinct variables, got {u!r} twice")
    check_disjoint(pair=frozenset((u, v)), given=given)
    names = [u, v] + [x for x in labels if x in given]
    idx = [labels.index(x) for x in names]
    prec = invert(cov[np.ix_(idx, idx)], labels=names)
    denom = prec[0, 0] * prec[1, 1]
    if not denom > 0:
        raise SingularMatrixError(f"covariance submatrix over {names} is not positive definite")
    r = -prec[0, 1] / math.sqrt(denom)
    return float(min(1.0, max(-1.0, r)))


@dataclass(frozen=True)
class GaussianCITestResult:
    statistic: float
    df: int
    p_value: float
    partial_correlation: float
    u: str = ""
    v: str = ""
    given: tuple = ()
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "given": list(self.given),
            "n": self.n,
            "partial_correlation": self.partial_correlation,
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
        }


def ci_test_gaussian(d: DataMatrix, u: str, v: str, given: Iterable[str] = ()) -> GaussianCITestResult:
    """Deviance test of ``u _||_ v | given`` for multivariate normal data."""
    given = check_members(d.variables, given, what="variable")
    if d.n <= len(given) + 2:
        raise InputError(
            f"need more than {len(given) + 2} observations to condition on {len(given)} variables")
    r = partial_correlation(covariance(d), u, v, given, labels=d.variables)
    if abs(r) >= 1.0:
        raise NumericError(f"partial correlation of {u} and {v} is {r}; deviance is infinite")
    stat = max(0.0, -d.n * math.log1p(-r * r))
    return GaussianCITestResult(
        statistic=stat, df=1, p_value=chi_square_sf(stat, 1), partial_correlation=r,
        u=str(u), v=str(v), given=tuple(x for x in d.variables if x in given), n=d.n)


@dataclass(frozen=True)
class GaussianMCIPReport:
    blocks: tuple
    given: tuple
    alpha: float
    tests: tuple
    consistent: bool
    rationale: str = NORMALITY_RATIONALE

    def to_dict(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "given": list(self.given),
            "alpha": self.alpha,
            "tests": [t.to_dict() for t in self.tests],
            "consistent": self.consistent,
            "rationale": self.rationale,
        }


def mcip_gaussian_check(d: DataMatrix, blocks, given: Iterable[str] | None = None,
                        alpha: float = 0.05) -> GaussianMCIPReport:
    """Test every pair of ``blocks`` given ``given``; consistent iff no test rejects at ``alpha``.

    Blocks must be single variables (labels or one-element sets).  ``given``
    defaults to every other variable.
    """
    alpha = check_probability(alpha, "alpha")
    names = []
    for b in blocks:
        s = as_label_set(b)
        if len(s) != 1:
            raise InputError(f"Gaussian MCIP blocks must be single variables, got {sorted(s)}")
        names.append(next(iter(s)))
    if len(names) < 2:
        raise InputError("need at least two block variables")
    if len(set(names)) != len(names):
        raise InputError(f"repeated block variable in {names}")
    check_members(d.variables, names, what="variable")
    if given is None:
        given = frozenset(d.variables) - set(names)
    given = check_members(d.variables, given, what="variable")
    check_disjoint(blocks=frozenset(names), given=given)
    ordered = sorted(names, key=d.index)
    tests = tuple(ci_test_gaussian(d, a, b, given) for a, b in combinations(ordered, 2))
    return GaussianMCIPReport(
        blocks=tuple(ordered),
        given=tuple(x for x in d.variables if x in given),
        alpha=alpha,
        tests=tests,
        consistent=all(t.p_value > alpha for t in tests),
    )


class GaussianCITest(BaseEstimator):
    """Estimator form of :func:`ci_test_gaussian`.

    Attributes
    ----------
    result_ : GaussianCITestResult
    statistic_, p_value_, partial_correlation_, df_
    """

    def __init__(self, u=None, v=None, given=(), labels=None):
        self.u = u
        self.v = v
        self.given = given
        self.labels = labels

    def fit(self, X, y=None):
        if self.u is None or self.v is None:
            raise InputError("GaussianCITest needs both u and v")
        d = DataMatrix.from_array(X, self.labels)
        self.result_ = ci_test_gaussian(d, self.u, self.v, self.given)
        self.statistic_ = self.result_.statistic
        self.p_value_ = self.result_.p_value
        self.partial_correlation_ = self.result_.partial_correlation
        self.df_ = self.result_.df
        return self


class GaussianMCIPCheck(BaseEstimator):
    """Estimator form of :func:`mcip_gaussian_check`."""

    def __init__(self, blocks=(), given=None, alpha=0.05, labels=None):
        self.blocks = blocks
        self.given = given
        self.alpha = alpha
        self.labels = labels

    def fit(self, X, y=None):
        d = DataMatrix.from_array(X, self.labels)
        self.report_ = mcip_gaussian_check(d, self.blocks, self.given, self.alpha)
        self.consistent_ = self.report_.consistent
        self.p_values_ = np.array([t.p_value for t in self.report_.tests])
        return self


__all__ = [
    "DataMatrix",
    "covariance",
    "invert",
    "partial_correlation",
    "GaussianCITestResult",
    "ci_test_gaussian",
    "GaussianMCIPReport",
    "mcip_gaussian_check",
    "GaussianCITest",
    "GaussianMCIPCheck",
]
