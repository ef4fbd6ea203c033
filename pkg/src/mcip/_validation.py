"""Input validation helpers used across the public API."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .exceptions import InputError


def as_label_set(labels) -> frozenset:
    """Coerce a label, an iterable of labels, or None into a frozenset of strings."""
    if labels is None:
        return frozenset()
    if isinstance(labels, str):
        return frozenset([labels])
    return frozenset(str(v) for v in labels)


def check_members(known: Iterable[str], labels, what: str = "vertex") -> frozenset:
    """Return ``labels`` as a frozenset, raising if any label is not in ``known``."""
    s = as_label_set(labels)
    known = set(known)
    for label in sorted(s - known):
        raise InputError(f"unknown {what} label {label!r}")
    return s


def check_disjoint(**sets) -> None:
    """Raise if any two of the named label sets overlap."""
    names = list(sets)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            common = sets[a] & sets[b]
            if common:
                raise InputError(
                    f"sets {a!r} and {b!r} overlap on {sorted(common)}")


def check_nonempty(**sets) -> None:
    for name, s in sets.items():
        if not s:
            raise InputError(f"set {name!r} must be nonempty")


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InputError(f"{name} must lie in (0, 1), got {p}")
    return p


def check_data_array(X, min_rows: int = 2) -> np.ndarray:
    """Validate a numeric 2-D observation matrix without missing values."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise InputError(f"expected a 2-D data matrix, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise InputError(
            f"need at least {min_rows} observations, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InputError("data matrix contains missing or non-finite values")
    return arr


def column_labels(X, n_columns: int) -> list[str]:
    """Column names of a DataFrame-like ``X``, else ``V1 .. Vp``."""
    cols = getattr(X, "columns", None)
    if cols is not None:
        return [str(c) for c in cols]
    return [f"V{i + 1}" for i in range(n_columns)]
