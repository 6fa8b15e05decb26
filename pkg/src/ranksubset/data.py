"""Shared data model: datasets, index sets, sparse models, and algorithm knobs.

All containers here are frozen after construction, so they can be shared
freely across threads.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np


class SingularSystem(Exception):
    """Raised when a restricted least-squares system cannot be factorized."""


def _as_float_matrix(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class Dataset:
    """A centered design matrix with its response.

    ``x`` always has column means subtracted; the removed means are kept in
    ``column_means``. If standardization was requested, ``column_scales``
    holds the divisors (otherwise all ones).
    """

    x: np.ndarray
    y: np.ndarray
    column_means: np.ndarray
    column_scales: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def __post_init__(self):
        self.x.setflags(write=False)
        self.y.setflags(write=False)
        self.column_means.setflags(write=False)
        self.column_scales.setflags(write=False)


def make_dataset(x_raw, y, standardize: bool = False) -> Dataset:
    """Center (and optionally scale) the columns of ``x_raw``.

    Raises ValueError on dimension mismatch, non-finite entries, or n < 2.
    """
    x = _as_float_matrix(x_raw)
    y = np.asarray(y, dtype=float).ravel()
    n, p = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if p < 1:
        raise ValueError("need at least one predictor column")
    if y.shape[0] != n:
        raise ValueError(f"y has length {y.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite values")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")

    means = x.mean(axis=0)
    xc = x - means
    if standardize:
        scales = xc.std(axis=0)
        scales = np.where(scales > 0, scales, 1.0)
        xc = xc / scales
    else:
        scales = np.ones(p)
    return Dataset(x=xc, y=y.copy(), column_means=means, column_scales=scales)


class IndexSet:
    """A sorted set of column indices in [0, p)."""

    __slots__ = ("indices",)

    def __init__(self, indices=()):
        idx = tuple(sorted(int(i) for i in indices))
        if any(i < 0 for i in idx):
            raise ValueError("indices must be nonnegative")
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate indices")
        object.__setattr__(self, "indices", idx)

    def __setattr__(self, name, value):
        raise AttributeError("IndexSet is immutable")

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j):
        return j in set(self.indices)

    def __eq__(self, other):
        return isinstance(other, IndexSet) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"IndexSet({list(self.indices)})"

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(set(self.indices) | set(other.indices))

    def difference(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(set(self.indices) - set(other.indices))

    def complement(self, p: int) -> "IndexSet":
        mem = set(self.indices)
        return IndexSet(j for j in range(p) if j not in mem)


@dataclass(frozen=True)
class SparseModel:
    """An active set, its fitted coefficients, and the loss achieved there.

    Coefficients are stored densely on the active set only; entries off the
    support are implicitly zero.
    """

    active: IndexSet
    coefficients: np.ndarray
    loss: float
    converged: bool = True

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coef)
        coef.setflags(write=False)
        if coef.shape != (len(self.active),):
            raise ValueError(
                f"coefficients length {coef.shape} does not match "
                f"active set size {len(self.active)}"
            )
        if self.loss < 0:
            raise ValueError("loss must be nonnegative")

    def dense(self, p: int) -> np.ndarray:
        beta = np.zeros(p)
        beta[self.active.as_array()] = self.coefficients
        return beta


@dataclass(frozen=True)
class SplicingConfig:
    """Knobs for one splicing run at a fixed support size.

    ``k_max``, ``tau`` and ``max_iterations`` may be left as None, in which
    case the solver fills in data-dependent defaults.
    """

    support_size: int
    k_max: int | None = None
    tau: float | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if self.support_size < 1:
            raise ValueError("support_size must be positive")
        if self.k_max is not None and not (1 <= self.k_max <= self.support_size):
            raise ValueError("k_max must satisfy 1 <= k_max <= support_size")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def validate_against(self, n: int, p: int):
        if self.support_size > min(n - 1, p):
            raise ValueError(
                f"support_size {self.support_size} exceeds min(n-1, p) = {min(n - 1, p)}"
            )


def default_tau(support_size: int, n: int, p: int) -> float:
    """Threshold of order s*log(p)*loglog(n)/n, clamped away from zero."""
    if n < 3:
        raise ValueError("n >= 3 required for the loglog threshold")
    return max(0.01 * support_size * np.log(p) * np.log(np.log(n)) / n, 1e-12)


def default_k_max(support_size: int) -> int:
    return min(support_size, 5)


def default_max_iterations(initial_loss: float, tau: float) -> int:
    if initial_loss <= tau:
        return 50
    return max(50, int(np.ceil(np.log(initial_loss / tau))))


@dataclass(frozen=True)
class FitReport:
    """Full trajectory of a support-size sweep: per-size models and GIC values."""

    selected: SparseModel
    gic_path: list  # list of GicEntry, ordered by support size
    splicing_iterations: dict = field(default_factory=dict)
    wall_time: float = 0.0
