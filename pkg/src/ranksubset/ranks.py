"""Rank transform of the response.

The regression target is z = r/n - 1/2, where r_i counts the observations
with value <= y_i (ties get their maximal rank). Because z depends on y only
through its ranks, everything downstream is invariant under strictly
increasing transformations of the response.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PseudoResponse:
    z: np.ndarray          # r/n - 1/2, entries in [1/n - 1/2, 1/2]
    ranks: np.ndarray      # integer ranks in [1, n]
    sum_sq: float          # ||z||^2

    def __post_init__(self):
        self.z.setflags(write=False)
        self.ranks.setflags(write=False)

    @property
    def n(self) -> int:
        return self.z.shape[0]


def rank_response(y) -> PseudoResponse:
    """Compute maximal ranks and the centered pseudo-response.

    rank[i] = #{j : y[j] <= y[i]}, found by binary search against the sorted
    values; equal values share the rank of their last occurrence.
    """
    y = np.asarray(y, dtype=float).ravel()
    n = y.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")

    y_sorted = np.sort(y, kind="stable")
    ranks = np.searchsorted(y_sorted, y, side="right").astype(np.int64)
    z = ranks / n - 0.5
    return PseudoResponse(z=z, ranks=ranks, sum_sq=float(z @ z))
