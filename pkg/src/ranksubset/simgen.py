"""Seeded synthetic data generation for the recovery and runtime studies.

Predictors are multivariate Gaussian with one of three covariance
structures (independent, AR-type rho^|i-j|, equicorrelated), responses come
from a linear or exponential link with Gaussian or Cauchy additive errors.
Sampling uses factor constructions, never a p x p Cholesky, so p = 2000 is
cheap. Replication substreams are derived from (seed, replication) via a
counter-based generator, so parallel replication stays reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, IndexSet, make_dataset

COVARIANCES = ("independent", "exponential", "equicorrelated")
LINKS = ("linear", "exponential")
ERRORS = ("gaussian", "cauchy")


@dataclass(frozen=True)
class SimDesign:
    n: int
    p: int
    sparsity: int
    signal: float = 2.0
    covariance: str = "independent"
    rho: float = 0.0
    link: str = "linear"
    error: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.covariance not in COVARIANCES:
            raise ValueError(f"unknown covariance {self.covariance!r}")
        if self.link not in LINKS:
            raise ValueError(f"unknown link {self.link!r}")
        if self.error not in ERRORS:
            raise ValueError(f"unknown error {self.error!r}")
        if self.sparsity > self.p:
            raise ValueError("sparsity exceeds p")
        if self.covariance == "exponential" and not (-1 < self.rho < 1):
            raise ValueError("exponential structure needs rho in (-1, 1)")
        if self.covariance == "equicorrelated" and not (0 <= self.rho < 1):
            raise ValueError("equicorrelated factor construction needs rho in [0, 1)")


@dataclass(frozen=True)
class GroundTruth:
    beta_support: IndexSet
    beta_values: np.ndarray

    def dense(self, p: int) -> np.ndarray:
        b = np.zeros(p)
        b[self.beta_support.as_array()] = self.beta_values
        return b


def true_support(p: int, sparsity: int) -> IndexSet:
    """Deterministic layout of the nonzero coefficients.

    For p >= 200, the supports are equally spaced between the 10th and 200th
    columns (1-based, endpoints included). For smaller p the span shrinks
    proportionally, widening to the whole axis when it cannot hold enough
    distinct indices.
    """
    if sparsity > p:
        raise ValueError("sparsity exceeds p")
    if sparsity < 1:
        raise ValueError("sparsity must be positive")
    if p >= 200:
        lo, hi = 10, 200
    else:
        lo = max(1, round(p / 20))
        hi = max(lo, round(p / 5))
    if hi - lo + 1 < sparsity:
        lo, hi = 1, p
    if sparsity == 1:
        pos = np.array([lo])
    else:
        pos = np.round(np.linspace(lo, hi, sparsity)).astype(int)
    # rounding can collide for dense layouts; push duplicates right
    for i in range(1, len(pos)):
        if pos[i] <= pos[i - 1]:
            pos[i] = pos[i - 1] + 1
    if pos[-1] > p:
        raise ValueError("cannot place distinct support indices")
    return IndexSet(pos - 1)  # to 0-based


def make_truth(design: SimDesign) -> GroundTruth:
    support = true_support(design.p, design.sparsity)
    values = np.full(design.sparsity, design.signal)
    return GroundTruth(beta_support=support, beta_values=values)


def replication_rng(seed: int, replication: int = 0) -> np.random.Generator:
    """Counter-based substream for one replication of one design."""
    return np.random.Generator(np.random.Philox(key=[seed, replication]))


def sample_design(design: SimDesign, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw the raw n x p Gaussian predictor matrix for one replication."""
    if rng is None:
        rng = replication_rng(design.seed)
    n, p, rho = design.n, design.p, design.rho
    if design.covariance == "independent":
        return rng.standard_normal((n, p))
    if design.covariance == "exponential":
        # AR(1) recursion: x_1 ~ N(0,1); x_j = rho x_{j-1} + sqrt(1-rho^2) e_j
        e = rng.standard_normal((n, p))
        x = np.empty((n, p))
        x[:, 0] = e[:, 0]
        scale = np.sqrt(1.0 - rho * rho)
        for j in range(1, p):
            x[:, j] = rho * x[:, j - 1] + scale * e[:, j]
        return x
    # equicorrelated: common factor, Sigma = rho 11' + (1-rho) I
    common = rng.standard_normal((n, 1))
    e = rng.standard_normal((n, p))
    return np.sqrt(rho) * common + np.sqrt(1.0 - rho) * e


def sample_error(error: str, size: int, rng: np.random.Generator) -> np.ndarray:
    if error == "gaussian":
        return rng.standard_normal(size)
    return rng.standard_cauchy(size)


def sample_response(x_row, truth: GroundTruth, link: str, error: str,
                    rng: np.random.Generator) -> float:
    """One response from the single index model on one predictor row."""
    index = float(np.asarray(x_row)[truth.beta_support.as_array()] @ truth.beta_values)
    e = float(sample_error(error, 1, rng)[0])
    if link == "linear":
        return index + e
    return float(np.exp(index)) + e


def generate_instance(design: SimDesign, replication: int = 0
                      ) -> tuple[Dataset, GroundTruth]:
    """One full (X, y) instance; bitwise reproducible from (design, replication)."""
    rng = replication_rng(design.seed, replication)
    truth = make_truth(design)
    x = sample_design(design, rng)
    index = x[:, truth.beta_support.as_array()] @ truth.beta_values
    e = sample_error(design.error, design.n, rng)
    if design.link == "linear":
        y = index + e
    else:
        y = np.exp(index) + e
    return make_dataset(x, y), truth
