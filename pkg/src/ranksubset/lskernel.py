"""Least-squares core: loss, restricted fits, and the two sacrifice vectors.

The working loss is l(beta) = ||z - X beta||^2 / (2n). Under this
normalization the closed-form sacrifices are exact loss differences at a
stationary restricted fit:

    backward  xi_j   = C_jj * beta_j^2 / 2            (drop j from the active set)
    forward   zeta_j = (X_j' resid / n)^2 / (2 C_jj)  (best single-column add)

where C_jj = ||X_j||^2 / n. Zero-variance columns get rho_j = zeta_j = 0 and
are never selected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .data import Dataset, IndexSet, SingularSystem, SparseModel
from .ranks import PseudoResponse


@dataclass(frozen=True)
class CovarianceCache:
    """Per-column summaries shared by initialization and scoring."""

    gram_diag: np.ndarray   # C_jj = ||X_j||^2 / n
    q: np.ndarray           # X_j' z / n
    rho: np.ndarray         # correlation between X_j and z (0 for degenerate cols)

    def __post_init__(self):
        self.gram_diag.setflags(write=False)
        self.q.setflags(write=False)
        self.rho.setflags(write=False)


def build_cache(dataset: Dataset, pseudo: PseudoResponse) -> CovarianceCache:
    x = dataset.x
    n = dataset.n
    col_sq = np.einsum("ij,ij->j", x, x)
    gram_diag = col_sq / n
    q = x.T @ pseudo.z / n
    z_norm = np.sqrt(pseudo.sum_sq)
    denom = np.sqrt(col_sq) * z_norm
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(denom > 0, (x.T @ pseudo.z) / np.where(denom > 0, denom, 1.0), 0.0)
    return CovarianceCache(gram_diag=gram_diag, q=q, rho=rho)


def evaluate_loss(dataset: Dataset, pseudo: PseudoResponse, model: SparseModel) -> float:
    """l(beta) = ||z - X beta||^2 / (2n) for a sparse coefficient vector."""
    n = dataset.n
    if len(model.active) == 0:
        return pseudo.sum_sq / (2 * n)
    cols = model.active.as_array()
    resid = pseudo.z - dataset.x[:, cols] @ model.coefficients
    return float(resid @ resid) / (2 * n)


def fit_on_support(
    dataset: Dataset, pseudo: PseudoResponse, active: IndexSet
) -> SparseModel:
    """Restricted least squares on the given support.

    Solves C_AA beta = q_A by Cholesky; on failure retries once with a tiny
    ridge jitter, then raises SingularSystem.
    """
    n = dataset.n
    s = len(active)
    if s == 0:
        return SparseModel(active=active, coefficients=np.zeros(0),
                           loss=pseudo.sum_sq / (2 * n))
    if s > n - 1:
        raise ValueError(f"support size {s} exceeds n-1 = {n - 1}")
    cols = active.as_array()
    xa = dataset.x[:, cols]
    gram = xa.T @ xa / n
    qa = xa.T @ pseudo.z / n
    beta = _solve_spd(gram, qa)
    resid = pseudo.z - xa @ beta
    loss = float(resid @ resid) / (2 * n)
    return SparseModel(active=active, coefficients=beta, loss=loss)


def _solve_spd(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        c, low = scipy.linalg.cho_factor(gram, check_finite=False)
        return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        pass
    jitter = 1e-10 * float(np.mean(np.diag(gram)))
    if jitter <= 0:
        raise SingularSystem("restricted Gram matrix is singular")
    try:
        c, low = scipy.linalg.cho_factor(
            gram + jitter * np.eye(gram.shape[0]), check_finite=False
        )
        return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem("restricted Gram matrix is singular") from exc


def backward_sacrifices(
    dataset: Dataset,
    pseudo: PseudoResponse,
    model: SparseModel,
    cache: CovarianceCache | None = None,
) -> dict[int, float]:
    """Loss increase from zeroing each active coefficient, xi_j = C_jj beta_j^2 / 2."""
    if cache is None:
        cache = build_cache(dataset, pseudo)
    out = {}
    for j, bj in zip(model.active, model.coefficients):
        out[j] = float(cache.gram_diag[j] * bj * bj / 2.0)
    return out


def forward_sacrifices(
    dataset: Dataset,
    pseudo: PseudoResponse,
    model: SparseModel,
    cache: CovarianceCache | None = None,
) -> dict[int, float]:
    """Best achievable loss decrease from adding each inactive column.

    One residual pass: zeta_j = (X_j' resid / n)^2 / (2 C_jj), with
    zeta_j = 0 for degenerate columns.
    """
    if cache is None:
        cache = build_cache(dataset, pseudo)
    n = dataset.n
    p = dataset.p
    if len(model.active) == 0:
        resid = pseudo.z
    else:
        cols = model.active.as_array()
        resid = pseudo.z - dataset.x[:, cols] @ model.coefficients
    cov = dataset.x.T @ resid / n
    active = set(model.active)
    out = {}
    for j in range(p):
        if j in active:
            continue
        cjj = cache.gram_diag[j]
        out[j] = float(cov[j] * cov[j] / (2.0 * cjj)) if cjj > 0 else 0.0
    return out
