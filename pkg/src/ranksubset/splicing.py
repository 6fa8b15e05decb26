"""Splicing solver for the L0-constrained rank regression at a fixed support size.

Starting from the columns most correlated with the pseudo-response, each
outer iteration tries exchanging the k least valuable active columns with
the k most promising inactive ones (k = 1..k_max), accepting the first
exchange whose loss improvement exceeds tau. Convergence is reached when no
exchange passes the gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import (
    Dataset,
    IndexSet,
    SingularSystem,
    SparseModel,
    SplicingConfig,
    default_k_max,
    default_max_iterations,
    default_tau,
)
from .lskernel import (
    CovarianceCache,
    backward_sacrifices,
    build_cache,
    fit_on_support,
    forward_sacrifices,
)
from .ranks import PseudoResponse


@dataclass
class SpliceTrace:
    iterations: int = 0
    accepted_splices: list = field(default_factory=list)  # (k, loss_before, loss_after)
    converged: bool = False
    hit_iteration_cap: bool = False


def initialize_active_set(cache: CovarianceCache, s: int) -> IndexSet:
    """The s columns with the largest |rho|, ties resolved toward smaller index.

    Degenerate (zero-variance) columns have rho = 0 and are excluded unless
    there are not enough usable columns, which is an error.
    """
    p = cache.rho.shape[0]
    if not (1 <= s <= p):
        raise ValueError(f"s must be in [1, {p}], got {s}")
    usable = int(np.count_nonzero(cache.gram_diag > 0))
    if usable < s:
        raise ValueError(
            f"only {usable} non-degenerate columns available for support size {s}"
        )
    abs_rho = np.abs(cache.rho)
    # lexsort: primary key last; index ascending breaks ties deterministically
    order = np.lexsort((np.arange(p), -abs_rho))
    order = order[cache.gram_diag[order] > 0]
    return IndexSet(order[:s])


def splicing_sets(
    xi: dict[int, float], zeta: dict[int, float], k: int
) -> tuple[IndexSet, IndexSet]:
    """k active indices of smallest backward sacrifice and k inactive indices
    of largest forward sacrifice; ties toward smaller index."""
    if k > len(xi) or k > len(zeta):
        raise ValueError(f"k={k} exceeds set sizes ({len(xi)}, {len(zeta)})")
    s1 = sorted(xi, key=lambda j: (xi[j], j))[:k]
    s2 = sorted(zeta, key=lambda j: (-zeta[j], j))[:k]
    return IndexSet(s1), IndexSet(s2)


def rank_bess(
    dataset: Dataset,
    pseudo: PseudoResponse,
    config: SplicingConfig,
    cache: CovarianceCache | None = None,
) -> tuple[SparseModel, SpliceTrace]:
    """Best-subset search at support size config.support_size.

    Returns the final restricted fit (support size exactly s) and a trace.
    Hitting the iteration cap is reported on the trace, never raised.
    """
    config.validate_against(dataset.n, dataset.p)
    if cache is None:
        cache = build_cache(dataset, pseudo)
    s = config.support_size
    n, p = dataset.n, dataset.p

    active = initialize_active_set(cache, s)
    model = fit_on_support(dataset, pseudo, active)

    tau = config.tau if config.tau is not None else default_tau(s, n, p)
    k_cap = config.k_max if config.k_max is not None else default_k_max(s)
    k_cap = min(k_cap, s, p - s)
    max_iter = (
        config.max_iterations
        if config.max_iterations is not None
        else default_max_iterations(model.loss, max(tau, 1e-12))
    )

    trace = SpliceTrace()
    if k_cap < 1:
        trace.converged = True
        return model, trace

    while trace.iterations < max_iter:
        trace.iterations += 1
        xi = backward_sacrifices(dataset, pseudo, model, cache)
        zeta = forward_sacrifices(dataset, pseudo, model, cache)
        accepted = False
        for k in range(1, k_cap + 1):
            s1, s2 = splicing_sets(xi, zeta, k)
            candidate = model.active.difference(s1).union(s2)
            try:
                new_model = fit_on_support(dataset, pseudo, candidate)
            except SingularSystem:
                continue
            if model.loss - new_model.loss > tau:
                trace.accepted_splices.append((k, model.loss, new_model.loss))
                model = new_model
                accepted = True
                break
        if not accepted:
            trace.converged = True
            break
    else:
        trace.hit_iteration_cap = True

    return model, trace
