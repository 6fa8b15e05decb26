"""Replicated experiment runner: recovery metrics, timing, aggregation.

Each replication draws its own substream from (master seed, replication
index), so results are independent of execution order and thread count.
Fractions are aggregated from integer counters, never incremental floating
means.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset, IndexSet, SparseModel
from .lasso import (
    adaptive_lasso,
    default_lambda,
    rank_lasso,
    rank_lasso_cv,
    threshold_lasso,
)
from .ranks import PseudoResponse, rank_response
from .selection import rank_abess
from .simgen import SimDesign, generate_instance

METHODS = ("rankabess", "ranklasso", "ranklasso-cv", "t-ranklasso", "a-ranklasso")


@dataclass(frozen=True)
class RecoveryRecord:
    design: SimDesign
    method: str
    active_cover: float     # fraction of reps with truth subset of estimate
    inactive_cover: float   # fraction with estimate subset of truth
    exact: float            # fraction with estimate == truth
    mean_time: float
    q05_time: float
    q95_time: float
    replications: int       # successful replications (the denominator)
    failures: int


def recovery_metrics(truth: IndexSet, estimate: IndexSet, p: int
                     ) -> tuple[bool, bool, bool]:
    """(truth within estimate, estimate within truth, exact equality).

    The inactive-set cover condition complement(truth) within
    complement(estimate) is equivalent to estimate within truth.
    """
    t, e = set(truth), set(estimate)
    if any(j >= p for j in t | e):
        raise ValueError("index out of range for p")
    return t <= e, e <= t, t == e


def fit_method(name: str, dataset: Dataset, pseudo: PseudoResponse,
               rep_seed: int = 0) -> SparseModel:
    """Dispatch one fit by method name; raises RuntimeError on non-convergence."""
    if name == "rankabess":
        return rank_abess(dataset, pseudo).selected
    lam = default_lambda(dataset.n, dataset.p)
    if name == "ranklasso":
        model = rank_lasso(dataset, pseudo, lam)
    elif name == "ranklasso-cv":
        model, _ = rank_lasso_cv(dataset, pseudo, seed=rep_seed)
    elif name == "t-ranklasso":
        pilot = rank_lasso(dataset, pseudo, lam)
        model = threshold_lasso(dataset, pseudo, pilot, delta=lam)
    elif name == "a-ranklasso":
        pilot = rank_lasso(dataset, pseudo, lam)
        model = adaptive_lasso(dataset, pseudo, pilot, lam)
    else:
        raise ValueError(f"unknown method {name!r}; known: {METHODS}")
    if not model.converged:
        raise RuntimeError(f"{name} did not converge")
    return model


def _run_one(design: SimDesign, methods, rep: int):
    dataset, truth = generate_instance(design, rep)
    pseudo = rank_response(dataset.y)
    out = {}
    for m in methods:
        try:
            t0 = time.perf_counter()
            model = fit_method(m, dataset, pseudo, rep_seed=rep)
            elapsed = time.perf_counter() - t0
        except (RuntimeError, ValueError):
            out[m] = None
            continue
        out[m] = (recovery_metrics(truth.beta_support, model.active, design.p),
                  elapsed)
    return out


def run_experiment(design: SimDesign, methods, replications: int,
                   threads: int = 1) -> list[RecoveryRecord]:
    """Run every method on the same replicated instances and aggregate.

    Failed replications are counted, never silently dropped; fractions are
    over the successful ones.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; known: {METHODS}")

    reps = range(replications)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _run_one(design, methods, r), reps))
    else:
        results = [_run_one(design, methods, r) for r in reps]

    records = []
    for m in methods:
        counts = np.zeros(3, dtype=int)
        times = []
        failures = 0
        for res in results:
            if res[m] is None:
                failures += 1
                continue
            (a, i, e), elapsed = res[m]
            counts += np.array([a, i, e], dtype=int)
            times.append(elapsed)
        ok = replications - failures
        if ok > 0:
            t = np.array(times)
            mean_t, q05, q95 = float(t.mean()), *np.quantile(t, [0.05, 0.95])
            fracs = counts / ok
        else:
            mean_t = q05 = q95 = float("nan")
            fracs = np.full(3, float("nan"))
        records.append(RecoveryRecord(
            design=design, method=m,
            active_cover=float(fracs[0]), inactive_cover=float(fracs[1]),
            exact=float(fracs[2]),
            mean_time=mean_t, q05_time=float(q05), q95_time=float(q95),
            replications=ok, failures=failures,
        ))
    return records
