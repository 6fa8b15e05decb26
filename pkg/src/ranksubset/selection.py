"""Support-size selection: sweep sizes 1..s_max and pick the GIC minimizer.

GIC(A) = n * log(loss) + |A| * log(p) * log(log(n)), natural logs throughout.
The log p factor penalizes dimension, the slowly diverging loglog n factor
prevents underfitting without any tuning parameter.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .data import Dataset, FitReport, SparseModel, SplicingConfig
from .lskernel import build_cache
from .ranks import PseudoResponse
from .splicing import rank_bess

LOSS_FLOOR = 1e-300


@dataclass(frozen=True)
class GicEntry:
    support_size: int
    gic_value: float
    model: SparseModel


def gic(model: SparseModel, n: int, p: int) -> float:
    """Generalized information criterion of a fitted sparse model."""
    if n < 3:
        raise ValueError("n >= 3 required so that loglog(n) > 0")
    if p < 2:
        raise ValueError("p >= 2 required")
    loss = max(model.loss, LOSS_FLOOR)
    return n * math.log(loss) + len(model.active) * math.log(p) * math.log(math.log(n))


def default_s_max(n: int, p: int) -> int:
    """Largest support size worth sweeping: order sqrt(n / (log p loglog n)),
    clamped to [1, p]."""
    if n < 3:
        raise ValueError("n >= 3 required")
    if p < 1:
        raise ValueError("p >= 1 required")
    if p == 1:
        return 1
    cap = math.sqrt(n / (math.log(p) * math.log(math.log(n))))
    return max(1, int(math.floor(min(cap, p))))


def rank_abess(
    dataset: Dataset,
    pseudo: PseudoResponse,
    s_max: int | None = None,
    config_factory=None,
) -> FitReport:
    """Run the splicing solver for every support size up to s_max and return
    the GIC minimizer (ties toward the smaller size).

    ``config_factory(s)`` may supply a SplicingConfig per size; by default
    all knobs take their data-dependent defaults.
    """
    n, p = dataset.n, dataset.p
    if n < 3:
        raise ValueError("model selection requires n >= 3")
    if s_max is None:
        s_max = default_s_max(n, p)
    if not (1 <= s_max <= min(n - 1, p)):
        raise ValueError(f"s_max must be in [1, {min(n - 1, p)}], got {s_max}")
    if config_factory is None:
        config_factory = lambda s: SplicingConfig(support_size=s)

    t0 = time.perf_counter()
    cache = build_cache(dataset, pseudo)
    path = []
    iterations = {}
    for s in range(1, s_max + 1):
        model, trace = rank_bess(dataset, pseudo, config_factory(s), cache)
        path.append(GicEntry(support_size=s, gic_value=gic(model, n, p), model=model))
        iterations[s] = trace.iterations
    best = min(path, key=lambda e: (e.gic_value, e.support_size))
    return FitReport(
        selected=best.model,
        gic_path=path,
        splicing_iterations=iterations,
        wall_time=time.perf_counter() - t0,
    )
