"""Best subset selection for single index models via rank-based splicing."""

from .data import (
    Dataset,
    FitReport,
    IndexSet,
    SingularSystem,
    SparseModel,
    SplicingConfig,
    make_dataset,
)
from .harness import RecoveryRecord, recovery_metrics, run_experiment
from .lasso import adaptive_lasso, rank_lasso, rank_lasso_cv, threshold_lasso
from .lskernel import (
    CovarianceCache,
    backward_sacrifices,
    build_cache,
    evaluate_loss,
    fit_on_support,
    forward_sacrifices,
)
from .ranks import PseudoResponse, rank_response
from .selection import GicEntry, default_s_max, gic, rank_abess
from .simgen import GroundTruth, SimDesign, generate_instance, true_support
from .splicing import SpliceTrace, initialize_active_set, rank_bess, splicing_sets

__version__ = "0.1.0"

__all__ = [
    "Dataset", "FitReport", "IndexSet", "SingularSystem", "SparseModel",
    "SplicingConfig", "make_dataset",
    "PseudoResponse", "rank_response",
    "CovarianceCache", "build_cache", "evaluate_loss", "fit_on_support",
    "backward_sacrifices", "forward_sacrifices",
    "SpliceTrace", "initialize_active_set", "splicing_sets", "rank_bess",
    "GicEntry", "gic", "default_s_max", "rank_abess",
    "rank_lasso", "rank_lasso_cv", "threshold_lasso", "adaptive_lasso",
    "SimDesign", "GroundTruth", "true_support", "generate_instance",
    "RecoveryRecord", "recovery_metrics", "run_experiment",
]
