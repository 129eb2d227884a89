"""Granular-ball generation with attention-driven splitting and ball-based kNN classification."""

from .classify import BallClassifier, Rule, predict_gbknn_original, predict_gbknn_pp, predict_knn
from .core import Counters, Dataset, GranularBall, Nesting
from .evaluation import (
    EvalReport,
    WilcoxonResult,
    cross_validate,
    cross_validate_knn,
    inject_label_noise,
    lnt,
    stratified_kfold,
    wilcoxon_signed_rank,
)
from .granulation import (
    GranulationConfig,
    GranulationError,
    GranulationResult,
    Method,
    granulate,
    granulate_kmeans_baseline,
    run_granulation,
)
from .io import export_balls, fit_apply_minmax, import_balls, load_dataset

__version__ = "0.1.0"

__all__ = [
    "BallClassifier", "Counters", "Dataset", "EvalReport", "GranularBall", "GranulationConfig",
    "GranulationError", "GranulationResult", "Method", "Nesting", "Rule", "WilcoxonResult",
    "cross_validate", "cross_validate_knn", "export_balls", "fit_apply_minmax", "granulate",
    "granulate_kmeans_baseline", "import_balls", "inject_label_noise", "lnt", "load_dataset",
    "predict_gbknn_original", "predict_gbknn_pp", "predict_knn", "run_granulation",
    "stratified_kfold", "wilcoxon_signed_rank",
]
