"""
Cross-validation on the bundled datasets
========================================

Ten-fold stratified CV for the attention granulator with the harmonic rule,
the k-means baseline with the surface rule, and plain kNN. Per-fold
accuracies of each pair go through the signed-rank test.
"""

from pathlib import Path

import numpy as np

from gbgpp import GranulationConfig, Rule, cross_validate, cross_validate_knn, load_dataset, wilcoxon_signed_rank

DATA = Path(__file__).resolve().parents[1] / "data"

for name in ("sonar", "ecoli", "diabetes"):
    d = load_dataset(DATA / f"{name}.csv")
    gbg = cross_validate(d, GranulationConfig(), Rule.HARMONIC, folds=10, seed=0)
    km = cross_validate(d, GranulationConfig(method="kmeans"), Rule.SURFACE, folds=10, seed=0)
    knn = cross_validate_knn(d, folds=10, seed=0)
    print(f"{name:9s} gbg++ {gbg.mean_accuracy:.3f}±{gbg.sd_accuracy:.3f}  "
          f"kmeans {km.mean_accuracy:.3f}±{km.sd_accuracy:.3f}  knn {knn.mean_accuracy:.3f}")
    print(f"          LNT gbg++ {gbg.lnt:.2f}, kmeans {km.lnt:.2f}; "
          f"distance evaluations {gbg.distance_evaluations} vs {km.distance_evaluations}")
    w = wilcoxon_signed_rank(np.subtract(gbg.per_fold_accuracies, km.per_fold_accuracies))
    print(f"          signed-rank R+={w.r_plus} R-={w.r_minus} T={w.statistic_T}")
