"""
Granulation cost
================

Count distance evaluations for both granulators on growing subsamples and
fit the log-log slope.
"""

from pathlib import Path

import numpy as np

from gbgpp import GranulationConfig, fit_apply_minmax, granulate, granulate_kmeans_baseline, load_dataset

DATA = Path(__file__).resolve().parents[1] / "data"
data, _, _ = fit_apply_minmax(load_dataset(DATA / "banana.csv"))
perm = np.random.default_rng(0).permutation(data.n)

sizes, evals = [500, 1000, 2000, 4000, 5300], []
for n in sizes:
    sub = data.subset(np.sort(perm[:n]))
    a = granulate(sub)
    b = granulate_kmeans_baseline(sub, GranulationConfig(method="kmeans"))
    evals.append(a.distance_evaluations)
    print(f"n={n:5d}  gbg++ {a.distance_evaluations:8d} evals {a.wall_time:.3f}s   "
          f"kmeans {b.distance_evaluations:8d} evals {b.wall_time:.3f}s")

slope = np.polyfit(np.log(sizes), np.log(evals), 1)[0]
print(f"log-log slope of distance evaluations: {slope:.3f}")
