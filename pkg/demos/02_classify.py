"""
Classifying with a ball set
===========================

Fit balls on a training split and predict with the harmonic-distance rule and
with the surface-distance rule.
"""

import numpy as np

from gbgpp import (
    BallClassifier, Dataset, GranulationConfig, Rule, fit_apply_minmax, granulate,
    granulate_kmeans_baseline,
)

rng = np.random.default_rng(1)
X = rng.uniform(-1, 1, (600, 2))
y = (X[:, 1] > 0.5 * np.sin(3 * X[:, 0])).astype(int)
data = Dataset(X, y)
train, test = data.subset(np.arange(400)), data.subset(np.arange(400, 600))
train, (test,), _ = fit_apply_minmax(train, [test])

balls = granulate(train).balls
clf = BallClassifier.from_balls(balls, Rule.HARMONIC)
print("harmonic rule on attention balls:", np.mean(clf.predict(test.X) == test.y))

base = granulate_kmeans_baseline(train, GranulationConfig(method="kmeans")).balls
clf_base = BallClassifier.from_balls(base, Rule.SURFACE)
print("surface rule on k-means balls:   ", np.mean(clf_base.predict(test.X) == test.y))

# per-query scores: distance to each center minus the ball's share of all members
x = test.X[0]
label, ball_id = clf.predict_one(x)
print(f"query {x} -> label {label} from ball {ball_id}; best score {clf.scores(x).min():.4f}")
