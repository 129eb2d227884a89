"""Ball-set classifiers and the plain kNN baseline."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Counters, Dataset, GranularBall, distances_to


class Rule(str, Enum):
    HARMONIC = "harmonic"  # GBkNN++: center distance minus member share
    SURFACE = "surface"  # original GBkNN: distance to the ball surface


@dataclass(frozen=True)
class BallClassifier:
    """Immutable view of a ball set used for prediction.

    The member-share denominator is fixed here, after outlier removal, and
    never recomputed per query.
    """

    centers: np.ndarray
    radii: np.ndarray
    sizes: np.ndarray
    labels: np.ndarray
    ball_ids: np.ndarray
    rule: Rule = Rule.HARMONIC

    @classmethod
    def from_balls(cls, balls: list[GranularBall], rule: Rule | str = Rule.HARMONIC) -> BallClassifier:
        if not balls:
            raise ValueError("empty ball set")
        # argmin ties resolve to the first row, so rows are ordered by ball_id
        balls = sorted(balls, key=lambda b: b.ball_id)
        return cls(
            centers=np.stack([b.center for b in balls]).astype(np.float64),
            radii=np.array([b.radius for b in balls], dtype=np.float64),
            sizes=np.array([b.size for b in balls], dtype=np.int64),
            labels=np.array([b.label for b in balls], dtype=np.int64),
            ball_ids=np.array([b.ball_id for b in balls], dtype=np.int64),
            rule=Rule(rule),
        )

    @property
    def total_members(self) -> int:
        return int(self.sizes.sum())

    def scores(self, x, counters: Counters | None = None) -> np.ndarray:
        """Per-ball distance score for one query under the classifier's rule."""
        d = distances_to(self.centers, np.asarray(x, dtype=np.float64), counters)
        if self.rule is Rule.HARMONIC:
            return d - self.sizes / self.total_members
        return d - self.radii

    def predict_one(self, x, counters: Counters | None = None) -> tuple[int, int]:
        k = int(np.argmin(self.scores(x, counters)))
        return int(self.labels[k]), int(self.ball_ids[k])

    def predict(self, X, counters: Counters | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.centers.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {self.centers.shape[1]}")
        # squared-norm expansion loses bits; compute exact differences in chunks instead
        out = np.empty(X.shape[0], dtype=np.int64)
        penalty = self.sizes / self.total_members if self.rule is Rule.HARMONIC else self.radii
        step = max(1, 2_000_000 // max(1, self.centers.size))
        for lo in range(0, X.shape[0], step):
            chunk = X[lo:lo + step]
            diff = chunk[:, None, :] - self.centers[None, :, :]
            d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            out[lo:lo + step] = self.labels[np.argmin(d - penalty, axis=1)]
        if counters is not None:
            counters.distance_evaluations += X.shape[0] * self.centers.shape[0]
        return out


def predict_gbknn_pp(classifier: BallClassifier, x, counters: Counters | None = None) -> tuple[int, int]:
    """Label of the ball with the smallest harmonic distance, and that ball's id."""
    if classifier.rule is not Rule.HARMONIC:
        raise ValueError("classifier was built for the surface-distance rule")
    return classifier.predict_one(x, counters)


def predict_gbknn_original(classifier: BallClassifier, x, counters: Counters | None = None) -> tuple[int, int]:
    """Label of the ball whose surface is nearest to ``x``, and that ball's id."""
    if classifier.rule is not Rule.SURFACE:
        raise ValueError("classifier was built for the harmonic-distance rule")
    return classifier.predict_one(x, counters)


def _vote(labels: np.ndarray) -> int:
    values, counts = np.unique(labels, return_counts=True)
    return int(values[np.argmax(counts)])


def predict_knn(train: Dataset, x, k: int, counters: Counters | None = None) -> int:
    """Majority label among the ``k`` nearest training samples.

    Distance ties go to the smaller sample index, label ties to the smaller label.
    """
    if not 1 <= k <= train.n:
        raise ValueError(f"k must be in [1, {train.n}], got {k}")
    d = distances_to(train.X, np.asarray(x, dtype=np.float64), counters)
    order = np.lexsort((train.index, d))
    return _vote(train.y[order[:k]])


def knn_predict_many(train: Dataset, X, ks) -> dict[int, np.ndarray]:
    """Predictions for several ``k`` at once, sharing one neighbour ranking per query."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    ks = list(ks)
    for k in ks:
        if not 1 <= k <= train.n:
            raise ValueError(f"k must be in [1, {train.n}], got {k}")
    kmax = max(ks)
    out = {k: np.empty(X.shape[0], dtype=np.int64) for k in ks}
    for i, x in enumerate(X):
        d = distances_to(train.X, x)
        order = np.lexsort((train.index, d))[:kmax]
        for k in ks:
            out[k][i] = _vote(train.y[order[:k]])
    return out
