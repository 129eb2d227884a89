"""Geometric and label primitives shared by the granulators and classifiers.

Everything here is pure: no function mutates its inputs, and identical
inputs give bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass
class Counters:
    """Instrumentation shared across one granulation or prediction run."""

    distance_evaluations: int = 0


def distances_to(points: np.ndarray, center: np.ndarray, counters: Counters | None = None) -> np.ndarray:
    """Euclidean distance from every row of ``points`` to ``center``.

    Every granulator and classifier computes distances through this function
    so that ``counters.distance_evaluations`` matches the work actually done.
    """
    points = np.asarray(points, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if points.ndim != 2 or center.ndim != 1 or points.shape[1] != center.shape[0]:
        raise ValueError(
            f"dimension mismatch: points {points.shape} vs center {center.shape}"
        )
    if counters is not None:
        counters.distance_evaluations += points.shape[0]
    diff = points - center
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def euclidean(a, b, counters: Counters | None = None) -> float:
    a = np.asarray(a, dtype=np.float64)
    return float(distances_to(a[None, :], b, counters)[0])


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: int
    index: int


@dataclass
class Dataset:
    """Feature matrix, dense integer labels and stable row ids.

    ``index`` holds the original row id of every sample and survives
    subsetting, so folds and noisy copies stay traceable to the source file.
    ``label_names[k]`` is the raw label that was mapped to class id ``k``.
    """

    X: np.ndarray
    y: np.ndarray
    index: np.ndarray | None = None
    label_names: list | None = None
    name: str = "dataset"
    normalized: bool = False

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y).astype(np.int64)
        if self.X.ndim != 2:
            raise ValueError("X must be a 2-D array")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("y must have one label per row of X")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("features must be finite")
        if self.index is None:
            self.index = np.arange(self.X.shape[0], dtype=np.int64)
        else:
            self.index = np.asarray(self.index, dtype=np.int64)
            if self.index.shape != self.y.shape:
                raise ValueError("index must have one entry per sample")
            if np.unique(self.index).size != self.index.size:
                raise ValueError("sample indices must be unique")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        return self.X.shape[1]

    @property
    def classes(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.y))

    @property
    def samples(self) -> list[Sample]:
        return [Sample(self.X[i], int(self.y[i]), int(self.index[i])) for i in range(self.n)]

    def subset(self, positions) -> Dataset:
        positions = np.asarray(positions, dtype=np.int64)
        return Dataset(
            self.X[positions],
            self.y[positions],
            self.index[positions],
            label_names=self.label_names,
            name=self.name,
            normalized=self.normalized,
        )

    def with_labels(self, y) -> Dataset:
        return Dataset(
            self.X, y, self.index, label_names=self.label_names,
            name=self.name, normalized=self.normalized,
        )


@dataclass
class GranularBall:
    """A ball ``(center, radius, members)`` with its majority label and purity.

    ``members`` are row positions in the dataset the ball was granulated
    from. ``contained`` is True when every member lies within ``radius``;
    children of a split always are, while the initial ball and de-conflict
    merges (built on a plain union) usually are not.
    """

    center: np.ndarray
    radius: float
    members: np.ndarray
    label: int
    purity: float
    generation: int = 0
    ball_id: int = 0
    contained: bool = True

    @property
    def size(self) -> int:
        return int(self.members.shape[0])


def compute_center_radius(points, counters: Counters | None = None) -> tuple[np.ndarray, float]:
    """Mean of ``points`` and the mean distance of the points to it."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if points.shape[0] == 0:
        raise ValueError("empty point set")
    center = points.mean(axis=0)
    radius = float(distances_to(points, center, counters).mean())
    return center, radius


def membership(candidates, center, radius: float, counters: Counters | None = None) -> np.ndarray:
    """Boolean mask of candidates lying within ``radius`` of ``center`` (boundary included)."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return distances_to(candidates, center, counters) <= radius


def label_and_purity(member_labels) -> tuple[int, float]:
    labels = np.asarray(member_labels)
    if labels.size == 0:
        raise ValueError("empty label list")
    values, counts = np.unique(labels, return_counts=True)
    # np.unique sorts, so argmax picks the smallest label among tied modes
    k = int(np.argmax(counts))
    return int(values[k]), float(counts[k] / labels.size)


def majority_mask(labels) -> np.ndarray:
    """Attention mask: True for samples carrying the (smallest) modal label."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("empty sample list")
    mode, _ = label_and_purity(labels)
    return labels == mode


def majority_class(samples: list[Sample]) -> list[Sample]:
    if not samples:
        raise ValueError("empty sample list")
    mask = majority_mask([s.label for s in samples])
    return [s for s, keep in zip(samples, mask) if keep]


def surface_distance(x, ball: GranularBall, counters: Counters | None = None) -> float:
    return euclidean(x, ball.center, counters) - ball.radius


class Nesting(Enum):
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS = "heterogeneous"


def nesting_relation(a: GranularBall, b: GranularBall, counters: Counters | None = None) -> Nesting | None:
    """Classify two balls as heterogeneously nested, homogeneously nested, or neither.

    Two balls are nested when their center distance is at most the absolute
    difference of their radii.
    """
    gap = euclidean(a.center, b.center, counters)
    if gap > abs(a.radius - b.radius):
        return None
    return Nesting.HOMOGENEOUS if a.label == b.label else Nesting.HETEROGENEOUS


def make_ball(
    X: np.ndarray,
    y: np.ndarray,
    members: np.ndarray,
    generation: int,
    ball_id: int,
    counters: Counters | None = None,
) -> GranularBall:
    """Build a ball on all of ``members``; ``contained`` says whether each lies within the radius."""
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError("empty point set")
    center = X[members].mean(axis=0)
    d = distances_to(X[members], center, counters)
    radius = float(d.mean())
    label, purity = label_and_purity(y[members])
    return GranularBall(
        center, radius, members, label, purity, generation, ball_id, bool(np.all(d <= radius))
    )


__all__ = [
    "Counters",
    "Dataset",
    "GranularBall",
    "Nesting",
    "Sample",
    "compute_center_radius",
    "distances_to",
    "euclidean",
    "label_and_purity",
    "majority_class",
    "majority_mask",
    "make_ball",
    "membership",
    "nesting_relation",
    "surface_distance",
]
