"""Granular-ball generation.

Two granulators share the same result type:

* :func:`granulate` -- attention-driven splitting on the majority class of
  the undivided samples, orphan removal, de-conflict of heterogeneous nested
  children and the stable-ball rule. Fully deterministic.
* :func:`granulate_kmeans_baseline` -- the original purity-driven
  granulation that splits every impure ball with seeded 2-means.

Both count every Euclidean distance they evaluate.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

from .core import (
    Counters,
    Dataset,
    GranularBall,
    distances_to,
    label_and_purity,
    majority_mask,
    make_ball,
)


class Method(str, Enum):
    GBG_PLUS_PLUS = "gbg++"
    KMEANS_BASELINE = "kmeans"


class GranulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GranulationConfig:
    purity_threshold: float = 1.0
    method: Method = Method.GBG_PLUS_PLUS
    enable_outlier_detection: bool = True
    enable_am: bool = True
    kmeans_seed: int = 0
    kmeans_k: int = 2
    max_iterations: int = 10000
    # Re-split final balls whose members were not chosen by the radius test
    # (the initial ball, de-conflict merges) so every member lies inside.
    enforce_containment: bool = True

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0 < self.purity_threshold <= 1:
            raise ValueError(f"purity_threshold must be in (0, 1], got {self.purity_threshold}")
        if self.method is Method.KMEANS_BASELINE and self.kmeans_k < 2:
            raise ValueError("kmeans_k must be >= 2 for the k-means baseline")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d


@dataclass
class GranulationResult:
    balls: list[GranularBall]
    outliers: np.ndarray
    iterations: int
    distance_evaluations: int
    wall_time: float
    config: GranulationConfig
    n_samples: int
    history: list[dict] = field(default_factory=list)
    snapshots: list[list[GranularBall]] | None = None

    @property
    def total_members(self) -> int:
        return sum(b.size for b in self.balls)


def _id_source(ids: Iterator[int] | None, start: int) -> Iterator[int]:
    return ids if ids is not None else itertools.count(start)


def split_ball(
    ball: GranularBall,
    dataset: Dataset,
    config: GranulationConfig,
    counters: Counters | None = None,
    ids: Iterator[int] | None = None,
) -> tuple[list[GranularBall], np.ndarray]:
    """Split ``ball`` into disjoint children by repeated attention on the majority class.

    The undivided set starts as all members. While its majority class holds
    more than one sample, a child is centred on that majority class (or on
    the whole undivided set when ``config.enable_am`` is off), takes every
    undivided sample within its radius, and those samples leave the
    undivided set.

    Returns
    -------
    children : list of GranularBall
        In creation order, each with ``generation = ball.generation + 1``.
    orphans : ndarray
        Positions left undivided when the loop stopped.
    """
    if ball.size < 2:
        raise ValueError("cannot split a ball with fewer than two members")
    if ball.purity >= config.purity_threshold and ball.contained:
        raise ValueError("ball already meets the purity threshold")
    ids = _id_source(ids, ball.ball_id + 1)
    X, y = dataset.X, dataset.y
    undivided = ball.members
    children = []
    while undivided.size:
        attend = majority_mask(y[undivided])
        if np.count_nonzero(attend) == 1:
            break
        if len(children) >= config.max_iterations:
            raise GranulationError("split did not converge")
        basis = attend if config.enable_am else np.ones_like(attend)
        center = X[undivided[basis]].mean(axis=0)
        d = distances_to(X[undivided], center, counters)
        radius = float(d[basis].mean())
        inside = d <= radius
        members = undivided[inside]
        label, purity = label_and_purity(y[members])
        children.append(
            GranularBall(center, radius, members, label, purity, ball.generation + 1, next(ids), True)
        )
        undivided = undivided[~inside]
    return children, undivided


def detect_orphans(children: list[GranularBall]) -> tuple[list[GranularBall], np.ndarray]:
    """Drop single-member balls and report their samples as outliers."""
    kept = [b for b in children if b.size > 1]
    dropped = [b.members for b in children if b.size == 1]
    out = np.concatenate(dropped) if dropped else np.empty(0, dtype=np.int64)
    return kept, out


def deconflict(
    children: list[GranularBall],
    dataset: Dataset,
    counters: Counters | None = None,
    ids: Iterator[int] | None = None,
) -> list[GranularBall]:
    """Merge heterogeneously nested balls until none remain.

    Pairs are examined in ascending ``(ball_id, ball_id)`` order and the first
    conflicting pair is replaced by one ball built on the union of their
    members; the scan then restarts. Homogeneous nestings are left alone.
    Center-to-center distances are cached across restarts, so each pair is
    measured once.
    """
    balls = sorted(children, key=lambda b: b.ball_id)
    if len(balls) < 2:
        return balls
    ids = _id_source(ids, max(b.ball_id for b in balls) + 1)
    generation = max(b.generation for b in balls)

    gap = {}

    def measure(ball, others):
        if others:
            d = distances_to(np.stack([o.center for o in others]), ball.center, counters)
            for o, dv in zip(others, d):
                gap[o.ball_id, ball.ball_id] = dv

    for i in range(1, len(balls)):
        measure(balls[i], balls[:i])

    while True:
        hit = None
        for i, a in enumerate(balls):
            for b in balls[i + 1:]:
                if a.label != b.label and gap[a.ball_id, b.ball_id] <= abs(a.radius - b.radius):
                    hit = (a, b)
                    break
            if hit:
                break
        if hit is None:
            return balls
        a, b = hit
        balls = [o for o in balls if o is not a and o is not b]
        union = np.concatenate([a.members, b.members])
        merged = make_ball(dataset.X, dataset.y, union, generation, next(ids), counters)
        # fresh ids only grow, so the merged ball stays last in id order
        measure(merged, balls)
        balls.append(merged)


def heterogeneous_nestings(balls: list[GranularBall]) -> list[tuple[int, int]]:
    """Id pairs of final balls that are nested with different labels.

    De-conflict only runs among siblings, so balls from different parents
    can still end up nested; this measures that, it does not fix it.
    """
    out = []
    for a, b in itertools.combinations(sorted(balls, key=lambda b: b.ball_id), 2):
        if a.label != b.label and np.linalg.norm(a.center - b.center) <= abs(a.radius - b.radius):
            out.append((a.ball_id, b.ball_id))
    return out


def _singleton(dataset: Dataset, pos: int, generation: int, ball_id: int) -> GranularBall:
    return GranularBall(
        dataset.X[pos].copy(), 0.0, np.array([pos], dtype=np.int64),
        int(dataset.y[pos]), 1.0, generation, ball_id, True,
    )


def _summary(balls: list[GranularBall]) -> str:
    lines = [f"{len(balls)} balls:"]
    for b in balls[:50]:
        lines.append(
            f"  id={b.ball_id} gen={b.generation} size={b.size} label={b.label} "
            f"purity={b.purity:.4f} radius={b.radius:.6g}"
        )
    if len(balls) > 50:
        lines.append(f"  ... {len(balls) - 50} more")
    return "\n".join(lines)


def granulate(
    dataset: Dataset,
    config: GranulationConfig | None = None,
    keep_snapshots: bool = False,
) -> GranulationResult:
    """Granulate ``dataset`` with attention-based splitting.

    Starting from one ball holding every sample, each outer iteration splits
    every ball below the purity threshold, drops orphans, de-conflicts the
    children and replaces the parent with them. A ball whose split just
    reproduces it while still impure is removed and its samples become
    outliers. Iteration stops when no ball changes.
    """
    config = config or GranulationConfig()
    if config.method is not Method.GBG_PLUS_PLUS:
        raise ValueError("granulate() runs the attention granulator; use granulate_kmeans_baseline()")
    if dataset.n == 0:
        raise ValueError("empty dataset")
    start = time.perf_counter()
    counters = Counters()
    ids = itertools.count()
    P = config.purity_threshold

    root = make_ball(dataset.X, dataset.y, np.arange(dataset.n), 0, next(ids), counters)
    balls = [root]
    outliers: list[np.ndarray] = []
    frozen: set[int] = set()
    history = [_record(0, balls, outliers, P)]
    snapshots = [list(balls)] if keep_snapshots else None

    def needs_split(b: GranularBall) -> bool:
        if b.size < 2 or b.ball_id in frozen:
            return False
        if b.purity < P:
            return True
        return config.enforce_containment and not b.contained

    iterations = 0
    while any(needs_split(b) for b in balls):
        iterations += 1
        if iterations > config.max_iterations:
            raise GranulationError(
                f"granulation exceeded {config.max_iterations} iterations\n{_summary(balls)}"
            )
        nxt = []
        for ball in balls:
            if not needs_split(ball):
                nxt.append(ball)
                continue
            children, orphans = split_ball(ball, dataset, config, counters, ids)
            if config.enable_outlier_detection:
                children, dropped = detect_orphans(children)
                outliers.extend([dropped, orphans])
            else:
                children += [_singleton(dataset, int(p), ball.generation + 1, next(ids)) for p in orphans]
            if len(children) > 1:
                children = deconflict(children, dataset, counters, ids)
            if len(children) == 1 and children[0].size == ball.size:
                # the split (possibly after merging back) reproduced the parent
                only = children[0]
                if only.purity < P:
                    outliers.append(ball.members)
                    continue
                if not only.contained:
                    frozen.add(ball.ball_id)
                    nxt.append(ball)
                    continue
            nxt.extend(children)
        balls = nxt
        history.append(_record(iterations, balls, outliers, P))
        if keep_snapshots:
            snapshots.append(list(balls))

    out = np.sort(np.concatenate(outliers)) if outliers else np.empty(0, dtype=np.int64)
    return GranulationResult(
        balls=balls,
        outliers=out.astype(np.int64),
        iterations=iterations,
        distance_evaluations=counters.distance_evaluations,
        wall_time=time.perf_counter() - start,
        config=config,
        n_samples=dataset.n,
        history=history,
        snapshots=snapshots,
    )


def _record(iteration: int, balls, outliers, P: float) -> dict:
    return {
        "iteration": iteration,
        "balls": len(balls),
        "impure_samples": int(sum(b.size for b in balls if b.purity < P)),
        "outliers": int(sum(o.size for o in outliers)),
    }


# ---------------------------------------------------------------------------
# k-means baseline


def _lloyd(points, centroids, counters, max_iter=300):
    assign = None
    for _ in range(max_iter):
        d = np.stack([distances_to(points, c, counters) for c in centroids], axis=1)
        new = np.argmin(d, axis=1)
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        centroids = np.stack([
            points[assign == j].mean(axis=0) if np.any(assign == j) else centroids[j]
            for j in range(len(centroids))
        ])
    return assign


def k_means(points, k: int, rng: np.random.Generator, counters: Counters | None = None) -> np.ndarray:
    """Seeded Lloyd k-means; returns a cluster id per point, every cluster nonempty.

    Initial centroids: one member drawn from ``rng``, then repeatedly the
    member farthest from its nearest chosen centroid. A run that leaves a
    cluster empty is restarted from the two farthest members (found by a
    double sweep); if the points all coincide the first member is split off
    on its own.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < k:
        raise ValueError(f"need at least {k} points, got {n}")
    first = int(rng.integers(n))
    chosen = [first]
    nearest = distances_to(points, points[first], counters)
    while len(chosen) < k:
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        if len(chosen) < k:
            nearest = np.minimum(nearest, distances_to(points, points[nxt], counters))
    assign = _lloyd(points, points[chosen], counters)
    if np.unique(assign).size == k:
        return assign
    a = int(np.argmax(distances_to(points, points[0], counters)))
    from_a = distances_to(points, points[a], counters)
    seeds = [a, int(np.argmax(from_a))]
    nearest = from_a
    while len(seeds) < k:
        nearest = np.minimum(nearest, distances_to(points, points[seeds[-1]], counters))
        seeds.append(int(np.argmax(nearest)))
    assign = _lloyd(points, points[seeds], counters)
    if np.unique(assign).size == k:
        return assign
    # coincident points: peel the first k-1 members off as singletons
    assign = np.zeros(n, dtype=np.int64)
    assign[: k - 1] = np.arange(1, k)
    return assign


def two_means(points, seed, counters: Counters | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Partition ``points`` into two nonempty clusters; returns index arrays."""
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] < 2:
        raise ValueError("two_means needs at least 2 points")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    assign = k_means(points, 2, rng, counters)
    return np.flatnonzero(assign == 0), np.flatnonzero(assign == 1)


def granulate_kmeans_baseline(dataset: Dataset, config: GranulationConfig | None = None) -> GranulationResult:
    """Original granulation: split each impure ball with k-means until all balls are pure enough.

    No orphan removal and no de-conflict; single-sample balls are kept.
    """
    config = config or GranulationConfig(method=Method.KMEANS_BASELINE)
    if config.method is not Method.KMEANS_BASELINE:
        raise ValueError("granulate_kmeans_baseline() requires method=KMEANS_BASELINE")
    if dataset.n == 0:
        raise ValueError("empty dataset")
    start = time.perf_counter()
    counters = Counters()
    ids = itertools.count()
    rng = np.random.default_rng(config.kmeans_seed)
    P = config.purity_threshold
    X, y = dataset.X, dataset.y

    balls = [make_ball(X, y, np.arange(dataset.n), 0, next(ids), counters)]
    history = [_record(0, balls, [], P)]
    iterations = 0
    while any(b.purity < P for b in balls):
        iterations += 1
        if iterations > config.max_iterations:
            raise GranulationError(
                f"granulation exceeded {config.max_iterations} iterations\n{_summary(balls)}"
            )
        nxt = []
        for ball in balls:
            if ball.purity >= P:
                nxt.append(ball)
                continue
            k = min(config.kmeans_k, ball.size)
            assign = k_means(X[ball.members], k, rng, counters)
            for j in range(k):
                part = ball.members[assign == j]
                child = make_ball(X, y, part, ball.generation + 1, next(ids), counters)
                nxt.append(child)
        balls = nxt
        history.append(_record(iterations, balls, [], P))

    return GranulationResult(
        balls=balls,
        outliers=np.empty(0, dtype=np.int64),
        iterations=iterations,
        distance_evaluations=counters.distance_evaluations,
        wall_time=time.perf_counter() - start,
        config=config,
        n_samples=dataset.n,
        history=history,
    )


def run_granulation(dataset: Dataset, config: GranulationConfig) -> GranulationResult:
    if config.method is Method.KMEANS_BASELINE:
        return granulate_kmeans_baseline(dataset, config)
    return granulate(dataset, config)
