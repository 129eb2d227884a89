"""Cross-validation harness, label noise, and the statistics used to compare runs."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .classify import BallClassifier, Rule, knn_predict_many
from .core import Counters, Dataset
from .granulation import GranulationConfig, run_granulation
from .io import fit_apply_minmax

DEFAULT_KNN_GRID = (1, 3, 5, 7, 9, 11, 13, 15)

# tabulated two-sided critical value of T at alpha = 0.05 for N = 20 pairs
WILCOXON_N = 20
WILCOXON_CRITICAL_T = 52


class EvalError(RuntimeError):
    pass


def stratified_kfold(dataset: Dataset, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified fold assignment; returns ``(train, test)`` position arrays.

    Each class is shuffled and dealt round-robin, continuing the deal where
    the previous class stopped so that fold sizes differ by at most one.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > dataset.n:
        raise ValueError(f"folds={folds} exceeds the number of samples ({dataset.n})")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(dataset.n, dtype=np.int64)
    offset = 0
    for c in dataset.classes:
        members = rng.permutation(np.flatnonzero(dataset.y == c))
        fold_of[members] = (offset + np.arange(members.size)) % folds
        offset = (offset + members.size) % folds
    positions = np.arange(dataset.n)
    return [(positions[fold_of != f], positions[fold_of == f]) for f in range(folds)]


def inject_label_noise(dataset: Dataset, rate: float, seed: int) -> Dataset:
    """Flip the labels of ``round(rate * n)`` randomly chosen samples.

    Each flipped sample gets a label drawn uniformly from the other classes.
    Rounding is half-up.
    """
    if not 0 <= rate <= 1:
        raise ValueError(f"noise rate must be in [0, 1], got {rate}")
    count = int(math.floor(rate * dataset.n + 0.5))
    if count == 0:
        return dataset.with_labels(dataset.y.copy())
    classes = np.array(dataset.classes)
    if classes.size < 2:
        raise ValueError("label noise needs at least two classes")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(dataset.n, size=count, replace=False)
    y = dataset.y.copy()
    for pos in chosen:
        others = classes[classes != y[pos]]
        y[pos] = others[rng.integers(others.size)]
    return dataset.with_labels(y)


@dataclass
class EvalReport:
    method: str
    dataset: str
    per_fold_accuracies: list[float]
    mean_accuracy: float
    sd_accuracy: float
    granulate_time: float
    predict_time: float
    distance_evaluations: int
    folds: int
    seed: int
    config: dict = field(default_factory=dict)
    balls_per_fold: list[int] = field(default_factory=list)
    outliers_per_fold: list[int] = field(default_factory=list)
    normalization: str = "min-max per training fold"

    @property
    def total_time(self) -> float:
        return self.granulate_time + self.predict_time

    @property
    def lnt(self) -> float:
        return lnt(self.total_time / self.folds)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total_time"] = self.total_time
        d["lnt"] = self.lnt
        return d


def _summarize(accs: Sequence[float]) -> tuple[float, float]:
    a = np.asarray(accs, dtype=np.float64)
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


FitPredict = Callable[[Dataset, Dataset], np.ndarray]


def cross_validate(
    dataset: Dataset,
    config: GranulationConfig | None = None,
    rule: Rule | str = Rule.HARMONIC,
    folds: int = 10,
    seed: int = 0,
    fit_predict: FitPredict | None = None,
    method: str | None = None,
) -> EvalReport:
    """Stratified k-fold evaluation of a ball classifier.

    Per fold: fit min-max on the training part, granulate it, build the
    classifier, normalize the test part with the same parameters and
    predict. ``fit_predict(train, test) -> labels`` replaces that pipeline
    when given (it receives unnormalized folds).
    """
    config = config or GranulationConfig()
    rule = Rule(rule)
    accs, balls, outl = [], [], []
    t_gran = t_pred = 0.0
    evaluations = 0
    for train_pos, test_pos in stratified_kfold(dataset, folds, seed):
        train, test = dataset.subset(train_pos), dataset.subset(test_pos)
        if fit_predict is not None:
            t0 = time.perf_counter()
            pred = np.asarray(fit_predict(train, test))
            t_pred += time.perf_counter() - t0
        else:
            t0 = time.perf_counter()
            train, (test,), _ = fit_apply_minmax(train, [test])
            result = run_granulation(train, config)
            if not result.balls:
                raise EvalError("empty model: granulation dropped every ball")
            model = BallClassifier.from_balls(result.balls, rule)
            t1 = time.perf_counter()
            counters = Counters()
            pred = model.predict(test.X, counters)
            t_pred += time.perf_counter() - t1
            t_gran += t1 - t0
            evaluations += result.distance_evaluations + counters.distance_evaluations
            balls.append(len(result.balls))
            outl.append(int(result.outliers.size))
        accs.append(float(np.mean(pred == test.y)))
    mean, sd = _summarize(accs)
    return EvalReport(
        method=method or (f"{config.method.value}/{rule.value}" if fit_predict is None else "custom"),
        dataset=dataset.name,
        per_fold_accuracies=accs,
        mean_accuracy=mean,
        sd_accuracy=sd,
        granulate_time=t_gran,
        predict_time=t_pred,
        distance_evaluations=evaluations,
        folds=folds,
        seed=seed,
        config=config.to_dict() | {"rule": rule.value} if fit_predict is None else {},
        balls_per_fold=balls,
        outliers_per_fold=outl,
    )


def cross_validate_knn(
    dataset: Dataset, ks: Sequence[int] = DEFAULT_KNN_GRID, folds: int = 10, seed: int = 0
) -> EvalReport:
    """Plain kNN; each fold's accuracy is the mean over the ``ks`` grid."""
    accs = []
    t_pred = 0.0
    for train_pos, test_pos in stratified_kfold(dataset, folds, seed):
        t0 = time.perf_counter()
        train, (test,), _ = fit_apply_minmax(dataset.subset(train_pos), [dataset.subset(test_pos)])
        preds = knn_predict_many(train, test.X, [k for k in ks if k <= train.n])
        t_pred += time.perf_counter() - t0
        accs.append(float(np.mean([np.mean(p == test.y) for p in preds.values()])))
    mean, sd = _summarize(accs)
    return EvalReport(
        method="knn", dataset=dataset.name, per_fold_accuracies=accs, mean_accuracy=mean,
        sd_accuracy=sd, granulate_time=0.0, predict_time=t_pred, distance_evaluations=0,
        folds=folds, seed=seed, config={"ks": list(ks)},
    )


@dataclass(frozen=True)
class WilcoxonResult:
    r_plus: float
    r_minus: float
    n: int
    reject_at_0_05: bool | None

    @property
    def statistic_T(self) -> float:
        return min(self.r_plus, self.r_minus)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_signed_rank(diffs) -> WilcoxonResult:
    """Signed-rank sums with zero differences split evenly between both sides.

    ``|d|`` is ranked ascending with average ranks for ties. ``R+`` sums the
    ranks of positive differences, ``R-`` of negative ones, and each zero
    contributes half its rank to both. The rejection flag applies the
    tabulated critical value ``T <= 52`` and is only defined for 20 pairs.
    """
    d = np.asarray(diffs, dtype=np.float64)
    if d.size == 0:
        raise ValueError("no differences")
    ranks = _average_ranks(np.abs(d))
    half_zero = ranks[d == 0].sum() / 2
    r_plus = float(ranks[d > 0].sum() + half_zero)
    r_minus = float(ranks[d < 0].sum() + half_zero)
    reject = min(r_plus, r_minus) <= WILCOXON_CRITICAL_T if d.size == WILCOXON_N else None
    return WilcoxonResult(r_plus, r_minus, int(d.size), reject)


def lnt(seconds: float) -> float:
    if seconds <= 0:
        raise ValueError("time must be positive")
    return math.log(seconds)


def purity_sweep(
    dataset: Dataset, thresholds: Sequence[float], base: GranulationConfig | None = None,
    rule: Rule | str = Rule.HARMONIC, folds: int = 10, seed: int = 0,
) -> list[EvalReport]:
    base = base or GranulationConfig()
    return [
        cross_validate(dataset, replace(base, purity_threshold=p), rule, folds, seed)
        for p in thresholds
    ]

