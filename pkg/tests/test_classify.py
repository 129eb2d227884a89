import numpy as np
import pytest

from gbgpp.classify import (
    BallClassifier,
    Rule,
    knn_predict_many,
    predict_gbknn_original,
    predict_gbknn_pp,
    predict_knn,
)
from gbgpp.core import Counters, Dataset, GranularBall


def gb(center, radius, size, label, ball_id):
    return GranularBall(np.asarray(center, float), radius, np.arange(size), label, 1.0, 1, ball_id)


def test_harmonic_worked_example():
    balls = [gb((0, 0), 1.0, 5, 0, 1), gb((4, 0), 1.0, 5, 1, 2)]
    clf = BallClassifier.from_balls(balls)
    np.testing.assert_allclose(clf.scores((1, 0)), [0.5, 2.5], atol=1e-12)
    assert predict_gbknn_pp(clf, (1, 0)) == (0, 1)


def test_harmonic_prefers_larger_ball_at_equal_distance():
    balls = [gb((-1, 0), 0.5, 1, 0, 1), gb((1, 0), 0.5, 5, 1, 2)]
    assert predict_gbknn_pp(BallClassifier.from_balls(balls), (0, 0)) == (1, 2)


def test_single_ball_always_wins():
    clf = BallClassifier.from_balls([gb((0, 0), 1.0, 3, 4, 0)])
    for x in [(100, 100), (-3, 2), (0, 0)]:
        assert predict_gbknn_pp(clf, x)[0] == 4


def test_surface_worked_example():
    balls = [gb((0, 0), 2.0, 3, 0, 1), gb((5, 0), 0.5, 3, 1, 2)]
    clf = BallClassifier.from_balls(balls, Rule.SURFACE)
    np.testing.assert_allclose(clf.scores((3, 0)), [1.0, 1.5], atol=1e-12)
    assert predict_gbknn_original(clf, (3, 0)) == (0, 1)


def test_surface_interior_beats_exterior():
    # x sits 0.4 inside the small ball and 0.1 outside the large one
    balls = [gb((3, 0), 2.7, 3, 0, 0), gb((0, 0), 0.5, 3, 1, 1)]
    clf = BallClassifier.from_balls(balls, Rule.SURFACE)
    np.testing.assert_allclose(clf.scores((0.1, 0)), [0.2, -0.4], atol=1e-12)
    assert predict_gbknn_original(clf, (0.1, 0)) == (1, 1)


def test_exact_tie_goes_to_smaller_ball_id():
    balls = [gb((1, 0), 1.0, 2, 1, 7), gb((-1, 0), 1.0, 2, 0, 3)]
    for rule in Rule:
        clf = BallClassifier.from_balls(balls, rule)
        assert clf.predict_one((0, 0)) == (0, 3)
        assert clf.predict(np.array([[0.0, 0.0]]))[0] == 0


def test_rule_mismatch_raises():
    clf = BallClassifier.from_balls([gb((0, 0), 1.0, 2, 0, 0)], Rule.SURFACE)
    with pytest.raises(ValueError):
        predict_gbknn_pp(clf, (0, 0))
    with pytest.raises(ValueError):
        predict_gbknn_original(BallClassifier.from_balls([gb((0, 0), 1.0, 2, 0, 0)]), (0, 0))
    with pytest.raises(ValueError):
        BallClassifier.from_balls([])


def test_prediction_counts_one_distance_per_ball():
    rng = np.random.default_rng(0)
    balls = [gb(rng.normal(size=3), 0.5, 2 + i, i % 2, i) for i in range(9)]
    clf = BallClassifier.from_balls(balls)
    c = Counters()
    clf.predict_one(np.zeros(3), c)
    assert c.distance_evaluations == 9
    c = Counters()
    clf.predict(rng.normal(size=(4, 3)), c)
    assert c.distance_evaluations == 36


def test_batch_matches_single_predictions():
    rng = np.random.default_rng(1)
    balls = [gb(rng.normal(size=2), abs(rng.normal()), int(rng.integers(2, 9)), int(rng.integers(3)), i)
             for i in range(15)]
    X = rng.normal(size=(200, 2))
    for rule in Rule:
        clf = BallClassifier.from_balls(balls, rule)
        assert clf.predict(X).tolist() == [clf.predict_one(x)[0] for x in X]


def test_constant_shift_in_penalty_does_not_change_argmin():
    rng = np.random.default_rng(2)
    balls = [gb(rng.normal(size=2), 0.3, 4, i % 3, i) for i in range(10)]
    clf = BallClassifier.from_balls(balls)
    # equal sizes: harmonic rule degenerates to nearest center
    for x in rng.normal(size=(50, 2)):
        nearest = np.argmin(np.linalg.norm(clf.centers - x, axis=1))
        assert clf.predict_one(x)[0] == clf.labels[nearest]


def test_dimension_mismatch():
    clf = BallClassifier.from_balls([gb((0, 0), 1.0, 2, 0, 0)])
    with pytest.raises(ValueError):
        clf.predict(np.zeros((2, 3)))


def _train():
    X = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
    return Dataset(X, [0, 0, 1, 1, 1, 0])


def test_knn_examples():
    t = _train()
    assert predict_knn(t, [10.0], 1) == 1
    assert predict_knn(t, [0.4], 3) == 0
    assert predict_knn(t, [5.0], 6) == 0  # 3 vs 3 tie -> smaller label
    with pytest.raises(ValueError):
        predict_knn(t, [0.0], 7)


def test_knn_distance_tie_prefers_smaller_index():
    t = Dataset(np.array([[1.0], [-1.0]]), [1, 0], index=[5, 2])
    assert predict_knn(t, [0.0], 1) == 0


def test_knn_many_matches_single():
    rng = np.random.default_rng(3)
    t = Dataset(rng.normal(size=(40, 2)), rng.integers(0, 3, 40))
    X = rng.normal(size=(25, 2))
    many = knn_predict_many(t, X, [1, 3, 5])
    for k, preds in many.items():
        assert preds.tolist() == [predict_knn(t, x, k) for x in X]
