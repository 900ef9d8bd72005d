import math

import numpy as np
import pytest

from flowlab.errors import FlowlabError, NoRounds, SingleClass
from flowlab.learners.boosting import ALPHA_CAP, BoostParams, adaboost_fit, adaboost_predict


def fit(X, y, **kw):
    return adaboost_fit(np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.int64), **kw)


QUARTER_ERR_X = [[0.0], [1.0], [2.0], [3.0]]
QUARTER_ERR_Y = [0, 1, 1, 0]  # best stump cuts at 0.5 and misses one of four


def test_round_one_alpha_quarter_error():
    model = fit(QUARTER_ERR_X, QUARTER_ERR_Y, n_rounds=1)
    stump, alpha = model.params.rounds[0]
    assert model.train_meta["weighted_errors"][0] == 0.25
    assert abs(alpha - math.log(3.0)) < 1e-12  # ln((1-e)/e) + ln(K-1), K=2


def test_learning_rate_scales_alpha():
    model = fit(QUARTER_ERR_X, QUARTER_ERR_Y, n_rounds=1, learning_rate=0.5)
    _, alpha = model.params.rounds[0]
    assert abs(alpha - 0.5 * math.log(3.0)) < 1e-12


def test_round_one_alpha_three_classes():
    # first stump cuts off the pure 0-block and errs on the two 2s: e = 1/3
    X = [[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]]
    y = [0, 0, 1, 1, 2, 2]
    model = fit(X, y, n_rounds=1)
    _, alpha = model.params.rounds[0]
    e = model.train_meta["weighted_errors"][0]
    assert abs(alpha - (math.log((1.0 - e) / e) + math.log(2.0))) < 1e-12
    assert abs(e - 1.0 / 3.0) < 1e-12


def test_separable_data_stops_after_one_capped_round():
    X = [[0.0], [1.0], [10.0], [11.0]]
    y = [0, 0, 1, 1]
    model = fit(X, y, n_rounds=50)
    assert len(model.params.rounds) == 1
    assert model.params.rounds[0][1] == ALPHA_CAP
    assert model.train_meta["weighted_errors"] == [0.0]
    got = adaboost_predict(model, np.asarray(X))
    assert got.tolist() == y


def test_alpha_cap_is_ln_1e10():
    assert ALPHA_CAP == math.log(1e10)


def test_prediction_weighs_rounds_by_alpha():
    # two disagreeing stumps: the alpha=1.0 one must outvote the 0.5 one
    from flowlab.learners.base import TrainedModel
    from flowlab.learners.trees import Leaf, Split

    says_one = Split(feature=0, threshold=-1.0, left=Leaf(1, (1, 0)), right=Leaf(1, (0, 1)))
    says_zero = Split(feature=0, threshold=-1.0, left=Leaf(0, (1, 0)), right=Leaf(0, (0, 1)))
    params = BoostParams(rounds=((says_one, 1.0), (says_zero, 0.5)), n_rounds=2, learning_rate=1.0)
    model = TrainedModel(
        algorithm="adaboost", classes=(0, 1), feature_names=("f0",), params=params, train_meta={}
    )
    assert adaboost_predict(model, np.asarray([[0.0]]))[0] == 1
    # equal alphas tie: lower class code wins
    params = BoostParams(rounds=((says_one, 1.0), (says_zero, 1.0)), n_rounds=2, learning_rate=1.0)
    model = TrainedModel(
        algorithm="adaboost", classes=(0, 1), feature_names=("f0",), params=params, train_meta={}
    )
    assert adaboost_predict(model, np.asarray([[0.0]]))[0] == 0


def test_weights_renormalize_each_round():
    # after a 0.25-error round the three survivors shrink and the miss grows;
    # weights must still sum to one, which shows up as a second usable round
    model = fit(QUARTER_ERR_X, QUARTER_ERR_Y, n_rounds=4)
    errors = model.train_meta["weighted_errors"]
    assert len(errors) >= 2
    for e in errors:
        assert 0.0 <= e < 0.5  # kept rounds stay under the 2-class barrier


def test_multiclass_chance_barrier_uses_k():
    # for K=3 a round only needs e < 2/3 to be kept
    X = [[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]]
    y = [0, 0, 1, 1, 2, 2]
    model = fit(X, y, n_rounds=10)
    for e in model.train_meta["weighted_errors"]:
        assert e < 2.0 / 3.0


def test_boosting_improves_on_its_first_stump():
    # one stump cannot express this pattern; a few boosted rounds can
    X = [[float(i)] for i in range(8)]
    y = [0, 0, 1, 1, 0, 0, 1, 1]
    one = fit(X, y, n_rounds=1)
    many = fit(X, y, n_rounds=30)
    acc = lambda m: float(np.mean(adaboost_predict(m, np.asarray(X)) == np.asarray(y)))
    assert acc(many) >= acc(one)
    assert acc(many) > 0.5


def test_predict_without_rounds_raises():
    from flowlab.learners.base import TrainedModel

    params = BoostParams(rounds=(), n_rounds=5, learning_rate=1.0)
    model = TrainedModel(
        algorithm="adaboost", classes=(0, 1), feature_names=("f0",), params=params, train_meta={}
    )
    with pytest.raises(NoRounds):
        adaboost_predict(model, np.asarray([[0.0]]))


def test_guards():
    with pytest.raises(SingleClass):
        fit([[0.0], [1.0]], [1, 1])
    with pytest.raises(FlowlabError):
        fit([[0.0], [1.0]], [0, 1], n_rounds=0)
    with pytest.raises(FlowlabError):
        fit([[0.0], [1.0]], [0, 1], learning_rate=0.0)
