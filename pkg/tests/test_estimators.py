import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from stackconflict.conflict import conflict_predicate
from stackconflict.estimators import ConflictRegionClassifier, RewardTransformer
from stackconflict.game import LANE_CHANGE_GAME, BimatrixGame, PlayerId
from stackconflict.transforms import SocialParams, transform_game


def test_transformer_params_and_clone():
    t = RewardTransformer("svo", alpha_row=0.3, alpha_col=1.2)
    assert t.get_params() == {"model": "svo", "alpha_row": 0.3, "alpha_col": 1.2}
    c = clone(t).set_params(alpha_row=0.0)
    assert c.alpha_row == 0.0 and t.alpha_row == 0.3


def test_transformer_matches_transform_game():
    game = BimatrixGame.from_pairs([[(1, 2), (3, -4)], [(0.5, 6), (7, 8)]])
    params = SocialParams("aug", 0.4, 0.7)
    expected = transform_game(game, params).payoffs.reshape(-1, 2)
    out = RewardTransformer("aug", 0.4, 0.7).fit_transform(game.payoffs.reshape(-1, 2))
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_transformer_validation():
    with pytest.raises(NotFittedError):
        RewardTransformer().transform([[1.0, 2.0]])
    with pytest.raises(ValueError):
        RewardTransformer("altruism", 2.0).fit([[1.0, 2.0]])
    with pytest.raises(ValueError):
        RewardTransformer().fit([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        RewardTransformer().fit([[1.0, 2.0]]).transform([[1.0]])


def test_transformer_in_pipeline():
    pipe = make_pipeline(FunctionTransformer(lambda x: 2 * x), RewardTransformer("altruism", 0.5, 0.0))
    out = pipe.fit_transform(np.array([[1.0, 3.0]]))
    np.testing.assert_allclose(out, [[4.0, 6.0]])


def test_classifier_fit_and_predict():
    clf = ConflictRegionClassifier("altruism", 1, 1).fit()
    assert clf.aoc_ == 0.5
    assert clf.predict([[0.25, 0.25], [0.75, 0.25]]).tolist() == [True, False]
    assert clf.classes_.tolist() == [False, True]


def test_classifier_methods_agree_off_boundary():
    rng = np.random.default_rng(11)
    X = rng.uniform(0, 1, (500, 2))
    for model in ("pure", "altruism", "aug", "svo"):
        upper = np.pi / 2 if model == "svo" else 1.0
        pts = X * upper * (0.999 if model == "aug" else 1.0)
        a = ConflictRegionClassifier(model, 2.0, 0.7).fit().predict(pts)
        b = ConflictRegionClassifier(model, 2.0, 0.7, method="equilibrium").fit().predict(pts)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(a, conflict_predicate(model, (2.0, 0.7), pts[:, 0], pts[:, 1]))


def test_classifier_validation():
    with pytest.raises(NotFittedError):
        ConflictRegionClassifier().predict([[0.1, 0.1]])
    with pytest.raises(ValueError):
        ConflictRegionClassifier(method="magic").fit()
    with pytest.raises(ValueError):
        ConflictRegionClassifier(A=0).fit()
    clf = ConflictRegionClassifier("altruism").fit()
    with pytest.raises(ValueError):
        clf.predict([[1.5, 0.1]])
    assert clone(clf).get_params()["model"] == "altruism"


def test_score_uses_predictions():
    clf = ConflictRegionClassifier("altruism", 1, 1).fit()
    X = np.array([[0.25, 0.25], [0.75, 0.25]])
    assert clf.score(X, [True, False]) == 1.0


def test_lane_change_game_unchanged_by_identity_transformer():
    finite = np.where(LANE_CHANGE_GAME.sentinel, 0.0, LANE_CHANGE_GAME.payoffs).reshape(-1, 2)
    out = RewardTransformer().fit_transform(finite)
    np.testing.assert_array_equal(out, finite)
    assert LANE_CHANGE_GAME.reward(1, 0, PlayerId.ROW) == out[2, 0]
