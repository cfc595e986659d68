# tests/test_linear.py
import numpy as np
import pytest
import scipy.sparse as sp

from common.errors import ConfigError, ShapeError
from features.stack import FeatureVector
from linear.model import LinearModel, LossKind, TrainConfig, predict_label, predict_score
from linear.sgd import finite_diff_check, loss_gradient, loss_value, objective, train_linear

AND_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
AND_Y = np.array([0, 0, 0, 1])


def _separable(n=80, seed=0):
    g = np.random.Generator(np.random.PCG64(seed))
    X = g.normal(size=(n, 4))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int)
    return sp.csr_matrix(X), y


# ------------------------------
# loss and gradient
# ------------------------------

def test_logistic_gradient_matches_finite_differences():
    g = np.random.Generator(np.random.PCG64(7))
    for _ in range(100):
        w = 0.3 * g.normal(size=5)
        x = g.uniform(0.5, 1.5, size=5) * g.choice([-1.0, 1.0], size=5)
        b = float(0.3 * g.normal())
        y = int(g.integers(0, 2))
        assert finite_diff_check(LossKind.LOGISTIC, w, b, x, y, h=1e-6) < 1e-5


def test_hinge_gradient_away_from_the_kink():
    g = np.random.Generator(np.random.PCG64(8))
    checked = 0
    while checked < 100:
        w = g.normal(size=5)
        x = g.uniform(0.5, 1.5, size=5) * g.choice([-1.0, 1.0], size=5)
        b = float(g.normal())
        y = int(g.integers(0, 2))
        margin = (2 * y - 1) * (np.dot(w, x) + b)
        if abs(1.0 - margin) < 1e-2:
            continue
        assert finite_diff_check(LossKind.HINGE, w, b, x, y, h=1e-6) < 1e-5
        checked += 1


@pytest.mark.parametrize("h", [0.0, -1e-3, float("nan")])
def test_finite_diff_rejects_bad_step(h):
    with pytest.raises(ValueError, match="invalid step"):
        finite_diff_check(LossKind.LOGISTIC, np.zeros(2), 0.0, np.ones(2), 1, h)


def test_loss_values():
    w, x = np.array([1.0, -1.0]), np.array([2.0, 1.0])
    assert loss_value(LossKind.LOGISTIC, w, 0.0, x, 1) == pytest.approx(np.log1p(np.exp(-1.0)))
    assert loss_value(LossKind.HINGE, w, 0.0, x, 1) == 0.0
    assert loss_value(LossKind.HINGE, w, 0.0, x, 0) == pytest.approx(2.0)
    gw, gb = loss_gradient(LossKind.HINGE, w, 0.0, x, 0)
    assert gw.tolist() == [2.0, 1.0] and gb == 1.0


def test_objective_includes_l2_term():
    X = sp.csr_matrix(np.zeros((2, 2)))
    w = np.array([3.0, 4.0])
    val = objective(LossKind.HINGE, X, np.array([0, 1]), w, 0.0, l2_lambda=0.1)
    assert val == pytest.approx(1.0 + 0.5 * 0.1 * 25.0)


# ------------------------------
# training
# ------------------------------

def test_logistic_learns_and():
    model = train_linear(AND_X, AND_Y, TrainConfig(learning_rate=1.0, epochs=300, tolerance=0.0))
    preds = [predict_label(model, x) for x in AND_X]
    assert preds == AND_Y.tolist()


def test_hinge_separates_wide_margin():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    model = train_linear(X, y, TrainConfig(loss_kind=LossKind.HINGE))
    assert model.weights[0] > 0
    assert (model.decision_function(sp.csr_matrix(X)) > 0).astype(int).tolist() == y.tolist()


def test_training_is_deterministic():
    X, y = _separable()
    cfg = TrainConfig(seed=11, epochs=10)
    a, b = train_linear(X, y, cfg), train_linear(X, y, cfg)
    assert np.array_equal(a.weights, b.weights)
    assert a.bias == b.bias
    c = train_linear(X, y, TrainConfig(seed=12, epochs=10))
    assert not np.array_equal(a.weights, c.weights)


def test_objective_goes_down():
    X, y = _separable(seed=3)
    model = train_linear(X, y, TrainConfig(epochs=30, tolerance=0.0))
    assert len(model.loss_history) == 30
    assert model.loss_history[-1] < model.loss_history[0]


def test_early_stop_shortens_history():
    X, y = _separable(seed=4)
    model = train_linear(X, y, TrainConfig(epochs=500, tolerance=1e-3))
    assert len(model.loss_history) < 500


@pytest.mark.parametrize("X,y", [
    (np.ones((3, 2)), [0, 1]),
    (np.ones((2, 2)), [0, 2]),
    (np.ones((0, 2)), []),
])
def test_bad_training_inputs(X, y):
    with pytest.raises(ShapeError):
        train_linear(X, y)


@pytest.mark.parametrize("kwargs", [
    {"epochs": 0},
    {"l2_lambda": -1.0},
    {"learning_rate": 0.0},
    {"learning_rate": 10.0, "l2_lambda": 0.2},
    {"tolerance": -1.0},
])
def test_bad_train_config(kwargs):
    with pytest.raises(ConfigError):
        TrainConfig(**kwargs)


# ------------------------------
# prediction
# ------------------------------

def test_threshold_is_strict():
    model = LinearModel(weights=np.zeros(3), bias=0.0, loss_kind=LossKind.HINGE)
    assert predict_score(model, np.ones(3)) == 0.0
    assert predict_label(model, np.ones(3)) == 0
    assert predict_label(model, np.ones(3), threshold=-0.5) == 1


def test_accepts_feature_vectors_and_rows():
    model = LinearModel(weights=np.array([1.0, 2.0, 3.0]), bias=0.5, loss_kind=LossKind.LOGISTIC)
    fv = FeatureVector(indices=(0,), values=(1.0,), sparse_width=1, dense=np.array([0.0, 1.0]))
    assert predict_score(model, fv) == pytest.approx(4.5)
    assert predict_score(model, sp.csr_matrix([[0.0, 1.0, 0.0]])) == pytest.approx(2.5)
    with pytest.raises(ShapeError):
        predict_score(model, np.ones(2))


def test_probabilities_only_for_logistic():
    X = sp.csr_matrix(np.eye(2))
    lr = LinearModel(weights=np.zeros(2), bias=0.0, loss_kind=LossKind.LOGISTIC)
    assert lr.predict_proba(X).tolist() == [0.5, 0.5]
    svm = LinearModel(weights=np.zeros(2), bias=0.0, loss_kind=LossKind.HINGE)
    with pytest.raises(ConfigError):
        svm.predict_proba(X)


def test_model_dict_round_trip():
    X, y = _separable(seed=5)
    model = train_linear(X, y, TrainConfig(epochs=5))
    again = LinearModel.from_dict(model.to_dict())
    assert np.array_equal(again.decision_function(X), model.decision_function(X))
    assert again.config == model.config
