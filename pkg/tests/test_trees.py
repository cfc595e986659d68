# tests/test_trees.py
import numpy as np
import pytest
import scipy.sparse as sp

from common.errors import ConfigError, ShapeError
from trees.boosting import BoostConfig, BoostedTrees, base_score, logistic_loss, train_gbt
from trees.cart import DecisionTree, TreeConfig, gini, train_tree
from trees.forest import Forest, ForestConfig, train_forest
from trees.projection import DenseProjection


def _blobs(n=120, seed=0):
    g = np.random.Generator(np.random.PCG64(seed))
    X = g.normal(size=(n, 5))
    y = ((X[:, 0] > 0.2) | (X[:, 3] < -0.8)).astype(int)
    return X, y


# ------------------------------
# cart
# ------------------------------

def test_gini():
    assert gini((0, 0)) == 0.0
    assert gini((3, 0)) == 0.0
    assert gini((2, 2)) == pytest.approx(0.5)
    assert gini((1, 3)) == pytest.approx(0.375)


def test_single_threshold_split():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    tree = train_tree(X, [0, 0, 1, 1])
    assert tree.n_nodes == 3 and tree.n_leaves == 2 and tree.depth() == 1
    assert tree.threshold[0] == pytest.approx(2.5)
    assert tree.predict_value(np.array([[2.5], [2.6]])).tolist() == [0.0, 1.0]


def test_no_split_without_impurity_decrease():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    tree = train_tree(X, [0, 1, 1, 0])
    assert tree.n_nodes == 1
    assert tree.value[0] == pytest.approx(0.5)


def test_depth_and_leaf_size_limits():
    X, y = _blobs()
    stump = train_tree(X, y, TreeConfig(max_depth=0))
    assert stump.n_nodes == 1 and stump.value[0] == pytest.approx(y.mean())
    assert train_tree(X, y, TreeConfig(max_depth=2)).depth() <= 2
    assert train_tree(X[:4], y[:4], TreeConfig(min_samples_leaf=3)).n_nodes == 1


def test_deep_tree_fits_distinct_rows():
    X, _ = _blobs(60, seed=1)
    y = np.random.Generator(np.random.PCG64(2)).integers(0, 2, size=60)
    tree = train_tree(X, y, TreeConfig(max_depth=60))
    assert tree.predict_value(X).tolist() == y.astype(float).tolist()


def test_zero_weight_rows_are_ignored():
    X = np.array([[1.0], [2.0], [3.0]])
    tree = train_tree(X, [0, 1, 1], sample_weight=np.array([0.0, 1.0, 1.0]))
    assert tree.n_nodes == 1 and tree.value[0] == 1.0


def test_tree_dict_round_trip():
    X, y = _blobs(seed=3)
    tree = train_tree(X, y, TreeConfig(max_depth=4))
    again = DecisionTree.from_dict(tree.to_dict())
    assert np.array_equal(again.predict_value(X), tree.predict_value(X))


def test_tree_input_errors():
    with pytest.raises(ShapeError):
        train_tree(np.zeros((0, 2)), [])
    with pytest.raises(ShapeError):
        train_tree(np.zeros((3, 2)), [0, 1])
    with pytest.raises(ShapeError):
        train_tree(np.zeros((2, 2)), [0, 3])
    with pytest.raises(ShapeError):
        train_tree(np.zeros((2, 1)), [0, 1], sample_weight=np.zeros(2))
    with pytest.raises(ConfigError):
        TreeConfig(max_features="log2")
    with pytest.raises(ConfigError):
        TreeConfig(min_samples_leaf=0)


# ------------------------------
# projection
# ------------------------------

def test_projection_keeps_top_columns_and_dense_tail():
    X = sp.csr_matrix(np.array([
        [1.0, 0.0, 1.0, 0.0, 0.5],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.2],
    ]))
    proj = DenseProjection.fit(X, sparse_width=3, top_k=2)
    assert proj.columns.tolist() == [0, 1, 4]
    out = proj.transform(X)
    assert out.shape == (3, 3)
    assert out[:, 2].tolist() == [0.5, 0.0, 0.2]
    assert DenseProjection.from_dict(proj.to_dict()).columns.tolist() == [0, 1, 4]
    with pytest.raises(ShapeError):
        proj.transform(sp.csr_matrix(np.ones((1, 4))))


def test_projection_ranks_by_collection_frequency():
    # col0: cf=3, df=3; col1: cf=10, df=1
    counts = sp.csr_matrix(np.array([[1.0, 10.0], [1.0, 0.0], [1.0, 0.0]]))
    assert DenseProjection.fit(counts, top_k=1).columns.tolist() == [1]

    weighted = sp.csr_matrix(np.array([[0.5, 0.1], [0.5, 0.0], [0.5, 0.0]]))
    assert DenseProjection.fit(weighted, top_k=1).columns.tolist() == [0]
    assert DenseProjection.fit(weighted, top_k=1, cf=np.array([3, 10])).columns.tolist() == [1]


def test_projection_cf_ties_go_to_lower_index():
    X = sp.csr_matrix(np.ones((2, 4)))
    proj = DenseProjection.fit(X, top_k=2, cf=np.array([5, 7, 7, 7]))
    assert proj.columns.tolist() == [1, 2]
    with pytest.raises(ShapeError):
        DenseProjection.fit(X, sparse_width=3, top_k=2, cf=np.array([1, 2]))


# ------------------------------
# forest
# ------------------------------

def test_forest_is_deterministic_and_accurate():
    X, y = _blobs()
    cfg = ForestConfig(n_trees=15, seed=4)
    a, b = train_forest(X, y, cfg), train_forest(X, y, cfg)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))
    assert (a.predict(X) == y).mean() > 0.9
    assert len(a.trees) == 15


def test_forest_parallel_matches_serial():
    X, y = _blobs(seed=5)
    serial = train_forest(X, y, ForestConfig(n_trees=6, seed=1))
    parallel = train_forest(X, y, ForestConfig(n_trees=6, seed=1, n_jobs=2))
    assert np.array_equal(serial.predict_proba(X), parallel.predict_proba(X))


def test_forest_all_positive_labels():
    X, _ = _blobs(20)
    forest = train_forest(X, np.ones(20, dtype=int), ForestConfig(n_trees=3))
    assert forest.predict(X).tolist() == [1] * 20


def test_forest_round_trip_and_config():
    X, y = _blobs(seed=6)
    forest = train_forest(X, y, ForestConfig(n_trees=4, max_depth=3))
    again = Forest.from_dict(forest.to_dict())
    assert np.array_equal(again.predict_proba(X), forest.predict_proba(X))
    with pytest.raises(ConfigError):
        ForestConfig(n_trees=0)


# ------------------------------
# boosting
# ------------------------------

def test_base_score_is_clipped_log_odds():
    assert base_score(np.array([0, 1, 1, 1])) == pytest.approx(np.log(3.0))
    assert np.isfinite(base_score(np.ones(5)))
    assert logistic_loss(np.array([1.0]), np.array([0.0])) == pytest.approx(np.log(2.0))


def test_boosting_loss_never_increases():
    X, y = _blobs(seed=7)
    model = train_gbt(X, y, BoostConfig(n_rounds=50))
    h = model.loss_history
    assert len(h) == 51
    assert all(b <= a + 1e-12 for a, b in zip(h, h[1:]))
    assert h[-1] < h[0]
    assert (model.predict(X) == y).mean() > 0.9


def test_zero_rounds_predicts_majority():
    X, _ = _blobs(10)
    y = np.array([1] * 7 + [0] * 3)
    model = train_gbt(X, y, BoostConfig(n_rounds=0))
    assert model.trees == []
    assert model.predict(X).tolist() == [1] * 10


def test_boosting_round_trip_and_errors():
    X, y = _blobs(seed=8)
    model = train_gbt(X, y, BoostConfig(n_rounds=5))
    again = BoostedTrees.from_dict(model.to_dict())
    assert np.array_equal(again.decision_function(X), model.decision_function(X))
    assert np.all((model.predict_proba(X) > 0) & (model.predict_proba(X) < 1))
    with pytest.raises(ShapeError):
        train_gbt(np.zeros((0, 2)), [])
    with pytest.raises(ConfigError):
        BoostConfig(shrinkage=-0.1)
