import numpy as np
import pytest

from affectaware.emotion.dataset import Dataset, DatasetError, gaussian_blobs, split
from affectaware.emotion.learners import (KINDS, DecisionTree, ModelError, RandomForest, load_model,
                                          save_model, train)
from affectaware.labels import Emotion


@pytest.fixture(scope="module")
def blobs():
    return split(gaussian_blobs(40, 8, seed=11), 0.8, seed=11)


def test_forest_of_one_equals_single_tree(blobs):
    tr, te = blobs
    forest = RandomForest(n_trees=1, max_features=None, bootstrap=False, seed=5).fit(tr.X, tr.y)
    tree = DecisionTree().fit(tr.X, tr.y)
    t = forest.trees[0]
    for a in ("feature", "threshold", "left", "right", "value"):
        assert np.array_equal(getattr(t, a), getattr(tree, a))
    assert np.array_equal(forest.predict(te.X), tree.predict(te.X))


def test_one_nearest_neighbour_memorises(blobs):
    tr, _ = blobs
    m = train("knn", tr, {"k": 1})
    assert (m.predict(tr.X) == tr.y).all()


def test_naive_bayes_on_well_separated_blobs():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(0, 1, (200, 2)), rng.normal(6, 1, (200, 2))])
    y = np.repeat([0, 1], 200)
    tr, te = split(Dataset(X, y), 0.8, seed=0)
    m = train("naive_bayes", tr)
    assert (m.predict(te.X) == te.y).mean() >= 0.95


def test_tree_fits_training_data(blobs):
    tr, _ = blobs
    m = train("decision_tree", tr, {"min_leaf": 1})
    assert (m.predict(tr.X) == tr.y).mean() == 1.0


def test_depth_zero_tree_predicts_majority():
    X = np.arange(5.0)[:, None]
    y = np.array([2, 2, 2, 4, 4])
    t = DecisionTree(max_depth=0).fit(X, y)
    assert t.node_count == 1
    assert t.predict(X).tolist() == [2] * 5


def test_single_class_training_predicts_that_class():
    ds = Dataset(np.random.default_rng(1).normal(size=(10, 3)), np.full(10, 4))
    for kind in KINDS:
        m = train(kind, ds, {"n_trees": 5} if kind == "random_forest" else None)
        assert set(m.predict_emotions(ds.X)) == {Emotion.SAD}


def test_empty_training_set():
    with pytest.raises(DatasetError):
        train("knn", Dataset(np.zeros((0, 2)), np.zeros(0, dtype=int)))


def test_dimension_mismatch(blobs):
    tr, _ = blobs
    m = train("naive_bayes", tr)
    with pytest.raises(ModelError, match="dimension 3 does not match model dimension 8"):
        m.predict(np.zeros((1, 3)))


def test_unknown_kind_and_hyperparameter():
    ds = gaussian_blobs(3, 2)
    with pytest.raises(ModelError):
        train("svm", ds)
    with pytest.raises(ModelError):
        train("knn", ds, {"depth": 3})


def test_naive_bayes_zero_variance_feature():
    X = np.array([[1.0, 0.0], [1.0, 0.1], [1.0, 5.0], [1.0, 5.1]])
    m = train("naive_bayes", Dataset(X, np.array([0, 0, 1, 1])))
    assert m.predict(np.array([[1.0, 0.05], [1.0, 5.05]])).tolist() == [0, 1]


def test_knn_vote_tie_goes_to_lowest_label():
    X = np.array([[0.0], [2.0]])
    m = train("knn", Dataset(X, np.array([5, 1])), {"k": 2})
    assert m.predict(np.array([[1.0]])).tolist() == [1]


@pytest.mark.parametrize("kind", KINDS)
def test_save_load_round_trip(blobs, kind):
    tr, te = blobs
    hp = {"n_trees": 7} if kind == "random_forest" else None
    m = train(kind, tr, hp, seed=3)
    text = save_model(m)
    again = load_model(text)
    assert np.array_equal(again.predict(te.X), m.predict(te.X))
    assert save_model(again) == text


def test_load_rejects_garbage():
    with pytest.raises(ModelError):
        load_model("{}")
    with pytest.raises(ModelError):
        load_model("not json")


def test_forest_is_seeded_and_thread_count_free(blobs):
    tr, te = blobs
    a = train("random_forest", tr, {"n_trees": 12}, seed=9).predict(te.X)
    b = train("random_forest", tr, {"n_trees": 12, "n_jobs": 4}, seed=9).predict(te.X)
    assert np.array_equal(a, b)
    a_text = save_model(train("random_forest", tr, {"n_trees": 12}, seed=9))
    b_text = save_model(train("random_forest", tr, {"n_trees": 12, "n_jobs": 4}, seed=9))
    assert a_text == b_text.replace('"n_jobs": 4', '"n_jobs": 1')
