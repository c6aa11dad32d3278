import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import euclidean
from geoward import FeatureTable, adjusted_rand_index, agglomerate, ari_matrix, dendrogram_entanglement, entanglement, pearson_matrix
from geoward.compare import leaf_alignment


def test_adjacent_swap_four_leaves():
    assert entanglement([1, 2, 3, 4], [2, 1, 3, 4], L=1) == pytest.approx(0.25, abs=1e-12)


def test_power_sum_variant():
    # without the root: (1 + 1) / (4 + 0 + 4) at L = 2
    assert entanglement([1, 2, 3], [1, 3, 2], L=2, root=False) == pytest.approx(0.25)
    assert entanglement([1, 2, 3], [1, 3, 2], L=2) == pytest.approx(0.5)


def test_entanglement_errors():
    with pytest.raises(ValueError):
        entanglement([1], [1])
    with pytest.raises(ValueError):
        entanglement([1, 2], [1, 2], L=0)
    with pytest.raises(ValueError):
        entanglement([1, 2, 3], [1, 2, 2])


@settings(max_examples=100)
@given(st.permutations(list(range(1, 9))), st.permutations(list(range(1, 9))), st.floats(0.5, 4))
def test_entanglement_bounded_and_symmetric(a, b, L):
    e = entanglement(a, b, L=L)
    assert -1e-12 <= e <= 1 + 1e-12
    assert e == pytest.approx(entanglement(b, a, L=L), abs=1e-12)


def test_leaf_alignment_reports_difference():
    with pytest.raises(ValueError, match="x"):
        leaf_alignment(["a", "b", "x"], ["a", "b", "y"])
    v1, v2 = leaf_alignment(["a", "b", "c"], ["c", "a", "b"])
    np.testing.assert_array_equal(v1, [1, 2, 3])
    np.testing.assert_array_equal(v2, [2, 3, 1])


def test_dendrogram_entanglement_self_and_symmetry():
    rng = np.random.default_rng(2)
    names = [f"c{i}" for i in range(8)]
    d1 = agglomerate(euclidean(rng.normal(size=(8, 2))), labels=names)
    d2 = agglomerate(euclidean(rng.normal(size=(8, 2))), labels=names)
    assert dendrogram_entanglement(d1, d1) == 0.0
    assert dendrogram_entanglement(d1, d2) == pytest.approx(dendrogram_entanglement(d2, d1))


def test_ari_examples():
    assert adjusted_rand_index([1, 1, 2, 2], [2, 2, 1, 1]) == 1.0
    with pytest.raises(ValueError):
        adjusted_rand_index([1, 2], [1, 2, 3])


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=2, max_size=25))
def test_ari_matches_pair_enumeration(pairs):
    p1, p2 = [a for a, _ in pairs], [b for _, b in pairs]
    assert adjusted_rand_index(p1, p2) == pytest.approx(oracles.ari(p1, p2), abs=1e-12)
    assert adjusted_rand_index(p1, p2) == pytest.approx(adjusted_rand_index(p2, p1), abs=1e-12)


def test_ari_against_scikit_learn():
    metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = rng.integers(0, 5, 40), rng.integers(0, 3, 40)
        assert adjusted_rand_index(a, b) == pytest.approx(metrics.adjusted_rand_score(a, b), abs=1e-12)


def test_ari_matrix_composition():
    parts = {"a": [1, 1, 2, 2, 3, 3], "b": [1, 2, 2, 3, 3, 3], "c": [1, 1, 2, 2, 3, 3]}
    names, M = ari_matrix(parts)
    assert names == ["a", "b", "c"]
    np.testing.assert_array_equal(np.diag(M), 1.0)
    assert M[0, 2] == 1.0
    assert M[0, 1] == pytest.approx(adjusted_rand_index(parts["a"], parts["b"]))
    np.testing.assert_array_equal(M, M.T)
    _, single = ari_matrix([[1, 2, 2]])
    np.testing.assert_array_equal(single, [[1.0]])


def _table(cols):
    values = np.column_stack(cols).astype(float)
    return FeatureTable(ids=[str(i) for i in range(len(values))], feature_names=[f"v{j}" for j in range(len(cols))], values=values)


def test_pearson_hand_example():
    M = pearson_matrix(_table([[1, 2, 3], [1, 2, 4], [-1, -2, -3]]))
    assert M[0, 1] == pytest.approx(9 / np.sqrt(84), abs=1e-12)
    assert M[0, 1] == pytest.approx(0.98198, abs=1e-5)
    assert M[0, 2] == -1.0
    np.testing.assert_array_equal(np.diag(M), 1.0)


def test_pearson_constant_column_named():
    with pytest.raises(ValueError, match="v1"):
        pearson_matrix(_table([[1, 2, 3], [4, 4, 4]]))


def test_pearson_matches_numpy():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 5))
    M = pearson_matrix(_table(list(X.T)))
    np.testing.assert_allclose(M, np.corrcoef(X, rowvar=False), atol=1e-12)
    assert np.array_equal(M, M.T)
    assert np.all(np.abs(M) <= 1.0)
