import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from edgeplan import (
    ActivationMatrix,
    FilterGraph,
    FilterPartition,
    ValidationError,
    build_filter_graph,
    cut_weight,
    ncut_value,
    volume,
)
from edgeplan.graph import edge_list

# Filter indices are 0-based: edges (0,1)=2 and (0,2)=1, nothing between 1 and 2.
TRI = FilterGraph.from_weights([[0, 2, 1], [2, 0, 0], [1, 0, 0]])
PATH = FilterGraph.from_weights([[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def weights(rows):
    return build_filter_graph(ActivationMatrix(np.array(rows, dtype=float))).weights


def loop_weights(a):
    """Plain triple loop over samples and filter pairs."""
    V, M = a.shape
    W = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            if i != j:
                W[i, j] = sum(a[v, i] * a[v, j] * abs(a[v, i] - a[v, j]) for v in range(V))
    return W


def test_equal_activity_gives_zero_weight():
    assert weights([[1, 1]])[0, 1] == 0.0


def test_single_sample_weight():
    assert weights([[2, 1]])[0, 1] == 2.0


def test_weights_sum_over_samples():
    assert weights([[2, 1], [1, 2]])[0, 1] == 4.0


def test_matches_loop_oracle():
    a = np.random.default_rng(0).random((7, 9)) * 3
    g = build_filter_graph(ActivationMatrix(a), chunk=4)
    np.testing.assert_allclose(g.weights, loop_weights(a), rtol=1e-13, atol=0)
    np.testing.assert_allclose(g.degrees, loop_weights(a).sum(axis=1), rtol=1e-13)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(2, 8)), elements=st.floats(0, 50)))
def test_graph_symmetric_zero_diagonal(a):
    g = build_filter_graph(ActivationMatrix(a))
    assert np.array_equal(g.weights, g.weights.T)
    assert np.all(np.diag(g.weights) == 0)
    assert np.all(g.weights >= 0)


def test_activation_matrix_validation():
    for bad in ([[1.0]], [[1.0, -1.0]], [[1.0, np.nan]], np.ones(3)):
        with pytest.raises(ValidationError):
            ActivationMatrix(np.asarray(bad))
    acts = ActivationMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        acts.values[0, 0] = 5.0


def test_from_weights_rejects_asymmetric():
    with pytest.raises(ValidationError):
        FilterGraph.from_weights([[0, 1], [2, 0]])
    with pytest.raises(ValidationError):
        FilterGraph.from_weights([[1, 1], [1, 0]])


def test_cut_weight_examples():
    assert cut_weight(TRI, [0], [1, 2]) == 3.0
    assert cut_weight(TRI, [], [1, 2]) == 0.0
    two = FilterGraph.from_weights(np.kron(np.eye(2), np.ones((2, 2))) - np.eye(4))
    assert cut_weight(two, [0, 1], [2, 3]) == 0.0
    with pytest.raises(ValidationError):
        cut_weight(TRI, [0, 1], [1])


def test_volume_examples():
    assert volume(TRI, [0]) == 3.0
    assert volume(TRI, []) == 0.0
    assert volume(TRI, range(3)) == 2 * TRI.weights[np.triu_indices(3, 1)].sum()


def test_ncut_examples():
    assert ncut_value(PATH, [[0], [1, 2]]) == pytest.approx(2 / 3, rel=1e-15)
    assert ncut_value(PATH, [[0, 1, 2]]) == 0.0
    cliques = FilterGraph.from_weights(np.kron(np.eye(2), np.ones((3, 3))) - np.eye(6))
    assert ncut_value(cliques, [FilterPartition((0, 1, 2)), FilterPartition((3, 4, 5))]) == 0.0


def test_ncut_rejects_bad_partitions():
    with pytest.raises(ValidationError):
        ncut_value(PATH, [[0], [1]])
    with pytest.raises(ValidationError):
        ncut_value(PATH, [[0, 1], [1, 2]])
    isolated = FilterGraph.from_weights([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    with pytest.raises(ValidationError):
        ncut_value(isolated, [[0, 1], [2]])


def test_ncut_relabel_invariant():
    rng = np.random.default_rng(5)
    g = build_filter_graph(ActivationMatrix(rng.random((6, 8))))
    parts = [[0, 3, 5], [1, 2], [4, 6, 7]]
    assert ncut_value(g, parts) == pytest.approx(ncut_value(g, parts[::-1]), rel=1e-14)
    assert ncut_value(g, parts) == pytest.approx(ncut_value(g, [parts[1], parts[2], parts[0]]), rel=1e-14)


@pytest.mark.parametrize("c", [0.1, 2.0, 7.5])
def test_activity_scaling_is_cubic(c):
    a = np.random.default_rng(1).random((5, 6))
    g1 = build_filter_graph(ActivationMatrix(a))
    gc = build_filter_graph(ActivationMatrix(c * a))
    np.testing.assert_allclose(gc.weights, c**3 * g1.weights, rtol=1e-12)
    parts = [[0, 1], [2, 3, 4, 5]]
    assert ncut_value(gc, parts) == pytest.approx(ncut_value(g1, parts), rel=1e-12)


def test_edge_list_upper_triangle():
    assert edge_list(TRI) == [(0, 1, 2.0), (0, 2, 1.0)]
