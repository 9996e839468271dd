import numpy as np
import pytest

from ccpareto.exceptions import DimensionMismatchError
from ccpareto.services.graph_model import Graph, load_graph
from ccpareto.services.weight_model import (
    WeightKind,
    WeightModel,
    build_weight_model,
    expected_weight,
    make_degree_model,
    make_iid_model,
    support,
    variance,
)


def test_iid_model():
    model = make_iid_model(10)
    assert model.kind == WeightKind.IID
    assert model.dispersion == 10
    assert np.all(model.expected == 10)

    single = make_iid_model(1)
    assert single.expected[0] == 1 and single.dispersion == 1

    assert np.all(make_iid_model(4158).expected == 4158)


def test_degree_model():
    # star with centre 0 on 10 vertices plus an isolated vertex 9
    graph = Graph.from_edges(10, [(0, i) for i in range(1, 9)])
    model = make_degree_model(graph)

    assert model.kind == WeightKind.DEGREE
    assert model.dispersion == 10
    assert model.expected[9] == pytest.approx(10)
    assert model.expected[0] == pytest.approx(18 ** 5 / 10 ** 4)
    assert model.expected[1] == pytest.approx(11 ** 5 / 10 ** 4)
    assert np.all(model.expected >= model.dispersion)


def test_degree_formula_example():
    # centre of a star on 11 vertices has D = 10
    graph = Graph.from_edges(11, [(0, i) for i in range(1, 11)])
    model = make_degree_model(graph)
    assert model.expected[0] == pytest.approx(21 ** 5 / 11 ** 4)
    assert model.expected[1] == pytest.approx(12 ** 5 / 11 ** 4)


@pytest.mark.parametrize("n", [1555, 4158, 11204, 17903])
def test_isolated_vertex_weighs_exactly_n(n):
    graph = Graph.from_edges(n, [(i, i + 1) for i in range(n - 2)])
    model = make_degree_model(graph)
    assert model.expected[n - 1] == n
    assert np.all(model.expected >= model.dispersion)


def test_degree_model_on_self_loop_only_vertex(write_edges):
    path = write_edges([f"{i} {i + 1}" for i in range(1553)] + ["1554 1554"], name="loop.txt")
    graph = load_graph(path)
    model = build_weight_model("degree", graph)
    assert graph.n == 1555
    assert graph.degrees[1554] == 0
    assert model.expected[1554] == 1555


def test_expected_weight_and_variance():
    model = make_iid_model(10)
    three = np.array([True] * 3 + [False] * 7)

    assert expected_weight(model, np.zeros(10, dtype=bool)) == 0
    assert expected_weight(model, three) == 30
    assert variance(model, np.zeros(10, dtype=bool)) == 0
    assert variance(model, three) == pytest.approx(100)
    assert variance(make_iid_model(1), np.array([True])) == pytest.approx(1 / 3)


def test_selection_length_checked():
    with pytest.raises(DimensionMismatchError):
        expected_weight(make_iid_model(3), np.ones(4, dtype=bool))
    with pytest.raises(DimensionMismatchError):
        variance(make_iid_model(3), np.ones(2, dtype=bool))


def test_support():
    low, high = support(make_iid_model(5))
    assert np.all(low == 0) and np.all(high == 10)


@pytest.mark.parametrize(
    "expected,dispersion,kind",
    [
        (np.array([5.0]), 0.0, WeightKind.IID),
        (np.array([1.0, 5.0]), 2.0, WeightKind.DEGREE),
        (np.array([5.0, 6.0]), 5.0, WeightKind.IID),
        (np.array([]), 1.0, WeightKind.IID),
    ],
)
def test_invalid_models(expected, dispersion, kind):
    with pytest.raises(ValueError):
        WeightModel(expected=expected, dispersion=dispersion, kind=kind)


def test_build_and_describe(path_graph):
    model = build_weight_model("degree", path_graph)
    info = model.describe()
    assert info["kind"] == "degree"
    assert info["n"] == 3
    assert info["a_min"] == pytest.approx(4 ** 5 / 3 ** 4)
    assert info["a_max"] == pytest.approx(5 ** 5 / 3 ** 4)
    with pytest.raises(ValueError):
        build_weight_model("lognormal", path_graph)
