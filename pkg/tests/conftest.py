import numpy as np
import pytest

from ccpareto.services.chance_eval import ChanceEvaluator, EvaluatorKind
from ccpareto.services.graph_model import Graph, random_graph
from ccpareto.services.sample_store import SampleMatrix
from ccpareto.services.weight_model import make_iid_model


class ScriptedRng:
    """Stand-in for a numpy Generator replaying fixed draws."""

    def __init__(self, binomials=(), integers=()):
        self.binomials = list(binomials)
        self.ints = list(integers)

    def binomial(self, n, p):
        return self.binomials.pop(0)

    def integers(self, high):
        value = self.ints.pop(0)
        assert 0 <= value < high, f"scripted draw {value} outside [0, {high})"
        return value


@pytest.fixture
def path_graph():
    """0 - 1 - 2"""
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def triangle_cheb(triangle):
    """K3 with IID a = d = 3 and the Chebyshev surrogate at alpha = 0.5."""
    return ChanceEvaluator(EvaluatorKind.CHEBYSHEV, 0.5, make_iid_model(3))


@pytest.fixture
def small_graphs():
    return [random_graph(n, 0.3, seed) for seed, n in enumerate([6, 8, 10, 12])]


@pytest.fixture
def tiny_matrix():
    rows = np.array([[5, 3, 9, 1, 7, 2, 8, 4, 6, 0]], dtype=np.float64)
    return SampleMatrix(rows=rows, seed=0)


@pytest.fixture
def write_edges(tmp_path):
    def _write(lines, name="graph.txt"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)
    return _write
