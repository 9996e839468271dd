import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from ccpareto.exceptions import DimensionMismatchError, EmptyGraphError
from ccpareto.services.graph_model import Graph

logger = logging.getLogger(__name__)


class WeightKind(str, Enum):
    IID = "iid"
    DEGREE = "degree"


@dataclass(frozen=True)
class WeightModel:
    """Independent uniform weights W(v_i) ~ U[a_i - d, a_i + d] with a shared dispersion d."""
    expected: np.ndarray
    dispersion: float
    kind: WeightKind

    def __post_init__(self):
        if self.dispersion <= 0:
            raise ValueError(f"dispersion must be positive, got {self.dispersion}")
        if len(self.expected) == 0:
            raise ValueError("weight model needs at least one element")
        if np.any(self.expected < self.dispersion):
            raise ValueError("every expected weight must be at least the dispersion")
        if self.kind == WeightKind.IID and np.any(self.expected != self.expected[0]):
            raise ValueError("IID model requires identical expected weights")

    @property
    def n(self) -> int:
        return len(self.expected)

    @property
    def element_variance(self) -> float:
        # variance of U[a - d, a + d] is (2d)^2 / 12 = d^2 / 3
        return self.dispersion * self.dispersion / 3.0

    def describe(self) -> Dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "d": self.dispersion,
            "a_min": float(self.expected.min()),
            "a_max": float(self.expected.max()),
        }


def make_iid_model(n: int) -> WeightModel:
    if n < 1:
        raise ValueError("IID model needs n >= 1")
    return WeightModel(expected=np.full(n, float(n)), dispersion=float(n), kind=WeightKind.IID)


def make_degree_model(graph: Graph) -> WeightModel:
    """a_i = (n + D(v_i))^5 / n^4 and d = n."""
    if graph.n < 1:
        raise EmptyGraphError("degree model needs a nonempty graph")
    n = float(graph.n)
    # n * (1 + D/n)^5 is exactly n for an isolated vertex, keeping a_i >= d
    expected = n * (1.0 + graph.degrees.astype(np.float64) / n) ** 5
    return WeightModel(expected=expected, dispersion=n, kind=WeightKind.DEGREE)


def _selected(model: WeightModel, selection: np.ndarray) -> np.ndarray:
    selection = np.asarray(selection, dtype=bool)
    if len(selection) != model.n:
        raise DimensionMismatchError(f"selection has length {len(selection)}, model has {model.n} elements")
    return selection


def expected_weight(model: WeightModel, selection: np.ndarray) -> float:
    selection = _selected(model, selection)
    return float(model.expected[selection].sum())


def variance(model: WeightModel, selection: np.ndarray) -> float:
    selection = _selected(model, selection)
    return int(selection.sum()) * model.element_variance


def support(model: WeightModel) -> Tuple[np.ndarray, np.ndarray]:
    return model.expected - model.dispersion, model.expected + model.dispersion


def build_weight_model(kind: str, graph: Graph) -> WeightModel:
    kind = WeightKind(kind)
    model = make_iid_model(graph.n) if kind == WeightKind.IID else make_degree_model(graph)
    logger.info(f"Weight model: {model.describe()}")
    return model
