import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ccpareto.exceptions import DimensionMismatchError, InvalidProbabilityError, SampleIndexError
from ccpareto.services.sample_store import SampleMatrix
from ccpareto.services.weight_model import WeightModel, expected_weight, variance

logger = logging.getLogger(__name__)


class EvaluatorKind(str, Enum):
    CHEBYSHEV = "cheb"
    CHERNOFF = "chen"
    SAMPLING = "sample"


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise InvalidProbabilityError(f"alpha must lie in (0, 1), got {alpha}")


def sampling_rank(t_sp: int, alpha: float) -> int:
    """k = ceil(t_sp * alpha), guarded against binary rounding (10 * 0.3 -> 3)."""
    _check_alpha(alpha)
    k = math.ceil(t_sp * alpha - 1e-9)
    if not 1 <= k <= t_sp:
        raise SampleIndexError(f"sampling rank {k} outside [1, {t_sp}] for t_sp={t_sp}, alpha={alpha}")
    return k


def chebyshev_surrogate(expected: float, var: float, alpha: float) -> float:
    return expected + math.sqrt((1.0 - alpha) * var / alpha)


def chernoff_surrogate(expected: float, dispersion: float, count: int, alpha: float) -> float:
    return expected + math.sqrt(3.0 * dispersion * count * math.log(1.0 / alpha))


def chebyshev_weight(model: WeightModel, selection: np.ndarray, alpha: float) -> float:
    _check_alpha(alpha)
    if not np.any(selection):
        return 0.0
    return chebyshev_surrogate(expected_weight(model, selection), variance(model, selection), alpha)


def chernoff_weight(model: WeightModel, selection: np.ndarray, alpha: float) -> float:
    _check_alpha(alpha)
    count = int(np.count_nonzero(selection))
    if count == 0:
        return 0.0
    return chernoff_surrogate(expected_weight(model, selection), model.dispersion, count, alpha)


def kth_largest(values: np.ndarray, k: int) -> float:
    """k-th largest entry (1-based) by partial selection, equal to the sorted definition."""
    position = len(values) - k
    return float(np.partition(values, position)[position])


def sampling_weight(selection: np.ndarray, matrix: SampleMatrix, alpha: float) -> float:
    """The ceil(t_sp * alpha)-th largest of the t_sp sampled totals of the selection."""
    selection = np.asarray(selection, dtype=bool)
    if len(selection) != matrix.n:
        raise DimensionMismatchError(f"selection has length {len(selection)}, samples cover {matrix.n} elements")
    k = sampling_rank(matrix.t_sp, alpha)
    if not selection.any():
        return 0.0
    sums = matrix.rows[selection].sum(axis=0)
    return kth_largest(sums, k)


@dataclass
class SampleSumVector:
    """Entry j holds the sum of rows[i][j] over the selected elements."""
    values: np.ndarray

    @classmethod
    def empty(cls, matrix: SampleMatrix) -> "SampleSumVector":
        return cls(values=np.zeros(matrix.t_sp, dtype=np.float64))

    @classmethod
    def from_selection(cls, matrix: SampleMatrix, selection: np.ndarray) -> "SampleSumVector":
        selection = np.asarray(selection, dtype=bool)
        return cls(values=matrix.rows[selection].sum(axis=0))

    def copy(self) -> "SampleSumVector":
        return SampleSumVector(values=self.values.copy())


def samplesum_apply_flips(v: SampleSumVector, matrix: SampleMatrix, flipped: Sequence[Tuple[int, bool]]) -> SampleSumVector:
    for i, bit in flipped:
        if bit:
            v.values += matrix.rows[i]
        else:
            v.values -= matrix.rows[i]
    return v


@dataclass(frozen=True)
class ChanceEvaluator:
    """Maps a solution's running sums to the scalar weight compared against B."""
    kind: EvaluatorKind
    alpha: float
    model: WeightModel
    matrix: Optional[SampleMatrix] = None

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.kind == EvaluatorKind.SAMPLING:
            if self.matrix is None:
                raise ValueError("sampling evaluator needs a sample matrix")
            if self.matrix.n != self.model.n:
                raise DimensionMismatchError(f"sample matrix has {self.matrix.n} rows, model has {self.model.n} elements")
            object.__setattr__(self, "_rank", sampling_rank(self.matrix.t_sp, self.alpha))
        else:
            object.__setattr__(self, "_rank", None)

    @property
    def uses_samples(self) -> bool:
        return self.kind == EvaluatorKind.SAMPLING

    @property
    def rank(self) -> Optional[int]:
        return self._rank

    def weight(self, expected: float, count: int, sums: Optional[SampleSumVector]) -> float:
        if count == 0:
            return 0.0
        if self.kind == EvaluatorKind.CHEBYSHEV:
            return chebyshev_surrogate(expected, count * self.model.element_variance, self.alpha)
        if self.kind == EvaluatorKind.CHERNOFF:
            return chernoff_surrogate(expected, self.model.dispersion, count, self.alpha)
        return kth_largest(sums.values, self._rank)

    def weigh_all(self, selection: np.ndarray) -> Dict[str, Optional[float]]:
        """Weight of a selection under every strategy available with this evaluator's inputs."""
        return {
            EvaluatorKind.CHEBYSHEV.value: chebyshev_weight(self.model, selection, self.alpha),
            EvaluatorKind.CHERNOFF.value: chernoff_weight(self.model, selection, self.alpha),
            EvaluatorKind.SAMPLING.value: (
                sampling_weight(selection, self.matrix, self.alpha) if self.matrix is not None else None
            ),
        }
