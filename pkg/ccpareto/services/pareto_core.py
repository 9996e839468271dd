import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ccpareto.exceptions import EmptyArchiveError
from ccpareto.services.chance_eval import (
    ChanceEvaluator,
    SampleSumVector,
    samplesum_apply_flips,
)
from ccpareto.services.graph_model import (
    CoverageState,
    Flip,
    Graph,
    coverage_apply_flips,
    coverage_state,
)

logger = logging.getLogger(__name__)

INFEASIBLE = -1
VERIFY_RTOL = 1e-6


@dataclass
class ScoredSolution:
    """A bit vector with its objective pair (f, w) and the caches that produced them."""
    bits: np.ndarray
    f: int
    w: float
    cover: CoverageState
    expected: float
    count: int
    sums: Optional[SampleSumVector] = None

    @property
    def cardinality(self) -> int:
        return self.count

    @property
    def point(self) -> Tuple[int, float]:
        return self.f, self.w


def weakly_dominates(x: ScoredSolution, y: ScoredSolution) -> bool:
    return x.f >= y.f and x.w <= y.w


def strictly_dominates(x: ScoredSolution, y: ScoredSolution) -> bool:
    return weakly_dominates(x, y) and (x.f > y.f or x.w < y.w)


class SolutionScorer:
    """Scores solutions for one (graph, evaluator, bound) instance, from scratch or incrementally."""

    def __init__(self, graph: Graph, evaluator: ChanceEvaluator, bound: float):
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        if evaluator.model.n != graph.n:
            raise ValueError(f"weight model has {evaluator.model.n} elements, graph has {graph.n} vertices")
        self.graph = graph
        self.evaluator = evaluator
        self.bound = bound

    @property
    def n(self) -> int:
        return self.graph.n

    def _finish(self, bits, cover, expected, count, sums) -> ScoredSolution:
        if count == 0:
            # no accumulated rounding on the empty selection
            expected = 0.0
            if sums is not None:
                sums.values[:] = 0.0
        w = self.evaluator.weight(expected, count, sums)
        f = cover.covered_total if w <= self.bound else INFEASIBLE
        return ScoredSolution(bits=bits, f=f, w=w, cover=cover, expected=expected, count=count, sums=sums)

    def empty(self) -> ScoredSolution:
        bits = np.zeros(self.n, dtype=bool)
        return self.score(bits)

    def score(self, bits: np.ndarray) -> ScoredSolution:
        """g-values of ``bits`` computed from scratch."""
        bits = np.asarray(bits, dtype=bool).copy()
        cover = coverage_state(self.graph, bits)
        expected = float(self.evaluator.model.expected[bits].sum())
        count = int(bits.sum())
        sums = SampleSumVector.from_selection(self.evaluator.matrix, bits) if self.evaluator.uses_samples else None
        return self._finish(bits, cover, expected, count, sums)

    def offspring(self, parent: ScoredSolution, bits: np.ndarray, flips: Sequence[Flip]) -> ScoredSolution:
        """Score ``bits`` by applying ``flips`` to copies of the parent's caches."""
        cover = coverage_apply_flips(parent.cover.copy(), self.graph, flips)
        expected = parent.expected
        count = parent.count
        a = self.evaluator.model.expected
        for i, bit in flips:
            if bit:
                expected += a[i]
                count += 1
            else:
                expected -= a[i]
                count -= 1

        sums = None
        if self.evaluator.uses_samples:
            sums = samplesum_apply_flips(parent.sums.copy(), self.evaluator.matrix, flips)
        return self._finish(bits, cover, float(expected), count, sums)

    def verify(self, solution: ScoredSolution):
        """Raise AssertionError if cached values drift from a from-scratch recomputation."""
        fresh = self.score(solution.bits)
        assert fresh.f == solution.f, f"f mismatch: cached {solution.f}, recomputed {fresh.f}"
        assert fresh.count == solution.count, "cardinality mismatch"
        assert fresh.cover.covered_total == solution.cover.covered_total, "coverage mismatch"
        assert math.isclose(fresh.w, solution.w, rel_tol=VERIFY_RTOL, abs_tol=1e-9), (
            f"w mismatch: cached {solution.w}, recomputed {fresh.w}"
        )


def score(bits: np.ndarray, graph: Graph, evaluator: ChanceEvaluator, bound: float) -> ScoredSolution:
    return SolutionScorer(graph, evaluator, bound).score(bits)


class ParetoArchive:
    """Mutually non-dominated solutions kept sorted by f (and therefore by w)."""

    def __init__(self, members: Iterable[ScoredSolution] = ()):
        self.members: List[ScoredSolution] = []
        self._f: List[int] = []
        self._w: List[float] = []
        for member in members:
            self.insert(member)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def weights(self) -> List[float]:
        return self._w

    def points(self) -> List[Tuple[int, float]]:
        return list(zip(self._f, self._w))

    def insert(self, y: ScoredSolution) -> bool:
        # Among members with f >= y.f the first has the smallest w; if it does
        # not dominate y, no member does.
        i = bisect_left(self._f, y.f)
        if i < len(self._f):
            f_i, w_i = self._f[i], self._w[i]
            if w_i <= y.w and (f_i > y.f or w_i < y.w):
                return False

        # Members weakly dominated by y: f <= y.f and w >= y.w, a contiguous run.
        j = bisect_right(self._f, y.f)
        k = bisect_left(self._w, y.w, 0, j)
        del self.members[k:j]
        del self._f[k:j]
        del self._w[k:j]
        self.members.insert(k, y)
        self._f.insert(k, y.f)
        self._w.insert(k, y.w)
        return True

    def window(self, lower: float, upper: float) -> Tuple[int, int]:
        """Index range [start, end) of members with lower <= w <= upper."""
        return bisect_left(self._w, lower), bisect_right(self._w, upper)

    def check_invariants(self):
        for a, b in zip(self.members, self.members[1:]):
            assert a.f < b.f and a.w < b.w, f"archive order violated between {a.point} and {b.point}"


def archive_insert(archive: ParetoArchive, y: ScoredSolution) -> bool:
    return archive.insert(y)


def best_feasible(archive: ParetoArchive) -> ScoredSolution:
    if len(archive) == 0:
        raise EmptyArchiveError("archive is empty")
    return archive.members[-1]


def mutate(parent: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, List[Flip]]:
    """Standard bit mutation: every bit flips independently with probability 1/n.

    The number of flips is drawn from Binomial(n, 1/n) and the flipped
    positions as a uniform subset of that size, which gives the same
    distribution without touching all n bits.
    """
    n = len(parent)
    flips_wanted = int(rng.binomial(n, 1.0 / n))
    positions: List[int] = []
    while len(positions) < flips_wanted:
        p = int(rng.integers(n))
        if p not in positions:
            positions.append(p)

    offspring = parent.copy()
    flips: List[Flip] = []
    for p in positions:
        offspring[p] = not offspring[p]
        flips.append((p, bool(offspring[p])))
    return offspring, flips


def pareto_front(solutions: Iterable[ScoredSolution]) -> List[ScoredSolution]:
    """Non-dominated subset, one representative per (f, w) point, sorted by f."""
    ordered = sorted(solutions, key=lambda s: (-s.f, s.w))
    front: List[ScoredSolution] = []
    best_w = math.inf
    for s in ordered:
        if s.w < best_w:
            front.append(s)
            best_w = s.w
    front.reverse()
    return front
