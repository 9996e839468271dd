import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

from ccpareto.config import settings
from ccpareto.services.chance_eval import ChanceEvaluator
from ccpareto.services.graph_model import Graph
from ccpareto.services.pareto_core import (
    ParetoArchive,
    ScoredSolution,
    SolutionScorer,
    best_feasible,
    mutate,
)
from ccpareto.utils.rng import RunStreams

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    GSEMO = "gsemo"
    SW = "sw"
    ASW = "asw"


@dataclass
class WindowState:
    w_size: int = 1

    def __post_init__(self):
        if self.w_size < 1:
            raise ValueError(f"w_size must be at least 1, got {self.w_size}")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    weight: float
    f: int
    from_window: bool
    w_size: int
    accepted: bool = True


@dataclass
class RunTrace:
    records: List[TraceRecord] = field(default_factory=list)
    all_iterations: bool = False

    def append(self, record: TraceRecord):
        self.records.append(record)

    def accepted(self) -> List[TraceRecord]:
        return [r for r in self.records if r.accepted]


@dataclass
class RunOutcome:
    archive: ParetoArchive
    trace: RunTrace
    iterations: int

    @property
    def best(self) -> ScoredSolution:
        return best_feasible(self.archive)


def _target(t: int, t_max: int, bound: float) -> float:
    return (t / t_max) * bound


def sliding_select(archive: ParetoArchive, t: int, t_max: int, bound: float, rng) -> Tuple[ScoredSolution, bool]:
    """Pick a parent from the window [floor(c), ceil(c)] with c = t/t_max * B, else from the whole archive."""
    if t <= t_max:
        c = _target(t, t_max, bound)
        start, end = archive.window(math.floor(c), math.ceil(c))
        if end > start:
            return archive.members[start + int(rng.integers(end - start))], True
    return archive.members[int(rng.integers(len(archive)))], False


def adaptive_select(
    archive: ParetoArchive, t: int, t_max: int, bound: float, state: WindowState, rng
) -> Tuple[ScoredSolution, bool, WindowState]:
    """Window [floor(c), floor(c) + w_size]; widen when empty, narrow when it holds several members."""
    if t <= t_max:
        c = _target(t, t_max, bound)
        lower = math.floor(c)
        start, end = archive.window(lower, lower + state.w_size)
        if end == start:
            state.w_size += 1
        else:
            if state.w_size > 1 and end - start > 1:
                state.w_size -= 1
            return archive.members[start + int(rng.integers(end - start))], True, state
    return archive.members[int(rng.integers(len(archive)))], False, state


# A selection strategy returns (parent, from_window, window width used at t)
Selector = Callable[[ParetoArchive, int], Tuple[ScoredSolution, bool, int]]


def _optimize(
    scorer: SolutionScorer,
    t_max: int,
    streams: RunStreams,
    select: Selector,
    label: str,
    trace_all: bool = False,
    verify: Optional[bool] = None,
) -> RunOutcome:
    verify = settings.DEBUG_CHECKS if verify is None else verify
    archive = ParetoArchive([scorer.empty()])
    trace = RunTrace(all_iterations=trace_all)
    progress_every = max(1, t_max // 10)

    for t in range(1, t_max + 1):
        parent, from_window, width = select(archive, t)
        bits, flips = mutate(parent.bits, streams.mutation)
        child = scorer.offspring(parent, bits, flips)
        accepted = archive.insert(child)

        if accepted and verify:
            scorer.verify(child)
            archive.check_invariants()
        if accepted or trace_all:
            trace.append(TraceRecord(t=t, weight=child.w, f=child.f, from_window=from_window, w_size=width, accepted=accepted))

        if t % progress_every == 0:
            logger.debug(f"{label} t={t}/{t_max}: archive={len(archive)}, best f={archive.members[-1].f}, width={width}")

    return RunOutcome(archive=archive, trace=trace, iterations=t_max)


def gsemo_run(graph: Graph, evaluator: ChanceEvaluator, bound: float, t_max: int, streams: RunStreams, **kwargs) -> RunOutcome:
    """Uniform parent selection from the archive."""
    def select(archive: ParetoArchive, t: int):
        return archive.members[int(streams.selection.integers(len(archive)))], False, 0

    return _optimize(SolutionScorer(graph, evaluator, bound), t_max, streams, select, "GSEMO", **kwargs)


def sw_gsemo_run(graph: Graph, evaluator: ChanceEvaluator, bound: float, t_max: int, streams: RunStreams, **kwargs) -> RunOutcome:
    def select(archive: ParetoArchive, t: int):
        parent, from_window = sliding_select(archive, t, t_max, bound, streams.selection)
        return parent, from_window, 1

    return _optimize(SolutionScorer(graph, evaluator, bound), t_max, streams, select, "SW-GSEMO", **kwargs)


def asw_gsemo_run(
    graph: Graph,
    evaluator: ChanceEvaluator,
    bound: float,
    t_max: int,
    streams: RunStreams,
    wsize_init: int = 1,
    **kwargs,
) -> RunOutcome:
    state = WindowState(w_size=wsize_init)

    def select(archive: ParetoArchive, t: int):
        width = state.w_size
        parent, from_window, _ = adaptive_select(archive, t, t_max, bound, state, streams.selection)
        return parent, from_window, width

    return _optimize(SolutionScorer(graph, evaluator, bound), t_max, streams, select, "ASW-GSEMO", **kwargs)


def run_algorithm(
    algorithm: Algorithm,
    graph: Graph,
    evaluator: ChanceEvaluator,
    bound: float,
    t_max: int,
    streams: RunStreams,
    wsize_init: int = 1,
    trace_all: bool = False,
    verify: Optional[bool] = None,
) -> RunOutcome:
    algorithm = Algorithm(algorithm)
    if algorithm == Algorithm.GSEMO:
        return gsemo_run(graph, evaluator, bound, t_max, streams, trace_all=trace_all, verify=verify)
    if algorithm == Algorithm.SW:
        return sw_gsemo_run(graph, evaluator, bound, t_max, streams, trace_all=trace_all, verify=verify)
    return asw_gsemo_run(graph, evaluator, bound, t_max, streams, wsize_init=wsize_init, trace_all=trace_all, verify=verify)


def window_hit_rate(trace: RunTrace, after_t: int = 0) -> float:
    """Fraction of accepted insertions after ``after_t`` whose parent came from the window."""
    records = [r for r in trace.accepted() if r.t > after_t]
    if not records:
        return 0.0
    return sum(r.from_window for r in records) / len(records)
