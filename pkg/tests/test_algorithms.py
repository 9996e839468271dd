import math

import numpy as np
import pytest

from ccpareto.services.algorithms import (
    Algorithm,
    RunTrace,
    TraceRecord,
    WindowState,
    adaptive_select,
    asw_gsemo_run,
    gsemo_run,
    run_algorithm,
    sliding_select,
    sw_gsemo_run,
    window_hit_rate,
)
from ccpareto.services.chance_eval import ChanceEvaluator, EvaluatorKind
from ccpareto.services.experiment import brute_force_front
from ccpareto.services.graph_model import random_graph
from ccpareto.services.pareto_core import ParetoArchive, ScoredSolution
from ccpareto.services.sample_store import generate_samples
from ccpareto.services.weight_model import make_iid_model
from ccpareto.utils.rng import RunStreams
from tests.conftest import ScriptedRng


def archive_of(weights):
    members = [
        ScoredSolution(bits=np.zeros(1, dtype=bool), f=i + 1, w=w, cover=None, expected=0.0, count=0)
        for i, w in enumerate(weights)
    ]
    return ParetoArchive(members)


class TestSlidingSelect:
    def test_window_hit(self):
        archive = archive_of([49.5, 50.0, 50.7])
        parent, from_window = sliding_select(archive, 500, 1000, 100, np.random.default_rng(0))
        assert from_window
        assert parent.w == 50.0

    def test_empty_window_falls_back(self):
        archive = archive_of([99.5, 100.3])
        parent, from_window = sliding_select(archive, 1000, 1000, 100, np.random.default_rng(0))
        assert not from_window
        assert parent.w in (99.5, 100.3)

    def test_fractional_target_at_end(self):
        archive = archive_of([10.0, 10.6, 11.0])
        for _ in range(20):
            parent, from_window = sliding_select(archive, 3, 3, 10.5, np.random.default_rng(1))
            assert from_window
            assert 10 <= parent.w <= 11


class TestAdaptiveSelect:
    def test_narrows_with_several_members(self):
        archive = archive_of([100.5, 102.2, 104.0])
        state = WindowState(3)
        parent, from_window, state = adaptive_select(archive, 1, 1, 100, state, np.random.default_rng(0))
        assert from_window
        assert parent.w in (100.5, 102.2)
        assert state.w_size == 2

    def test_widens_when_empty(self):
        archive = archive_of([104.0])
        state = WindowState(1)
        parent, from_window, state = adaptive_select(archive, 1, 1, 100, state, np.random.default_rng(0))
        assert not from_window
        assert parent.w == 104.0
        assert state.w_size == 2

    def test_single_member_keeps_width(self):
        archive = archive_of([101.0])
        state = WindowState(2)
        parent, from_window, state = adaptive_select(archive, 1, 1, 100, state, np.random.default_rng(0))
        assert from_window
        assert state.w_size == 2

    def test_never_below_one(self):
        archive = archive_of([100.1, 100.2, 100.3])
        state = WindowState(1)
        for _ in range(5):
            _, _, state = adaptive_select(archive, 1, 1, 100, state, np.random.default_rng(0))
        assert state.w_size == 1

    def test_invalid_width(self):
        with pytest.raises(ValueError):
            WindowState(0)


def test_sliding_window_transcript(path_graph):
    """Five-plus-one iteration hand simulation on the path 0-1-2 with scripted draws.

    IID a = d = 3 under Chebyshev at alpha = 0.5: one vertex weighs 3 + sqrt(3),
    two weigh 6 + sqrt(6), three weigh 12. With B = 5 and t_max = 6 the target
    is c = 5t/6.
    """
    evaluator = ChanceEvaluator(EvaluatorKind.CHEBYSHEV, 0.5, make_iid_model(3))
    streams = RunStreams(
        mutation=ScriptedRng(binomials=[1, 1, 0, 2, 1, 1], integers=[1, 0, 0, 0, 2, 1, 2]),
        selection=ScriptedRng(integers=[0, 0, 1, 1, 0, 0]),
    )
    outcome = sw_gsemo_run(path_graph, evaluator, 5, 6, streams, verify=True)

    single = 3 + math.sqrt(3)
    assert outcome.archive.points() == [(0, 0), (3, pytest.approx(single))]
    assert [(r.t, r.f, r.from_window, r.w_size) for r in outcome.trace.records] == [
        (1, 3, True, 1),   # window [0, 1] holds the empty solution; vertex 1 added
        (3, 3, False, 1),  # no flip, equal point replaces its twin
        (5, 0, True, 1),   # window [4, 5] holds {1}; vertex 1 removed
    ]
    assert streams.mutation.binomials == [] and streams.mutation.ints == []
    assert streams.selection.ints == []


class TestRuns:
    def test_tmax_zero(self, triangle, triangle_cheb):
        for algorithm in Algorithm:
            outcome = run_algorithm(algorithm, triangle, triangle_cheb, 9, 0, RunStreams.from_seed(1))
            assert outcome.archive.points() == [(0, 0)]
            assert outcome.best.f == 0
            assert outcome.trace.records == []

    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_triangle_optimum(self, triangle, triangle_cheb, algorithm):
        for seed in (0, 1, 2):
            outcome = run_algorithm(algorithm, triangle, triangle_cheb, 9, 10_000, RunStreams.from_seed(seed))
            assert outcome.best.f == 3
            assert outcome.best.cardinality == 1
            assert outcome.best.w == pytest.approx(3 + math.sqrt(3))

    def test_deterministic(self):
        graph = random_graph(30, 0.1, seed=2)
        evaluator = ChanceEvaluator(EvaluatorKind.CHERNOFF, 0.1, make_iid_model(graph.n))
        a = asw_gsemo_run(graph, evaluator, 450, 3000, RunStreams.from_seed(42))
        b = asw_gsemo_run(graph, evaluator, 450, 3000, RunStreams.from_seed(42))
        assert a.archive.points() == b.archive.points()
        assert a.trace.records == b.trace.records

    def test_trace_columns(self):
        graph = random_graph(30, 0.1, seed=5)
        evaluator = ChanceEvaluator(EvaluatorKind.CHEBYSHEV, 0.1, make_iid_model(graph.n))
        bound = (graph.n * graph.n) // 2

        gsemo = gsemo_run(graph, evaluator, bound, 2000, RunStreams.from_seed(3))
        assert not any(r.from_window for r in gsemo.trace.records)
        assert all(r.w_size == 0 for r in gsemo.trace.records)

        sw = sw_gsemo_run(graph, evaluator, bound, 2000, RunStreams.from_seed(3))
        assert all(r.w_size == 1 for r in sw.trace.records)

        asw = asw_gsemo_run(graph, evaluator, bound, 2000, RunStreams.from_seed(3))
        flags = {r.from_window for r in asw.trace.records}
        assert flags == {True, False}
        assert all(r.w_size >= 1 for r in asw.trace.records)

    def test_trace_all(self, triangle, triangle_cheb):
        outcome = run_algorithm("asw", triangle, triangle_cheb, 9, 500, RunStreams.from_seed(9), trace_all=True)
        assert outcome.trace.all_iterations
        assert [r.t for r in outcome.trace.records] == list(range(1, 501))
        assert len(outcome.trace.accepted()) < 500

    def test_wsize_init(self, triangle, triangle_cheb):
        outcome = asw_gsemo_run(triangle, triangle_cheb, 9, 1, RunStreams.from_seed(0), wsize_init=4, trace_all=True)
        assert outcome.trace.records[0].w_size == 4

    @pytest.mark.parametrize("algorithm", list(Algorithm))
    @pytest.mark.parametrize("kind", list(EvaluatorKind))
    def test_empty_solution_survives(self, algorithm, kind):
        graph = random_graph(25, 0.15, seed=12)
        model = make_iid_model(graph.n)
        matrix = generate_samples(model, 100, seed=5) if kind == EvaluatorKind.SAMPLING else None
        evaluator = ChanceEvaluator(kind, 0.1, model, matrix)
        for seed in (0, 1):
            outcome = run_algorithm(algorithm, graph, evaluator, 300, 2000, RunStreams.from_seed(seed))
            assert outcome.archive.members[0].point == (0, 0)
            assert not outcome.archive.members[0].bits.any()

    def test_archive_stays_nondominated(self):
        graph = random_graph(20, 0.2, seed=8)
        evaluator = ChanceEvaluator(EvaluatorKind.CHEBYSHEV, 0.1, make_iid_model(graph.n))
        outcome = sw_gsemo_run(graph, evaluator, 200, 3000, RunStreams.from_seed(4), verify=True)
        outcome.archive.check_invariants()
        assert outcome.best.f == max(m.f for m in outcome.archive)


def test_window_hit_rate():
    trace = RunTrace(records=[
        TraceRecord(t=1, weight=0, f=0, from_window=True, w_size=1),
        TraceRecord(t=5, weight=1, f=1, from_window=False, w_size=1),
        TraceRecord(t=6, weight=1, f=1, from_window=True, w_size=1),
        TraceRecord(t=7, weight=1, f=1, from_window=True, w_size=1, accepted=False),
        TraceRecord(t=8, weight=2, f=2, from_window=True, w_size=1),
    ])
    assert window_hit_rate(trace) == pytest.approx(3 / 4)
    assert window_hit_rate(trace, after_t=4) == pytest.approx(2 / 3)
    assert window_hit_rate(RunTrace()) == 0.0


@pytest.mark.slow
def test_gsemo_reaches_exact_optimum():
    """20 random graphs with n <= 14 and B admitting three elements."""
    hits = 0
    for seed in range(20):
        n = 8 + seed % 7
        graph = random_graph(n, 0.25, seed=100 + seed)
        evaluator = ChanceEvaluator(EvaluatorKind.CHEBYSHEV, 0.1, make_iid_model(n))
        # one element weighs n(k + sqrt(3k)) for k selected: 6n at k = 3, about 7.46n at k = 4
        bound = 6.5 * n

        optimum = brute_force_front(graph, evaluator, bound)[-1].f
        outcome = gsemo_run(graph, evaluator, bound, 100_000, RunStreams.from_seed(seed))
        hits += outcome.best.f == optimum

    assert hits >= 19
