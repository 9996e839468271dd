import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ccpareto.exceptions import EmptyGraphError, InstanceTooLargeError
from ccpareto.models.results import RunResult, SummaryRow
from ccpareto.schemas import ExperimentConfig
from ccpareto.services import reporting
from ccpareto.services.algorithms import RunOutcome, run_algorithm, window_hit_rate
from ccpareto.services.chance_eval import ChanceEvaluator, EvaluatorKind
from ccpareto.services.graph_model import Graph, load_graph
from ccpareto.services.pareto_core import ScoredSolution, SolutionScorer, best_feasible, pareto_front
from ccpareto.services.sample_store import SampleMatrix, generate_samples, load_samples, write_manifest
from ccpareto.services.statistics import summarize
from ccpareto.services.weight_model import WeightModel, build_weight_model
from ccpareto.utils.rng import SAMPLE_STREAM, RunStreams, mix64, run_seed

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 20
BRUTE_FORCE_CHUNK = 4096


@dataclass
class Instance:
    """Everything shared read-only by the runs of one configuration."""
    graph: Graph
    model: WeightModel
    evaluator: ChanceEvaluator
    bound: float


@dataclass
class InstanceSpec:
    """Picklable recipe for an Instance; workers rebuild the sample matrix instead of receiving it."""
    graph: Graph
    model: WeightModel
    kind: str
    alpha: float
    bound: float
    tsp: Optional[int] = None
    sample_seed: Optional[int] = None

    def build(self) -> Instance:
        matrix = None
        if self.tsp is not None:
            matrix = generate_samples(self.model, self.tsp, self.sample_seed)
        evaluator = ChanceEvaluator(EvaluatorKind(self.kind), self.alpha, self.model, matrix)
        return Instance(graph=self.graph, model=self.model, evaluator=evaluator, bound=self.bound)


def sample_seed(master_seed: int) -> int:
    """Seed of the sample matrix shared by every algorithm run under ``master_seed``."""
    return mix64(master_seed, SAMPLE_STREAM)


def samples_manifest_path(config: ExperimentConfig) -> str:
    return os.path.join(config.out, "samples", f"{config.graph_name}_{config.weights}_tsp{config.tsp}.manifest")


def brute_force_front(graph: Graph, evaluator: ChanceEvaluator, bound: float) -> List[ScoredSolution]:
    """Exact Pareto front by enumerating all 2^n subsets."""
    if graph.n == 0:
        raise EmptyGraphError("brute force needs a nonempty graph")
    if graph.n > BRUTE_FORCE_MAX_N:
        raise InstanceTooLargeError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, graph has n={graph.n}")

    scorer = SolutionScorer(graph, evaluator, bound)
    shifts = np.arange(graph.n, dtype=np.int64)
    front: List[ScoredSolution] = []
    for start in range(0, 1 << graph.n, BRUTE_FORCE_CHUNK):
        masks = np.arange(start, min(start + BRUTE_FORCE_CHUNK, 1 << graph.n), dtype=np.int64)
        subsets = ((masks[:, None] >> shifts) & 1).astype(bool)
        front = pareto_front(front + [scorer.score(bits) for bits in subsets])
    return front


class ExperimentRunner:
    def __init__(self):
        self._graphs: Dict[str, Graph] = {}

    def load_graph(self, path: str) -> Graph:
        if path not in self._graphs:
            self._graphs[path] = load_graph(path)
        return self._graphs[path]

    def instance_spec(self, config: ExperimentConfig, with_samples: bool = False) -> InstanceSpec:
        graph = self.load_graph(config.graph)
        model = build_weight_model(config.weights, graph)
        spec = InstanceSpec(
            graph=graph,
            model=model,
            kind=config.evaluator,
            alpha=config.alpha,
            bound=config.resolve_bound(graph.n),
        )
        if config.evaluator == EvaluatorKind.SAMPLING.value or with_samples:
            spec.tsp = config.tsp
            spec.sample_seed = sample_seed(config.seed)
        return spec

    def build_instance(self, config: ExperimentConfig, with_samples: bool = False) -> Instance:
        spec = self.instance_spec(config, with_samples=with_samples)
        if spec.tsp is None:
            return spec.build()

        if config.samples:
            matrix = load_samples(config.samples, spec.model)
            spec.tsp, spec.sample_seed = matrix.t_sp, matrix.seed
        else:
            matrix = generate_samples(spec.model, spec.tsp, spec.sample_seed)
            manifest = samples_manifest_path(config)
            os.makedirs(os.path.dirname(manifest), exist_ok=True)
            write_manifest(manifest, spec.model, matrix)

        evaluator = ChanceEvaluator(EvaluatorKind(spec.kind), spec.alpha, spec.model, matrix)
        return Instance(graph=spec.graph, model=spec.model, evaluator=evaluator, bound=spec.bound)

    def run_once(self, instance: Instance, config: ExperimentConfig, seed: int,
                 run_index: int = 0, trace_path: Optional[str] = None) -> Tuple[RunResult, RunOutcome]:
        """One seeded run of the configured algorithm."""
        started = time.perf_counter()
        outcome = run_algorithm(
            config.algo,
            instance.graph,
            instance.evaluator,
            instance.bound,
            config.tmax,
            RunStreams.from_seed(seed),
            wsize_init=config.wsize_init,
            trace_all=config.trace_all,
        )
        seconds = round(time.perf_counter() - started, 2) if config.record_time else 0.0

        if trace_path:
            reporting.emit_trace(outcome.trace, trace_path)

        best = best_feasible(outcome.archive)
        result = RunResult(
            run_index=run_index,
            seed=seed,
            best_f=best.f,
            best_card=best.cardinality,
            archive_size=len(outcome.archive),
            seconds=seconds,
            window_hit_rate=round(window_hit_rate(outcome.trace, after_t=config.tmax // 10), 6),
            trace_path=trace_path,
            fingerprint=config.fingerprint(),
        )
        logger.info(
            f"Run {run_index} (seed {seed}): best f={result.best_f}, |V'|={result.best_card}, "
            f"archive={result.archive_size}, {seconds:.2f}s"
        )
        return result, outcome

    def _load_finished(self, path: str, config: ExperimentConfig) -> Optional[RunResult]:
        try:
            if os.path.exists(path):
                with open(path, "r", encoding="utf-8") as f:
                    result = RunResult(**json.load(f))
                if result.fingerprint == config.fingerprint():
                    return result
                logger.warning(f"Ignoring {path}: written by a different configuration")
        except Exception as e:
            logger.error(f"Failed to load finished run {path}: {e}")
        return None

    def _save_run(self, path: str, result: RunResult, model: Dict):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(dict(result.model_dump(), model=model), f, default=str)

    def run_experiment(self, config: ExperimentConfig) -> SummaryRow:
        """Execute ``config.runs`` seeded runs and append the summary row to ``<out>/results.csv``."""
        cell_dir = os.path.join(config.out, config.cell_id())
        os.makedirs(cell_dir, exist_ok=True)
        logger.info(f"Experiment {config.cell_id()}: {config.runs} runs, t_max={config.tmax}, workers={config.workers}")

        instance = self.build_instance(config)
        results: Dict[int, RunResult] = {}
        pending: List[int] = []

        for i in range(config.runs):
            json_path = os.path.join(cell_dir, f"run_{i:03d}.json")
            finished = self._load_finished(json_path, config) if config.resume else None
            if finished is not None:
                results[i] = finished
            else:
                pending.append(i)
        if len(results):
            logger.warning(f"Resuming: reusing {len(results)} finished runs")

        def trace_path(i: int) -> Optional[str]:
            return os.path.join(cell_dir, f"trace_run{i:03d}.csv") if config.trace else None

        def record(result: RunResult):
            results[result.run_index] = result
            self._save_run(os.path.join(cell_dir, f"run_{result.run_index:03d}.json"), result, instance.model.describe())

        try:
            if config.workers == 1 or len(pending) <= 1:
                for i in pending:
                    record(self.run_once(instance, config, run_seed(config.seed, i), i, trace_path(i))[0])
            else:
                spec = self.instance_spec(config)
                if spec.tsp is not None:
                    spec.tsp, spec.sample_seed = instance.evaluator.matrix.t_sp, instance.evaluator.matrix.seed
                with ProcessPoolExecutor(
                    max_workers=config.workers, initializer=_init_worker, initargs=(spec,)
                ) as pool:
                    futures = [
                        pool.submit(_worker_run, config, run_seed(config.seed, i), i, trace_path(i))
                        for i in pending
                    ]
                    for future in as_completed(futures):
                        record(future.result())
        except KeyboardInterrupt:
            logger.warning(f"Interrupted after {len(results)}/{config.runs} runs; flushing partial results")
            reporting.write_runs(os.path.join(cell_dir, "runs.csv"), results.values())
            raise

        ordered = [results[i] for i in sorted(results)]
        reporting.write_runs(os.path.join(cell_dir, "runs.csv"), ordered)

        row = self.summarize(config, instance, ordered)
        reporting.append_summary(os.path.join(config.out, "results.csv"), row)
        logger.info(f"Experiment {config.cell_id()} finished: mean={row.mean:.3f}, std={row.std:.3f}, min={row.min}, max={row.max}")
        return row

    def summarize(self, config: ExperimentConfig, instance: Instance, results: List[RunResult]) -> SummaryRow:
        stats = summarize([r.best_f for r in results])
        return SummaryRow(
            graph=config.graph_name,
            algo=config.algo,
            evaluator=config.evaluator,
            weights=config.weights,
            B=instance.bound,
            alpha=config.alpha,
            tsp=config.tsp,
            tmax=config.tmax,
            runs=len(results),
            min=stats["min"],
            max=stats["max"],
            mean=stats["mean"],
            std=stats["std"],
            mean_card=float(np.mean([r.best_card for r in results])),
            mean_popsize=float(np.mean([r.archive_size for r in results])),
            seconds=round(sum(r.seconds for r in results), 2),
            model=instance.model.describe(),
        )


# Per-process instance for pool workers
_worker_instance: Optional[Instance] = None


def _init_worker(spec: InstanceSpec):
    global _worker_instance
    _worker_instance = spec.build()


def _worker_run(config: ExperimentConfig, seed: int, run_index: int, trace_path: Optional[str]) -> RunResult:
    return experiment_runner.run_once(_worker_instance, config, seed, run_index, trace_path)[0]


experiment_runner = ExperimentRunner()
