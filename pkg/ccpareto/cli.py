import argparse
import itertools
import json
import logging
import os
import sys
from typing import Dict, List, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from ccpareto.config import LOG_FORMAT, settings
from ccpareto.exceptions import CCParetoError, EmptyGraphError, GraphFormatError, SampleManifestError
from ccpareto.schemas import ExperimentConfig
from ccpareto.services import reporting
from ccpareto.services.algorithms import window_hit_rate
from ccpareto.services.experiment import brute_force_front, experiment_runner, sample_seed, samples_manifest_path
from ccpareto.services.sample_store import generate_samples, write_dump, write_manifest
from ccpareto.services.statistics import compare_groups
from ccpareto.services.weight_model import build_weight_model

logger = logging.getLogger(__name__)

# (alpha, tsp) pairs and bounds of the full benchmark matrix
BENCHMARK_SAMPLING = [(0.1, 250), (0.1, 500), (0.1, 1000), (0.001, 1000)]
BENCHMARK_BOUNDS = ["half-n2", "n2"]

CONFIG_KEYS = {
    "graph", "weights", "evaluator", "alpha", "bound", "tsp", "tmax", "algo", "runs", "seed",
    "out", "trace", "trace_all", "workers", "wsize_init", "samples", "record_time", "resume",
}


def _add_instance_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file; flags override its values")
    p.add_argument("--graph", help="SNAP edge-list file")
    p.add_argument("--weights", help="iid | degree")
    p.add_argument("--evaluator", help="cheb | chen | sample")
    p.add_argument("--alpha", help="violation probability in (0, 1)")
    p.add_argument("--bound", help="half-n2 | n2 | positive real")
    p.add_argument("--tsp", help="samples per element")
    p.add_argument("--seed", help="64-bit seed")
    p.add_argument("--out", help="output directory")


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--algo", help="gsemo | sw | asw")
    p.add_argument("--tmax", help="iterations")
    p.add_argument("--wsize-init", dest="wsize_init", help="initial adaptive window width (default 1)")
    p.add_argument("--samples", help="reuse the sample matrix described by this manifest")
    p.add_argument("--trace", action="store_const", const="true", help="write a trace CSV per run")
    p.add_argument("--trace-all", dest="trace_all", action="store_const", const="true",
                   help="trace every iteration, not only accepted insertions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccpareto",
        description="Chance-constrained maximum coverage with GSEMO, SW-GSEMO and ASW-GSEMO.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one algorithm, one seed")
    _add_instance_flags(p)
    _add_run_flags(p)
    p.add_argument("--front", help="write the final archive re-weighed under every evaluator to this CSV")

    p = sub.add_parser("trace", help="one seeded run with its trace written to CSV")
    _add_instance_flags(p)
    _add_run_flags(p)
    p.add_argument("--trace-out", dest="trace_out", help="trace CSV path")

    p = sub.add_parser("experiment", help="full configuration matrix; list flags take comma-separated values")
    _add_instance_flags(p)
    _add_run_flags(p)
    p.add_argument("--runs", help="independent runs per configuration")
    p.add_argument("--workers", help="worker processes")
    p.add_argument("--resume", action="store_const", const="true", help="reuse finished runs")
    p.add_argument("--no-timing", dest="record_time", action="store_const", const="false",
                   help="write 0 in the seconds column for byte-identical outputs")
    p.add_argument("--benchmark-matrix", dest="benchmark_matrix", action="store_true",
                   help="bounds {half-n2, n2} x (alpha, tsp) in {(0.1,250),(0.1,500),(0.1,1000),(0.001,1000)}")

    p = sub.add_parser("gen-samples", help="generate a sample matrix and write its manifest")
    _add_instance_flags(p)
    p.add_argument("--dump", help="also write the full binary matrix (n * tsp <= 10^6)")

    p = sub.add_parser("brute-force", help="exact Pareto front of a small instance (n <= 20)")
    _add_instance_flags(p)

    p = sub.add_parser("stats", help="statistical comparisons")
    stats_sub = p.add_subparsers(dest="stats_command", required=True)
    cmp = stats_sub.add_parser("compare", help="Kruskal-Wallis test over per-run result files")
    cmp.add_argument("files", nargs="+", help="runs.csv files (two or more)")
    cmp.add_argument("--column", default="best_f", help="per-run column to compare")

    return parser


def merge_config(args: argparse.Namespace) -> Dict[str, str]:
    """Config-file values overridden by explicitly given flags."""
    values: Dict[str, str] = {}
    if getattr(args, "config", None):
        for key, value in dotenv_values(args.config).items():
            key = key.strip().lower().replace("-", "_")
            if key not in CONFIG_KEYS:
                raise ValueError(f"{args.config}: unknown key {key!r}")
            values[key] = value
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    values.setdefault("out", settings.OUTPUT_DIR)
    values.setdefault("workers", str(settings.WORKERS))
    return values


def _split(value: Optional[str]) -> List[Optional[str]]:
    if value is None:
        return [None]
    return [v.strip() for v in str(value).split(",") if v.strip()]


def expand_matrix(values: Dict[str, str], benchmark_matrix: bool = False) -> List[ExperimentConfig]:
    base = {k: v for k, v in values.items() if k not in {"algo", "evaluator", "weights", "bound", "alpha", "tsp"}}
    algos = _split(values.get("algo"))
    evaluators = _split(values.get("evaluator"))
    weights = _split(values.get("weights"))

    if benchmark_matrix:
        bounds = BENCHMARK_BOUNDS
        sampling = [(str(a), str(t)) for a, t in BENCHMARK_SAMPLING]
    else:
        bounds = _split(values.get("bound"))
        sampling = list(itertools.product(_split(values.get("alpha")), _split(values.get("tsp"))))

    configs = []
    for w, bound, (alpha, tsp), evaluator, algo in itertools.product(weights, bounds, sampling, evaluators, algos):
        cell = dict(base, weights=w, bound=bound, alpha=alpha, tsp=tsp, evaluator=evaluator, algo=algo)
        configs.append(ExperimentConfig(**{k: v for k, v in cell.items() if v is not None}))
    return configs


def cmd_run(args, values) -> int:
    config = ExperimentConfig(**dict(values, runs="1"))
    instance = experiment_runner.build_instance(config, with_samples=bool(getattr(args, "front", None)))
    cell_dir = os.path.join(config.out, config.cell_id())
    os.makedirs(cell_dir, exist_ok=True)

    trace_path = getattr(args, "trace_out", None)
    if args.command == "trace" or config.trace:
        trace_path = trace_path or os.path.join(cell_dir, f"trace_seed{config.seed}.csv")

    result, outcome = experiment_runner.run_once(instance, config, config.seed, 0, trace_path)
    if getattr(args, "front", None):
        reporting.write_front(args.front, outcome.archive, instance.evaluator)
        logger.info(f"Front written: {args.front}")
    if args.command == "trace":
        rate = window_hit_rate(outcome.trace, after_t=config.tmax // 10)
        print(f"trace={trace_path} accepted={len(outcome.trace.accepted())} window_hit_rate={rate:.4f}")

    print(json.dumps(result.model_dump(exclude={"fingerprint"})))
    return 0


def cmd_experiment(args, values) -> int:
    configs = expand_matrix(values, benchmark_matrix=args.benchmark_matrix)
    logger.info(f"Experiment matrix: {len(configs)} configurations")
    for config in configs:
        experiment_runner.run_experiment(config)
    print(os.path.join(configs[0].out, "results.csv"))
    return 0


def cmd_gen_samples(args, values) -> int:
    config = ExperimentConfig(**dict(values, evaluator="sample"))
    graph = experiment_runner.load_graph(config.graph)
    model = build_weight_model(config.weights, graph)
    matrix = generate_samples(model, config.tsp, sample_seed(config.seed))

    path = samples_manifest_path(config)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    write_manifest(path, model, matrix)
    if args.dump:
        write_dump(args.dump, matrix)
        logger.info(f"Full sample dump written: {args.dump}")
    print(path)
    return 0


def cmd_brute_force(args, values) -> int:
    config = ExperimentConfig(**values)
    instance = experiment_runner.build_instance(config)
    front = brute_force_front(instance.graph, instance.evaluator, instance.bound)
    print("f,card,w")
    for s in front:
        print(f"{s.f},{s.cardinality},{reporting.format_weight(s.w)}")
    return 0


def cmd_stats_compare(args) -> int:
    if len(args.files) < 2:
        raise ValueError("stats compare needs at least two result files")
    groups = {}
    for path in args.files:
        runs = reporting.read_runs(path)
        groups[path] = [float(getattr(r, args.column)) for r in runs]
    result = compare_groups(groups)
    for label, size, mean in zip(result["groups"], result["sizes"], result["means"]):
        print(f"{label}: n={size} mean={mean:.3f}")
    print(f"H={result['h']:.6f} p={result['p_value']:.6g} significant={result['significant']}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format=LOG_FORMAT,
    )

    try:
        if args.command == "stats":
            return cmd_stats_compare(args)
        values = merge_config(args)
        if args.command in ("run", "trace"):
            return cmd_run(args, values)
        if args.command == "experiment":
            return cmd_experiment(args, values)
        if args.command == "gen-samples":
            return cmd_gen_samples(args, values)
        return cmd_brute_force(args, values)
    except (ValidationError, GraphFormatError, EmptyGraphError, SampleManifestError, OSError) as e:
        logger.error(f"Invalid input: {e}")
        return 2
    except CCParetoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
