"""CSV outputs: per-configuration summaries, per-run results, traces and fronts."""
import csv
import logging
import os
from typing import Iterable, List, Optional

from ccpareto.models.results import RunResult, SummaryRow
from ccpareto.services.algorithms import RunTrace
from ccpareto.services.chance_eval import ChanceEvaluator
from ccpareto.services.pareto_core import ScoredSolution

logger = logging.getLogger(__name__)

RESULTS_HEADER = [
    "graph", "algo", "evaluator", "weights", "B", "alpha", "tsp", "tmax", "runs",
    "min", "max", "mean", "std", "mean_card", "mean_popsize", "seconds",
]
RUNS_HEADER = ["run_index", "seed", "best_f", "best_card", "archive_size", "window_hit_rate", "seconds", "trace_path"]
TRACE_HEADER = ["t", "weight", "f", "from_window", "w_size"]
FRONT_HEADER = ["f", "card", "w_cheb", "w_chen", "w_sp"]


def format_number(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return f"{x:.6g}"


def format_weight(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6g}"


def summary_fields(row: SummaryRow) -> List[str]:
    return [
        row.graph, row.algo, row.evaluator, row.weights,
        format_number(row.B), f"{row.alpha:g}", str(row.tsp), str(row.tmax), str(row.runs),
        format_number(row.min), format_number(row.max),
        f"{row.mean:.3f}", f"{row.std:.3f}",
        f"{row.mean_card:.1f}", f"{row.mean_popsize:.1f}",
        f"{row.seconds:.2f}",
    ]


# graph .. tmax identify a configuration cell
SUMMARY_KEY_FIELDS = 8


def append_summary(path: str, row: SummaryRow):
    """Add the row to results.csv, replacing an earlier row of the same configuration."""
    fields = summary_fields(row)
    rows: List[List[str]] = []
    if os.path.exists(path) and os.path.getsize(path) > 0:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))[1:]

    kept = [r for r in rows if r[:SUMMARY_KEY_FIELDS] != fields[:SUMMARY_KEY_FIELDS]]
    if len(kept) < len(rows):
        logger.info(f"Replacing summary row for {row.graph}/{row.algo}/{row.evaluator} in {path}")

    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        writer.writerows(kept)
        writer.writerow(fields)


def write_runs(path: str, results: Iterable[RunResult]):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for r in sorted(results, key=lambda r: r.run_index):
            writer.writerow([
                r.run_index, r.seed, r.best_f, r.best_card, r.archive_size,
                f"{r.window_hit_rate:.6f}", f"{r.seconds:.2f}", r.trace_path or "",
            ])


def read_runs(path: str) -> List[RunResult]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [
            RunResult(
                run_index=int(row["run_index"]),
                seed=int(row["seed"]),
                best_f=int(row["best_f"]),
                best_card=int(row["best_card"]),
                archive_size=int(row["archive_size"]),
                window_hit_rate=float(row["window_hit_rate"]),
                seconds=float(row["seconds"]),
                trace_path=row["trace_path"] or None,
            )
            for row in csv.DictReader(f)
        ]


def emit_trace(trace: RunTrace, path: str):
    header = TRACE_HEADER + (["accepted"] if trace.all_iterations else [])
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for r in trace.records:
            row = [r.t, format_weight(r.weight), r.f, str(r.from_window).lower(), r.w_size]
            if trace.all_iterations:
                row.append(str(r.accepted).lower())
            writer.writerow(row)


def write_front(path: str, members: Iterable[ScoredSolution], evaluator: ChanceEvaluator):
    """Each archive member re-weighed under every evaluator."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(FRONT_HEADER)
        for s in members:
            weights = evaluator.weigh_all(s.bits)
            writer.writerow([
                s.f, s.cardinality,
                format_weight(weights["cheb"]), format_weight(weights["chen"]), format_weight(weights["sample"]),
            ])
