import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import gammaincc
from scipy.stats import rankdata

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> Tuple[float, float]:
    """Kruskal-Wallis H test with average ranks and tie correction.

    Returns (H, p). When every observation is tied the statistic is
    undefined; H is NaN and p is reported as 1.
    """
    if len(groups) < 2:
        raise ValueError("Kruskal-Wallis needs at least two groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if any(len(a) == 0 for a in arrays):
        raise ValueError("every group must be nonempty")

    pooled = np.concatenate(arrays)
    total = len(pooled)
    ranks = rankdata(pooled, method="average")

    h = 0.0
    offset = 0
    for a in arrays:
        rank_sum = ranks[offset:offset + len(a)].sum()
        h += rank_sum * rank_sum / len(a)
        offset += len(a)
    h = 12.0 / (total * (total + 1)) * h - 3.0 * (total + 1)

    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_counts = tie_counts.astype(np.float64)
    correction = 1.0 - (tie_counts ** 3 - tie_counts).sum() / (total ** 3 - total) if total > 1 else 0.0
    if correction <= 0.0:
        return float("nan"), 1.0
    h /= correction

    df = len(arrays) - 1
    p = float(gammaincc(df / 2.0, h / 2.0))
    return float(h), p


def summarize(values: Sequence[float]) -> Dict[str, float]:
    """min, max, mean and sample std (n - 1 denominator; 0 for a single value)."""
    data = np.asarray(values, dtype=np.float64)
    if len(data) == 0:
        raise ValueError("cannot summarize an empty sample")
    return {
        "min": float(data.min()),
        "max": float(data.max()),
        "mean": float(data.mean()),
        "std": float(data.std(ddof=1)) if len(data) > 1 else 0.0,
    }


def compare_groups(groups: Dict[str, List[float]]) -> Dict:
    labels = list(groups)
    h, p = kruskal_wallis([groups[label] for label in labels])
    result = {
        "groups": labels,
        "sizes": [len(groups[label]) for label in labels],
        "means": [float(np.mean(groups[label])) for label in labels],
        "h": h,
        "p_value": p,
        "significant": p < SIGNIFICANCE,
    }
    logger.info(f"Kruskal-Wallis over {labels}: H={h:.4f}, p={p:.4g}")
    return result
