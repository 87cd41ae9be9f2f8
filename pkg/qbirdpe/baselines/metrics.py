from typing import Annotated, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.models.lattice import ProbabilityTable

Distribution = Union[ProbabilityTable, np.ndarray, Sequence[float]]


def _as_array(dist: Distribution) -> np.ndarray:
    if isinstance(dist, ProbabilityTable):
        return dist.probabilities.ravel()
    return np.asarray(dist, dtype=float).ravel()


def tv_distance(p: Distribution, q: Distribution) -> float:
    """
    Total-variation distance 1/2 * sum |p - q| between two distributions on the same support.
    """
    if isinstance(p, ProbabilityTable) and isinstance(q, ProbabilityTable):
        if p.grid.shape != q.grid.shape:
            raise ValueError(f"Grids differ: {p.grid.shape} vs {q.grid.shape}.")
    a, b = _as_array(p), _as_array(q)
    if a.shape != b.shape:
        raise ValueError(f"Supports differ in size: {a.size} vs {b.size}.")
    return float(0.5 * np.abs(a - b).sum())


@validate_call
def credible_interval(
    samples: Sequence[float], level: Annotated[float, Field(gt=0, lt=1)] = 0.9
) -> Tuple[float, float]:
    """
    Central credible interval from the empirical quantiles of the samples.

    Parameters:
        samples (Sequence[float]): 1-D samples of one parameter.
        level (float): Probability mass inside the interval.

    Returns:
        Tuple[float, float]: Quantiles (1 - level) / 2 and (1 + level) / 2, linear interpolation.
    """
    if len(samples) == 0:
        raise ValueError("Cannot compute a credible interval of no samples.")
    arr = np.asarray(samples, dtype=float)
    lo, hi = np.quantile(arr, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def weighted_histogram(
    values: np.ndarray,
    bins: int,
    value_range: Tuple[float, float],
    weights: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalized histogram (probability per bin) of optionally weighted values.

    Returns:
    - Tuple[np.ndarray, np.ndarray]: Bin centres and bin probabilities summing to 1.
    """
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}.")
    lo, hi = value_range
    if not lo < hi:
        raise ValueError(f"Histogram range lower ({lo}) must be below upper ({hi}).")
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi), weights=weights)
    total = counts.sum()
    probs = counts / total if total > 0 else np.zeros(bins)
    return (edges[:-1] + edges[1:]) / 2, probs


def weighted_mean_std(values: np.ndarray, weights: Optional[np.ndarray] = None) -> Tuple[float, float]:
    mean = float(np.average(values, weights=weights))
    var = float(np.average((np.asarray(values) - mean) ** 2, weights=weights))
    return mean, float(np.sqrt(var))


def weighted_credible_interval(
    values: np.ndarray, weights: np.ndarray, level: float = 0.9
) -> Tuple[float, float]:
    """
    Central interval of a discrete weighted distribution: the smallest values whose
    cumulative weight reaches (1 - level) / 2 and (1 + level) / 2.
    """
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}.")
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0 or weights.sum() <= 0:
        raise ValueError("Cannot compute a credible interval of an empty distribution.")
    order = np.argsort(values, kind="stable")
    cdf = np.cumsum(weights[order]) / weights.sum()
    lo = values[order][np.searchsorted(cdf, (1 - level) / 2 - 1e-12)]
    hi = values[order][min(np.searchsorted(cdf, (1 + level) / 2 - 1e-12), values.size - 1)]
    return float(lo), float(hi)
