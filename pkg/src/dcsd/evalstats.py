"""Post-hoc subgroup evaluation: distribution-free lower confidence bounds.

For a subgroup sample Q' the empirical Chebyshev inequality yields a
threshold mean(Q') - epsilon(Q') that a random group member's target value
exceeds with probability 1 - delta. Subgroups too small for the inequality
fall back to the population threshold, which standardizes to a score of 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .errors import DataError, UsageError
from . import stats


@dataclass(frozen=True)
class SubgroupReport:
    """Descriptive statistics reported per result subgroup."""

    selector: str
    size: int
    coverage: float
    median: float
    amd: float
    mean: float
    variance: Optional[float]
    epsilon: Optional[float]
    # None when the population itself is too small for its own bound
    lcb: Optional[float]
    lcb_score: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def sample_variance(values) -> float:
    """Unbiased sample variance, sum((y - mean)^2) / (m - 1)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[0] < 2:
        raise ValueError("sample variance needs at least two values")
    centered = arr - arr.mean()
    return float(np.sum(centered * centered) / (arr.shape[0] - 1))


def chebyshev_epsilon(values, delta: float = 0.05) -> Optional[float]:
    """Empirical Chebyshev half-width
    sqrt((m^2 - 1) var / (m^2 delta - m)).

    Defined only for samples strictly larger than 1/delta (at the boundary
    the denominator vanishes); returns None when undefined."""
    if not 0.0 < delta < 1.0:
        raise UsageError("delta must lie in (0, 1)")
    arr = np.asarray(values, dtype=np.float64)
    m = arr.shape[0]
    if m < 2 or not m > 1.0 / delta:
        return None
    var = sample_variance(arr)
    return float(math.sqrt((m * m - 1) * var / (m * m * delta - m)))


def lcb(values, pop_values, delta: float = 0.05) -> float:
    """Lower confidence threshold for unseen group members: the subgroup's
    mean minus its Chebyshev half-width, falling back to the population
    threshold when the subgroup is too small."""
    eps = chebyshev_epsilon(values, delta)
    if eps is None:
        pop_eps = chebyshev_epsilon(pop_values, delta)
        if pop_eps is None:
            raise DataError("population too small for a confidence bound")
        return float(np.asarray(pop_values, dtype=np.float64).mean()) - pop_eps
    return float(np.asarray(values, dtype=np.float64).mean()) - eps


def lcb_score(values, pop_values, delta: float = 0.05) -> float:
    """Standardized improvement of the subgroup's lower confidence
    threshold over the population's, clamped at zero. Equals 0 whenever
    the subgroup is too small for its own bound."""
    pop_arr = np.asarray(pop_values, dtype=np.float64)
    pop_eps = chebyshev_epsilon(pop_arr, delta)
    if pop_eps is None:
        raise DataError("population too small for a confidence bound")
    pop_var = sample_variance(pop_arr)
    if pop_var <= 0:
        raise DataError("degenerate population variance")
    pop_l = float(pop_arr.mean()) - pop_eps
    group_l = lcb(values, pop_arr, delta)
    return max((group_l - pop_l) / math.sqrt(pop_var), 0.0)


def subgroup_report(selector: str, values, pop_values,
                    delta: float = 0.05) -> SubgroupReport:
    """Assemble the per-subgroup statistics block used in reports."""
    arr = np.sort(np.asarray(values, dtype=np.float64))
    pop_arr = np.asarray(pop_values, dtype=np.float64)
    if arr.shape[0] == 0:
        raise ValueError("cannot report an empty subgroup")
    variance = sample_variance(arr) if arr.shape[0] >= 2 else None
    try:
        group_lcb = lcb(arr, pop_arr, delta)
        score = lcb_score(arr, pop_arr, delta)
    except DataError:
        # population too small (or degenerate) for its own bound
        group_lcb = None
        score = None
    return SubgroupReport(
        selector=selector,
        size=int(arr.shape[0]),
        coverage=arr.shape[0] / pop_arr.shape[0],
        median=stats.median(arr),
        amd=stats.amd(arr),
        mean=float(arr.mean()),
        variance=variance,
        epsilon=chebyshev_epsilon(arr, delta),
        lcb=group_lcb,
        lcb_score=score,
    )
