"""Objective functions for subgroup quality.

Built-in objectives:

* ``impact``  — coverage times positive relative mean shift.
* ``f0``      — coverage times positive relative median shift.
* ``f1``      — dispersion-corrected coverage times positive relative
  median shift.
* ``dcb``     — square root of dispersion-corrected coverage times the
  (non-negative) median shift.

Every median-based objective value is derived from the (size, median,
sum-of-absolute-deviations) triple through one shared code path, so the
search evaluator, the brute-force oracle, and the optimistic estimators
cannot drift apart. All formula helpers accept scalars or numpy arrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateTargetError, UsageError
from . import stats

OBJECTIVE_NAMES = ("impact", "f0", "f1", "dcb")


@dataclass(frozen=True)
class GlobalStats:
    """Population constants consumed by the objective formulas."""

    size: int
    max_value: float
    mean: float
    median: float
    smd: float

    @property
    def amd(self) -> float:
        return self.smd / self.size

    @classmethod
    def from_values(cls, values) -> "GlobalStats":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValueError("population must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("population values must be finite")
        med = stats.median(np.sort(arr))
        return cls(size=int(arr.shape[0]),
                   max_value=float(arr.max()),
                   mean=float(arr.mean()),
                   median=med,
                   smd=float(np.sum(np.abs(arr - med))))


def cov(size, pop: GlobalStats):
    """Relative subgroup size |Q| / |P|."""
    return size / pop.size


def mds_plus(median_value, pop: GlobalStats):
    """Positive relative median shift, 0 when the population maximum does
    not exceed the population median (warned once, not an error, so that
    shift-free data still evaluates)."""
    scale = pop.max_value - pop.median
    if scale <= 0:
        warnings.warn("population maximum equals its median; median-shift "
                      "factor is constant zero", stacklevel=2)
        if np.ndim(median_value):
            return np.zeros_like(np.asarray(median_value, dtype=np.float64))
        return 0.0
    return np.maximum((median_value - pop.median) / scale, 0.0)


def dcc(size, smd_value, pop: GlobalStats):
    """Dispersion-corrected coverage (|Q|/|P| - smd(Q)/smd(P)) clamped at 0.

    Computed with a single division so that integer-valued inputs order
    exactly; requires positive global dispersion."""
    if pop.smd <= 0:
        raise DegenerateTargetError(
            "degenerate target: global dispersion is zero")
    return np.maximum((size * pop.smd - smd_value * pop.size)
                      / (pop.size * pop.smd), 0.0)


def ipa(values, pop: GlobalStats) -> float:
    """Impact: coverage times positive relative mean shift."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[0] == 0:
        raise ValueError("impact needs a non-empty subgroup")
    scale = pop.max_value - pop.mean
    if scale <= 0:
        warnings.warn("population maximum equals its mean; impact is "
                      "constant zero", stacklevel=2)
        return 0.0
    shift = np.maximum((float(arr.mean()) - pop.mean) / scale, 0.0)
    return float(cov(arr.shape[0], pop) * shift)


def _triple(values: np.ndarray) -> tuple[int, float, float]:
    med = stats.median(values)
    return values.shape[0], med, float(np.sum(np.abs(values - med)))


class Objective:
    """Base class; subclasses document their level and formula hooks.

    level-1 objectives expose ``value_level1(sizes, central)`` and a
    central-tendency kind ("mean" or "median"); median-based level-2
    objectives expose ``value_from_stats(sizes, medians, smds)``.
    Objectives whose size/dispersion trade-off factors through the
    dispersion-corrected coverage additionally expose
    ``value_from_dcc(u, medians)`` and set ``dcc_form``.
    """

    name = "objective"
    level = 2
    central: str | None = None
    dcc_form = False
    kernel_mode: int | None = None
    # value_from_stats accepts numpy arrays (used by vectorized estimators)
    vector_stats = False

    def __init__(self, pop: GlobalStats):
        self.pop = pop

    def value(self, values) -> float:
        """Objective value of a subgroup given its ascending target values;
        the empty multiset maps to 0."""
        raise NotImplementedError

    def level1_relaxation(self) -> "Objective":
        """A level-1 objective that dominates this one pointwise (used to
        bound with the suffix-sequence estimator)."""
        raise UsageError(f"objective {self.name!r} has no level-1 relaxation")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


class ImpactObjective(Objective):
    """Coverage times positive relative mean shift (level 1, mean)."""

    name = "impact"
    level = 1
    central = "mean"

    def __init__(self, pop: GlobalStats):
        super().__init__(pop)
        if pop.max_value - pop.mean <= 0:
            warnings.warn("population maximum equals its mean; impact is "
                          "constant zero", stacklevel=2)

    def value_level1(self, sizes, centrals):
        scale = self.pop.max_value - self.pop.mean
        if scale <= 0:
            return np.zeros_like(np.asarray(sizes, dtype=np.float64))
        shift = np.maximum((centrals - self.pop.mean) / scale, 0.0)
        return (sizes / self.pop.size) * shift

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        return ipa(arr, self.pop)

    def level1_relaxation(self) -> "Objective":
        return self


class CoverageMedianShift(Objective):
    """Coverage times positive relative median shift (level 1, median)."""

    name = "f0"
    level = 1
    central = "median"
    vector_stats = True

    def value_level1(self, sizes, medians):
        return (sizes / self.pop.size) * mds_plus(medians, self.pop)

    def value_from_stats(self, sizes, medians, smds):
        # level-2 form with vacuous dispersion dependence
        return self.value_level1(sizes, medians)

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        size, med, _ = _triple(arr)
        return float(self.value_level1(size, med))

    def level1_relaxation(self) -> "Objective":
        return self


class DispersionCorrectedMedianShift(Objective):
    """Dispersion-corrected coverage times positive relative median shift
    (level 2, median-based)."""

    name = "f1"
    level = 2
    dcc_form = True
    kernel_mode = 0
    vector_stats = True

    def __init__(self, pop: GlobalStats):
        super().__init__(pop)
        if pop.smd <= 0:
            raise DegenerateTargetError(
                "degenerate target: objective f1 needs positive global "
                "dispersion")
        if pop.max_value - pop.median <= 0:
            warnings.warn("population maximum equals its median; f1 is "
                          "constant zero", stacklevel=2)

    def value_from_dcc(self, u, medians):
        return u * mds_plus(medians, self.pop)

    def value_from_stats(self, sizes, medians, smds):
        return self.value_from_dcc(dcc(sizes, smds, self.pop), medians)

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        return float(self.value_from_stats(*_triple(arr)))

    def level1_relaxation(self) -> "Objective":
        return CoverageMedianShift(self.pop)


class _RootCoverageMedianShift(Objective):
    """Level-1 dominator of the binomial objective: sqrt(coverage) times
    the non-negative median shift."""

    name = "dcb-relaxation"
    level = 1
    central = "median"

    def value_level1(self, sizes, medians):
        return np.maximum(
            np.sqrt(sizes / self.pop.size) * (medians - self.pop.median), 0.0)

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        size, med, _ = _triple(arr)
        return float(self.value_level1(size, med))

    def level1_relaxation(self) -> "Objective":
        return self


class DispersionCorrectedBinomial(Objective):
    """Square root of dispersion-corrected coverage times the median shift,
    clamped at zero (level 2, median-based).

    The clamp makes the objective non-negative so that the multiplicative
    pruning rule applies; it only affects subgroups whose median falls
    below the population median, which are never optimal."""

    name = "dcb"
    level = 2
    dcc_form = True
    kernel_mode = 1
    vector_stats = True

    def __init__(self, pop: GlobalStats):
        super().__init__(pop)
        if pop.smd <= 0:
            raise DegenerateTargetError(
                "degenerate target: objective dcb needs positive global "
                "dispersion")

    def value_from_dcc(self, u, medians):
        return np.maximum(np.sqrt(u) * (medians - self.pop.median), 0.0)

    def value_from_stats(self, sizes, medians, smds):
        return self.value_from_dcc(dcc(sizes, smds, self.pop), medians)

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        return float(self.value_from_stats(*_triple(arr)))

    def level1_relaxation(self) -> "Objective":
        return _RootCoverageMedianShift(self.pop)


class CustomLevel1(Objective):
    """User-supplied g(size, central) non-decreasing in both arguments,
    with central tendency "mean" or "median"."""

    level = 1

    def __init__(self, pop: GlobalStats, g: Callable[[int, float], float],
                 central: str = "median", name: str = "custom1"):
        super().__init__(pop)
        if central not in ("mean", "median"):
            raise UsageError("central must be 'mean' or 'median'")
        self.g = g
        self.central = central
        self.name = name

    def value_level1(self, sizes, centrals):
        if np.ndim(sizes) == 0:
            return self.g(int(sizes), float(centrals))
        return np.array([self.g(int(s), float(c))
                         for s, c in zip(sizes, centrals)])

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        central = float(arr.mean()) if self.central == "mean" \
            else stats.median(arr)
        return float(self.g(arr.shape[0], central))

    def level1_relaxation(self) -> "Objective":
        return self


DISPERSION_MEASURES = ("smd", "amd", "mad", "rmsd")


class CustomLevel2(Objective):
    """User-supplied g(size, median, dispersion), non-decreasing in size
    and non-increasing in the dispersion value.

    `dispersion` names a built-in measure of deviation around the median
    ("smd", "amd", "mad", "rmsd") or is a callable mapping (ascending
    values, median) to a dispersion value."""

    level = 2

    def __init__(self, pop: GlobalStats,
                 g: Callable[[int, float, float], float],
                 dispersion: str | Callable = "amd",
                 name: str = "custom2"):
        super().__init__(pop)
        if isinstance(dispersion, str) and dispersion not in DISPERSION_MEASURES:
            raise UsageError(f"unknown dispersion measure {dispersion!r}")
        self.g = g
        self.dispersion = dispersion
        self.name = name

    @property
    def smd_family(self) -> bool:
        return self.dispersion in ("smd", "amd")

    def dispersion_of(self, values: np.ndarray, med: float) -> float:
        if callable(self.dispersion):
            return float(self.dispersion(values, med))
        deviations = np.abs(values - med)
        if self.dispersion == "smd":
            return float(deviations.sum())
        if self.dispersion == "amd":
            return float(deviations.sum()) / values.shape[0]
        if self.dispersion == "mad":
            ordered = np.sort(deviations)
            return float(ordered[(ordered.shape[0] - 1) // 2])
        return float(np.sqrt(np.mean(deviations * deviations)))

    def value_from_stats(self, size, med, smd_value):
        if not self.smd_family:
            raise UsageError("value_from_stats only applies to smd/amd "
                             "dispersion")
        d = smd_value if self.dispersion == "smd" else smd_value / size
        return self.g(int(size), float(med), float(d))

    def value(self, values) -> float:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] == 0:
            return 0.0
        med = stats.median(arr)
        return float(self.g(arr.shape[0], med, self.dispersion_of(arr, med)))


def make_objective(name: str, pop: GlobalStats) -> Objective:
    """Instantiate one of the built-in objectives by CLI name."""
    table = {
        "impact": ImpactObjective,
        "f0": CoverageMedianShift,
        "f1": DispersionCorrectedMedianShift,
        "dcb": DispersionCorrectedBinomial,
    }
    if name not in table:
        raise UsageError(f"unknown objective {name!r} "
                         f"(choose from {', '.join(OBJECTIVE_NAMES)})")
    return table[name](pop)


def evaluate(objective: Objective, values) -> float:
    """Objective value of a subgroup's (ascending) target values; empty
    input maps to 0 by convention."""
    return objective.value(values)
