"""Randomized self-check suites (brute-force oracles versus fast paths).

These are the property suites behind the `check` CLI command: estimator
agreement against subset enumeration, stability of the per-median-position
optimizer table, closed-selector enumeration against powerset closure, and
the O(1) segment deviation identity against direct summation. Each suite
returns a result with the first counterexamples it finds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bounds, lang, stats
from .dataset import PropositionPool
from .objectives import (CoverageMedianShift, DispersionCorrectedMedianShift,
                         GlobalStats, ImpactObjective)


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _integer_population(rng, low=-50, high=51, smallest=4, largest=60):
    n = int(rng.integers(smallest, largest + 1))
    values = rng.integers(low, high, size=n).astype(np.float64)
    if np.all(values == values[0]):
        values[0] -= 1.0  # keep the global dispersion positive
    return values


def estimator_equivalence(trials: int, seed: int, max_m: int = 14,
                          max_failures: int = 3) -> SuiteResult:
    """Fast estimators must reproduce the subset-enumeration optimum
    exactly on integer targets."""
    result = SuiteResult("estimator-equivalence", trials)
    rng = np.random.default_rng(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for trial in range(trials):
            pop_values = _integer_population(rng)
            pop = GlobalStats.from_values(pop_values)
            m = int(rng.integers(1, max_m + 1))
            m = min(m, pop.size)
            q = np.sort(rng.choice(pop_values, size=m, replace=False))
            f1 = DispersionCorrectedMedianShift(pop)
            f0 = CoverageMedianShift(pop)
            imp = ImpactObjective(pop)
            oracle_f1 = bounds.brute_force_estimate(f1, q)
            general = bounds.median_sequence_estimate_general(f1, q)
            linear = bounds.median_sequence_estimate_linear(f1, q)
            oracle_f0 = bounds.brute_force_estimate(f0, q)
            top_f0 = bounds.top_sequence_estimate(f0, q)
            oracle_imp = bounds.brute_force_estimate(imp, q)
            top_imp = bounds.top_sequence_estimate(imp, q)
            checks = [
                ("general(f1)", general, oracle_f1),
                ("linear(f1)", linear, oracle_f1),
                ("top(f0)", top_f0, oracle_f0),
                ("top(impact)", top_imp, oracle_imp),
            ]
            for label, got, want in checks:
                if got != want:
                    result.failures.append(
                        f"trial {trial}: {label}={got!r} != oracle={want!r} "
                        f"for q={q.tolist()} pop={pop_values.tolist()}")
            if len(result.failures) >= max_failures:
                break
    return result


def _window_instance(rng, max_m: int) -> np.ndarray:
    """Mix of value shapes; the clustered ones exercise maximizer jumps at
    the full window radius."""
    m = int(rng.integers(2, max_m + 1))
    style = int(rng.integers(0, 3))
    if style == 0:
        values = rng.integers(-50, 51, size=m)
    elif style == 1:
        values = rng.choice([0, 1, 2, 100, 101, 200, 1000], size=m)
    else:
        values = np.round(rng.pareto(1.0, size=m) * 10)
    return np.sort(values).astype(np.float64)


def window_stability(trials: int, seed: int, max_m: int = 120,
                     max_failures: int = 3) -> SuiteResult:
    """Consecutive entries of the exhaustive optimizer table never differ
    by more than the window radius."""
    result = SuiteResult("optimizer-window", trials)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        pop_values = _integer_population(rng, low=0, high=1200,
                                         largest=max(8, max_m))
        pop = GlobalStats.from_values(pop_values)
        q = _window_instance(rng, max_m)
        table = bounds.kstar_table(q, pop)
        jumps = np.abs(np.diff(table))
        if jumps.size and int(jumps.max()) > 3:
            z = int(np.argmax(jumps))
            result.failures.append(
                f"trial {trial}: |k*({z + 1}) - k*({z + 2})| = "
                f"{int(jumps[z])} > 3 for q={q.tolist()}")
            if len(result.failures) >= max_failures:
                break
    return result


def _closed_sets_bruteforce(pool: PropositionPool) -> set[tuple[int, ...]]:
    """All closed conjunctions, by closing every subset of the pool."""
    k = len(pool)
    closed = set()
    for mask_bits in range(2 ** k):
        props = [j + 1 for j in range(k) if mask_bits >> j & 1]
        closed.add(lang.closure(props, pool).props)
    return closed


def _ccj_tree(pool: PropositionPool) -> list[tuple[int, ...]]:
    """Every selector visited by the prefix-preserving refinement tree."""
    root = lang.closure(lang.bottom(pool), pool)
    visited = [root.props]
    stack = [root]
    while stack:
        node = stack.pop()
        for child in lang.refine_ccj(node, pool):
            visited.append(child.props)
            stack.append(child)
    return visited


def closed_enumeration(trials: int, seed: int, max_props: int = 10,
                       max_rows: int = 20, max_failures: int = 3
                       ) -> SuiteResult:
    """The refinement tree visits each closed conjunction exactly once."""
    result = SuiteResult("closed-enumeration", trials)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        rows = int(rng.integers(3, max_rows + 1))
        count = int(rng.integers(1, max_props + 1))
        masks = rng.random((count, rows)) < rng.uniform(0.2, 0.8)
        pool = PropositionPool.from_masks(list(masks), rows=rows)
        visited = _ccj_tree(pool)
        expected = _closed_sets_bruteforce(pool)
        if len(visited) != len(set(visited)) or set(visited) != expected:
            result.failures.append(
                f"trial {trial}: visited {len(visited)} selectors, "
                f"{len(set(visited))} distinct, expected {len(expected)} "
                f"closed conjunctions (pool of {len(pool)} over {rows} rows)")
            if len(result.failures) >= max_failures:
                break
    return result


def segment_identity(trials: int, seed: int, max_m: int = 60,
                     max_failures: int = 3) -> SuiteResult:
    """O(1) segment deviation sums equal direct summation (integers)."""
    result = SuiteResult("segment-identity", trials)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        m = int(rng.integers(1, max_m + 1))
        values = np.sort(rng.integers(-100, 101, size=m)).astype(np.float64)
        st = stats.build_sorted(values)
        z = int(rng.integers(1, m + 1))
        a = int(rng.integers(1, z + 1))
        b = int(rng.integers(z, m + 1))
        got = stats.segment_smd(st, a, z, b)
        want = float(np.sum(np.abs(values[z - 1] - values[a - 1:b])))
        if got != want:
            result.failures.append(
                f"trial {trial}: segment({a},{z},{b})={got!r} != "
                f"direct={want!r} for values={values.tolist()}")
            if len(result.failures) >= max_failures:
                break
    return result


def run_all(trials: int, seed: int, max_m: int = 14, max_props: int = 10,
            max_rows: int = 20) -> list[SuiteResult]:
    return [
        estimator_equivalence(trials, seed, max_m=max_m),
        window_stability(trials, seed + 1),
        closed_enumeration(max(1, trials // 10) if trials else 0, seed + 2,
                           max_props=max_props, max_rows=max_rows),
        segment_identity(trials, seed + 3),
    ]
