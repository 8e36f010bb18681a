"""Best-first branch-and-bound over conjunctive selectors.

The queue is ordered by optimistic bound (descending), with deterministic
tie-breaking by extension size (descending) and then member ids
(lexicographically ascending). A child selector is enqueued only while its
bound can still beat the approximation-scaled k-th best incumbent
(kept when equal); the loop stops once the best queued bound cannot.
The comparison is multiplicative throughout, so zero incumbent values are
safe. Returned results carry the guarantee
value(best) >= a * value(sigma) for every selector sigma of the
(depth-limited) language.
"""

from __future__ import annotations

import heapq
import json
import time
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from . import lang
from .dataset import DataTable, PropositionPool
from .errors import UsageError
from .lang import Conjunction
from .objectives import Objective
from . import bounds

LANGUAGES = ("cnj", "ccj")
ESTIMATORS = ("top", "general", "linear")


@dataclass
class SearchConfig:
    """Knobs for one search run.

    `a` is the approximation factor in (0, 1]; `estimator` of None picks
    the natural one for the objective (linear for dispersion-corrected
    coverage forms, top-sequence for level-1 objectives, general
    otherwise). `incremental_sort` threads per-node ascending row orders
    through the tree instead of re-sorting extracted values at every node;
    results are identical either way."""

    a: float = 1.0
    depth_limit: Optional[int] = None
    top_k: int = 1
    language: str = "ccj"
    estimator: Optional[str] = None
    node_budget: Optional[int] = None
    time_budget: Optional[float] = None
    incremental_sort: bool = False

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise UsageError("approximation factor a must be in (0, 1]")
        if self.top_k < 1:
            raise UsageError("top_k must be >= 1")
        if self.language not in LANGUAGES:
            raise UsageError(f"language must be one of {LANGUAGES}")
        if self.estimator is not None and self.estimator not in ESTIMATORS:
            raise UsageError(f"estimator must be one of {ESTIMATORS}")
        if self.depth_limit is not None and self.depth_limit < 0:
            raise UsageError("depth_limit must be >= 0")


@dataclass(frozen=True)
class SearchNode:
    """A scored selector: optimistic bound dominates the value of every
    descendant."""

    selector: Conjunction
    bound: float
    value: float
    depth: int


@dataclass(frozen=True)
class ResultRecord:
    selector: Conjunction
    value: float
    size: int
    depth: int


class Trace:
    """Execution counters plus the incumbent progress curve.

    `best_value_over_time` holds (nodes_expanded, incumbent value) pairs,
    appended whenever the incumbent improves; it is non-decreasing in the
    value component."""

    def __init__(self) -> None:
        self.nodes_expanded = 0
        self.nodes_enqueued = 0
        self.best_value_over_time: list[tuple[int, float]] = []
        self.wall_time = 0.0
        self.incumbent_value = 0.0
        self.queue_top_bound = 0.0
        self.incomplete = False


def snapshot(trace: Trace) -> dict:
    """Progress record of a running or finished search."""
    return {
        "nodes_expanded": trace.nodes_expanded,
        "nodes_enqueued": trace.nodes_enqueued,
        "incumbent_value": trace.incumbent_value,
        "queue_top_bound": trace.queue_top_bound,
        "wall_time": trace.wall_time,
        "incomplete": trace.incomplete,
    }


def _resolve_estimator(objective: Objective, name: Optional[str]):
    """Map the estimator choice to a bound function, validating that the
    pairing is sound for the objective."""
    if name is None:
        if getattr(objective, "dcc_form", False):
            name = "linear"
        elif objective.level == 1:
            name = "top"
        else:
            name = "general"
    if name == "top":
        relaxed = objective.level1_relaxation()  # raises when unavailable
        return name, lambda values: bounds.top_sequence_estimate(relaxed, values)
    if name == "linear":
        if not getattr(objective, "dcc_form", False):
            raise UsageError(
                f"objective {objective.name!r} is not of dispersion-"
                "corrected coverage form; the linear estimator does not "
                "apply")
        return name, lambda values: bounds.median_sequence_estimate_linear(
            objective, values)
    if name == "general":
        cap = 10 ** 9  # search inputs are bounded by the dataset size
        return name, lambda values: bounds.median_sequence_estimate_general(
            objective, values, size_cap=cap)
    raise UsageError(f"unknown estimator {name!r}")


class _Incumbents:
    """Top-k result pool, deduplicated by extension (selectors describing
    the same rows have the same value; the first one reached wins)."""

    def __init__(self, top_k: int):
        self.top_k = top_k
        self.records: list[tuple[float, tuple[int, ...], ResultRecord]] = []
        self.seen: set[bytes] = set()

    def offer(self, selector: Conjunction, value: float, depth: int) -> None:
        if selector.extension.size == 0:
            return
        key = selector.extension.key()
        if key in self.seen:
            return
        self.seen.add(key)
        record = ResultRecord(selector=selector, value=value,
                              size=selector.extension.size, depth=depth)
        self.records.append((-value, selector.props, record))
        self.records.sort(key=lambda item: (item[0], item[1]))
        del self.records[self.top_k:]

    def threshold(self) -> float:
        """Value of the k-th best incumbent (0 while fewer than k exist)."""
        if len(self.records) < self.top_k:
            return 0.0
        return self.records[-1][2].value

    def best_value(self) -> float:
        return self.records[0][2].value if self.records else 0.0

    def results(self) -> list[ResultRecord]:
        return [record for _, _, record in self.records]


def run_search(table: DataTable, pool: PropositionPool, objective: Objective,
               config: SearchConfig,
               trace_writer: Optional[IO[str]] = None
               ) -> tuple[list[ResultRecord], Trace]:
    """Run best-first branch-and-bound and return (results, trace).

    Results are the top-k selectors by objective value (ties broken by
    member ids), deduplicated by extension; empty-extension selectors are
    scored but never enqueued nor reported. When a node or time budget
    stops the search early the trace is flagged incomplete and the
    incumbents found so far are returned. If `trace_writer` is given, one
    JSON line per expansion is written with the fields nodes_expanded,
    incumbent_value, queue_top_bound, and depth.
    """
    if objective.pop.size != table.rows:
        raise UsageError("objective population statistics do not match the "
                         "table")
    start = time.perf_counter()
    target = table.target
    estimator_name, bound_fn = _resolve_estimator(objective, config.estimator)

    if config.incremental_sort:
        global_order = np.argsort(target, kind="stable")

    def node_values(selector: Conjunction, parent_rows=None):
        """Ascending target values of the selector's extension; with
        incremental sorting also the ascending row-index array."""
        if config.incremental_sort:
            if parent_rows is None:
                rows = global_order[selector.extension.mask[global_order]]
            else:
                rows = parent_rows[selector.extension.mask[parent_rows]]
            return target[rows], rows
        return np.sort(target[selector.extension.mask]), None

    refine = lang.refine_ccj if config.language == "ccj" else lang.refine_cnj
    root = lang.bottom(pool)
    if config.language == "ccj":
        root = lang.closure(root, pool)

    trace = Trace()
    incumbents = _Incumbents(config.top_k)

    root_values, root_rows = node_values(root)
    root_value = objective.value(root_values)
    root_bound = bound_fn(root_values) if root.extension.size else 0.0
    incumbents.offer(root, root_value, 0)
    trace.incumbent_value = incumbents.best_value()
    trace.queue_top_bound = root_bound
    trace.best_value_over_time.append((0, trace.incumbent_value))

    # heap entries: (-bound, -extension size, member ids, payload)
    heap: list = []
    expandable = (config.depth_limit is None or config.depth_limit > 0)
    if root.extension.size > 0 and len(pool) > 0 and expandable:
        heapq.heappush(heap, (-root_bound, -root.extension.size, root.props,
                              (root, root_bound, 0, root_rows)))
        trace.nodes_enqueued += 1

    a = config.a
    while heap:
        if (config.node_budget is not None
                and trace.nodes_expanded >= config.node_budget):
            trace.incomplete = True
            break
        if (config.time_budget is not None
                and time.perf_counter() - start > config.time_budget):
            trace.incomplete = True
            break
        neg_bound, _, _, payload = heap[0]
        top_bound = -neg_bound
        if top_bound <= a * incumbents.threshold():
            break  # nothing left can beat the a-scaled incumbent
        heapq.heappop(heap)
        node, node_bound, depth, node_rows = payload
        trace.nodes_expanded += 1
        trace.queue_top_bound = node_bound

        children = refine(node, pool)
        scored = []
        for child in children:
            child_values, child_rows = node_values(child, node_rows)
            value = objective.value(child_values)
            incumbents.offer(child, value, depth + 1)
            if child.extension.size == 0:
                continue
            child_bound = bound_fn(child_values)
            scored.append((child, child_bound, child_rows))
        trace.incumbent_value = incumbents.best_value()
        if (not trace.best_value_over_time
                or trace.incumbent_value > trace.best_value_over_time[-1][1]):
            trace.best_value_over_time.append(
                (trace.nodes_expanded, trace.incumbent_value))

        threshold = incumbents.threshold()
        child_depth = depth + 1
        deeper_allowed = (config.depth_limit is None
                          or child_depth < config.depth_limit)
        if deeper_allowed:
            for child, child_bound, child_rows in scored:
                if child_bound >= a * threshold:  # keep ties
                    heapq.heappush(
                        heap,
                        (-child_bound, -child.extension.size, child.props,
                         (child, child_bound, child_depth, child_rows)))
                    trace.nodes_enqueued += 1

        if trace_writer is not None:
            trace_writer.write(json.dumps(
                {"nodes_expanded": trace.nodes_expanded,
                 "incumbent_value": trace.incumbent_value,
                 "queue_top_bound": node_bound,
                 "depth": depth},
                sort_keys=True) + "\n")

    trace.wall_time = time.perf_counter() - start
    return incumbents.results(), trace
