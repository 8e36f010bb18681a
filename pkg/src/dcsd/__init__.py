"""Optimal subgroup discovery for numeric targets with dispersion-corrected
objective functions.

The package finds globally optimal (or a-approximate) conjunctive subgroup
descriptions by best-first branch-and-bound, pruned with tight optimistic
estimators. Alongside classic size-times-shift objectives it optimizes
objectives that additionally penalize the spread of the target values
around the subgroup median, at the same asymptotic cost per search node.
"""

from .dataset import (AttributeColumn, DataTable, Proposition,
                      PropositionPool, RowSet, build_propositions, load_csv)
from .errors import DataError, DegenerateTargetError, UsageError
from .lang import (Conjunction, bottom, closure, conjunction, core_index,
                   describe, extension_of, is_closed, refine_ccj, refine_cnj)
from .stats import (SortedTargets, amd, build_sorted, mad, median, rmsd,
                    segment_smd, smd)
from .objectives import (CoverageMedianShift, CustomLevel1, CustomLevel2,
                         DispersionCorrectedBinomial,
                         DispersionCorrectedMedianShift, GlobalStats,
                         ImpactObjective, Objective, cov, dcc, evaluate, ipa,
                         make_objective, mds_plus)
from .bounds import (brute_force_estimate, kstar_table,
                     median_sequence_estimate_general,
                     median_sequence_estimate_linear, run_bounds,
                     top_sequence_estimate, window_limit)
from .search import (ResultRecord, SearchConfig, SearchNode, Trace,
                     run_search, snapshot)
from .evalstats import (SubgroupReport, chebyshev_epsilon, lcb, lcb_score,
                        sample_variance, subgroup_report)

__version__ = "0.1.0"

__all__ = [
    "AttributeColumn", "DataTable", "Proposition", "PropositionPool",
    "RowSet", "build_propositions", "load_csv",
    "DataError", "DegenerateTargetError", "UsageError",
    "Conjunction", "bottom", "closure", "conjunction", "core_index",
    "describe", "extension_of", "is_closed", "refine_ccj", "refine_cnj",
    "SortedTargets", "amd", "build_sorted", "mad", "median", "rmsd",
    "segment_smd", "smd",
    "CoverageMedianShift", "CustomLevel1", "CustomLevel2",
    "DispersionCorrectedBinomial", "DispersionCorrectedMedianShift",
    "GlobalStats", "ImpactObjective", "Objective", "cov", "dcc", "evaluate",
    "ipa", "make_objective", "mds_plus",
    "brute_force_estimate", "kstar_table",
    "median_sequence_estimate_general", "median_sequence_estimate_linear",
    "run_bounds", "top_sequence_estimate", "window_limit",
    "ResultRecord", "SearchConfig", "SearchNode", "Trace", "run_search",
    "snapshot",
    "SubgroupReport", "chebyshev_epsilon", "lcb", "lcb_score",
    "sample_variance", "subgroup_report",
    "__version__",
]
