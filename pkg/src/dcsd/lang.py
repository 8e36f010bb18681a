"""Conjunctive selectors: extensions, closures, and refinement operators.

A selector is a conjunction of base propositions from a pool, identified by
its ascending tuple of proposition ids. Two refinement operators are
provided for branch-and-bound search: plain index-ordered refinement over
all conjunctions, and prefix-preserving closure refinement that visits every
*closed* conjunction (one per reachable extension) exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import PropositionPool, RowSet


@dataclass(frozen=True)
class Conjunction:
    """Immutable conjunction of propositions.

    `props` is the strictly ascending tuple of member ids, `extension`
    the intersection of the members' extensions (the empty conjunction has
    the full row set), and `core` the smallest id i such that the member
    prefix up to i already pins down the extension (0 when the extension
    equals the full row set)."""

    props: tuple[int, ...]
    extension: RowSet
    core: int

    def __len__(self) -> int:
        return len(self.props)


def _check_ids(props: Iterable[int], pool: PropositionPool) -> tuple[int, ...]:
    ids = tuple(sorted(set(int(p) for p in props)))
    for p in ids:
        if not 1 <= p <= len(pool):
            raise KeyError(f"unknown proposition id {p}")
    return ids


def _core_of(props: Sequence[int], ext_size: int, pool: PropositionPool) -> int:
    if ext_size == pool.rows:
        return 0
    running = np.ones(pool.rows, dtype=bool)
    for p in props:
        running &= pool.matrix[p - 1]
        if int(np.count_nonzero(running)) == ext_size:
            return p
    raise AssertionError("extension does not match member propositions")


def extension_of(props: Iterable[int], pool: PropositionPool) -> RowSet:
    """Intersection of the member propositions' extensions; the empty
    conjunction maps to the full row set."""
    ids = _check_ids(props, pool)
    mask = np.ones(pool.rows, dtype=bool)
    for p in ids:
        mask &= pool.matrix[p - 1]
    return RowSet(mask)


def conjunction(props: Iterable[int], pool: PropositionPool) -> Conjunction:
    """Build a Conjunction value (extension and core index included)."""
    ids = _check_ids(props, pool)
    ext = extension_of(ids, pool)
    return Conjunction(ids, ext, _core_of(ids, ext.size, pool))


def bottom(pool: PropositionPool) -> Conjunction:
    """The root selector: empty conjunction, full extension, core 0."""
    return Conjunction((), RowSet.full(pool.rows), 0)


def core_index(sigma: Conjunction) -> int:
    """Smallest prefix id whose extension equals the full conjunction's."""
    return sigma.core


def _closure_members(mask: np.ndarray, size: int,
                     pool: PropositionPool) -> np.ndarray:
    # A proposition belongs to the closure iff its extension contains the
    # given row set; counting occurrences inside the set is equivalent and
    # vectorizes over the whole pool.
    counts = np.count_nonzero(pool.matrix & mask, axis=1)
    return np.flatnonzero(counts == size) + 1


def closure(sigma: Conjunction | Iterable[int],
            pool: PropositionPool) -> Conjunction:
    """Conjunction of every pool proposition whose extension contains
    ext(sigma). The result keeps sigma's extension and is a fixpoint of
    this operation."""
    if not isinstance(sigma, Conjunction):
        sigma = conjunction(sigma, pool)
    members = _closure_members(sigma.extension.mask, sigma.extension.size, pool)
    props = tuple(int(p) for p in members)
    return Conjunction(props, sigma.extension,
                       _core_of(props, sigma.extension.size, pool))


def is_closed(sigma: Conjunction, pool: PropositionPool) -> bool:
    members = _closure_members(sigma.extension.mask, sigma.extension.size, pool)
    return len(members) == len(sigma.props) and bool(
        np.array_equal(members, np.asarray(sigma.props, dtype=members.dtype)))


def refine_cnj(sigma: Conjunction, pool: PropositionPool) -> list[Conjunction]:
    """Append every proposition with id above sigma's largest member.

    Starting from the empty conjunction this spans each of the 2^k
    conjunctions exactly once. Selectors with empty extension are dead
    ends and yield no refinements."""
    if sigma.extension.size == 0:
        return []
    start = (sigma.props[-1] + 1) if sigma.props else 1
    children = []
    for j in range(start, len(pool) + 1):
        mask = sigma.extension.mask & pool.matrix[j - 1]
        ext = RowSet(mask)
        props = sigma.props + (j,)
        children.append(Conjunction(props, ext, _core_of(props, ext.size, pool)))
    return children


def refine_ccj(sigma: Conjunction, pool: PropositionPool) -> list[Conjunction]:
    """Prefix-preserving closure refinement.

    For each candidate id j above sigma's core index (and not in sigma),
    the closure of sigma plus proposition j is a child iff it adds no
    proposition with id below j. Starting from the closed root this visits
    every closed conjunction exactly once. Requires sigma to be closed.
    """
    if not is_closed(sigma, pool):
        raise ValueError("refine_ccj requires a closed conjunction "
                         "(programming error)")
    if sigma.extension.size == 0:
        return []
    member_set = set(sigma.props)
    prefix = np.asarray(sigma.props, dtype=np.int64)
    children = []
    for j in range(sigma.core + 1, len(pool) + 1):
        if j in member_set:
            continue
        mask = sigma.extension.mask & pool.matrix[j - 1]
        size = int(np.count_nonzero(mask))
        members = _closure_members(mask, size, pool)
        if not np.array_equal(members[members < j], prefix[prefix < j]):
            continue
        props = tuple(int(p) for p in members)
        ext = RowSet(mask)
        children.append(Conjunction(props, ext, _core_of(props, size, pool)))
    return children


def describe(sigma: Conjunction, pool: PropositionPool) -> str:
    """Human-readable form: member predicates joined by " & "; the empty
    conjunction reads "true"."""
    if not sigma.props:
        return "true"
    return " & ".join(pool.describe(p) for p in sigma.props)
