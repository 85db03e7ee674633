"""Per-pair verdicts under one probe and the cumulative ledger across probes.

Verdicts live in a dense (sources x nodes) int8 matrix restricted by the
pair-set mask: 0 uncertain, 1 satisfied, 2 non-satisfied. Satisfied and
non-satisfied are proofs, so they are sticky across probes; proving both for
one pair means the pruning logic is broken and raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import GraphError, MultiCostGraph, as_weighting, spf

UNCERTAIN = np.int8(0)
SATISFIED = np.int8(1)
NONSATISFIED = np.int8(2)

VERDICT_NAMES = {0: "uncertain", 1: "satisfied", 2: "non-satisfied"}

# Guard band around the normalized threshold 1. Constraint derivation from
# alpha * max(shortest cost) plus discrete cost values routinely puts pairs
# exactly on the boundary, where summation order decides which side a float
# lands on; a proof must not hinge on that, so both proofs back off by the
# band and boundary pairs stay uncertain.
DECISION_EPS = 1e-6


class LedgerConflictError(RuntimeError):
    """A pair was proven both satisfied and non-satisfied: pruning is unsound."""


class PairSet:
    """Ordered source-destination pairs, stored as a per-source mask."""

    def __init__(self, node_count: int, sources: Sequence[int], mask: np.ndarray):
        self.n = int(node_count)
        self.sources = np.asarray(sources, dtype=np.int64)
        self.mask = np.asarray(mask, dtype=bool)
        if self.mask.shape != (len(self.sources), self.n):
            raise GraphError("pair-set mask shape mismatch")
        if len(self.sources) != len(set(self.sources.tolist())):
            raise GraphError("pair-set sources must be unique")

    @classmethod
    def all_ordered(cls, node_count: int, include_self: bool = True) -> "PairSet":
        sources = np.arange(node_count)
        mask = np.ones((node_count, node_count), dtype=bool)
        if not include_self:
            np.fill_diagonal(mask, False)
        return cls(node_count, sources, mask)

    @classmethod
    def between(cls, node_count: int, nodes: Sequence[int], include_self: bool = True) -> "PairSet":
        sources = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        mask = np.zeros((len(sources), node_count), dtype=bool)
        mask[:, sources] = True
        if not include_self:
            for i, s in enumerate(sources):
                mask[i, s] = False
        return cls(node_count, sources, mask)

    @classmethod
    def one_to_all(cls, node_count: int, source: int, include_self: bool = False) -> "PairSet":
        mask = np.ones((1, node_count), dtype=bool)
        if not include_self:
            mask[0, source] = False
        return cls(node_count, [source], mask)

    @classmethod
    def from_pairs(cls, node_count: int, pairs: Iterable[tuple[int, int]]) -> "PairSet":
        by_src: dict[int, set[int]] = {}
        for u, v in pairs:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"pair ({u},{v}) out of range")
            by_src.setdefault(int(u), set()).add(int(v))
        sources = sorted(by_src)
        mask = np.zeros((len(sources), node_count), dtype=bool)
        for i, s in enumerate(sources):
            mask[i, list(by_src[s])] = True
        return cls(node_count, sources, mask)

    @property
    def n_pairs(self) -> int:
        return int(self.mask.sum())

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        for i, s in enumerate(self.sources):
            for v in np.flatnonzero(self.mask[i]):
                out.append((int(s), int(v)))
        return out


@dataclass
class PruneCounters:
    """Per-coordinate counts of uncertain pairs whose found path violates it."""

    by_constraint: tuple[int, ...]

    def __iter__(self):
        return iter(self.by_constraint)


class Ledger:
    """Cumulative verdicts over a declared pair set."""

    def __init__(self, pair_set: PairSet):
        self.pair_set = pair_set
        self.verdicts = np.zeros(pair_set.mask.shape, dtype=np.int8)

    @property
    def n_tot(self) -> int:
        return self.pair_set.n_pairs

    @property
    def n_y(self) -> int:
        return int(((self.verdicts == SATISFIED) & self.pair_set.mask).sum())

    @property
    def n_n(self) -> int:
        return int(((self.verdicts == NONSATISFIED) & self.pair_set.mask).sum())

    @property
    def n_u(self) -> int:
        return self.n_tot - self.n_y - self.n_n

    def counts(self) -> tuple[int, int, int, int]:
        return self.n_y, self.n_n, self.n_u, self.n_tot

    def verdict(self, u: int, v: int) -> str:
        idx = np.searchsorted(self.pair_set.sources, u)
        if idx >= len(self.pair_set.sources) or self.pair_set.sources[idx] != u or not self.pair_set.mask[idx, v]:
            raise GraphError(f"pair ({u},{v}) not in the declared pair set")
        return VERDICT_NAMES[int(self.verdicts[idx, v])]


def classify_probe(
    graph_normalized: MultiCostGraph, pair_set: PairSet, mix
) -> tuple[np.ndarray, PruneCounters]:
    """Classify every pair at one probe of a normalized graph.

    Composite distance >= 1 proves non-satisfied for every mix (convex
    combination of per-coordinate sums); a found path below 1 in every
    coordinate proves satisfied; anything else stays uncertain and feeds the
    prune counters with its violated coordinates. Both tests back off by
    DECISION_EPS so that no proof rests on float rounding at the boundary.
    The mix must lie on the simplex or the pruning proof does not apply.
    """
    w = as_weighting(mix, graph_normalized.k)
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise GraphError("classification requires a simplex mix (sum = 1)")
    verdicts = np.zeros(pair_set.mask.shape, dtype=np.int8)
    pruned = np.zeros(graph_normalized.k, dtype=np.int64)
    for i, source in enumerate(pair_set.sources):
        tree = spf(graph_normalized, int(source), w)
        row_mask = pair_set.mask[i]
        nonsat = tree.dist_composite >= 1.0 + DECISION_EPS
        sat = ~nonsat & np.all(tree.dist_vector < 1.0 - DECISION_EPS, axis=1)
        row = np.zeros(graph_normalized.n, dtype=np.int8)
        row[nonsat] = NONSATISFIED
        row[sat] = SATISFIED
        row[~row_mask] = UNCERTAIN
        verdicts[i] = row
        uncertain = row_mask & ~nonsat & ~sat
        if uncertain.any():
            pruned += (tree.dist_vector[uncertain] >= 1.0).sum(axis=0)
    return verdicts, PruneCounters(tuple(int(c) for c in pruned))


def merge_probe(ledger: Ledger, verdicts: np.ndarray) -> Ledger:
    """Fold one probe's verdicts into the ledger (sticky proofs).

    Mutates and returns the ledger. Raises LedgerConflictError if a pair
    would be proven both ways, which the soundness of pruning forbids.
    """
    if verdicts.shape != ledger.verdicts.shape:
        raise GraphError("verdict matrix does not cover the ledger's pair set")
    cur = ledger.verdicts
    mask = ledger.pair_set.mask
    conflict = mask & (
        ((cur == SATISFIED) & (verdicts == NONSATISFIED))
        | ((cur == NONSATISFIED) & (verdicts == SATISFIED))
    )
    if conflict.any():
        i, v = np.argwhere(conflict)[0]
        u = int(ledger.pair_set.sources[i])
        raise LedgerConflictError(
            f"pair ({u},{int(v)}) proven both satisfied and non-satisfied"
        )
    np.copyto(cur, verdicts, where=mask & (cur == UNCERTAIN))
    return ledger


def probe_counts(pair_set: PairSet, verdicts: np.ndarray) -> tuple[int, int, int]:
    """(N_y, N_n, N_u) of a single probe's verdict matrix."""
    mask = pair_set.mask
    n_y = int(((verdicts == SATISFIED) & mask).sum())
    n_n = int(((verdicts == NONSATISFIED) & mask).sum())
    return n_y, n_n, pair_set.n_pairs - n_y - n_n


def discovery_rate(ledger: Ledger) -> float:
    """N_y / (N_y + N_u); defined as 1.0 when every pair is proven infeasible."""
    n_y, _, n_u, _ = ledger.counts()
    if n_y + n_u == 0:
        return 1.0
    return n_y / (n_y + n_u)
