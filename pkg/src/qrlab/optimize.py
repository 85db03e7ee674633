"""Search over the mixing simplex for the blend maximizing satisfied pairs.

The scalar strategies (dichotomy, golden section, equalizer) work on the
two-dimensional blend p*w1 + (1-p)*w2. Dichotomy halves its interval by the
prune-counter signal: whichever constraint prunes more uncertain pairs gets
more weight. Grid search covers any k via a barycentric lattice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classify import Ledger, PairSet, PruneCounters, classify_probe, merge_probe, probe_counts
from .graph import GraphError, MultiCostGraph, spf

SCALAR_KINDS = {"golden-section", "dichotomy", "dichotomy-endpoints", "monotone-equalizer"}
KINDS = SCALAR_KINDS | {"grid"}
OBJECTIVES = {"satisfied", "uncertain"}


class Direction(enum.Enum):
    INCREASE = "increase"
    DECREASE = "decrease"
    STOP = "stop"


@dataclass(frozen=True)
class SearchStrategy:
    """Probe-schedule description; tolerance is the final interval width."""

    kind: str = "dichotomy-endpoints"
    max_probes: int = 10
    tolerance: float = 1.0 / 64.0
    objective: str = "satisfied"
    lattice_resolution: int = 10

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GraphError(f"unknown strategy kind {self.kind!r}, expected one of {sorted(KINDS)}")
        if self.max_probes < 1:
            raise GraphError("max_probes must be >= 1")
        if not (self.tolerance > 0):
            raise GraphError("tolerance must be positive")
        if self.objective not in OBJECTIVES:
            raise GraphError(f"objective must be one of {sorted(OBJECTIVES)}")
        if self.lattice_resolution < 1:
            raise GraphError("lattice_resolution must be >= 1")

    @classmethod
    def from_dict(cls, spec: dict) -> "SearchStrategy":
        return cls(
            kind=spec.get("kind", "dichotomy-endpoints"),
            max_probes=int(spec.get("max_probes", 10)),
            tolerance=float(spec.get("tolerance", 1.0 / 64.0)),
            objective=spec.get("objective", "satisfied"),
            lattice_resolution=int(spec.get("lattice_resolution", 10)),
        )


@dataclass(frozen=True)
class ProbeRecord:
    """One classified probe: fresh counts plus the post-merge cumulative state."""

    mix: tuple[float, ...]
    n_y: int
    n_n: int
    n_u: int
    pruned: tuple[int, ...]
    cum_n_y: int
    cum_n_n: int
    cum_n_u: int

    @property
    def p(self) -> float:
        return self.mix[0]


@dataclass
class SearchTrace:
    probes: list[ProbeRecord]
    best_mix: tuple[float, ...]
    ledger: Ledger

    def best_record(self) -> ProbeRecord:
        for rec in self.probes:
            if rec.mix == self.best_mix:
                return rec
        raise GraphError("best_mix missing from trace")

    def csv_header(self, k: int) -> str:
        pruned = ",".join(f"pruned_{i + 1}" for i in range(k))
        return f"probe_idx,p,N_y,N_n,N_u,{pruned},cum_N_y,cum_N_n,cum_N_u"

    def csv_rows(self) -> list[str]:
        rows = []
        for idx, rec in enumerate(self.probes):
            p = "|".join(f"{x:.9g}" for x in rec.mix) if len(rec.mix) > 2 else f"{rec.p:.9g}"
            pruned = ",".join(str(c) for c in rec.pruned)
            rows.append(
                f"{idx},{p},{rec.n_y},{rec.n_n},{rec.n_u},{pruned},"
                f"{rec.cum_n_y},{rec.cum_n_n},{rec.cum_n_u}"
            )
        return rows


def equalizer_signal(counters: PruneCounters | Sequence[int]) -> Direction:
    """Move weight toward the constraint that prunes more uncertain pairs.

    Two-dimensional rule under the blend p*w1 + (1-p)*w2: more pruning by
    constraint 1 means w1 is underweighted, so increase p; the mirror case
    decreases p; equal counts give the stop signal.
    """
    c = tuple(counters)
    if len(c) != 2:
        raise GraphError("equalizer signal is defined for k = 2")
    if c[0] > c[1]:
        return Direction.INCREASE
    if c[0] < c[1]:
        return Direction.DECREASE
    return Direction.STOP


def simplex_lattice(k: int, resolution: int) -> list[tuple[float, ...]]:
    """All barycentric lattice points with the given step count, lexicographic."""
    out: list[tuple[float, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for v in range(remaining + 1):
            rec(prefix + (v,), remaining - v, slots - 1)

    rec((), resolution, k)
    return [tuple(c / resolution for c in comp) for comp in out]


class _Prober:
    """Shared probe bookkeeping: classify, merge, record, dedupe."""

    def __init__(self, graph: MultiCostGraph, pair_set: PairSet, objective: str):
        self.graph = graph
        self.ledger = Ledger(pair_set)
        self.pair_set = pair_set
        self.objective = objective
        self.trace: list[ProbeRecord] = []
        self._seen: dict[tuple[float, ...], ProbeRecord] = {}

    def probe(self, mix: Sequence[float]) -> ProbeRecord:
        key = tuple(float(x) for x in mix)
        if key in self._seen:
            return self._seen[key]
        verdicts, pruned = classify_probe(self.graph, self.pair_set, key)
        merge_probe(self.ledger, verdicts)
        n_y, n_n, n_u = probe_counts(self.pair_set, verdicts)
        rec = ProbeRecord(
            mix=key, n_y=n_y, n_n=n_n, n_u=n_u, pruned=tuple(pruned),
            cum_n_y=self.ledger.n_y, cum_n_n=self.ledger.n_n, cum_n_u=self.ledger.n_u,
        )
        self.trace.append(rec)
        self._seen[key] = rec
        return rec

    def value(self, rec: ProbeRecord) -> int:
        return rec.n_y if self.objective == "satisfied" else -rec.n_u

    @property
    def used(self) -> int:
        return len(self.trace)

    def finish(self) -> SearchTrace:
        best = max(self.trace, key=lambda r: (self.value(r), tuple(-x for x in r.mix)))
        return SearchTrace(self.trace, best.mix, self.ledger)


def optimize_p(graph_normalized: MultiCostGraph, pair_set: PairSet, strategy: SearchStrategy) -> SearchTrace:
    """Run the strategy's probe schedule and accumulate the ledger.

    Every probe is merged, so the returned ledger is the multiple-p state
    while best_mix/best_record give the single-p view. Exhausting the probe
    budget returns the best so far; an empty pair set is an error.
    """
    if pair_set.n_pairs == 0:
        raise GraphError("empty pair set")
    k = graph_normalized.k
    if strategy.kind in SCALAR_KINDS and k != 2:
        raise GraphError(f"strategy {strategy.kind!r} requires k = 2, use grid search")
    prober = _Prober(graph_normalized, pair_set, strategy.objective)

    if strategy.kind == "grid":
        if k == 2:
            if strategy.max_probes == 1:
                points = [(0.5, 0.5)]
            else:
                points = [(p, 1.0 - p) for p in np.linspace(0.0, 1.0, strategy.max_probes)]
        else:
            points = simplex_lattice(k, strategy.lattice_resolution)
            if len(points) > strategy.max_probes:
                raise GraphError(
                    f"lattice has {len(points)} points > max_probes={strategy.max_probes}"
                )
        for mix in points:
            prober.probe(mix)
        return prober.finish()

    if strategy.kind == "golden-section":
        _golden_section(prober, strategy)
        return prober.finish()

    # dichotomy family: interval halving driven by the equalizer signal
    if strategy.kind == "dichotomy-endpoints":
        prober.probe((0.0, 1.0))
        if prober.used < strategy.max_probes:
            prober.probe((1.0, 0.0))
    lo, hi = 0.0, 1.0
    while prober.used < strategy.max_probes and (hi - lo) > strategy.tolerance:
        mid = 0.5 * (lo + hi)
        rec = prober.probe((mid, 1.0 - mid))
        signal = equalizer_signal(rec.pruned)
        if signal is Direction.STOP:
            break
        if signal is Direction.INCREASE:
            lo = mid
        else:
            hi = mid
    return prober.finish()


def _golden_section(prober: _Prober, strategy: SearchStrategy):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, 1.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = prober.probe((c, 1.0 - c))
    if prober.used >= strategy.max_probes:
        return
    fd = prober.probe((d, 1.0 - d))
    while prober.used < strategy.max_probes and (b - a) > strategy.tolerance:
        if prober.value(fc) > prober.value(fd):
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = prober.probe((c, 1.0 - c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = prober.probe((d, 1.0 - d))


@dataclass
class EnvelopeSample:
    """g(p) samples for one pair plus the midpoint concavity verdict."""

    ps: np.ndarray
    values: np.ndarray
    concave_ok: bool
    max_violation: float
    samples: list[tuple[float, float]] = field(init=False)

    def __post_init__(self):
        self.samples = [(float(p), float(g)) for p, g in zip(self.ps, self.values)]


def envelope_scan(graph: MultiCostGraph, source: int, dest: int, probe_count: int, tol: float = 1e-9) -> EnvelopeSample:
    """Sample g(p) = composite shortest distance on a uniform p grid.

    g is the pointwise minimum of one line per path, hence concave; the
    midpoint test g((p1+p2)/2) >= (g(p1)+g(p2))/2 - tol is checked for every
    sampled pair with a sampled midpoint.
    """
    if graph.k != 2:
        raise GraphError("envelope scan is defined for k = 2")
    if probe_count < 3:
        raise GraphError("probe_count must be >= 3")
    ps = np.linspace(0.0, 1.0, probe_count)
    values = np.empty(probe_count)
    for i, p in enumerate(ps):
        tree = spf(graph, source, (p, 1.0 - p))
        if not tree.reachable(dest):
            raise GraphError(f"destination {dest} unreachable from {source}")
        values[i] = tree.dist_composite[dest]
    max_violation = 0.0
    for h in range(1, (probe_count - 1) // 2 + 1):
        chord = 0.5 * (values[: probe_count - 2 * h] + values[2 * h:])
        gap = chord - values[h: probe_count - h]
        worst = float(gap.max()) if gap.size else 0.0
        max_violation = max(max_violation, worst)
    return EnvelopeSample(ps, values, concave_ok=max_violation <= tol, max_violation=max_violation)


def monotonicity_check(graph: MultiCostGraph, source: int, dest: int, p_low: float, p_high: float) -> bool:
    """Does raising p lower the first coordinate and raise the second?

    Compares the shortest-path cost vectors (w1,w2) at p_low and (v1,v2) at
    p_high under the blend p*W1 + (1-p)*W2; true iff w1 >= v1 and w2 <= v2.
    """
    if graph.k != 2:
        raise GraphError("monotonicity check is defined for k = 2")
    if not (p_low < p_high):
        raise GraphError("need p_low < p_high")
    low = spf(graph, source, (p_low, 1.0 - p_low))
    high = spf(graph, source, (p_high, 1.0 - p_high))
    if not (low.reachable(dest) and high.reachable(dest)):
        raise GraphError(f"destination {dest} unreachable from {source}")
    w = low.dist_vector[dest]
    v = high.dist_vector[dest]
    return bool(w[0] >= v[0] and w[1] <= v[1])
