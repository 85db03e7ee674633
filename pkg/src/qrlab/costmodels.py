"""Seeded random cost assignment and constraint derivation.

Sampling is reproducible and order independent: every shared-cost group g
draws from its own substream ``PCG64(SeedSequence(seed, spawn_key=(g,)))``,
so parallel assignment cannot change the result. All distributions yield
non-negative values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classify import PairSet
from .graph import Constraints, GraphError, MultiCostGraph, spf
from .topologies import Topology


class Normal:
    """Gaussian clipped to >= 0 by resampling; spread given as variance or std."""

    name = "normal"

    def __init__(self, mean: float, variance: float | None = None, std: float | None = None):
        if (variance is None) == (std is None):
            raise GraphError("give exactly one of variance or std")
        self.mean = float(mean)
        self.std = float(std) if std is not None else float(np.sqrt(variance))
        if self.std <= 0:
            raise GraphError("normal spread must be positive")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = rng.normal(self.mean, self.std, size)
        while True:
            bad = out < 0.0
            if not bad.any():
                return out
            out[bad] = rng.normal(self.mean, self.std, int(bad.sum()))

    def to_dict(self):
        return {"dist": self.name, "mean": self.mean, "std": self.std}


class PositiveNormal(Normal):
    """Truncated-by-resampling normal; ``fold`` takes |x| instead."""

    name = "positive-normal"

    def __init__(self, mean, variance=None, std=None, fold: bool = False):
        super().__init__(mean, variance, std)
        self.fold = bool(fold)

    def sample(self, rng, size):
        if self.fold:
            return np.abs(rng.normal(self.mean, self.std, size))
        return super().sample(rng, size)

    def to_dict(self):
        return {"dist": self.name, "mean": self.mean, "std": self.std, "fold": self.fold}


class DiscreteUniform:
    name = "discrete-uniform"

    def __init__(self, values: Sequence[float]):
        vals = [float(v) for v in values]
        if not vals or any(v < 0 for v in vals):
            raise GraphError("discrete-uniform needs non-negative values")
        self.values = vals

    def sample(self, rng, size):
        return rng.choice(np.asarray(self.values), size=size)

    def to_dict(self):
        return {"dist": self.name, "values": self.values}


class Uniform:
    name = "uniform"

    def __init__(self, lo: float, hi: float):
        if not (0.0 <= lo < hi):
            raise GraphError("uniform needs 0 <= lo < hi")
        self.lo = float(lo)
        self.hi = float(hi)

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)

    def to_dict(self):
        return {"dist": self.name, "lo": self.lo, "hi": self.hi}


def distribution_from_dict(spec: dict):
    kind = spec.get("dist")
    if kind == "normal":
        return Normal(spec["mean"], variance=spec.get("variance"), std=spec.get("std"))
    if kind == "positive-normal":
        return PositiveNormal(
            spec["mean"], variance=spec.get("variance"), std=spec.get("std"),
            fold=spec.get("fold", False),
        )
    if kind == "discrete-uniform":
        return DiscreteUniform(spec["values"])
    if kind == "uniform":
        return Uniform(spec["lo"], spec["hi"])
    raise GraphError(f"unknown distribution kind: {kind!r}")


@dataclass
class CostModel:
    """One distribution per cost dimension plus the 64-bit base seed."""

    dims: list
    seed: int = 0

    @property
    def k(self) -> int:
        return len(self.dims)

    @classmethod
    def from_dict(cls, spec: dict) -> "CostModel":
        return cls([distribution_from_dict(d) for d in spec["dims"]], int(spec.get("seed", 0)))

    def to_dict(self) -> dict:
        return {"dims": [d.to_dict() for d in self.dims], "seed": self.seed}


def paper_cost_model(k: int = 2, seed: int = 0) -> CostModel:
    """Latency ~ clipped normal(7.5, var 1.25), loss ~ {0.01..0.05},
    and for k=3 jitter ~ positive normal(2.0, var 2.0)."""
    dims = [
        Normal(7.5, variance=1.25),
        DiscreteUniform([0.01, 0.02, 0.03, 0.04, 0.05]),
    ]
    if k == 3:
        dims.append(PositiveNormal(2.0, variance=2.0))
    elif k != 2:
        raise GraphError("paper cost model is defined for k in {2, 3}")
    return CostModel(dims, seed)


def _group_rng(seed: int, group: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(group,))))


def assign_costs(topology: Topology | MultiCostGraph, model: CostModel, seed: int | None = None) -> MultiCostGraph:
    """Sample one cost vector per shared-cost group, deterministically.

    A plain graph is treated as one group per edge (its existing costs are
    discarded). Group substreams make the fill order irrelevant.
    """
    base_seed = model.seed if seed is None else int(seed)
    if isinstance(topology, Topology):
        n = topology.node_count
        arcs = topology.arcs
        groups = topology.cost_groups
    else:
        n = topology.n
        arcs = [(int(topology.edge_src[i]), int(topology.edge_dst[i])) for i in range(topology.m)]
        groups = [[i] for i in range(topology.m)]
    k = model.k
    costs = np.empty((len(arcs), k), dtype=np.float64)
    for g, arc_ids in enumerate(groups):
        rng = _group_rng(base_seed, g)
        vec = [float(dist.sample(rng, 1)[0]) for dist in model.dims]
        for a in arc_ids:
            costs[a] = vec
    edges = [(i, s, d, costs[i]) for i, (s, d) in enumerate(arcs)]
    return MultiCostGraph(n, k, edges)


def max_single_metric_costs(graph: MultiCostGraph, pair_set: PairSet) -> np.ndarray:
    """M_i = max over pairs of the shortest-path distance under metric W_i."""
    out = np.empty(graph.k, dtype=np.float64)
    for i in range(graph.k):
        unit = np.zeros(graph.k)
        unit[i] = 1.0
        best = 0.0
        for row, source in enumerate(pair_set.sources):
            tree = spf(graph, int(source), unit)
            dists = tree.dist_composite[pair_set.mask[row]]
            if np.any(np.isinf(dists)):
                dest = int(np.flatnonzero(pair_set.mask[row] & np.isinf(tree.dist_composite))[0])
                raise GraphError(f"pair ({int(source)},{dest}) is disconnected")
            if dists.size:
                best = max(best, float(dists.max()))
        out[i] = best
    return out


def derive_constraints(graph: MultiCostGraph, pair_set: PairSet, alpha: float) -> Constraints:
    """C_i = alpha * (largest single-metric shortest-path cost over the pairs)."""
    if not (alpha > 0.0):
        raise GraphError(f"alpha must be positive, got {alpha}")
    m = max_single_metric_costs(graph, pair_set)
    if np.any(m <= 0.0):
        raise GraphError("degenerate pair set: zero single-metric diameter")
    return Constraints(tuple(float(alpha * x) for x in m), strict=True)
