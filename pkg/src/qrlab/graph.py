"""Multigraph with k-dimensional edge costs and composite-metric shortest paths.

Edges are directed and parallel edges are allowed. Edge ids are unique and
contiguous from 0; node ids are dense integers ``0..n-1``. A graph is
immutable after construction, so shortest-path computations for different
sources may safely share it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._kernels import dijkstra_tree

TIE_TOL = 1e-9
MIX_SUM_TOL = 1e-12

UNREACHABLE = float("inf")


class GraphError(ValueError):
    """Invalid graph, constraint, or mix input."""


@dataclass(frozen=True)
class Constraints:
    """Per-dimension path-cost bounds; feasibility is strict by default."""

    bounds: tuple[float, ...]
    strict: bool = True

    def __post_init__(self):
        if len(self.bounds) == 0:
            raise GraphError("constraints need at least one bound")
        for c in self.bounds:
            if not (c > 0.0) or not np.isfinite(c):
                raise GraphError(f"constraint bounds must be positive, got {self.bounds}")

    @property
    def k(self) -> int:
        return len(self.bounds)

    def satisfies(self, costs: Sequence[float]) -> bool:
        if len(costs) != self.k:
            raise GraphError("cost vector dimension mismatch")
        if self.strict:
            return all(c < b for c, b in zip(costs, self.bounds))
        return all(c <= b for c, b in zip(costs, self.bounds))


class MixVector:
    """Point in the (k-1)-simplex used to blend cost dimensions."""

    __slots__ = ("p",)

    def __init__(self, p: Sequence[float]):
        arr = tuple(float(x) for x in p)
        if any(x < 0.0 for x in arr):
            raise GraphError(f"mix components must be non-negative, got {arr}")
        if abs(sum(arr) - 1.0) > MIX_SUM_TOL:
            raise GraphError(f"mix must sum to 1, got {arr}")
        self.p = arr

    @classmethod
    def scalar(cls, p: float) -> "MixVector":
        """Two-dimensional mix (p, 1-p)."""
        return cls((p, 1.0 - p))

    @property
    def k(self) -> int:
        return len(self.p)

    def __iter__(self):
        return iter(self.p)

    def __len__(self):
        return len(self.p)

    def __getitem__(self, i):
        return self.p[i]

    def __repr__(self):
        return f"MixVector{self.p}"


def as_weighting(mix, k: int) -> np.ndarray:
    """Coerce a mix-like input to a non-negative weight vector of length k.

    Scalars are treated as (p, 1-p) for k=2. Unlike :class:`MixVector` the
    result is not required to sum to one; the tree shape is scale invariant,
    so raw weightings such as (1, 1) are accepted where only the tree is
    consumed.
    """
    if isinstance(mix, MixVector):
        w = np.asarray(mix.p, dtype=np.float64)
    elif np.isscalar(mix):
        if k != 2:
            raise GraphError("scalar mix is only defined for k=2")
        p = float(mix)
        w = np.array([p, 1.0 - p])
    else:
        w = np.asarray(mix, dtype=np.float64)
    if w.shape != (k,):
        raise GraphError(f"mix has dimension {w.shape}, graph has k={k}")
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise GraphError(f"mix components must be finite and non-negative, got {w}")
    if not np.any(w > 0.0):
        raise GraphError("mix must have at least one positive component")
    return w


class MultiCostGraph:
    """Directed multigraph whose edges carry k-dimensional non-negative costs.

    Construction validates the invariants (dense ids, non-negative finite
    costs, uniform dimension). The adjacency index is built lazily and the
    instance must not be mutated afterwards.
    """

    def __init__(self, node_count: int, k: int, edges: Iterable[tuple[int, int, int, Sequence[float]]]):
        if node_count < 1:
            raise GraphError("graph needs at least one node")
        if k < 1:
            raise GraphError("cost dimension k must be >= 1")
        edge_list = sorted(edges, key=lambda e: e[0])
        m = len(edge_list)
        self.n = int(node_count)
        self.k = int(k)
        self.m = m
        self.edge_src = np.empty(m, dtype=np.int64)
        self.edge_dst = np.empty(m, dtype=np.int64)
        self.edge_costs = np.empty((m, k), dtype=np.float64)
        for i, (eid, src, dst, costs) in enumerate(edge_list):
            if eid != i:
                raise GraphError(f"edge ids must be unique and contiguous from 0, got {eid} at {i}")
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise GraphError(f"edge {eid} endpoints ({src},{dst}) out of range")
            c = np.asarray(costs, dtype=np.float64)
            if c.shape != (k,):
                raise GraphError(f"edge {eid} has {c.shape} costs, expected {k}")
            if np.any(c < 0.0) or not np.all(np.isfinite(c)):
                raise GraphError(f"edge {eid} costs must be finite and non-negative: {costs}")
            self.edge_src[i] = src
            self.edge_dst[i] = dst
            self.edge_costs[i] = c
        self._csr = None

    # -- adjacency ---------------------------------------------------------

    def _csr_arrays(self):
        """CSR arc arrays sorted by (src, edge_id); arc order is the tie-break order."""
        if self._csr is None:
            order = np.lexsort((np.arange(self.m), self.edge_src))
            arc_src = np.ascontiguousarray(self.edge_src[order])
            arc_dst = np.ascontiguousarray(self.edge_dst[order])
            arc_eid = np.ascontiguousarray(order.astype(np.int64))
            arc_costs = np.ascontiguousarray(self.edge_costs[order])
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, arc_src + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._csr = (indptr, arc_src, arc_dst, arc_eid, arc_costs)
        return self._csr

    def out_edges(self, node: int) -> list[int]:
        indptr, _, _, arc_eid, _ = self._csr_arrays()
        return [int(e) for e in arc_eid[indptr[node]:indptr[node + 1]]]

    def edge(self, eid: int) -> tuple[int, int, np.ndarray]:
        return int(self.edge_src[eid]), int(self.edge_dst[eid]), self.edge_costs[eid]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        edges = [
            {"id": i, "src": int(self.edge_src[i]), "dst": int(self.edge_dst[i]),
             "costs": [float(c) for c in self.edge_costs[i]]}
            for i in range(self.m)
        ]
        return json.dumps({"k": self.k, "nodes": self.n, "edges": edges})

    @classmethod
    def from_json(cls, text: str) -> "MultiCostGraph":
        data = json.loads(text)
        try:
            k = int(data["k"])
            n = int(data["nodes"])
            edges = [(int(e["id"]), int(e["src"]), int(e["dst"]), e["costs"]) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        ids = [e[0] for e in edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge ids in graph JSON")
        return cls(n, k, edges)

    def __repr__(self):
        return f"MultiCostGraph(n={self.n}, m={self.m}, k={self.k})"


@dataclass
class SpfTree:
    """One-to-all shortest-path tree under a composite weighting.

    ``dist_composite[v]`` is the weighting applied to ``dist_vector[v]``, the
    accumulated k-dimensional cost of the chosen tree path; unreachable nodes
    carry infinity and parent -1.
    """

    source: int
    mix: np.ndarray
    dist_composite: np.ndarray
    dist_vector: np.ndarray
    parent_arc: np.ndarray
    _arc_eid: np.ndarray = field(repr=False)
    _arc_src: np.ndarray = field(repr=False)

    def reachable(self, v: int) -> bool:
        return np.isfinite(self.dist_composite[v])

    def parent_edge(self, v: int) -> int | None:
        a = self.parent_arc[v]
        return None if a < 0 else int(self._arc_eid[a])

    def parent_edge_map(self) -> dict[int, int | None]:
        return {v: self.parent_edge(v) for v in range(len(self.parent_arc))}

    def path_edges(self, v: int) -> list[int]:
        """Edge ids along the tree path source -> v (empty for the source)."""
        if not self.reachable(v):
            raise GraphError(f"node {v} unreachable from {self.source}")
        out = []
        while True:
            a = self.parent_arc[v]
            if a < 0:
                break
            out.append(int(self._arc_eid[a]))
            v = int(self._arc_src[a])
        out.reverse()
        return out


def composite_weight(costs: Sequence[float], mix) -> float:
    """Blend a cost vector into a scalar: sum of mix[i] * costs[i]."""
    c = np.asarray(costs, dtype=np.float64)
    w = as_weighting(mix, c.shape[0])
    return float(c @ w)


def normalize(graph: MultiCostGraph, constraints: Constraints) -> MultiCostGraph:
    """Divide every edge cost by the matching constraint bound.

    On the result the feasibility condition reads "every path coordinate
    sum < 1". The input graph is left untouched.
    """
    if constraints.k != graph.k:
        raise GraphError(f"constraints have k={constraints.k}, graph has k={graph.k}")
    bounds = np.asarray(constraints.bounds, dtype=np.float64)
    scaled = graph.edge_costs / bounds
    edges = [(i, int(graph.edge_src[i]), int(graph.edge_dst[i]), scaled[i]) for i in range(graph.m)]
    return MultiCostGraph(graph.n, graph.k, edges)


def spf(graph: MultiCostGraph, source: int, mix) -> SpfTree:
    """Deterministic one-to-all shortest-path tree under the composite weight.

    Ties (within 1e-9) are broken toward the smaller final edge id; equal
    heap keys settle the smaller node id first. Unreachable nodes are marked,
    not an error.
    """
    if not (0 <= source < graph.n):
        raise GraphError(f"source {source} out of range for {graph.n} nodes")
    w = as_weighting(mix, graph.k)
    indptr, arc_src, arc_dst, arc_eid, arc_costs = graph._csr_arrays()
    arc_w = arc_costs @ w
    dist, distvec, parent_arc, order, settled = dijkstra_tree(
        graph.n, indptr, arc_src, arc_dst, arc_eid, arc_w, arc_costs, source, TIE_TOL
    )
    # The authoritative composite distance is the weighting of the chosen
    # path's cost vector (identical to the relaxation value up to tie slack).
    # Restricting the product to settled nodes keeps the infinite rows of
    # unreachable nodes from turning into NaN under zero mix components.
    if settled < graph.n:
        dist_composite = np.full(graph.n, np.inf)
        reached = order[:settled]
        dist_composite[reached] = distvec[reached] @ w
    else:
        dist_composite = distvec @ w
    return SpfTree(
        source=source,
        mix=w,
        dist_composite=dist_composite,
        dist_vector=distvec,
        parent_arc=parent_arc,
        _arc_eid=arc_eid,
        _arc_src=arc_src,
    )


def shortest_cost_vector(graph: MultiCostGraph, source: int, dest: int, mix):
    """Cost vector of the tree path source -> dest, or UNREACHABLE."""
    tree = spf(graph, source, mix)
    if not tree.reachable(dest):
        return UNREACHABLE
    return tree.dist_vector[dest].copy()
