"""Routing-table forwarding semantics and the adversarial-bound machinery.

Tables map destination -> outgoing edge id per node; forwarding follows them
blindly and reports Delivered / Loop / DeadEnd. On the star construction the
hub's table choices are enumerable, which makes the discovery-rate bounds
exhaustively checkable. The randomized next-hop rule is simulated over the
composite shortest-path structure rather than explicit path lists: along a
min-composite path the coordinate sums are tied to the composite total, so a
path is characterized by its attainable first-coordinate total.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .costmodels import CostModel
from .graph import Constraints, GraphError, MultiCostGraph, as_weighting, spf
from .topologies import Topology, gen_adversarial

_TOL = 1e-9

DELIVERED = "delivered"
LOOP = "loop"
DEAD_END = "dead-end"

Tables = dict[int, dict[int, int]]


@dataclass
class ForwardResult:
    outcome: str
    cost: np.ndarray | None = None
    hops: list[int] | None = None


def validate_tables(graph: MultiCostGraph, tables: Tables) -> None:
    for node, entries in tables.items():
        for dest, eid in entries.items():
            if dest == node:
                raise GraphError(f"node {node} has a table entry for itself")
            if not (0 <= eid < graph.m) or int(graph.edge_src[eid]) != node:
                raise GraphError(f"table entry ({node} -> {dest}) uses edge {eid} not leaving {node}")


def forward(graph: MultiCostGraph, tables: Tables, u: int, v: int) -> ForwardResult:
    """Follow next-edge entries from u toward v.

    A node revisit is a Loop, a missing entry a DeadEnd; u == v is delivered
    with the empty path.
    """
    cost = np.zeros(graph.k)
    if u == v:
        return ForwardResult(DELIVERED, cost, [])
    hops: list[int] = []
    visited = {u}
    cur = u
    while True:
        eid = tables.get(cur, {}).get(v)
        if eid is None:
            return ForwardResult(DEAD_END, None, hops)
        src, dst, edge_cost = graph.edge(eid)
        if src != cur:
            raise GraphError(f"table at {cur} points along edge {eid} leaving {src}")
        cost += edge_cost
        hops.append(eid)
        cur = dst
        if cur == v:
            return ForwardResult(DELIVERED, cost, hops)
        if cur in visited or len(hops) > graph.n:
            return ForwardResult(LOOP, None, hops)
        visited.add(cur)


def count_satisfied(
    graph: MultiCostGraph,
    tables: Tables,
    constraints: Constraints | Mapping[tuple[int, int], Constraints],
) -> int:
    """Ordered pairs (self-pairs included) whose forwarded path meets the bound."""
    count = 0
    for u in range(graph.n):
        for v in range(graph.n):
            bounds = constraints[(u, v)] if isinstance(constraints, Mapping) else constraints
            if u == v:
                count += 1
                continue
            res = forward(graph, tables, u, v)
            if res.outcome == DELIVERED and bounds.satisfies(res.cost):
                count += 1
    return count


# -- adversarial star constructions ---------------------------------------


def adversarial_bound(k: int, n: int) -> int:
    """Upper bound on satisfiable ordered pairs out of (kn+1)^2."""
    return (k * n + 1) ** 2 - k * n * ((k - 1) * n - 1)


def _hub_edge(k: int, leaf: int, choice: int) -> int:
    return (leaf - 1) * (k + 1) + choice


def _back_edge(k: int, leaf: int) -> int:
    return (leaf - 1) * (k + 1) + k


def build_star_tables(k: int, n: int, hub_choices: Sequence[int]) -> Tables:
    """Tables for the star graph: hub choices index the parallel forward edges.

    Leaves have a single outgoing edge, so their entries are forced.
    """
    if len(hub_choices) != k * n:
        raise GraphError(f"need one hub choice per leaf ({k * n})")
    tables: Tables = {0: {}}
    for leaf in range(1, k * n + 1):
        choice = hub_choices[leaf - 1]
        if not (0 <= choice < k):
            raise GraphError(f"hub choice {choice} out of range for k={k}")
        tables[0][leaf] = _hub_edge(k, leaf, choice)
        back = _back_edge(k, leaf)
        tables[leaf] = {dest: back for dest in range(k * n + 1) if dest != leaf}
    return tables


def best_structured_choices(k: int, n: int) -> list[int]:
    """Hub choices meeting the bound: never pick the edge whose satisfied
    source group is the destination's own group."""
    choices = []
    for leaf in range(1, k * n + 1):
        group = (leaf - 1) // n
        avoid = k - 1 - group
        choices.append(0 if avoid != 0 else 1)
    return choices


def star_constraints(k: int) -> Constraints:
    return Constraints((float(k), float(k)), strict=True)


def exhaustive_max_satisfied(k: int, n: int) -> tuple[int, int]:
    """(max over all hub tables, bound) by full enumeration of k^(kn) tables."""
    graph = gen_adversarial(k, n)
    bound = adversarial_bound(k, n)
    constraints = star_constraints(k)
    best = 0
    for choices in itertools.product(range(k), repeat=k * n):
        got = count_satisfied(graph, build_star_tables(k, n, choices), constraints)
        if got > bound:
            raise RuntimeError(f"bound {bound} exceeded by table {choices}: {got}")
        best = max(best, got)
    return best, bound


def sampled_max_satisfied(k: int, n: int, samples: int, seed: int) -> tuple[int, int]:
    """(max over structured + sampled hub tables, bound); raises past the bound."""
    graph = gen_adversarial(k, n)
    bound = adversarial_bound(k, n)
    constraints = star_constraints(k)
    rng = np.random.default_rng(seed)
    best = count_satisfied(graph, build_star_tables(k, n, best_structured_choices(k, n)), constraints)
    if best > bound:
        raise RuntimeError(f"bound {bound} exceeded by structured table: {best}")
    for _ in range(samples):
        choices = rng.integers(0, k, size=k * n).tolist()
        got = count_satisfied(graph, build_star_tables(k, n, choices), constraints)
        if got > bound:
            raise RuntimeError(f"bound {bound} exceeded by table {choices}: {got}")
        best = max(best, got)
    return best, bound


# -- slack theorems ---------------------------------------------------------


@dataclass(frozen=True)
class FeasiblePair:
    """Pair with a witness path of per-coordinate cost at most slack."""

    u: int
    v: int
    slack: float
    witness: tuple[int, ...]


def certify_pair(graph: MultiCostGraph, pair: FeasiblePair) -> None:
    cur = pair.u
    cost = np.zeros(graph.k)
    for eid in pair.witness:
        src, dst, edge_cost = graph.edge(eid)
        if src != cur:
            raise GraphError(f"witness for ({pair.u},{pair.v}) breaks at edge {eid}")
        cost += edge_cost
        cur = dst
    if cur != pair.v:
        raise GraphError(f"witness for ({pair.u},{pair.v}) ends at {cur}")
    if np.any(cost > pair.slack + _TOL):
        raise GraphError(f"witness cost {cost} exceeds slack {pair.slack}")


def sum_metric_tables(graph: MultiCostGraph) -> Tables:
    """First-hop tables from per-node trees under the single weight w1+...+wk."""
    weights = np.ones(graph.k)
    tables: Tables = {}
    for x in range(graph.n):
        tree = spf(graph, x, weights)
        entries: dict[int, int] = {}
        first_arc = np.full(graph.n, -1, dtype=np.int64)
        for v in range(graph.n):
            if v == x or not tree.reachable(v):
                continue
            node = v
            arc = tree.parent_arc[node]
            while True:
                up = int(tree._arc_src[arc])
                if up == x:
                    break
                if first_arc[up] >= 0:
                    arc = first_arc[up]
                    break
                arc = tree.parent_arc[up]
            first_arc[v] = arc
            entries[v] = int(tree._arc_eid[arc])
        tables[x] = entries
    return tables


def theorem2_route(graph: MultiCostGraph, pairs: Sequence[FeasiblePair]) -> tuple[Tables, list[dict]]:
    """Deterministic sum-metric routing: every certified pair must arrive
    within twice its slack in each coordinate. A violation is a bug, not a
    result, and raises."""
    for pair in pairs:
        certify_pair(graph, pair)
    tables = sum_metric_tables(graph)
    report = []
    for pair in pairs:
        res = forward(graph, tables, pair.u, pair.v)
        bound = 2.0 * pair.slack
        if res.outcome != DELIVERED or np.any(res.cost > bound + _TOL):
            raise RuntimeError(
                f"sum-metric routing broke the 2x-slack guarantee for ({pair.u},{pair.v}): {res}"
            )
        report.append({"u": pair.u, "v": pair.v, "cost": res.cost.tolist(), "bound": bound})
    return tables, report


class _MinPathStructure:
    """Per-destination composite shortest-path DAG with attainable-w1 sets."""

    def __init__(self, graph: MultiCostGraph, dest: int):
        self.graph = graph
        self.dest = dest
        rev_edges = [
            (i, int(graph.edge_dst[i]), int(graph.edge_src[i]), graph.edge_costs[i])
            for i in range(graph.m)
        ]
        rev = MultiCostGraph(graph.n, graph.k, rev_edges)
        self.dist = spf(rev, dest, np.ones(graph.k)).dist_composite
        # DAG arcs by tail node, in edge-id order
        self.out: list[list[int]] = [[] for _ in range(graph.n)]
        w = graph.edge_costs.sum(axis=1)
        for eid in range(graph.m):
            x, y = int(graph.edge_src[eid]), int(graph.edge_dst[eid])
            if np.isfinite(self.dist[y]) and abs(w[eid] + self.dist[y] - self.dist[x]) <= _TOL:
                self.out[x].append(eid)
        self._w1: dict[int, frozenset[float]] = {dest: frozenset([0.0])}
        self._stack: set[int] = set()

    def w1_set(self, x: int) -> frozenset[float]:
        """Attainable first-coordinate totals over min-composite paths x -> dest."""
        cached = self._w1.get(x)
        if cached is not None:
            return cached
        if x in self._stack:
            raise GraphError("zero-weight composite cycle in min-path structure")
        self._stack.add(x)
        vals: set[float] = set()
        for eid in self.out[x]:
            y = int(self.graph.edge_dst[eid])
            c1 = float(self.graph.edge_costs[eid, 0])
            vals.update(round(c1 + s, 9) for s in self.w1_set(y))
        self._stack.discard(x)
        result = frozenset(vals)
        self._w1[x] = result
        return result


def _pick_arc(structure: _MinPathStructure, x: int, lo: float, hi: float) -> int:
    """Smallest-id DAG arc continuing to a remaining-w1 total in [lo, hi]."""
    for eid in structure.out[x]:
        y = int(structure.graph.edge_dst[eid])
        c1 = float(structure.graph.edge_costs[eid, 0])
        for s in structure.w1_set(y):
            if lo - _TOL <= c1 + s <= hi + _TOL:
                return eid
    raise RuntimeError(f"min-path structure has no continuation in [{lo},{hi}] at {x}")


def _route_randomized(graph, structure, u: int, rng) -> np.ndarray:
    """Walk the randomized next-hop rule from u to the structure's destination."""
    cost = np.zeros(graph.k)
    x = u
    hops = 0
    while x != structure.dest:
        d = float(structure.dist[x])
        w1s = structure.w1_set(x)
        has_interior = any(_TOL < s < d - _TOL for s in w1s)
        has_zero1 = any(s <= _TOL for s in w1s)
        has_zero2 = any(s >= d - _TOL for s in w1s)
        if has_interior:
            eid = _pick_arc(structure, x, _TOL, d - _TOL)
        elif has_zero1 and has_zero2:
            side = rng.integers(0, 2)
            eid = _pick_arc(structure, x, 0.0, _TOL) if side == 0 else _pick_arc(structure, x, d - _TOL, d)
        else:
            eid = structure.out[x][0]
        _, y, edge_cost = graph.edge(eid)
        cost += edge_cost
        x = y
        hops += 1
        if hops > graph.n:
            raise RuntimeError("randomized routing failed to make progress")
    return cost


def theorem3_route(
    graph: MultiCostGraph,
    pairs: Sequence[FeasiblePair],
    trials: int,
    seed: int,
    return_per_trial: bool = False,
):
    """Mean fraction of certified pairs the randomized rule delivers feasibly.

    Requires k=2. Constraints are strict twice-the-slack per coordinate; the
    theorem promises an expected fraction of at least one half.
    """
    if graph.k != 2:
        raise GraphError("randomized next-hop rule is defined for k = 2")
    if not pairs:
        raise GraphError("no pairs to route")
    for pair in pairs:
        certify_pair(graph, pair)
    structures: dict[int, _MinPathStructure] = {}
    for pair in pairs:
        if pair.v not in structures:
            structures[pair.v] = _MinPathStructure(graph, pair.v)
    rng = np.random.default_rng(seed)
    fractions = []
    for _ in range(trials):
        delivered = 0
        for pair in pairs:
            cost = _route_randomized(graph, structures[pair.v], pair.u, rng)
            if np.all(cost < 2.0 * pair.slack):
                delivered += 1
        fractions.append(delivered / len(pairs))
    mean = float(np.mean(fractions))
    if return_per_trial:
        return mean, fractions
    return mean


# -- optimal-p formula and its Monte Carlo oracle ---------------------------


def best_p_formula(a1: float, b1: float, c1: float, c2: float) -> float:
    """Closed-form best blend for uniform costs with small constraints:
    p = (C2-b1) / ((C2-b1) + (C1-a1))."""
    if not (c1 > a1 and c2 > b1):
        raise GraphError("need C1 > a1 and C2 > b1")
    num = c2 - b1
    den = (c2 - b1) + (c1 - a1)
    if den <= 0:
        raise GraphError("non-positive denominator")
    return num / den


@dataclass
class MonteCarloEstimate:
    probability: float
    stderr: float
    samples: int


def _scheme_paths(scheme: Topology | MultiCostGraph) -> int:
    if isinstance(scheme, Topology):
        arcs = scheme.arcs
    else:
        arcs = [(int(scheme.edge_src[i]), int(scheme.edge_dst[i])) for i in range(scheme.m)]
    if any(arc != (0, 1) for arc in arcs) or not arcs:
        raise GraphError("transmit scheme must consist of parallel 0 -> 1 arcs")
    return len(arcs)


def _sample_scheme_costs(model: CostModel, n_paths: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.stack(
        [model.dims[j].sample(rng, (samples, n_paths)) for j in range(model.k)], axis=2
    )


def _pa_indicator(costs: np.ndarray, constraints: Constraints, weights: np.ndarray) -> np.ndarray:
    composite = costs @ weights
    idx = composite.argmin(axis=1)
    chosen = costs[np.arange(costs.shape[0]), idx, :]
    bounds = np.asarray(constraints.bounds)
    if constraints.strict:
        return np.all(chosen < bounds, axis=1)
    return np.all(chosen <= bounds, axis=1)


def montecarlo_PA(
    scheme: Topology | MultiCostGraph,
    model: CostModel,
    constraints: Constraints,
    mix,
    samples: int,
    seed: int,
) -> MonteCarloEstimate:
    """Estimate P(the composite-shortest parallel path satisfies the bounds)."""
    if samples < 100:
        raise GraphError("need at least 100 samples")
    n_paths = _scheme_paths(scheme)
    if model.k != constraints.k:
        raise GraphError("model and constraints dimensions differ")
    w = as_weighting(mix, model.k)
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise GraphError("mix must lie on the simplex")
    costs = _sample_scheme_costs(model, n_paths, samples, seed)
    ok = _pa_indicator(costs, constraints, w)
    p_hat = float(ok.mean())
    stderr = float(np.sqrt(p_hat * (1.0 - p_hat) / samples))
    return MonteCarloEstimate(p_hat, stderr, samples)


def montecarlo_best_p(
    scheme: Topology | MultiCostGraph,
    model: CostModel,
    constraints: Constraints,
    p_values: Sequence[float],
    samples: int,
    seed: int,
) -> tuple[float, list[MonteCarloEstimate]]:
    """Argmax of the Monte Carlo estimate over a p grid (k=2).

    One common cost draw serves the whole grid, so the argmax reflects the
    shape of the curve rather than per-point sampling noise.
    """
    if model.k != 2:
        raise GraphError("p grid scan is defined for k = 2")
    if samples < 100:
        raise GraphError("need at least 100 samples")
    n_paths = _scheme_paths(scheme)
    costs = _sample_scheme_costs(model, n_paths, samples, seed)
    estimates = []
    best_p, best_val = None, -1.0
    for p in p_values:
        w = as_weighting(float(p), 2)
        ok = _pa_indicator(costs, constraints, w)
        p_hat = float(ok.mean())
        estimates.append(
            MonteCarloEstimate(p_hat, float(np.sqrt(p_hat * (1 - p_hat) / samples)), samples)
        )
        if p_hat > best_val:
            best_p, best_val = float(p), p_hat
    return best_p, estimates
