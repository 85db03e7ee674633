"""Deterministic generators for every graph family the lab studies.

Families with random costs (grid, dual-home, mouth-like, transmit scheme)
are emitted as a :class:`Topology`: arcs plus the groups of arcs that must
share one sampled cost vector. Undirected links become twin arcs with
consecutive ids. Families with fixed costs (three-path, adversarial star)
are emitted directly as :class:`MultiCostGraph`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import GraphError, MultiCostGraph


@dataclass
class Topology:
    """Cost-free structure: directed arcs in edge-id order plus cost sharing."""

    name: str
    node_count: int
    arcs: list[tuple[int, int]]
    cost_groups: list[list[int]]
    border: list[int] | None = None

    def with_zero_costs(self, k: int) -> MultiCostGraph:
        edges = [(i, s, d, [0.0] * k) for i, (s, d) in enumerate(self.arcs)]
        return MultiCostGraph(self.node_count, k, edges)

    def is_connected(self) -> bool:
        return undirected_connected(self.node_count, self.arcs)


def undirected_connected(n: int, arcs: list[tuple[int, int]]) -> bool:
    adj = [[] for _ in range(n)]
    for s, d in arcs:
        adj[s].append(d)
        adj[d].append(s)
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return all(seen)


def _link(arcs, groups, u, v):
    """Append the twin arcs of one undirected link as a shared-cost group."""
    i = len(arcs)
    arcs.append((u, v))
    arcs.append((v, u))
    groups.append([i, i + 1])


def gen_grid(rows: int, cols: int) -> Topology:
    """4-neighbor lattice; border holds the perimeter nodes in id order."""
    if rows < 2 or cols < 2:
        raise GraphError("grid needs rows, cols >= 2")
    arcs: list[tuple[int, int]] = []
    groups: list[list[int]] = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                _link(arcs, groups, u, u + 1)
            if r + 1 < rows:
                _link(arcs, groups, u, u + cols)
    border = [
        r * cols + c
        for r in range(rows)
        for c in range(cols)
        if r in (0, rows - 1) or c in (0, cols - 1)
    ]
    return Topology(f"grid-{rows}x{cols}", rows * cols, arcs, groups, border)


def _core(arcs, groups, pairs: int):
    """Dual-home/mouth-like core: pair links plus the two hub cliques."""
    for i in range(pairs):
        _link(arcs, groups, i, pairs + i)
    for i in range(pairs):
        for j in range(i + 1, pairs):
            _link(arcs, groups, i, j)
    for i in range(pairs):
        for j in range(i + 1, pairs):
            _link(arcs, groups, pairs + i, pairs + j)


def _split_evenly(count: int, buckets: int) -> list[int]:
    base, rem = divmod(count, buckets)
    return [base + (1 if i < rem else 0) for i in range(buckets)]


def gen_dual_home(total_nodes: int, core_pairs: int) -> Topology:
    """Core of hub pairs (a_i, b_i) with cliques; each leaf hangs off both hubs."""
    if core_pairs < 1 or total_nodes < 2 * core_pairs:
        raise GraphError("dual-home needs total_nodes >= 2*core_pairs >= 2")
    arcs: list[tuple[int, int]] = []
    groups: list[list[int]] = []
    _core(arcs, groups, core_pairs)
    leaf = 2 * core_pairs
    for pair_idx, n_leaves in enumerate(_split_evenly(total_nodes - 2 * core_pairs, core_pairs)):
        for _ in range(n_leaves):
            _link(arcs, groups, leaf, pair_idx)
            _link(arcs, groups, leaf, core_pairs + pair_idx)
            leaf += 1
    return Topology(f"dual-home-{total_nodes}x{core_pairs}", total_nodes, arcs, groups)


def gen_mouth_like(total_nodes: int, core_pairs: int, both_hubs: bool = False) -> Topology:
    """Like dual-home but leaves attach in pairs.

    Default reading: first leaf of a pair joins a_i, the second joins b_i,
    and the two leaves are linked. ``both_hubs`` switches to the variant
    where each leaf of the pair joins both hubs and the leaf-leaf link is
    dropped. Leaf pairs left over after even distribution go to the lowest
    core-pair indices.
    """
    if core_pairs < 1 or total_nodes < 2 * core_pairs:
        raise GraphError("mouth-like needs total_nodes >= 2*core_pairs >= 2")
    n_leaves = total_nodes - 2 * core_pairs
    if n_leaves % 2 != 0:
        raise GraphError("mouth-like needs an even number of non-core nodes")
    arcs: list[tuple[int, int]] = []
    groups: list[list[int]] = []
    _core(arcs, groups, core_pairs)
    leaf = 2 * core_pairs
    for pair_idx, n_pairs in enumerate(_split_evenly(n_leaves // 2, core_pairs)):
        for _ in range(n_pairs):
            u, v = leaf, leaf + 1
            if both_hubs:
                _link(arcs, groups, u, pair_idx)
                _link(arcs, groups, u, core_pairs + pair_idx)
                _link(arcs, groups, v, pair_idx)
                _link(arcs, groups, v, core_pairs + pair_idx)
            else:
                _link(arcs, groups, u, pair_idx)
                _link(arcs, groups, v, core_pairs + pair_idx)
                _link(arcs, groups, u, v)
            leaf += 2
    return Topology(f"mouth-like-{total_nodes}x{core_pairs}", total_nodes, arcs, groups)


def gen_three_path() -> MultiCostGraph:
    """Two nodes, three parallel s->t edges: (0.9,0.9), (0.1,1.1), (1.1,0.1).

    The middle edge is the only one feasible under constraints (1,1), yet it
    is never composite-shortest for any blend of the two costs.
    """
    edges = [
        (0, 0, 1, [0.9, 0.9]),
        (1, 0, 1, [0.1, 1.1]),
        (2, 0, 1, [1.1, 0.1]),
    ]
    return MultiCostGraph(2, 2, edges)


def gen_transmit_scheme(n_paths: int) -> Topology:
    """n parallel s->t arcs awaiting independent random costs."""
    if n_paths < 1:
        raise GraphError("transmit scheme needs at least one path")
    arcs = [(0, 1)] * n_paths
    groups = [[i] for i in range(n_paths)]
    return Topology(f"transmit-{n_paths}", 2, arcs, groups)


def gen_adversarial(k: int, n: int, duplicate_vertices: bool = False) -> MultiCostGraph:
    """Star multigraph around hub c=0 bounding table-driven discovery by ~1/k.

    Leaf v_i (1-based) gets k forward edges c->v_i with costs (j, k-1-j) and
    one back edge v_i->c with cost (g, k-1-g) for its group g = (i-1)//n.
    ``duplicate_vertices`` splits each leaf into k copies, one per forward
    edge, for consumers that cannot handle parallel edges.
    """
    if k < 2 or n < 1:
        raise GraphError("adversarial construction needs k >= 2, n >= 1")
    edges = []
    if duplicate_vertices:
        node = 1
        for i in range(1, k * n + 1):
            g = (i - 1) // n
            for j in range(k):
                edges.append((len(edges), 0, node, [float(j), float(k - 1 - j)]))
                edges.append((len(edges), node, 0, [float(g), float(k - 1 - g)]))
                node += 1
        return MultiCostGraph(node, 2, edges)
    for i in range(1, k * n + 1):
        g = (i - 1) // n
        for j in range(k):
            edges.append((len(edges), 0, i, [float(j), float(k - 1 - j)]))
        edges.append((len(edges), i, 0, [float(g), float(k - 1 - g)]))
    return MultiCostGraph(k * n + 1, 2, edges)
