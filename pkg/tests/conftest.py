"""Shared test helpers: seeded random multigraphs and brute-force oracles.

The oracles enumerate simple paths directly off the edge list, independent
of the shortest-path implementation under test.
"""

from __future__ import annotations

import numpy as np

from qrlab import MultiCostGraph


def random_multigraph(
    rng: np.random.Generator,
    max_nodes: int = 10,
    min_nodes: int = 2,
    k: int = 2,
    arc_factor: float = 2.2,
    low: float = 0.05,
    high: float = 1.0,
    parallel: bool = True,
) -> MultiCostGraph:
    """Random directed multigraph with uniform positive costs.

    A random spanning arborescence from node 0 keeps everything reachable
    from 0; extra arcs (possibly parallel) are sprinkled on top.
    """
    n = int(rng.integers(min_nodes, max_nodes + 1))
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((len(edges), u, v, rng.uniform(low, high, k)))
    extra = int(arc_factor * n) - len(edges)
    for _ in range(max(0, extra)):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            v = (v + 1) % n
        if not parallel and any(e[1] == u and e[2] == v for e in edges):
            continue
        edges.append((len(edges), u, v, rng.uniform(low, high, k)))
    return MultiCostGraph(n, k, edges)


def enumerate_simple_paths(graph: MultiCostGraph, u: int, v: int, prune_bounds=None):
    """Yield (edge_ids, cost_vector) for every simple path u -> v.

    ``prune_bounds`` cuts branches whose accumulated cost already reaches
    the bound in some coordinate (costs are non-negative, so extending the
    path cannot help).
    """
    out_by_node = [[] for _ in range(graph.n)]
    for eid in range(graph.m):
        out_by_node[int(graph.edge_src[eid])].append(eid)
    bounds = None if prune_bounds is None else np.asarray(prune_bounds, dtype=float)
    path: list[int] = []
    on_path = [False] * graph.n
    on_path[u] = True
    results = []

    def dfs(x, cost):
        if x == v:
            results.append((tuple(path), cost))
            return
        for eid in out_by_node[x]:
            dst = int(graph.edge_dst[eid])
            if on_path[dst]:
                continue
            nxt = cost + graph.edge_costs[eid]
            if bounds is not None and np.any(nxt >= bounds):
                continue
            path.append(eid)
            on_path[dst] = True
            dfs(dst, nxt)
            on_path[dst] = False
            path.pop()

    if u == v:
        return [((), np.zeros(graph.k))]
    dfs(u, np.zeros(graph.k))
    return results


def feasible_path_exists(graph: MultiCostGraph, u: int, v: int, bounds) -> bool:
    """Is there a simple path with every coordinate strictly below bounds?"""
    if u == v:
        return True
    return bool(enumerate_simple_paths(graph, u, v, prune_bounds=bounds))


def min_composite_paths(graph: MultiCostGraph, u: int, v: int, weights, rel_tol: float = 1e-12):
    """(min composite value, paths attaining it) by full enumeration."""
    w = np.asarray(weights, dtype=float)
    paths = enumerate_simple_paths(graph, u, v)
    if not paths:
        return float("inf"), []
    values = [float(c @ w) for _, c in paths]
    best = min(values)
    tol = max(abs(best), 1.0) * rel_tol
    argmin = [(p, c) for (p, c), val in zip(paths, values) if val <= best + tol]
    return best, argmin
