"""Jitted shortest-path-tree kernel over CSR multigraph arrays.

The tie-break contract: nodes settle in (distance, node_id) order; among
relaxations landing within ``tie_tol`` of the current best distance the arc
with the smaller global edge id wins the parent slot. Parents are frozen at
settlement, so the parent pointers always form a tree even with zero-weight
arcs.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _heap_push(heap_d, heap_v, size, d, v):
    i = size
    heap_d[i] = d
    heap_v[i] = v
    while i > 0:
        parent = (i - 1) >> 1
        if (heap_d[parent] > heap_d[i]) or (
            heap_d[parent] == heap_d[i] and heap_v[parent] > heap_v[i]
        ):
            heap_d[parent], heap_d[i] = heap_d[i], heap_d[parent]
            heap_v[parent], heap_v[i] = heap_v[i], heap_v[parent]
            i = parent
        else:
            break
    return size + 1


@njit(cache=True, nogil=True)
def _heap_pop(heap_d, heap_v, size):
    d = heap_d[0]
    v = heap_v[0]
    size -= 1
    heap_d[0] = heap_d[size]
    heap_v[0] = heap_v[size]
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        smallest = i
        if left < size and (
            (heap_d[left] < heap_d[smallest])
            or (heap_d[left] == heap_d[smallest] and heap_v[left] < heap_v[smallest])
        ):
            smallest = left
        if right < size and (
            (heap_d[right] < heap_d[smallest])
            or (heap_d[right] == heap_d[smallest] and heap_v[right] < heap_v[smallest])
        ):
            smallest = right
        if smallest == i:
            break
        heap_d[smallest], heap_d[i] = heap_d[i], heap_d[smallest]
        heap_v[smallest], heap_v[i] = heap_v[i], heap_v[smallest]
        i = smallest
    return d, v, size


@njit(cache=True, nogil=True)
def dijkstra_tree(n, indptr, arc_src, arc_dst, arc_eid, arc_w, arc_costs, source, tie_tol):
    """One-to-all shortest paths under scalar arc weights ``arc_w``.

    Returns (dist, distvec, parent_arc, order, settled_count) where
    ``parent_arc`` holds CSR arc indices (-1 at the source / unreachable),
    ``distvec`` accumulates the full cost vector along the chosen tree path
    and ``order[:settled_count]`` is the settlement order.
    """
    k = arc_costs.shape[1]
    dist = np.full(n, np.inf)
    parent_arc = np.full(n, -1, np.int64)
    settled = np.zeros(n, np.uint8)
    order = np.empty(n, np.int64)

    cap = indptr[n] + 8
    heap_d = np.empty(cap, np.float64)
    heap_v = np.empty(cap, np.int64)
    size = 0

    dist[source] = 0.0
    size = _heap_push(heap_d, heap_v, size, 0.0, source)
    count = 0

    while size > 0:
        d, u, size = _heap_pop(heap_d, heap_v, size)
        if settled[u]:
            continue
        settled[u] = 1
        order[count] = u
        count += 1
        for a in range(indptr[u], indptr[u + 1]):
            v = arc_dst[a]
            if settled[v]:
                continue
            nd = d + arc_w[a]
            if nd < dist[v] - tie_tol:
                dist[v] = nd
                parent_arc[v] = a
                size = _heap_push(heap_d, heap_v, size, nd, v)
            elif nd <= dist[v] + tie_tol:
                p = parent_arc[v]
                if p >= 0 and arc_eid[a] < arc_eid[p]:
                    parent_arc[v] = a

    distvec = np.zeros((n, k))
    for i in range(count):
        v = order[i]
        a = parent_arc[v]
        if a >= 0:
            u = arc_src[a]
            for j in range(k):
                distvec[v, j] = distvec[u, j] + arc_costs[a, j]
    for v in range(n):
        if not settled[v]:
            for j in range(k):
                distvec[v, j] = np.inf

    return dist, distvec, parent_arc, order, count
