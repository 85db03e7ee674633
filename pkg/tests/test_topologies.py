import numpy as np
import pytest

from qrlab import (
    GraphError,
    PairSet,
    gen_adversarial,
    gen_dual_home,
    gen_grid,
    gen_mouth_like,
    gen_three_path,
    gen_transmit_scheme,
)
from qrlab.harness import pair_set_for


def out_degree(topo, node):
    return sum(1 for s, _ in topo.arcs if s == node)


def test_grid_counts_match_table():
    topo = gen_grid(15, 15)
    assert topo.node_count == 225
    assert pair_set_for(topo, "a2a").n_pairs == 50625
    assert pair_set_for(topo, "b2b").n_pairs == 3136
    assert len(topo.border) == 56


def test_grid_2x2():
    topo = gen_grid(2, 2)
    assert topo.node_count == 4
    assert len(topo.cost_groups) == 4
    assert len(topo.arcs) == 8
    assert topo.is_connected()
    with pytest.raises(GraphError):
        gen_grid(1, 5)


def test_grid_45_counts():
    topo = gen_grid(45, 45)
    assert pair_set_for(topo, "a2a").n_pairs == 4100625
    assert pair_set_for(topo, "b2b").n_pairs == 30976


def test_generators_are_pure():
    a = gen_grid(5, 7)
    b = gen_grid(5, 7)
    assert a.arcs == b.arcs and a.cost_groups == b.cost_groups
    assert a.with_zero_costs(2).to_json() == b.with_zero_costs(2).to_json()


def test_dual_home_paper_scale():
    topo = gen_dual_home(1000, 10)
    assert topo.node_count == 1000
    assert pair_set_for(topo, "a2a").n_pairs == 10 ** 6
    # 98 leaves per pair; a_0 degree = 9 clique + 1 pair edge + 98 leaves
    assert out_degree(topo, 0) == 9 + 1 + 98
    assert topo.is_connected()


def test_dual_home_core_only():
    topo = gen_dual_home(20, 10)
    assert topo.node_count == 20
    assert out_degree(topo, 0) == 10  # 9 clique + 1 pair edge, no leaves
    assert topo.is_connected()


def test_dual_home_uneven_split_deterministic():
    topo = gen_dual_home(25, 10)  # 5 leaves over 10 pairs -> pairs 0..4
    for pair_idx in range(5):
        assert out_degree(topo, pair_idx) == 9 + 1 + 1
    for pair_idx in range(5, 10):
        assert out_degree(topo, pair_idx) == 9 + 1


def test_mouth_like_leaf_pairs():
    topo = gen_mouth_like(1000, 10)
    assert topo.node_count == 1000
    # 49 leaf pairs per core pair: a_0 sees 9 + 1 + 49
    assert out_degree(topo, 0) == 9 + 1 + 49
    assert topo.is_connected()


def test_mouth_like_remainder_to_lowest_pairs():
    topo = gen_mouth_like(24, 10)  # 4 leaves -> 2 leaf pairs on cores 0 and 1
    assert out_degree(topo, 0) == 9 + 1 + 1
    assert out_degree(topo, 1) == 9 + 1 + 1
    assert out_degree(topo, 2) == 9 + 1
    assert topo.is_connected()
    with pytest.raises(GraphError):
        gen_mouth_like(23, 10)  # odd leaf count


def test_mouth_like_both_hubs_variant():
    narrow = gen_mouth_like(24, 10)
    wide = gen_mouth_like(24, 10, both_hubs=True)
    # variant swaps the leaf-leaf link for a second pair of hub links
    assert len(wide.cost_groups) == len(narrow.cost_groups) + 2
    assert wide.is_connected()


def test_mouth_like_connected_sweep():
    for total, pairs in [(8, 2), (14, 3), (30, 5), (102, 10)]:
        assert gen_mouth_like(total, pairs).is_connected()
        assert gen_dual_home(total, pairs).is_connected()


def test_three_path_shape():
    g = gen_three_path()
    assert g.n == 2 and g.m == 3
    assert all(int(g.edge_src[i]) == 0 and int(g.edge_dst[i]) == 1 for i in range(3))
    assert np.allclose(g.edge_costs, [[0.9, 0.9], [0.1, 1.1], [1.1, 0.1]])


def test_transmit_scheme():
    assert len(gen_transmit_scheme(1).arcs) == 1
    topo = gen_transmit_scheme(10)
    assert topo.node_count == 2
    assert all(arc == (0, 1) for arc in topo.arcs)
    with pytest.raises(GraphError):
        gen_transmit_scheme(0)


def test_adversarial_g2_n1():
    g = gen_adversarial(2, 1)
    assert g.n == 3 and g.m == 6
    fwd1 = {tuple(g.edge_costs[i]) for i in (0, 1)}
    assert fwd1 == {(0.0, 1.0), (1.0, 0.0)}
    # group 0 back edge (0,1); group 1 back edge (1,0)
    assert tuple(g.edge_costs[2]) == (0.0, 1.0)
    assert tuple(g.edge_costs[5]) == (1.0, 0.0)


def test_adversarial_k3_back_edge_groups():
    g = gen_adversarial(3, 2)
    assert g.n == 7
    assert g.m == 3 * 2 * 4  # kn(k+1)
    back = {}
    for i in range(1, 7):
        eid = (i - 1) * 4 + 3
        assert int(g.edge_src[eid]) == i and int(g.edge_dst[eid]) == 0
        back[i] = tuple(g.edge_costs[eid])
    assert back[1] == back[2] == (0.0, 2.0)
    assert back[3] == back[4] == (1.0, 1.0)
    assert back[5] == back[6] == (2.0, 0.0)


def test_adversarial_duplicate_vertices():
    g = gen_adversarial(2, 2, duplicate_vertices=True)
    # one copy per forward edge: 2n leaves x k copies + hub
    assert g.n == 1 + 2 * 2 * 2
    # no parallel edges between the same ordered node pair
    seen = set()
    for i in range(g.m):
        key = (int(g.edge_src[i]), int(g.edge_dst[i]))
        assert key not in seen
        seen.add(key)


def test_pair_set_helpers():
    ps = PairSet.all_ordered(3, include_self=False)
    assert ps.n_pairs == 6
    ps = PairSet.between(4, [0, 2], include_self=True)
    assert sorted(ps.pairs()) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    ps = PairSet.from_pairs(3, [(0, 1), (2, 1)])
    assert ps.n_pairs == 2
    with pytest.raises(GraphError):
        PairSet.from_pairs(2, [(0, 5)])
