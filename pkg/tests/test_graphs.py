import math
from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from chromplane.graphs import (BiPlacement, EGraphSpec, WGraphSpec, attach_polychromatic,
                               bi_position, build_egraph, build_wgraph, custom_instance,
                               default_bi, is_clique, max_clique, precolor_clique,
                               sweep_bichromatic)
from chromplane.lattice import LatticeVector, is_loeschian, loeschian_count_in, loeschian_upto

SMALL_L = [n for n in loeschian_upto(40) if n >= 1]


def edge_set(g):
    return {tuple(e) for e in g.edges.tolist()}


def brute_egraph_edges(m, a, b):
    # floating-point oracle on Cartesian coordinates
    from chromplane.lattice import hex_ball
    pts = [w.to_cartesian() for w in hex_ball(m)]
    out = set()
    for i, j in combinations(range(len(pts)), 2):
        d2 = (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
        if a - 1e-7 <= d2 <= b + 1e-7:
            out.add((i, j))
    return out


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n_expanded))
    G.add_edges_from(g.expanded.edges.tolist())
    return G


def test_wheel():
    g = build_egraph(EGraphSpec(1, 1, 1))
    assert (g.n, len(g.edges)) == (7, 12)
    hub_degree = sum(1 for e in edge_set(g) if 0 in e)
    assert hub_degree == 6


def test_radius_one_window_one_to_three():
    assert len(build_egraph(EGraphSpec(1, 1, 3)).edges) == 18


def test_ninety_one_vertices():
    assert build_egraph(EGraphSpec(5, 13, 21)).n == 91


@pytest.mark.parametrize("a,b", [(2, 3), (1, 5), (7, 6)])
def test_bad_windows_rejected(a, b):
    with pytest.raises(ValueError):
        EGraphSpec(3, a, b)


def test_memory_guard():
    with pytest.raises(MemoryError):
        build_egraph(EGraphSpec(2000, 1, 316 * 316))


@pytest.mark.parametrize("m,a,b", [(3, 3, 7), (4, 7, 13), (2, 1, 4), (5, 13, 21)])
def test_egraph_edges_match_float_oracle(m, a, b):
    assert edge_set(build_egraph(EGraphSpec(m, a, b))) == brute_egraph_edges(m, a, b)


@given(st.integers(1, 5), st.sampled_from(SMALL_L), st.sampled_from(SMALL_L))
def test_egraph_vertex_count_and_symmetry(m, x, y):
    a, b = min(x, y), max(x, y)
    g = build_egraph(EGraphSpec(m, a, b))
    assert g.n == 3 * m * m + 3 * m + 1
    index = {tuple(p): i for i, p in enumerate(g.positions.tolist())}
    edges = edge_set(g)
    for op in range(12):
        mapped = set()
        for i, j in edges:
            pi = LatticeVector(*g.positions[i]).symmetries()[op]
            pj = LatticeVector(*g.positions[j]).symmetries()[op]
            u, v = sorted((index[(pi.u, pi.v)], index[(pj.u, pj.v)]))
            mapped.add((u, v))
        assert mapped == edges


@given(st.integers(1, 4), st.sampled_from(SMALL_L), st.sampled_from(SMALL_L), st.sampled_from([4, 9]))
def test_scaling_the_window_by_a_square(m, x, y, t):
    a, b = min(x, y), max(x, y)
    g = build_egraph(EGraphSpec(m, a, b))
    h = build_egraph(EGraphSpec(m, a * t, b * t))
    # scaling the lattice by sqrt(t) maps norms n -> t*n; compare on the same point set
    r = math.isqrt(t)
    pos = g.positions
    expect = set()
    for i, j in combinations(range(g.n), 2):
        du, dv = (pos[i] - pos[j]) * r
        if a * t <= du * du + du * dv + dv * dv <= b * t:
            expect.add((i, j))
    assert expect == edge_set(g)
    assert h.n == g.n


def test_wgraph_chord_indices():
    g = build_wgraph(WGraphSpec(18, 1, 1.2856))
    steps = {min((j - i) % 18, (i - j) % 18) for i, j in edge_set(g)}
    assert steps == {3, 4}
    assert len(g.edges) == 36


def test_wgraph_square_and_triangle():
    sq = build_wgraph(WGraphSpec(4, 1, 1.5))
    assert edge_set(sq) == {(0, 1), (1, 2), (2, 3), (0, 3)}
    tri = build_wgraph(WGraphSpec(3, 1, 2.0))
    assert edge_set(tri) == {(0, 1), (0, 2), (1, 2)}


def test_wgraph_radius_outside_window():
    with pytest.raises(ValueError):
        WGraphSpec(10, 1, 1.3, radii=(1.4,))


def test_wgraph_default_radii():
    assert WGraphSpec(10, 3, 1.5).radii == (1.0, 1.25, 1.5)


@given(st.integers(3, 40), st.integers(1, 3), st.floats(1.0, 2.5))
def test_wgraph_rotation_invariance(p, c, d):
    g = build_wgraph(WGraphSpec(p, c, d))
    rot = lambda i: (i // p) * p + (i % p + 1) % p
    edges = edge_set(g)
    assert {tuple(sorted((rot(i), rot(j)))) for i, j in edges} == edges


def test_tri_and_bi_on_the_record_instance():
    g = attach_polychromatic(build_egraph(EGraphSpec(5, 13, 21)), True, BiPlacement(s_squared=13))
    assert g.n == 91
    assert g.n_expanded == 94
    centre = [i for i in range(g.n) if g.multiplicity[i] == 3]
    assert g.positions[centre[0]].tolist() == [0, 0]
    assert bi_position(g, BiPlacement(s_squared=13)) == (-1, 4)


def test_bi_outside_window():
    g = build_egraph(EGraphSpec(5, 13, 21))
    with pytest.raises(ValueError):
        attach_polychromatic(g, True, BiPlacement(s_squared=7))
    w = build_wgraph(WGraphSpec(18, 1, 1.2856))
    with pytest.raises(ValueError):
        attach_polychromatic(w, True, BiPlacement(s=1.5))


def test_placement_from_the_sweep_literature():
    g = build_egraph(EGraphSpec(15, 31, 111))
    h = attach_polychromatic(g, True, BiPlacement(s_squared=37))
    u, v = h.params["bi_position"]
    assert u * u + u * v + v * v == 37


@given(st.integers(2, 4), st.sampled_from(SMALL_L), st.sampled_from(SMALL_L), st.integers(2, 4))
def test_polychromatic_expansion_edge_count(m, x, y, t):
    from chromplane.graphs import _set_multiplicity
    a, b = min(x, y), max(x, y)
    g = build_egraph(EGraphSpec(m, a, b))
    h = _set_multiplicity(g, (0, 0), t)
    deg0 = sum(1 for e in edge_set(g) if 0 in e)
    assert len(h.expanded.edges) == len(g.edges) + (t - 1) * deg0 + t * (t - 1) // 2


def test_sweep_candidates():
    base = build_egraph(EGraphSpec(5, 13, 21))
    assert [s for s, _ in sweep_bichromatic(base)] == [13, 16, 19, 21]
    assert len(sweep_bichromatic(base)) == loeschian_count_in(13, 21)
    assert [s for s, _ in sweep_bichromatic(build_egraph(EGraphSpec(1, 1, 1)))] == [1]
    big = build_egraph(EGraphSpec(8, 49, 169))
    assert 64 in [s for s, _ in sweep_bichromatic(big)]


def test_default_bi():
    assert default_bi(build_egraph(EGraphSpec(2, 7, 12))) == BiPlacement(s_squared=7)
    assert default_bi(build_wgraph(WGraphSpec(9, 1, 1.3))) == BiPlacement(s=1.0)


@pytest.mark.parametrize("m,a,b,q", [(5, 13, 21, 3), (1, 1, 1, 3), (3, 1, 3, 4)])
def test_clique_sizes(m, a, b, q):
    g = build_egraph(EGraphSpec(m, a, b))
    res = max_clique(g)
    assert res.exact and len(res.vertices) == q
    assert max(len(c) for c in nx.find_cliques(to_nx(g))) == q


def test_triangle_clique():
    g = custom_instance(3, [(0, 1), (1, 2), (0, 2)])
    assert len(max_clique(g).vertices) == 3


@pytest.mark.slow
def test_clique_of_the_ten_colour_graph():
    res = max_clique(build_egraph(EGraphSpec(15, 25, 97)), time_budget=600)
    assert res.exact and len(res.vertices) == 6


@given(st.integers(1, 18), st.floats(0.05, 0.7), st.randoms(use_true_random=False))
def test_clique_matches_networkx(n, p, rnd):
    edges = [(i, j) for i, j in combinations(range(n), 2) if rnd.random() < p]
    g = custom_instance(n, edges)
    res = max_clique(g)
    G = to_nx(g)
    best = max((len(c) for c in nx.find_cliques(G)), default=0)
    assert len(res.vertices) == max(best, 1 if n else 0)
    assert is_clique(g.expanded.adjacency, res.vertices)
    # size is stable under relabelling
    perm = list(range(n))
    rnd.shuffle(perm)
    h = custom_instance(n, [(perm[i], perm[j]) for i, j in edges])
    assert len(max_clique(h).vertices) == len(res.vertices)


def test_precolored_clique_contains_poly_copies():
    g = attach_polychromatic(build_egraph(EGraphSpec(5, 13, 21)), True, BiPlacement(s_squared=13))
    h, res = precolor_clique(g)
    assert h.precolored == (0, 1, 2, 44, 45, 76)
    assert set(g.poly_copies()) <= set(h.precolored)
    assert is_clique(h.expanded.adjacency, h.precolored)
    assert res.exact


def test_precolor_without_poly_vertices_uses_max_clique():
    g = build_egraph(EGraphSpec(3, 1, 1))
    h, res = precolor_clique(g)
    assert len(h.precolored) == 3


def test_json_round_trip():
    from chromplane.graphs import ColoringInstance
    g = attach_polychromatic(build_wgraph(WGraphSpec(12, 2, 1.4)), True, BiPlacement(s=1.2))
    h = ColoringInstance.from_json(g.to_json())
    assert np.array_equal(h.edges, g.edges)
    assert np.array_equal(h.multiplicity, g.multiplicity)
    assert h.params == g.params


@pytest.mark.parametrize("m,a,b", [(5, 13, 21), (10, 19, 28), (4, 7, 12), (6, 13, 25), (3, 1, 7)])
def test_centred_clique_matches_full_search(m, a, b):
    from chromplane.graphs import egraph_clique
    g = build_egraph(EGraphSpec(m, a, b))
    fast = egraph_clique(g)
    assert is_clique(g.expanded.adjacency, fast.vertices)
    assert len(fast.vertices) == max(len(c) for c in nx.find_cliques(to_nx(g)))
