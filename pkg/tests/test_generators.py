import math

import networkx as nx
import pytest

from disclab.errors import SpecError
from disclab.generators import (
    HedgehogSpec,
    b_sequence,
    expected_rejection_rate,
    gen_clique_cycle,
    gen_complete,
    gen_grid,
    gen_hedgehog,
    gen_hypercube,
    gen_random_regular,
    gen_regular_hedgehog,
    grid_layers,
    small_connected_graphs,
)
from disclab.graph import vertex_connectivity


def test_atlas_counts():
    # numbers of connected graphs on 1..7 vertices (OEIS A001349)
    assert [len(small_connected_graphs(n)) for n in range(1, 8)] == [1, 1, 2, 6, 21, 112, 853]


class TestHedgehog:
    def test_r2_n6(self):
        g, f = gen_hedgehog(HedgehogSpec(2, 6))
        assert g.n == 6 and g.m == 6
        assert sorted(g.degrees) == [1, 1, 1, 3, 3, 3]
        assert vertex_connectivity(g) == 1

    def test_r3_n9_spike_colours(self):
        g, f = gen_hedgehog(HedgehogSpec(3, 9))
        for v in range(3):
            spike_cols = sorted(f.colours[g.edge_id(v, w)] for w in g.adjacency[v] if w >= 3)
            assert spike_cols == [1, 2]
        body = [f.colours[g.edge_id(u, v)] for u, v in [(0, 1), (0, 2), (1, 2)]]
        assert body == [3, 3, 3]

    def test_degrees(self):
        for r, n in [(2, 8), (3, 12), (4, 8)]:
            g, _ = gen_hedgehog(HedgehogSpec(r, n))
            b = n // r
            assert g.degrees[:b] == [b - 1 + r - 1] * b
            assert g.degrees[b:] == [1] * (n - b)

    def test_divisibility_guard(self):
        with pytest.raises(SpecError):
            gen_hedgehog(HedgehogSpec(2, 5))

    def test_regular_variant(self):
        for seed in range(3):
            g = gen_regular_hedgehog(70, 5, seed)
            assert set(g.degrees) == {5}


class TestCliqueCycle:
    def test_sizes_from_figures(self):
        assert gen_clique_cycle(2, 6, (0, 1))[0].n == 84
        assert gen_clique_cycle(3, 4, (0, 1, 3))[0].n == 60

    def test_integer_mean_rejected(self):
        with pytest.raises(SpecError):
            gen_clique_cycle(2, 6, (0, 2))

    def test_private_vertex_total_and_two_connectivity(self):
        for r, k, x in [(2, 3, (0, 1)), (2, 4, (0, 1)), (3, 4, (0, 1, 3))]:
            g, meta = gen_clique_cycle(r, k, x)
            private = sum(len(set(a) - set(meta.cycle)) for a in meta.cliques)
            assert private == r * k * k
            assert g.n == r * k * k + r * k
            assert vertex_connectivity(g) >= 2

    def test_b_sequence(self):
        assert b_sequence(2, 4, (0, 1)) == [4, 1, 4, 5, 4, 5, 4, 5]


class TestGridAndCube:
    def test_grid_counts(self):
        g = gen_grid(3, 2)
        assert (g.n, g.m) == (9, 12)
        q = gen_grid(2, 3)
        assert nx.is_isomorphic(nx.Graph(list(q.edges)), nx.hypercube_graph(3))

    def test_grid_plus(self):
        g = gen_grid(4, 2, plus=True)
        assert (g.n, g.m) == (16, 28)
        assert vertex_connectivity(g) == 3

    def test_layers(self):
        layers = grid_layers(4, 2)
        assert [len(l) for l in layers] == [4] * 4
        g = gen_grid(4, 2)
        where = {v: i for i, l in enumerate(layers) for v in l}
        assert all(abs(where[u] - where[v]) <= 1 for u, v in g.edges)

    def test_hypercube(self):
        g, layers = gen_hypercube(3)
        assert (g.n, g.m) == (8, 12)
        assert [len(l) for l in layers] == [1, 3, 3, 1]
        c4, _ = gen_hypercube(2)
        assert nx.is_isomorphic(nx.Graph(list(c4.edges)), nx.cycle_graph(4))
        g4, layers4 = gen_hypercube(4)
        assert set(g4.degrees) == {4}
        assert [len(l) for l in layers4] == [math.comb(4, i) for i in range(5)]
        assert nx.is_bipartite(nx.Graph(list(g4.edges)))


class TestRandomRegular:
    def test_simple_regular(self):
        g = gen_random_regular(8, 3, seed=1)
        assert set(g.degrees) == {3} and g.m == 12

    def test_parity(self):
        with pytest.raises(SpecError):
            gen_random_regular(5, 3, seed=0)

    def test_reproducible_and_varied(self):
        assert gen_random_regular(10, 3, 5) == gen_random_regular(10, 3, 5)
        classes = []
        for seed in range(30):
            h = nx.Graph(list(gen_random_regular(8, 3, seed).edges))
            if not any(nx.is_isomorphic(h, c) for c in classes):
                classes.append(h)
        assert len(classes) >= 2

    def test_three_connected_whp(self):
        kappas = [vertex_connectivity(gen_random_regular(50, 3, s)) for s in range(100)]
        assert sum(k == 3 for k in kappas) >= 90

    def test_rejection_rate_formula(self):
        assert expected_rejection_rate(3) == pytest.approx(1 - math.exp(-2))


def test_complete_counts():
    assert gen_complete(4).m == 6
    assert gen_complete(1).m == 0
