import itertools

import pytest

from disclab.errors import DegreeError, SpecError, StructureError
from disclab.generators import gen_complete, gen_cycle, gen_petersen, philox
from disclab.graph import EdgeColouring, Graph
from disclab.hamilton import (
    bipartite_expansion_holds,
    dense_hamilton_probe,
    dfs_long_path,
    dirac_hamilton,
    hamilton_with_forced_edges,
    is_hamilton_cycle,
    monochromatic_matching,
    random_dense_graph,
)


def complete_bipartite(a):
    return Graph(2 * a, [(x, a + y) for x in range(a) for y in range(a)])


def contains_edges(cycle, edges):
    n = len(cycle)
    on = {frozenset((cycle[i], cycle[(i + 1) % n])) for i in range(n)}
    return all(frozenset(e) in on for e in edges)


class TestForced:
    def test_k4(self):
        cyc = hamilton_with_forced_edges(gen_complete(4), [(1, 3)])
        assert is_hamilton_cycle(gen_complete(4), cyc) and contains_edges(cyc, [(1, 3)])

    def test_k6_path(self):
        cyc = hamilton_with_forced_edges(gen_complete(6), [(0, 1), (1, 2)])
        assert contains_edges(cyc, [(0, 1), (1, 2)])

    def test_c5_chords_not_found(self):
        g = Graph(5, list(gen_cycle(5).edges) + [(0, 2), (1, 3)])
        # C_5 plus chords; ask for chords plus an edge that cannot coexist
        assert hamilton_with_forced_edges(gen_cycle(5), []) is not None
        assert hamilton_with_forced_edges(g, [(0, 2), (1, 3), (0, 1)]) is None

    def test_path_forest_guard(self):
        with pytest.raises(StructureError):
            hamilton_with_forced_edges(gen_complete(5), [(0, 1), (0, 2), (0, 3)])
        with pytest.raises(StructureError):
            hamilton_with_forced_edges(gen_complete(5), [(0, 1), (1, 2), (0, 2)])
        with pytest.raises(StructureError):
            hamilton_with_forced_edges(gen_cycle(5), [(0, 2)])

    def test_dense_graphs_always_succeed(self):
        rng = philox(21)
        for _ in range(60):
            n = int(rng.integers(5, 9))
            a = int(rng.integers(0, 2))
            delta = -(-(n + 2 * a) // 2)
            if delta > n - 1:
                continue
            g = random_dense_graph(n, delta, rng)
            order = rng.permutation(n).tolist()
            size = int(rng.integers(0, 2 * a + 1))
            forced = [(order[i], order[i + 1]) for i in range(size) if g.has_edge(order[i], order[i + 1])]
            cyc = hamilton_with_forced_edges(g, forced)
            assert cyc is not None and contains_edges(cyc, forced)


class TestDirac:
    def test_c6(self):
        assert dirac_hamilton(gen_cycle(6)) == (0, 1, 2, 3, 4, 5)

    def test_k33(self):
        g = complete_bipartite(3)
        assert is_hamilton_cycle(g, dirac_hamilton(g))

    def test_petersen(self):
        assert dirac_hamilton(gen_petersen()) is None

    def test_large_dirac_graph(self):
        g = random_dense_graph(30, 15, philox(2))
        assert is_hamilton_cycle(g, dirac_hamilton(g))


class TestLongPath:
    def test_k55(self):
        g = complete_bipartite(5)
        res = dfs_long_path(g, range(5), range(5, 10), 1)
        assert res.length == 9 and res.expansion

    def test_c10(self):
        g = gen_cycle(10)
        res = dfs_long_path(g, range(0, 10, 2), range(1, 10, 2), 1)
        assert res.expansion is False
        assert len(res.path) >= 2

    def test_non_bipartite(self):
        with pytest.raises(StructureError):
            dfs_long_path(gen_cycle(5), [0, 2], [1, 3, 4], 1)

    def test_path_is_simple_and_alternating(self):
        rng = philox(4)
        for _ in range(20):
            a = 8
            edges = [(x, a + y) for x in range(a) for y in range(a) if rng.random() < 0.5]
            g = Graph(2 * a, edges)
            res = dfs_long_path(g, range(a), range(a, 2 * a), 2)
            p = res.path
            assert len(set(p)) == len(p)
            assert all(g.has_edge(p[i], p[i + 1]) for i in range(len(p) - 1))
            if res.expansion:
                assert res.length >= 2 * a - 8

    def test_exhaustive_small_sides(self):
        for a in range(1, 5):
            pairs = [(x, a + y) for x in range(a) for y in range(a)]
            for bits in itertools.product([0, 1], repeat=len(pairs)):
                g = Graph(2 * a, [p for p, b in zip(pairs, bits) if b])
                for k in range(1, a + 1):
                    # raises if the expansion hypothesis holds and the path is short
                    dfs_long_path(g, range(a), range(a, 2 * a), k)

    def test_expansion_check(self):
        assert bipartite_expansion_holds(complete_bipartite(4), range(4), range(4, 8), 1)


class TestMatching:
    def test_monochromatic_complete(self):
        g = gen_complete(14)
        res = monochromatic_matching(g, EdgeColouring(2, [1] * g.m), 0.19)
        assert res.trace["k"] == 1 and res.trace["ell"] == 0
        assert res.size == 7 and res.trace["case"] == "early-stop"

    def test_triangle_colour(self):
        g = gen_complete(8)
        tri = {(0, 1), (0, 2), (1, 2)}
        f = EdgeColouring(2, [1 if e in tri else 2 for e in g.edges])
        res = monochromatic_matching(g, f, 0.1)
        assert res.size >= 2
        used = [v for e in res.matching for v in e]
        assert len(used) == len(set(used))
        assert all(f.colours[g.edge_id(*e)] == res.colour for e in res.matching)

    def test_random_dense(self):
        rng = philox(8)
        for _ in range(100):
            g = random_dense_graph(10, 6, rng)
            f = EdgeColouring(2, rng.integers(1, 3, size=g.m).tolist())
            res = monochromatic_matching(g, f, 0.1)
            assert res.size >= (10 // 2) // 2 - 1
            assert res.trace["ell"] <= res.trace["k"]
            for x, y, z in res.trace["triples"]:
                assert f.colours[g.edge_id(x, y)] != f.colours[g.edge_id(y, z)]
            used = [v for e in res.matching for v in e]
            assert len(used) == len(set(used))

    def test_guards(self):
        g = gen_complete(8)
        f = EdgeColouring(2, [1] * g.m)
        with pytest.raises(SpecError):
            monochromatic_matching(g, f, 0.3)
        with pytest.raises(DegreeError):
            monochromatic_matching(gen_cycle(8), EdgeColouring(2, [1] * 8), 0.1)


def test_dense_probe_small():
    out = dense_hamilton_probe(8, 0, graphs=5, colourings=5, seed=1)
    assert out.failures == ()
