import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disclab.discrepancy import subgraph_family_discrepancy, tree_discrepancy_of_colouring
from disclab.errors import CoverInvalidError, SizeLimitError, SpecError
from disclab.extremal import (
    PHI_TABLE,
    SequenceSpec,
    a_sequence,
    clique_cover_colouring,
    clique_cycle_colouring,
    cover_tree_caps,
    expected_component_count,
    hamilton_extremal,
    index_set_stats,
    lemma_dc_scan,
    make_sequences,
    phi_exact,
    phi_floor,
    phi_tightness_probe,
)
from disclab.generators import gen_clique_cycle, gen_complete
from disclab.graph import colour_components


class TestSequences:
    def test_a_sequence(self):
        assert a_sequence(6, 2) == [2, 2, 8, 8, 8, 8]
        assert sum(a_sequence(6, 2)) == 36

    def test_b_sum(self):
        _, b = make_sequences(SequenceSpec(2, 6, (0, 1)))
        assert sum(b) == 72

    def test_integer_mean_rejected(self):
        with pytest.raises(SpecError):
            SequenceSpec(2, 6, (0, 2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 50), st.data())
    def test_sum_identities(self, k, data):
        r = data.draw(st.integers(2, 4))
        x = tuple(sorted(data.draw(st.lists(st.integers(0, k - 1), min_size=r, max_size=r))))
        if sum(x) % r == 0:
            with pytest.raises(SpecError):
                SequenceSpec(r, k, x)
            return
        try:
            spec = SequenceSpec(r, k, x)
        except SpecError:
            return  # other parameter guards
        a, b = make_sequences(spec)
        assert all(sum(seq) == k * k for seq in a.values())
        assert sum(b) == r * k * k

    def test_index_stats(self):
        spec = SequenceSpec(2, 4, (0, 1))
        empty = index_set_stats(spec, [])
        assert empty.discrepancy == 16 and empty.intervals == 0
        whole = index_set_stats(spec, range(8))
        assert whole.intervals == 1 and whole.total == 32
        assert index_set_stats(spec, [0, 1, 4]).intervals == 2
        assert index_set_stats(spec, [7, 0]).intervals == 1


def brute_slack(spec):
    L = spec.r * spec.k
    R = spec.R
    best = None
    for size in range(L + 1):
        for I in itertools.combinations(range(L), size):
            st_ = index_set_stats(spec, I)
            val = st_.discrepancy + st_.intervals * R * R - (Fraction(spec.k, spec.r) - 3 * R**4)
            best = val if best is None else min(best, val)
    return best


class TestScan:
    @pytest.mark.parametrize("spec", [SequenceSpec(2, 6, (0, 1)), SequenceSpec(2, 8, (0, 1)), SequenceSpec(3, 4, (0, 1, 3))])
    def test_nonnegative(self, spec):
        res = lemma_dc_scan(spec)
        assert res.holds and res.subsets == 2 ** (spec.r * spec.k)

    def test_matches_python_enumeration(self):
        for spec in [SequenceSpec(2, 4, (0, 1)), SequenceSpec(2, 5, (1, 2)), SequenceSpec(3, 4, (0, 1, 3))]:
            assert lemma_dc_scan(spec).slack == brute_slack(spec)

    def test_cap(self):
        with pytest.raises(SizeLimitError):
            lemma_dc_scan(SequenceSpec(2, 13, (0, 1)))


class TestCliqueCycle:
    @pytest.mark.parametrize("r, k, x, count", [(2, 4, (0, 1), 20), (3, 4, (0, 1, 3), 40)])
    def test_component_counts(self, r, k, x, count):
        g, meta = gen_clique_cycle(r, k, x)
        f = clique_cycle_colouring(g, meta)
        assert colour_components(g, f).counts == [count] * r
        assert expected_component_count(r, k) == count

    @pytest.mark.parametrize("r, k, x", [(2, 3, (0, 1)), (2, 4, (0, 1)), (3, 4, (0, 1, 3))])
    def test_low_discrepancy(self, r, k, x):
        g, meta = gen_clique_cycle(r, k, x)
        assert tree_discrepancy_of_colouring(g, clique_cycle_colouring(g, meta)).value <= 1


class TestPhi:
    def test_reference_table(self):
        assert PHI_TABLE[3] == Fraction(2, 3) and PHI_TABLE[7] == Fraction(3, 7)

    def test_r2(self):
        for n in range(3, 8):
            assert phi_exact(2, n).k == n

    def test_r3_values(self):
        vals = [phi_exact(3, n).k for n in range(3, 10)]
        assert vals == [2, 3, 4, 4, 5, 6, 6]
        assert phi_floor(3, 6) == 4

    def test_r1(self):
        assert phi_exact(1, 4).k == 4

    def test_witness_covers(self):
        for r, n in [(3, 6), (3, 9), (4, 7)]:
            res = phi_exact(r, n)
            assert len(res.cover) == r and all(len(a) == res.k for a in res.cover)
            for u, v in itertools.combinations(range(n), 2):
                assert any(u in a and v in a for a in res.cover)

    def test_budget(self):
        with pytest.raises(SizeLimitError):
            phi_exact(3, 9, budget=5)


class TestCoverColouring:
    def test_optimal_cover_caps_tree_counts(self):
        for r, n in [(3, 6), (3, 7), (2, 5)]:
            res = phi_exact(r, n)
            g = gen_complete(n)
            f = clique_cover_colouring(g, res.cover)
            rep = tree_discrepancy_of_colouring(g, f)
            assert (rep.value + n - 1) // r <= res.k - 1
            assert all(a <= b for a, b in cover_tree_caps(g, f, res.cover))

    def test_single_clique(self):
        g = gen_complete(5)
        f = clique_cover_colouring(g, [range(5)])
        assert set(f.colours) == {1}
        assert tree_discrepancy_of_colouring(g, f).value == 2 * 4 - 4

    def test_uncovered_pair(self):
        with pytest.raises(CoverInvalidError) as exc:
            clique_cover_colouring(gen_complete(4), [[0, 2, 3], [1, 2, 3]])
        assert "{0, 1}" in str(exc.value)

    def test_probe(self):
        p = phi_tightness_probe(2, 5)
        assert p.phi == 5 and p.holds
        p = phi_tightness_probe(3, 6)
        assert p.holds and p.min_max_rank >= p.phi - 1


class TestHamiltonExtremal:
    def test_r2_n8(self):
        g, f, blocks = hamilton_extremal(2, 8)
        assert [len(b) for b in blocks] == [2, 6] and g.min_degree == 6
        assert subgraph_family_discrepancy(g, f, "hamilton-cycle").value == 0
        assert subgraph_family_discrepancy(g, f, "perfect-matching").value == 0

    def test_r3_n12(self):
        g, f, blocks = hamilton_extremal(3, 12)
        assert [len(b) for b in blocks] == [2, 2, 8] and g.min_degree == 8
        assert subgraph_family_discrepancy(g, f, "perfect-matching").value == 0

    def test_guard(self):
        with pytest.raises(SpecError):
            hamilton_extremal(2, 6)
