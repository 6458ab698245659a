"""Extremal sequences, colourings and parameters.

* the ``a``/``b`` interval sequences behind the clique-cycle construction and
  the exhaustive check of the discrepancy-versus-intervals inequality;
* the canonical clique-cycle colouring;
* ``phi(r, n)``, clique-cover colourings of ``K_n`` and the spanning-tree probe;
* the Hamilton-cycle extremal graph with its colouring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .discrepancy import exact_tree_discrepancy
from .errors import CoverInvalidError, SizeLimitError, SpecError
from .generators import CliqueCycleMeta, b_sequence, check_sequence_params, gen_complete
from .graph import EdgeColouring, Graph, colour_components

# Reference limits phi(r) = lim phi(r, n) / n for small r (shipped, not re-derived).
PHI_TABLE = {
    2: Fraction(1),
    3: Fraction(2, 3),
    4: Fraction(3, 5),
    5: Fraction(5, 9),
    6: Fraction(1, 2),
    7: Fraction(3, 7),
}


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    r: int
    k: int
    x: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        check_sequence_params(self.r, self.k, self.x)

    @property
    def mu(self) -> Fraction:
        return Fraction(sum(self.x), self.r)

    @property
    def R(self) -> int:
        return max(self.r, self.x[-1])


def a_sequence(k: int, x: int) -> list[int]:
    if not 0 <= x < k:
        raise SpecError(f"need 0 <= x < k, got x={x}, k={k}")
    return [x if i < x else k + x for i in range(k)]


def make_sequences(spec: SequenceSpec) -> tuple[dict[int, list[int]], list[int]]:
    """``a^{k,x_t}`` for every entry of ``x`` and the interleaved ``b`` sequence."""
    a = {xt: a_sequence(spec.k, xt) for xt in spec.x}
    for xt, seq in a.items():
        assert sum(seq) == spec.k**2, (xt, seq)
    b = b_sequence(spec.r, spec.k, spec.x)
    assert sum(b) == spec.r * spec.k**2
    return a, b


@dataclass(frozen=True)
class IndexSetStats:
    indices: tuple[int, ...]
    total: int  # sum of b over the set
    discrepancy: int  # |total - k^2|
    intervals: int  # cyclic intervals in Z/(rk)

    @property
    def size(self) -> int:
        return len(self.indices)


def index_set_stats(spec: SequenceSpec, indices: Sequence[int]) -> IndexSetStats:
    L = spec.r * spec.k
    b = b_sequence(spec.r, spec.k, spec.x)
    s = set(indices)
    total = sum(b[i] for i in s)
    if len(s) == L:
        intervals = 1
    else:
        intervals = sum(1 for i in s if (i - 1) % L not in s)
    return IndexSetStats(tuple(sorted(s)), total, abs(total - spec.k**2), intervals)


@dataclass(frozen=True)
class ScanResult:
    slack: Fraction  # min over I of D(I) + C(I) R^2 - (k/r - 3R^4)
    witness: IndexSetStats
    subsets: int

    @property
    def holds(self) -> bool:
        return self.slack >= 0


def _popcount_table(bits: int) -> np.ndarray:
    t = np.zeros(1 << bits, dtype=np.int64)
    for b in range(bits):
        t[1 << b:1 << (b + 1)] = t[: 1 << b] + 1
    return t


def lemma_dc_scan(spec: SequenceSpec, cap: int = 24, chunk_bits: int = 20) -> ScanResult:
    """Exhaustive minimum slack of ``D(I) + C(I) R^2 >= k/r - 3R^4`` over all ``I``.

    Arithmetic is scaled by ``r`` so everything stays integral.  Raises
    :class:`SizeLimitError` if ``rk > cap``.
    """
    r, k, R = spec.r, spec.k, spec.R
    L = r * k
    if L > cap:
        raise SizeLimitError(f"rk = {L} exceeds the scan cap {cap}")
    b = np.array(b_sequence(r, k, spec.x), dtype=np.int64)
    lo_bits = min(L, 12)
    hi_bits = L - lo_bits
    lo_sum = np.zeros(1 << lo_bits, dtype=np.int64)
    for j in range(lo_bits):
        lo_sum[1 << j:1 << (j + 1)] = lo_sum[: 1 << j] + b[j]
    hi_sum = np.zeros(1 << hi_bits, dtype=np.int64)
    for j in range(hi_bits):
        hi_sum[1 << j:1 << (j + 1)] = hi_sum[: 1 << j] + b[lo_bits + j]
    pc_lo = _popcount_table(lo_bits)
    pc_hi = _popcount_table(hi_bits)
    full = (1 << L) - 1
    lo_mask = (1 << lo_bits) - 1
    rhs_scaled = k - 3 * r * R**4  # r * (k/r - 3R^4)
    best_val, best_mask = None, None
    total = 1 << L
    step = 1 << min(chunk_bits, L)
    for start in range(0, total, step):
        masks = np.arange(start, min(start + step, total), dtype=np.int64)
        sums = lo_sum[masks & lo_mask] + hi_sum[masks >> lo_bits]
        rot = ((masks << 1) | (masks >> (L - 1))) & full  # bit i of rot = bit i-1 of I
        starts = masks & ~rot
        intervals = pc_lo[starts & lo_mask] + pc_hi[starts >> lo_bits]
        intervals = np.where(masks == full, 1, intervals)
        val = r * np.abs(sums - k * k) + r * intervals * R * R - rhs_scaled
        pos = int(np.argmin(val))
        if best_val is None or val[pos] < best_val:
            best_val, best_mask = int(val[pos]), int(masks[pos])
    witness = index_set_stats(spec, [i for i in range(L) if best_mask >> i & 1])
    return ScanResult(Fraction(best_val, r), witness, total)


# ---------------------------------------------------------------------------
# Clique cycles
# ---------------------------------------------------------------------------


def clique_cycle_colouring(g: Graph, meta: CliqueCycleMeta) -> EdgeColouring:
    """Edge of ``G[A_i]`` gets colour ``t_i + 1``; each edge lies in exactly one ``A_i``."""
    owner = [None] * g.m
    for i, clique in enumerate(meta.cliques):
        for u, v in itertools.combinations(clique, 2):
            e = g.edge_id(u, v)
            if owner[e] is not None:
                raise SpecError(f"edge {(u, v)} lies in cliques {owner[e]} and {i}")
            owner[e] = i
    if any(o is None for o in owner):
        raise SpecError("an edge of the graph lies in no clique")
    return EdgeColouring(meta.r, [meta.clique_colour(i) for i in owner])


def expected_component_count(r: int, k: int) -> int:
    return (r - 1) * (k * k + k)


# ---------------------------------------------------------------------------
# Clique covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiResult:
    r: int
    n: int
    k: int
    cover: tuple[tuple[int, ...], ...]
    floor: int
    nodes: int


def phi_floor(r: int, n: int) -> int:
    """Smallest ``k`` with ``r * C(k, 2) >= C(n, 2)``."""
    need = n * (n - 1) // 2
    k = 1
    while r * (k * (k - 1) // 2) < need:
        k += 1
    return min(k, n)


def _pair_mask(n: int, vertices: Sequence[int]) -> int:
    mask = 0
    for u, v in itertools.combinations(vertices, 2):
        mask |= 1 << (u * n + v)
    return mask


def phi_exact(r: int, n: int, budget: int = 5_000_000) -> PhiResult:
    """Exact ``phi(r, n)`` by increasing ``k`` from the counting floor.

    Covers are searched as lexicographically nondecreasing tuples of
    ``k``-sets with ``0`` in the first one.
    """
    if r < 1 or n < 1:
        raise SpecError(f"need r, n >= 1, got r={r}, n={n}")
    if n == 1:
        return PhiResult(r, n, 1, tuple((0,) for _ in range(r)), 1, 0)
    target = _pair_mask(n, range(n))
    floor = phi_floor(r, n)
    nodes = 0
    for k in range(floor, n + 1):
        sets = list(itertools.combinations(range(n), k))
        masks = [_pair_mask(n, s) for s in sets]
        per = k * (k - 1) // 2
        first = [i for i, s in enumerate(sets) if s[0] == 0]

        def rec(depth: int, lo: int, covered: int, chosen: list[int]):
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise SizeLimitError(f"phi search exceeded {budget} nodes")
            if covered == target:
                return chosen + [chosen[-1]] * (r - depth)
            if depth == r:
                return None
            missing = bin(target & ~covered).count("1")
            if missing > (r - depth) * per:
                return None
            pool = first if depth == 0 else range(lo, len(sets))
            for i in pool:
                if masks[i] & ~covered == 0 and depth > 0:
                    continue
                out = rec(depth + 1, i, covered | masks[i], chosen + [i])
                if out is not None:
                    return out
            return None

        found = rec(0, 0, 0, [])
        if found is not None:
            return PhiResult(r, n, k, tuple(sets[i] for i in found), floor, nodes)
    raise AssertionError("the trivial cover always exists")


def clique_cover_colouring(g: Graph, cover: Sequence[Sequence[int]]) -> EdgeColouring:
    """Colour each edge with the first ``i`` such that the edge lies inside ``A_i``."""
    sets = [frozenset(a) for a in cover]
    for u, v in itertools.combinations(range(g.n), 2):
        if not any(u in a and v in a for a in sets):
            raise CoverInvalidError(f"pair {{{u}, {v}}} is not covered", (u, v))
    colours = []
    for u, v in g.edges:
        colours.append(next(i + 1 for i, a in enumerate(sets) if u in a and v in a))
    if len(sets) < 2:
        # single clique: still a valid 2-colouring that never uses colour 2
        return EdgeColouring(2, colours)
    return EdgeColouring(len(sets), colours)


def cover_tree_caps(g: Graph, f: EdgeColouring, cover: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Per colour ``(n - c_i, |A_i| - 1)``; the first never exceeds the second."""
    cc = colour_components(g, f)
    return [(g.n - cc.count(i + 1), len(cover[i]) - 1) for i in range(len(cover))]


@dataclass(frozen=True)
class PhiProbe:
    r: int
    n: int
    phi: int
    min_max_rank: int  # min over colourings of the largest monochromatic forest
    holds: bool  # min_max_rank >= phi - 1


def phi_tightness_probe(r: int, n: int, budget: int = 10**7) -> PhiProbe:
    """Does every ``r``-colouring of ``K_n`` have a spanning tree with ``phi(r,n)-1`` edges of one colour?"""
    phi = phi_exact(r, n).k
    rep = exact_tree_discrepancy(gen_complete(n), r, budget=budget)
    rank = (rep.value + n - 1) // r
    return PhiProbe(r, n, phi, rank, rank >= phi - 1)


# ---------------------------------------------------------------------------
# Hamilton extremal graph
# ---------------------------------------------------------------------------


def hamilton_extremal(r: int, n: int) -> tuple[Graph, EdgeColouring, list[list[int]]]:
    """Blocks ``V_1 | ... | V_r`` in index order; edges are all pairs touching ``V_r``."""
    if r < 2:
        raise SpecError(f"need r >= 2, got {r}")
    if n < 4 or n % (2 * r):
        raise SpecError(f"need n >= 4 divisible by 2r = {2 * r}, got n={n}")
    small = n // (2 * r)
    blocks, start = [], 0
    for i in range(r):
        size = small if i < r - 1 else (r + 1) * n // (2 * r)
        blocks.append(list(range(start, start + size)))
        start += size
    block_of = [0] * n
    for i, blk in enumerate(blocks):
        for v in blk:
            block_of[v] = i
    big = r - 1
    edges, colours = [], []
    for u, v in itertools.combinations(range(n), 2):
        bu, bv = block_of[u], block_of[v]
        if bu != big and bv != big:
            continue
        edges.append((u, v))
        colours.append(min(bu, bv) + 1)
    g = Graph(n, edges)
    assert g.min_degree == (r + 1) * n // (2 * r)
    return g, EdgeColouring(r, colours), blocks
