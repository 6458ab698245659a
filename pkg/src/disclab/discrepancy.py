"""Spanning-tree, Hamilton-cycle and perfect-matching discrepancy.

All values use the integer scaling ``D_f(e) = r * max_i |f^{-1}(i) & e| - |e|``.
For spanning trees the maximum over trees of a fixed colouring is
``r * max_i (n - c_i) - (n - 1)``, where ``c_i`` counts colour-``i``
components: a maximum colour-``i`` forest extends to a spanning tree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    AcyclicityError,
    EmptyFamilyError,
    NoSpanningTreeError,
    SizeLimitError,
)
from .graph import EdgeColouring, Graph, UnionFind, colour_ranks

FAMILIES = ("spanning-tree", "hamilton-cycle", "perfect-matching")


@dataclass(frozen=True)
class DiscrepancyReport:
    value: int
    family: str
    witness_subgraph: tuple[int, ...] = ()
    witness_colouring: EdgeColouring | None = None
    colour_counts: tuple[int, ...] = ()  # per-colour edge counts of the witness subgraph
    stats: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        out = {
            "value": self.value,
            "family": self.family,
            "witness_edges": list(self.witness_subgraph),
            "colour_counts": list(self.colour_counts),
        }
        if self.witness_colouring is not None:
            out["witness_colouring"] = {
                "r": self.witness_colouring.r,
                "colours": list(self.witness_colouring.colours),
            }
        if self.stats:
            out["stats"] = self.stats
        return out


def _counts(f: EdgeColouring, edges: Sequence[int]) -> tuple[int, ...]:
    c = [0] * f.r
    for e in edges:
        c[f.colours[e] - 1] += 1
    return tuple(c)


# ---------------------------------------------------------------------------
# Forests and spanning trees
# ---------------------------------------------------------------------------


def max_monochromatic_forest(g: Graph, f: EdgeColouring, colour: int) -> list[int]:
    """A maximum acyclic set of colour-``colour`` edges (greedy in edge order)."""
    f.check(g)
    if not 1 <= colour <= f.r:
        raise ValueError(f"colour {colour} outside 1..{f.r}")
    uf = UnionFind(g.n)
    out = []
    for idx, ((u, v), c) in enumerate(zip(g.edges, f.colours)):
        if c == colour and uf.union(u, v):
            out.append(idx)
    return out


def extend_forest_to_spanning_tree(g: Graph, forest: Sequence[int]) -> list[int]:
    """Spanning tree (edge indices, sorted) containing every edge of ``forest``."""
    uf = UnionFind(g.n)
    chosen = []
    for idx in forest:
        u, v = g.edges[idx]
        if not uf.union(u, v):
            raise AcyclicityError(f"forest edges contain a cycle (closed by edge {idx})")
        chosen.append(idx)
    for idx, (u, v) in enumerate(g.edges):
        if uf.union(u, v):
            chosen.append(idx)
    if uf.count != 1:
        raise NoSpanningTreeError("graph is disconnected")
    return sorted(chosen)


def _require_tree_family(g: Graph) -> None:
    if g.n < 2:
        raise NoSpanningTreeError("spanning-tree discrepancy needs n >= 2")
    if not g.is_connected():
        raise NoSpanningTreeError("graph is disconnected, it has no spanning tree")


def tree_discrepancy_of_colouring(
    g: Graph, f: EdgeColouring, witness: bool = True
) -> DiscrepancyReport:
    """Exact maximum of ``D_f(T)`` over spanning trees ``T``, in ``O(r(n + m))``."""
    _require_tree_family(g)
    f.check(g)
    ranks = colour_ranks(g, f)
    best = max(ranks)
    value = f.r * best - (g.n - 1)
    if not witness:
        return DiscrepancyReport(value, "spanning-tree")
    top = ranks.index(best) + 1
    tree = extend_forest_to_spanning_tree(g, max_monochromatic_forest(g, f, top))
    return DiscrepancyReport(
        value, "spanning-tree", tuple(tree), None, _counts(f, tree), {"ranks": ranks}
    )


def tree_value_from_ranks(r: int, n: int, ranks: Sequence[int]) -> int:
    return r * max(ranks) - (n - 1)


# ---------------------------------------------------------------------------
# Naive oracle: enumerate spanning trees
# ---------------------------------------------------------------------------


def iter_spanning_trees(g: Graph, budget: int = 10**6) -> Iterator[tuple[int, ...]]:
    """All spanning trees as sorted edge-index tuples, by include/exclude branching.

    An edge is included when it joins two current components and excluded
    only when the unused remaining edges can still connect the graph.
    """
    n, m = g.n, g.m
    edges = g.edges
    if n == 1:
        yield ()
        return
    count = 0

    def connected_with(labels: list[int], start: int) -> bool:
        uf = UnionFind(n)
        for v in range(n):
            uf.union(v, labels[v])
        for i in range(start, m):
            uf.union(*edges[i])
        return uf.count == 1

    chosen: list[int] = []

    def rec(i: int, labels: list[int], comps: int):
        nonlocal count
        if comps == 1:
            count += 1
            if count > budget:
                raise SizeLimitError(f"more than {budget} spanning trees")
            yield tuple(chosen)
            return
        if i == m or m - i < comps - 1:
            return
        u, v = edges[i]
        a, b = labels[u], labels[v]
        if a != b:
            new = [a if x == b else x for x in labels]
            chosen.append(i)
            yield from rec(i + 1, new, comps - 1)
            chosen.pop()
        if connected_with(labels, i + 1):
            yield from rec(i + 1, labels, comps)

    yield from rec(0, list(range(n)), n)


class SpanningTreeOracle:
    """Tree/edge incidence matrix of ``g`` for batch evaluation of colourings."""

    def __init__(self, g: Graph, budget: int = 10**6):
        _require_tree_family(g)
        self.g = g
        self.trees = list(iter_spanning_trees(g, budget))
        inc = np.zeros((len(self.trees), g.m), dtype=np.int32)
        for t, tree in enumerate(self.trees):
            inc[t, list(tree)] = 1
        self.incidence = inc

    def values(self, r: int, colourings: np.ndarray) -> np.ndarray:
        """Discrepancy for each row of ``colourings`` (shape ``(k, m)``, entries ``1..r``)."""
        cols = np.asarray(colourings)
        best = np.zeros(len(cols), dtype=np.int64)
        for c in range(1, r + 1):
            counts = self.incidence @ (cols == c).T.astype(np.int32)
            best = np.maximum(best, counts.max(axis=0))
        return r * best - (self.g.n - 1)

    def report(self, f: EdgeColouring) -> DiscrepancyReport:
        f.check(self.g)
        best_val, best_tree = None, None
        for tree in self.trees:
            cnt = _counts(f, tree)
            val = f.r * max(cnt) - (self.g.n - 1)
            if best_val is None or val > best_val:
                best_val, best_tree = val, tree
        return DiscrepancyReport(
            best_val, "spanning-tree", best_tree, None, _counts(f, best_tree),
            {"trees": len(self.trees)},
        )


def naive_tree_discrepancy_of_colouring(
    g: Graph, f: EdgeColouring, budget: int = 10**6
) -> DiscrepancyReport:
    """Maximum of ``D_f(T)`` by enumerating every spanning tree."""
    return SpanningTreeOracle(g, budget).report(f)


# ---------------------------------------------------------------------------
# Global minimum over colourings
# ---------------------------------------------------------------------------


def tree_lower_bound_rank(n: int, m: int, r: int) -> int:
    """Every colouring has a colour of forest rank at least this.

    Ranks sum to at least ``n - 1``; a colour class with ``e`` edges and rank
    ``rho`` needs ``e <= C(rho + 1, 2)``, so ``r * C(rho + 1, 2) >= m``.
    """
    lb = -(-(n - 1) // r)
    rho = 0
    while r * math.comb(rho + 1, 2) < m:
        rho += 1
    return max(lb, rho)


class _Search:
    """Depth-first search for a canonical colouring with every colour rank ``<= bound``."""

    def __init__(self, g: Graph, r: int, budget: int):
        self.g, self.r = g, r
        self.n, self.m = g.n, g.m
        self.budget = budget
        self.nodes = 0

    def run(self, bound: int, prefix: Sequence[int] = ()) -> list[int] | None:
        n, m, r = self.n, self.m, self.r
        edges = self.g.edges
        labels = [list(range(n)) for _ in range(r)]
        ranks = [0] * r
        colours = [0] * m
        used = 0
        # replay a fixed prefix
        for i, c in enumerate(prefix):
            u, v = edges[i]
            lab = labels[c - 1]
            a, b = lab[u], lab[v]
            if a != b:
                if ranks[c - 1] >= bound:
                    return None
                for x in range(n):
                    if lab[x] == b:
                        lab[x] = a
                ranks[c - 1] += 1
            colours[i] = c
            used = max(used, c)
        start = len(prefix)

        def feasible_rest(i: int) -> bool:
            # forward check: every later edge must still fit somewhere
            for j in range(i, m):
                u, v = edges[j]
                for c in range(r):
                    if ranks[c] < bound or labels[c][u] == labels[c][v]:
                        break
                else:
                    return False
            return True

        def rec(i: int, used: int) -> bool:
            self.nodes += 1
            if self.nodes > self.budget:
                raise SizeLimitError(
                    f"search exceeded {self.budget} nodes; raise the budget"
                )
            if i == m:
                return True
            u, v = edges[i]
            top = min(r, used + 1)
            for c in range(top):
                lab = labels[c]
                a, b = lab[u], lab[v]
                if a == b:
                    colours[i] = c + 1
                    if rec(i + 1, max(used, c + 1)):
                        return True
                    continue
                if ranks[c] >= bound:
                    continue
                changed = [x for x in range(n) if lab[x] == b]
                for x in changed:
                    lab[x] = a
                ranks[c] += 1
                colours[i] = c + 1
                ok = feasible_rest(i + 1) and rec(i + 1, max(used, c + 1))
                ranks[c] -= 1
                for x in changed:
                    lab[x] = b
                if ok:
                    return True
            return False

        if not feasible_rest(start):
            return None
        if rec(start, used):
            return list(colours)
        return None


def _prefix_job(args):
    g, r, bound, budget, prefix = args
    s = _Search(g, r, budget)
    return s.run(bound, prefix), s.nodes


def canonical_prefixes(m: int, r: int, depth: int) -> list[tuple[int, ...]]:
    """Canonical colour prefixes of the given length, in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(p: list[int], used: int):
        if len(p) == min(depth, m):
            out.append(tuple(p))
            return
        for c in range(1, min(r, used + 1) + 1):
            p.append(c)
            rec(p, max(used, c))
            p.pop()

    rec([], 0)
    return out


def exact_tree_discrepancy(
    g: Graph,
    r: int,
    budget: int = 10**7,
    workers: int = 1,
    seed: int = 0,
) -> DiscrepancyReport:
    """``min_f max_T D_f(T)`` with the lexicographically first optimal canonical colouring.

    Colourings are restricted to canonical representatives (colours appear
    for the first time in increasing order).  A local-search colouring gives
    the starting bound; the search then lowers the bound on the largest
    colour rank until no colouring fits.  The witness of the final feasible
    bound is the first canonical colouring found in lexicographic order.
    """
    _require_tree_family(g)
    if r < 2:
        raise ValueError("need r >= 2")
    n, m = g.n, g.m
    lb = tree_lower_bound_rank(n, m, r)
    start_f, start_ranks = local_search_colouring(g, r, seed=seed, starts=2)
    upper = max(start_ranks)
    search = _Search(g, r, budget)
    nodes = 0

    def feasible(bound: int):
        nonlocal nodes
        if workers > 1 and m > 6:
            from concurrent.futures import ProcessPoolExecutor

            prefixes = canonical_prefixes(m, r, 6)
            remaining = budget - nodes
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(
                    _prefix_job, [(g, r, bound, remaining, p) for p in prefixes]
                ))
            nodes += sum(k for _, k in results)
            if nodes > budget:
                raise SizeLimitError(f"search exceeded {budget} nodes; raise the budget")
            for cols, _ in results:
                if cols is not None:
                    return cols
            return None
        out = search.run(bound)
        nodes = search.nodes
        return out

    witness = feasible(upper)
    assert witness is not None, "local-search colouring must satisfy its own bound"
    witness_bound = upper
    best_bound = max(colour_ranks(g, EdgeColouring(r, witness)))
    while best_bound > lb:
        trial = feasible(best_bound - 1)
        if trial is None:
            break
        witness, witness_bound = trial, best_bound - 1
        best_bound = max(colour_ranks(g, EdgeColouring(r, trial)))
    if witness_bound != best_bound:
        # lexicographically first colouring among the optimal ones
        witness = feasible(best_bound)
    f = EdgeColouring(r, witness)
    rep = tree_discrepancy_of_colouring(g, f)
    assert rep.value == r * best_bound - (n - 1)
    return DiscrepancyReport(
        rep.value, "spanning-tree", rep.witness_subgraph, f, rep.colour_counts,
        {"nodes": nodes, "lower_bound_rank": lb, "start_rank": upper},
    )


def brute_force_tree_discrepancy(g: Graph, r: int, limit: int = 2_000_000) -> int:
    """Minimum over all ``r^m`` colourings, no symmetry reduction (test oracle)."""
    _require_tree_family(g)
    if r**g.m > limit:
        raise SizeLimitError(f"{r}^{g.m} colourings exceed the limit {limit}")
    best = None
    for cols in itertools.product(range(1, r + 1), repeat=g.m):
        val = r * max(colour_ranks(g, EdgeColouring(r, cols))) - (g.n - 1)
        if best is None or val < best:
            best = val
    return best


# ---------------------------------------------------------------------------
# Local search (heuristic adversarial colourings)
# ---------------------------------------------------------------------------


def balanced_random_colouring(m: int, r: int, rng: np.random.Generator) -> list[int]:
    cols = [i % r + 1 for i in range(m)]
    perm = rng.permutation(m)
    return [cols[p] for p in perm]


def _rank_of(n: int, edges: Sequence[tuple[int, int]], idx: Sequence[int]) -> int:
    uf = UnionFind(n)
    k = 0
    for i in idx:
        if uf.union(*edges[i]):
            k += 1
    return k


def local_search_colouring(
    g: Graph,
    r: int,
    seed: int = 0,
    starts: int = 4,
    max_rounds: int = 200,
    initial: Sequence[Sequence[int]] = (),
) -> tuple[EdgeColouring, list[int]]:
    """Hill-climb single-edge recolourings to minimise ``(max_i rank_i, sum_i rank_i)``.

    Starts from balanced random colourings (plus any ``initial`` ones) and
    returns the best local optimum found with its colour ranks.  This is a
    heuristic: it gives an upper bound on the minimum, never a certificate.
    """
    from .generators import philox

    rng = philox(seed)
    n, edges = g.n, g.edges
    m = g.m
    best_key, best_cols, best_ranks = None, None, None
    starting = [list(c) for c in initial]
    starting += [balanced_random_colouring(m, r, rng) for _ in range(starts)]
    for cols in starting:
        classes = [[i for i in range(m) if cols[i] == c] for c in range(1, r + 1)]
        ranks = [_rank_of(n, edges, cl) for cl in classes]
        key = (max(ranks), sum(ranks))
        for _ in range(max_rounds):
            improved = False
            order = rng.permutation(m)
            for e in order.tolist():
                c0 = cols[e] - 1
                without = [i for i in classes[c0] if i != e]
                r0 = _rank_of(n, edges, without)
                for c1 in range(r):
                    if c1 == c0:
                        continue
                    r1 = _rank_of(n, edges, classes[c1] + [e])
                    trial = list(ranks)
                    trial[c0], trial[c1] = r0, r1
                    tkey = (max(trial), sum(trial))
                    if tkey < key:
                        classes[c0] = without
                        classes[c1] = classes[c1] + [e]
                        cols[e] = c1 + 1
                        ranks, key = trial, tkey
                        improved = True
                        break
            if not improved:
                break
        if best_key is None or key < best_key:
            best_key, best_cols, best_ranks = key, list(cols), list(ranks)
    return EdgeColouring(r, best_cols), best_ranks


# ---------------------------------------------------------------------------
# Hamilton cycles and perfect matchings
# ---------------------------------------------------------------------------


def iter_hamilton_cycles(g: Graph) -> Iterator[tuple[int, ...]]:
    """Every Hamilton cycle once, as the vertex sequence starting at 0.

    The cycle is oriented so that its second vertex is smaller than its last.
    """
    n = g.n
    if n < 3:
        return
    adj = g.adjacency
    path = [0]
    on = [False] * n
    on[0] = True

    def rec():
        if len(path) == n:
            if g.has_edge(path[-1], 0) and path[1] < path[-1]:
                yield tuple(path)
            return
        for w in adj[path[-1]]:
            if not on[w]:
                on[w] = True
                path.append(w)
                yield from rec()
                path.pop()
                on[w] = False

    yield from rec()


def cycle_edges(g: Graph, cycle: Sequence[int]) -> tuple[int, ...]:
    k = len(cycle)
    return tuple(sorted(g.edge_id(cycle[i], cycle[(i + 1) % k]) for i in range(k)))


def iter_perfect_matchings(g: Graph) -> Iterator[tuple[int, ...]]:
    """Every perfect matching as a sorted tuple of edge indices."""
    n = g.n
    if n % 2:
        return
    matched = [False] * n
    chosen: list[int] = []

    def rec():
        try:
            u = matched.index(False)
        except ValueError:
            yield tuple(sorted(chosen))
            return
        matched[u] = True
        for w in g.adjacency[u]:
            if not matched[w]:
                matched[w] = True
                chosen.append(g.edge_id(u, w))
                yield from rec()
                chosen.pop()
                matched[w] = False
        matched[u] = False

    yield from rec()


_NEG = -(10**6)


def _weight_matrix(g: Graph, f: EdgeColouring, colour: int) -> np.ndarray:
    w = np.full((g.n, g.n), _NEG, dtype=np.int64)
    for (u, v), c in zip(g.edges, f.colours):
        w[u, v] = w[v, u] = 1 if c == colour else 0
    return w


def max_colour_hamilton_cycle(g: Graph, f: EdgeColouring, colour: int) -> tuple[int, tuple[int, ...]] | None:
    """Held-Karp: Hamilton cycle maximising the number of ``colour`` edges.

    Returns ``(count, vertex sequence from 0)`` or ``None`` if ``g`` is not
    Hamiltonian.  Layers of equal popcount are processed with numpy.
    """
    n = g.n
    if n < 3:
        return None
    W = _weight_matrix(g, f, colour)
    size = 1 << n
    dp = np.full((size, n), _NEG, dtype=np.int64)
    for w in range(1, n):
        if W[0, w] > _NEG:
            dp[1 | 1 << w, w] = W[0, w]
    masks = np.arange(size, dtype=np.int64)
    pop = np.array([bin(x).count("1") for x in range(size)])
    has0 = (masks & 1) == 1
    for p in range(3, n + 1):
        layer = masks[has0 & (pop == p)]
        for w in range(1, n):
            sel = layer[(layer >> w) & 1 == 1]
            prev = sel ^ (1 << w)
            vals = dp[prev] + W[:, w][None, :]
            dp[sel, w] = np.maximum(vals.max(axis=1), _NEG)
    full = size - 1
    closing = dp[full] + W[:, 0]
    closing[0] = _NEG
    best = int(closing.max())
    if best < 0:
        return None
    end = int(np.argmax(closing))
    seq = [end]
    mask, w = full, end
    while mask != (1 | 1 << w):
        prev_mask = mask ^ (1 << w)
        cand = dp[prev_mask] + W[:, w]
        v = int(np.flatnonzero(cand == dp[mask, w])[0])
        seq.append(v)
        mask, w = prev_mask, v
    seq.append(0)
    seq.reverse()
    return best, tuple(seq)


def max_colour_perfect_matching(g: Graph, f: EdgeColouring, colour: int) -> tuple[int, tuple[int, ...]] | None:
    """Perfect matching maximising the number of ``colour`` edges (bitmask DP)."""
    n = g.n
    if n % 2:
        return None
    col = f.colours
    nbr = [[(w, g.edge_id(u, w)) for w in g.adjacency[u]] for u in range(n)]
    memo: dict[int, tuple[int, int, int]] = {}

    def best(mask: int) -> int:
        # mask is the set of unmatched vertices
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask][0]
        u = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << u)
        top, arg = _NEG, -1
        for w, e in nbr[u]:
            if rest >> w & 1:
                val = best(rest ^ (1 << w))
                if val <= _NEG // 2:
                    continue
                val += 1 if col[e] == colour else 0
                if val > top:
                    top, arg = val, e
        memo[mask] = (top, arg, 0)
        return top

    total = best((1 << n) - 1)
    if total < 0:
        return None
    out = []
    mask = (1 << n) - 1
    while mask:
        e = memo[mask][1]
        out.append(e)
        u, w = g.edges[e]
        mask &= ~(1 << u) & ~(1 << w)
    return total, tuple(sorted(out))


def subgraph_family_discrepancy(
    g: Graph,
    f: EdgeColouring,
    family: str,
    cap: int | None = None,
) -> DiscrepancyReport:
    """Maximum of ``D_f`` over all Hamilton cycles or all perfect matchings of ``g``."""
    f.check(g)
    if family == "hamilton-cycle":
        cap = 12 if cap is None else cap
        if g.n > cap:
            raise SizeLimitError(f"n={g.n} exceeds Hamilton search cap {cap}")
        size = g.n
        solver = max_colour_hamilton_cycle
    elif family == "perfect-matching":
        cap = 16 if cap is None else cap
        if g.n > cap:
            raise SizeLimitError(f"n={g.n} exceeds matching search cap {cap}")
        size = g.n // 2
        solver = max_colour_perfect_matching
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES[1:]}")
    best = None
    for colour in range(1, f.r + 1):
        res = solver(g, f, colour)
        if res is None:
            raise EmptyFamilyError(f"graph has no {family.replace('-', ' ')}")
        if best is None or res[0] > best[0]:
            best = (res[0], colour, res[1])
    count, colour, wit = best
    edges = cycle_edges(g, wit) if family == "hamilton-cycle" else wit
    counts = _counts(f, edges)
    assert counts[colour - 1] == count and max(counts) == count
    return DiscrepancyReport(f.r * count - size, family, edges, None, counts, {"colour": colour})
