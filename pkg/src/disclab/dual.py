"""Dual multi-hypergraph of a coloured graph and the separator extraction pipeline.

For an r-colouring ``f`` of ``G`` the dual ``H`` has one vertex per colour
component (part ``i`` holds the colour-``i`` components) and one hyperedge
``(C_1(v), ..., C_r(v))`` per vertex ``v`` of ``G``.  Hyperedge ``v`` of ``H``
is always identified with vertex ``v`` of ``G``.

The pipeline trims leaves (``H0``), deletes the hyperedges that stop ``H0``
from being a union of loose paths and cycles (``H1``), distributes hyperedges
into buckets ``E_1..E_r`` and a remainder ``F`` while walking those paths and
cycles, and finally reads off a balanced separation ``V_i = E_i``, ``S = F``.
Every counting bound the construction relies on is checked as it runs;
a failure raises :class:`TheoryViolationError` with the partial trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .discrepancy import tree_discrepancy_of_colouring
from .errors import PreconditionError, TheoryViolationError
from .graph import EdgeColouring, Graph, UnionFind, colour_components, vertex_connectivity
from .separation import BalancedSeparation, is_balanced_separation


@dataclass(frozen=True)
class DualHypergraph:
    r: int
    n: int
    colour: tuple[int, ...]  # colour (part) of each H-vertex
    members: tuple[frozenset[int], ...]  # G-vertices of each H-vertex
    hyperedges: tuple[tuple[int, ...], ...]  # hyperedge v -> H-vertex per colour

    @property
    def num_vertices(self) -> int:
        return len(self.colour)

    def degree(self, x: int) -> int:
        return len(self.members[x])

    def part(self, i: int) -> list[int]:
        return [x for x, c in enumerate(self.colour) if c == i]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "vertices": [
                {"id": x, "colour": c, "members": sorted(self.members[x])}
                for x, c in enumerate(self.colour)
            ],
            "hyperedges": [list(e) for e in self.hyperedges],
        }


def build_dual(g: Graph, f: EdgeColouring) -> DualHypergraph:
    """H-vertices are numbered part by part, each part ordered by minimum member."""
    cc = colour_components(g, f)
    colour, members = [], []
    offset = []
    for i in range(f.r):
        offset.append(len(colour))
        for comp in cc.components[i]:
            colour.append(i + 1)
            members.append(comp)
    hyperedges = tuple(
        tuple(offset[i] + cc.component_of[i][v] for i in range(f.r)) for v in range(g.n)
    )
    return DualHypergraph(f.r, g.n, tuple(colour), tuple(members), hyperedges)


def dual_is_connected(h: DualHypergraph) -> bool:
    if h.num_vertices == 0:
        return True
    uf = UnionFind(h.num_vertices)
    for e in h.hyperedges:
        for x in e[1:]:
            uf.union(e[0], x)
    return uf.count == 1


def check_dual_invariants(h: DualHypergraph) -> list[str]:
    problems = []
    if len(h.hyperedges) != h.n:
        problems.append(f"|E(H)| = {len(h.hyperedges)} != n = {h.n}")
    deg = [0] * h.num_vertices
    for v, e in enumerate(h.hyperedges):
        if [h.colour[x] for x in e] != list(range(1, h.r + 1)):
            problems.append(f"hyperedge {v} does not meet each part once")
        for x in e:
            deg[x] += 1
            if v not in h.members[x]:
                problems.append(f"hyperedge {v} uses component {x} not containing {v}")
    for x in range(h.num_vertices):
        if deg[x] != len(h.members[x]):
            problems.append(f"d_H({x}) = {deg[x]} but |C| = {len(h.members[x])}")
    return problems


# ---------------------------------------------------------------------------
# Trimming
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrimmedDual:
    h: DualHypergraph
    leaves: frozenset[int]  # hyperedges of H that are leaves
    hub_of_leaf: dict  # leaf -> its unique H-vertex of degree >= 2
    vertices: tuple[int, ...]  # V(H0)
    hyperedges: tuple[int, ...]  # E(H0), as hyperedge ids
    degree0: dict  # H0-degree of every H0 vertex
    leaf_sets: dict  # X -> sorted list of leaves L(X)

    @property
    def degenerate(self) -> bool:
        """``H0`` has no hyperedges (some colour class is a connected spanning subgraph)."""
        return not self.hyperedges

    def leaves_of_colour(self, i: int) -> list[int]:
        return sorted(e for e in self.leaves if self.h.colour[self.hub_of_leaf[e]] == i)


def trim_to_H0(h: DualHypergraph) -> TrimmedDual:
    """Delete every leaf of ``H`` together with its degree-1 vertices (single pass)."""
    high = [h.degree(x) >= 2 for x in range(h.num_vertices)]
    leaves, hub = set(), {}
    for v, e in enumerate(h.hyperedges):
        hs = [x for x in e if high[x]]
        if len(hs) == 1:
            leaves.add(v)
            hub[v] = hs[0]
    removed = set()
    for v in leaves:
        for x in h.hyperedges[v]:
            if not high[x]:
                removed.add(x)
    vertices = tuple(x for x in range(h.num_vertices) if x not in removed)
    edges0 = tuple(v for v in range(h.n) if v not in leaves)
    deg0 = {x: 0 for x in vertices}
    for v in edges0:
        for x in h.hyperedges[v]:
            deg0[x] += 1
    leaf_sets: dict[int, list[int]] = {}
    for v in sorted(leaves):
        leaf_sets.setdefault(hub[v], []).append(v)
    return TrimmedDual(h, frozenset(leaves), hub, vertices, edges0, deg0, leaf_sets)


def h0_is_connected(t: TrimmedDual) -> bool:
    if not t.vertices:
        return True
    index = {x: i for i, x in enumerate(t.vertices)}
    uf = UnionFind(len(t.vertices))
    for v in t.hyperedges:
        e = t.h.hyperedges[v]
        for x in e[1:]:
            uf.union(index[e[0]], index[x])
    return uf.count == 1


def check_two_high_degree(t: TrimmedDual) -> list[int]:
    """Hyperedges of ``H0`` with fewer than two vertices of ``H0``-degree >= 2."""
    bad = []
    for v in t.hyperedges:
        if sum(1 for x in t.h.hyperedges[v] if t.degree0[x] >= 2) < 2:
            bad.append(v)
    return bad


def check_leaf_hub_degree(t: TrimmedDual) -> list[int]:
    """Vertices ``X`` with ``L(X)`` nonempty and ``H0``-degree below 3."""
    return sorted(x for x in t.leaf_sets if t.degree0[x] < 3)


def check_leaf_balance(t: TrimmedDual, d: int) -> list[int]:
    """Colours ``i`` with ``r|L_i| > n + d``."""
    h = t.h
    return [i for i in range(1, h.r + 1) if h.r * len(t.leaves_of_colour(i)) > h.n + d]


# ---------------------------------------------------------------------------
# Cleaning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cleaning:
    many_high: tuple[int, ...]  # hyperedges with more than 2 vertices of H0-degree >= 2
    high_degree: tuple[int, ...]  # hyperedges touching a vertex of H0-degree >= 3
    deleted: tuple[int, ...]
    hyperedges: tuple[int, ...]  # E(H1)
    degree1: dict


def clean_to_H1(t: TrimmedDual, d: int, check: bool = True) -> Cleaning:
    """Drop hyperedges until every degree is at most 2 and the rest form loose paths/cycles."""
    h = t.h
    many_high, high_degree = [], []
    for v in t.hyperedges:
        e = h.hyperedges[v]
        if sum(1 for x in e if t.degree0[x] >= 2) > 2:
            many_high.append(v)
        if any(t.degree0[x] >= 3 for x in e):
            high_degree.append(v)
    deleted = sorted(set(many_high) | set(high_degree))
    kept = tuple(v for v in t.hyperedges if v not in set(deleted))
    deg1 = {x: 0 for x in t.vertices}
    for v in kept:
        for x in h.hyperedges[v]:
            deg1[x] += 1
    res = Cleaning(tuple(many_high), tuple(high_degree), tuple(deleted), kept, deg1)
    if check:
        counts = {"many_high": len(many_high), "high_degree": len(high_degree),
                  "deleted": len(deleted), "d": d}
        if len(many_high) > 2 * d or len(high_degree) > 6 * d or len(deleted) > 8 * d:
            raise TheoryViolationError(
                f"cleaning deleted {len(deleted)} hyperedges, more than 8d = {8 * d}", counts
            )
        if any(deg1[x] > 2 for x in t.vertices):
            raise TheoryViolationError("H1 has a vertex of degree > 2", counts)
        if any(deg1[x] for x in t.vertices if t.degree0[x] >= 3):
            raise TheoryViolationError("a vertex of H0-degree >= 3 survives in H1", counts)
        for v in kept:
            if sum(1 for x in h.hyperedges[v] if deg1[x] == 1) < h.r - 2:
                raise TheoryViolationError(
                    f"hyperedge {v} of H1 has fewer than r-2 degree-1 vertices", counts
                )
    return res


# ---------------------------------------------------------------------------
# Loose path / cycle decomposition
# ---------------------------------------------------------------------------


@dataclass
class Piece:
    """A loose path or cycle (or isolated vertex) with an interval ordering."""

    order: list[int]
    hyperedges: list[int]
    cyclic: bool


def decompose(h: DualHypergraph, vertices: Sequence[int], hyperedges: Sequence[int]) -> list[Piece]:
    """Split a max-degree-2 hypergraph into loose paths/cycles with interval orderings.

    Pieces are sorted by the smallest G-vertex inside their H-vertices.
    """
    vset = list(vertices)
    index = {x: i for i, x in enumerate(vset)}
    uf = UnionFind(len(vset))
    deg = {x: 0 for x in vset}
    incident: dict[int, list[int]] = {x: [] for x in vset}
    for v in hyperedges:
        e = h.hyperedges[v]
        for x in e:
            deg[x] += 1
            incident[x].append(v)
        for x in e[1:]:
            uf.union(index[e[0]], index[x])
    groups: dict[int, list[int]] = {}
    for x in vset:
        groups.setdefault(uf.find(index[x]), []).append(x)
    edges_of: dict[int, list[int]] = {}
    for v in hyperedges:
        edges_of.setdefault(uf.find(index[h.hyperedges[v][0]]), []).append(v)

    pieces = []
    for root, xs in groups.items():
        es = sorted(edges_of.get(root, []))
        if not es:
            pieces.append(Piece([xs[0]], [], False))
            continue
        junctions = {v: sorted(x for x in h.hyperedges[v] if deg[x] == 2) for v in es}
        private = {v: sorted(x for x in h.hyperedges[v] if deg[x] == 1) for v in es}
        ends = [v for v in es if len(junctions[v]) <= 1]
        if ends:
            cyclic = False
            start = min(ends, key=lambda v: (min(min(h.members[x]) for x in h.hyperedges[v]), v))
            out = junctions[start][0] if junctions[start] else None
        else:
            cyclic = True
            start = min(es, key=lambda v: (min(min(h.members[x]) for x in h.hyperedges[v]), v))
            out = junctions[start][0]
        order: list[int] = []
        walk: list[int] = []
        cur, jin = start, None
        while True:
            walk.append(cur)
            order.extend(private[cur])
            nxt_j = [x for x in junctions[cur] if x != jin]
            if cur == start and cyclic:
                nxt_j = [out]
            if not nxt_j:
                break
            j = nxt_j[0]
            order.append(j)
            other = [v for v in incident[j] if v != cur]
            if len(other) != 1:
                raise TheoryViolationError("junction vertex without a second hyperedge", {"vertex": j})
            nxt = other[0]
            if cyclic and nxt == start:
                break
            cur, jin = nxt, j
        if sorted(walk) != es or sorted(order) != sorted(xs):
            raise TheoryViolationError(
                "component of H2 is not a loose path or cycle",
                {"hyperedges": es, "vertices": sorted(xs), "walk": walk, "order": order},
            )
        pieces.append(Piece(order, walk, cyclic))

    def key(p: Piece):
        return min(min(h.members[x]) for x in p.order)

    pieces.sort(key=key)
    for p in pieces:
        _check_intervals(h, p)
    return pieces


def _check_intervals(h: DualHypergraph, p: Piece) -> None:
    pos = {x: i for i, x in enumerate(p.order)}
    t = len(p.order)
    for v in p.hyperedges:
        ps = sorted(pos[x] for x in h.hyperedges[v])
        span = ps[-1] - ps[0] + 1
        ok = span == len(ps)
        if not ok and p.cyclic:
            # cyclic interval: the complement of the gap is contiguous
            gaps = [b - a for a, b in zip(ps, ps[1:])]
            ok = sum(1 for gp in gaps if gp > 1) == 1 and (t - 1 - ps[-1]) + ps[0] == 0
        if not ok:
            raise TheoryViolationError(
                f"hyperedge {v} is not an interval of its piece", {"order": p.order}
            )


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------


@dataclass
class ExtractionTrace:
    n: int
    r: int
    kappa: int
    discrepancy: int
    d_used: int
    degenerate: bool = False
    checks: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    hypergraph: dict = field(default_factory=dict)
    h0_hyperedges: list = field(default_factory=list)
    leaf_sets: dict = field(default_factory=dict)
    cleaning: dict = field(default_factory=dict)
    heavy: list = field(default_factory=list)
    touching_heavy: list = field(default_factory=list)
    pieces: list = field(default_factory=list)
    cuts: list = field(default_factory=list)
    buckets_before_rebalance: list = field(default_factory=list)
    buckets: list = field(default_factory=list)
    remainder: list = field(default_factory=list)
    separation: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _ceil_sqrt(x: int) -> int:
    s = math.isqrt(x)
    return s if s * s == x else s + 1


def _violation(msg: str, trace: ExtractionTrace) -> TheoryViolationError:
    return TheoryViolationError(msg, trace.to_json())


def extract_separator(
    g: Graph, f: EdgeColouring, check: bool = True
) -> tuple[BalancedSeparation, ExtractionTrace]:
    """Balanced r-separation read off the dual hypergraph of ``(g, f)``.

    ``d`` is the exact spanning-tree discrepancy of ``f``; when ``g`` is only
    2-connected it is raised to ``ceil(sqrt(rn))``.  Requires ``g`` to be
    2-connected and ``n >= r``.
    """
    r, n = f.r, g.n
    f.check(g)
    if n < max(r, 3):
        raise PreconditionError(f"need n >= max(r, 3), got n={n}")
    if not g.is_connected():
        raise PreconditionError("graph is disconnected")
    kappa = vertex_connectivity(g)
    if kappa < 2:
        raise PreconditionError(f"graph must be 2-connected (kappa = {kappa})")
    three = kappa >= 3
    disc = tree_discrepancy_of_colouring(g, f, witness=False).value
    d = disc if three else max(disc, _ceil_sqrt(r * n))
    trace = ExtractionTrace(n, r, kappa, disc, d)

    h = build_dual(g, f)
    trace.hypergraph = h.to_json()
    part_sizes = [len(h.part(i)) for i in range(1, r + 1)]
    trace.counts["part_sizes"] = part_sizes
    problems = check_dual_invariants(h)
    connected = dual_is_connected(h)
    trace.checks["dual_invariants"] = {"holds": not problems, "problems": problems}
    trace.checks["dual_connected"] = {"holds": connected}
    if check and (problems or not connected):
        raise _violation("dual hypergraph invariants fail", trace)

    t = trim_to_H0(h)
    trace.degenerate = t.degenerate
    trace.h0_hyperedges = list(t.hyperedges)
    trace.leaf_sets = {str(x): ls for x, ls in sorted(t.leaf_sets.items())}
    if n != len(t.hyperedges) + sum(len(t.leaves_of_colour(i)) for i in range(1, r + 1)):
        raise _violation("leaf bookkeeping does not add up to n", trace)
    trace.checks["h0_connected"] = {"holds": h0_is_connected(t)}
    if check and not trace.checks["h0_connected"]["holds"]:
        raise _violation("H0 is disconnected", trace)

    bad = check_two_high_degree(t)
    trace.checks["two_high_degree"] = {"holds": not bad, "bad": bad}
    if check and bad:
        raise _violation("an H0 hyperedge has fewer than two high-degree vertices", trace)

    guard = three and all(s > 1 for s in part_sizes)
    if guard:
        bad = check_leaf_hub_degree(t)
        trace.checks["leaf_hub_degree"] = {"holds": not bad, "bad": bad}
        if check and bad:
            raise _violation("a leaf hub has H0-degree below 3", trace)
    else:
        reason = "not 3-connected" if not three else "a part has a single vertex"
        trace.checks["leaf_hub_degree"] = {"holds": None, "skipped": reason}

    if t.degenerate:
        trace.checks["leaf_balance"] = {"holds": None, "skipped": "H0 has no hyperedges"}
    else:
        bad = check_leaf_balance(t, d)
        trace.checks["leaf_balance"] = {"holds": not bad, "bad": bad}
        if check and bad:
            raise _violation("leaf counts are unbalanced", trace)

    try:
        cl = clean_to_H1(t, d, check=check)
    except TheoryViolationError as exc:
        trace.cleaning = exc.trace
        raise _violation(str(exc), trace) from exc
    trace.cleaning = {
        "many_high": list(cl.many_high),
        "high_degree": list(cl.high_degree),
        "deleted": list(cl.deleted),
        "bound": 8 * d,
    }
    trace.checks["cleaning_bound"] = {"holds": len(cl.deleted) <= 8 * d}

    buckets: list[list[int]] = [[] for _ in range(r)]
    F: list[int] = list(cl.deleted)

    heavy = sorted(x for x in t.vertices if r * len(t.leaf_sets.get(x, ())) > d)
    heavy_set = set(heavy)
    trace.heavy = heavy
    for x in heavy:
        buckets[h.colour[x] - 1].extend(t.leaf_sets.get(x, ()))
    if not t.degenerate:
        over = [i + 1 for i in range(r) if r * len(buckets[i]) > n + d]
        trace.checks["heavy_leaf_buckets"] = {"holds": not over, "bad": over}
        if check and over:
            raise _violation("heavy-vertex leaves overflow a bucket", trace)

    touching = [v for v in cl.hyperedges if any(x in heavy_set for x in h.hyperedges[v])]
    F.extend(touching)
    trace.touching_heavy = touching
    ok = len(touching) <= 2 * len(heavy) and (not guard or not touching)
    trace.checks["heavy_touching"] = {"holds": ok, "count": len(touching)}
    if check and not ok:
        raise _violation("too many H1 hyperedges touch heavy vertices", trace)

    touching_set = set(touching)
    h2_vertices = [x for x in t.vertices if x not in heavy_set]
    h2_edges = [v for v in cl.hyperedges if v not in touching_set]
    pieces = decompose(h, h2_vertices, h2_edges)
    trace.pieces = [{"order": p.order, "hyperedges": p.hyperedges, "cyclic": p.cyclic} for p in pieces]

    cap = n + d + 2 * r  # r * (n + d) / r + 2, scaled by r
    cut_total = 0
    for piece in pieces:
        order, hedges = piece.order, piece.hyperedges
        while order:
            pos = {x: q for q, x in enumerate(order)}
            hi = {v: max(pos[x] for x in h.hyperedges[v]) for v in hedges}
            lo = {v: min(pos[x] for x in h.hyperedges[v]) for v in hedges}
            cand = [i for i in range(r) if r * len(buckets[i]) <= n]
            if not cand:
                raise _violation("every bucket is saturated", trace)
            i = cand[0]
            # cumulative size of E({X_1..X_j}) plus the leaves of X_1..X_j
            t_len = len(order)
            closing = [0] * t_len
            for v in hedges:
                closing[hi[v]] += 1
            j, total, best_j, best_total = 0, 0, -1, 0
            for q in range(t_len):
                total += closing[q] + len(t.leaf_sets.get(order[q], ()))
                if r * (len(buckets[i]) + total) <= cap:
                    best_j, best_total = q, total
                else:
                    break
            if best_j < 0:
                raise _violation("no prefix of a piece fits into an unsaturated bucket", trace)
            j = best_j
            taken_edges = [v for v in hedges if hi[v] <= j]
            for q in range(j + 1):
                buckets[i].extend(t.leaf_sets.get(order[q], ()))
            buckets[i].extend(taken_edges)
            if j == t_len - 1:
                break
            if check and r * len(buckets[i]) <= n:
                raise _violation("bucket left unsaturated after a cut", trace)
            crossing = [v for v in hedges if lo[v] <= j < hi[v]]
            if check and len(crossing) > 2:
                raise _violation("a cut crosses more than two hyperedges", trace)
            F.extend(crossing)
            cut_total += len(crossing)
            trace.cuts.append({"bucket": i + 1, "prefix": j + 1, "crossing": crossing})
            order = order[j + 1:]
            hedges = [v for v in hedges if lo[v] > j]
    ok = cut_total <= 2 * r
    trace.checks["cut_bound"] = {"holds": ok, "count": cut_total}
    if check and not ok:
        raise _violation("cuts moved more than 2r hyperedges", trace)

    assigned = sorted(F + [v for b in buckets for v in b])
    if assigned != list(range(n)):
        raise _violation("buckets and F do not partition E(H)", trace)
    if not t.degenerate:
        over = [i + 1 for i in range(r) if r * len(buckets[i]) > cap]
        trace.checks["bucket_caps"] = {"holds": not over, "bad": over}
        if check and over:
            raise _violation("a bucket exceeds (n+d)/r + 2", trace)
    else:
        trace.checks["bucket_caps"] = {"holds": None, "skipped": "H0 has no hyperedges"}
    seen_in = {}
    clash = []
    for i, b in enumerate(buckets):
        for v in b:
            for x in h.hyperedges[v]:
                if seen_in.setdefault(x, i) != i:
                    clash.append(v)
    trace.checks["buckets_disjoint"] = {"holds": not clash}
    if clash:
        raise _violation("hyperedges in different buckets intersect", trace)

    trace.buckets_before_rebalance = [len(b) for b in buckets]
    trace.counts["F_before_rebalance"] = len(F)
    size = min(len(b) for b in buckets)
    for i in sorted(range(r), key=lambda i: (-len(buckets[i]), i)):
        b = sorted(buckets[i])
        F.extend(b[size:])
        buckets[i] = b[:size]
    trace.buckets = [sorted(b) for b in buckets]
    trace.remainder = sorted(F)

    sep = BalancedSeparation(r, tuple(frozenset(b) for b in buckets), frozenset(F))
    valid, problems = is_balanced_separation(g, sep)
    trace.separation = {
        "valid": valid,
        "problems": problems,
        "size": sep.size,
        "part_size": size,
        "ratio": sep.size / (r * d + r * r),
    }
    if not valid:
        raise _violation("extracted partition is not a balanced separation", trace)
    return sep, trace
