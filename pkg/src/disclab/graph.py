"""Core graph representation and structural primitives.

Vertices are ``0..n-1``; colours are ``1..r`` (colour 0 is never a valid
colour).  Every edge is stored once as ``(u, v)`` with ``u < v`` and keeps the
index at which it was supplied, so edge colourings are plain tuples indexed by
edge order.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    InvalidColouringError,
    InvalidGraphError,
    RegularityError,
    SizeLimitError,
)

log = logging.getLogger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with stable edge indices."""

    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)
    _nbr_mask: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise InvalidGraphError(f"vertex count must be nonnegative, got {n}")
        norm: list[Edge] = []
        index: dict[Edge, int] = {}
        for pos, e in enumerate(edges):
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u} (edge {pos})")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge {pos} = {(u, v)} out of range for n={n}")
            if u > v:
                u, v = v, u
            if (u, v) in index:
                raise InvalidGraphError(f"duplicate edge {(u, v)} (edge {pos})")
            index[(u, v)] = len(norm)
            norm.append((u, v))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_nbr_mask", tuple(sum(1 << w for w in a) for a in adj)
        )

    # -- basic queries -------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._index

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge ``{u, v}``; raises ``KeyError`` if absent."""
        return self._index[(min(u, v), max(u, v))]

    def neighbour_mask(self, v: int) -> int:
        return self._nbr_mask[v]

    @property
    def neighbour_masks(self) -> tuple[int, ...]:
        return self._nbr_mask

    # -- derived graphs ------------------------------------------------
    def with_edges(self, extra: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.n, list(self.edges) + [tuple(e) for e in extra])

    def relabel_edges(self, order: Sequence[int]) -> "Graph":
        """Same edge set listed in the order ``edges[order[0]], edges[order[1]], ...``."""
        return Graph(self.n, [self.edges[i] for i in order])

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``vertices`` relabelled to ``0..k-1``; also returns the old labels."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        sub = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(keep), sub), keep

    # -- connectivity --------------------------------------------------
    def components(self, removed: int = 0) -> list[int]:
        """Connected components of ``G - removed`` as vertex bitmasks, ordered by minimum vertex."""
        remaining = ((1 << self.n) - 1) & ~removed
        nbr = self._nbr_mask
        comps = []
        while remaining:
            low = remaining & -remaining
            comp = low
            frontier = low
            while frontier:
                grow = 0
                f = frontier
                while f:
                    b = f & -f
                    grow |= nbr[b.bit_length() - 1]
                    f ^= b
                frontier = grow & remaining & ~comp
                comp |= frontier
            comps.append(comp)
            remaining &= ~comp
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1


def complete_graph_edges(n: int) -> list[Edge]:
    return list(itertools.combinations(range(n), 2))


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_to_set(x: int) -> frozenset[int]:
    out = []
    while x:
        b = x & -x
        out.append(b.bit_length() - 1)
        x ^= b
    return frozenset(out)


def set_to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# Edge colourings and colour components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeColouring:
    """Total map from edge index to a colour in ``1..r``."""

    r: int
    colours: tuple[int, ...]

    def __init__(self, r: int, colours: Iterable[int]):
        cols = tuple(int(c) for c in colours)
        if r < 2:
            raise InvalidColouringError(f"need at least 2 colours, got r={r}")
        for i, c in enumerate(cols):
            if not 1 <= c <= r:
                raise InvalidColouringError(f"edge {i} has colour {c}, outside 1..{r}")
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "colours", cols)

    def __len__(self) -> int:
        return len(self.colours)

    def __getitem__(self, edge: int) -> int:
        return self.colours[edge]

    def check(self, g: Graph) -> None:
        if len(self.colours) != g.m:
            raise InvalidColouringError(
                f"colouring covers {len(self.colours)} edges, graph has {g.m}"
            )

    def class_edges(self, colour: int) -> list[int]:
        return [i for i, c in enumerate(self.colours) if c == colour]

    def class_sizes(self) -> list[int]:
        sizes = [0] * (self.r + 1)
        for c in self.colours:
            sizes[c] += 1
        return sizes[1:]

    def permuted(self, perm: Sequence[int]) -> "EdgeColouring":
        """Apply the colour permutation ``c -> perm[c-1]``."""
        return EdgeColouring(self.r, [perm[c - 1] for c in self.colours])

    def canonical(self) -> "EdgeColouring":
        """Relabel colours in order of first appearance."""
        relabel: dict[int, int] = {}
        out = []
        for c in self.colours:
            if c not in relabel:
                relabel[c] = len(relabel) + 1
            out.append(relabel[c])
        return EdgeColouring(self.r, out)


class UnionFind:
    __slots__ = ("parent", "size", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True


@dataclass(frozen=True)
class ColourComponents:
    """Colour-``i`` components for each colour ``i``.

    ``components[i-1]`` lists the components of colour ``i`` as frozensets,
    ordered by their minimum vertex; ``component_of[i-1][v]`` is the position
    of ``v``'s component in that list.
    """

    r: int
    n: int
    components: tuple[tuple[frozenset[int], ...], ...]
    component_of: tuple[tuple[int, ...], ...]

    def count(self, colour: int) -> int:
        return len(self.components[colour - 1])

    @property
    def counts(self) -> list[int]:
        return [len(c) for c in self.components]

    def forest_size(self, colour: int) -> int:
        """Edges in a maximum forest of colour ``colour``: ``n - c_i``."""
        return self.n - self.count(colour)


def colour_components(g: Graph, f: EdgeColouring) -> ColourComponents:
    f.check(g)
    ufs = [UnionFind(g.n) for _ in range(f.r)]
    for (u, v), c in zip(g.edges, f.colours):
        ufs[c - 1].union(u, v)
    comps = []
    comp_of = []
    for uf in ufs:
        groups: dict[int, list[int]] = {}
        for v in range(g.n):
            groups.setdefault(uf.find(v), []).append(v)
        # vertices are visited in order, so dict order is by minimum vertex
        ordered = [frozenset(vs) for vs in groups.values()]
        label = [0] * g.n
        for idx, comp in enumerate(ordered):
            for v in comp:
                label[v] = idx
        comps.append(tuple(ordered))
        comp_of.append(tuple(label))
    return ColourComponents(f.r, g.n, tuple(comps), tuple(comp_of))


def colour_ranks(g: Graph, f: EdgeColouring) -> list[int]:
    """``n - c_i`` for every colour, without materialising the components."""
    ufs = [UnionFind(g.n) for _ in range(f.r)]
    for (u, v), c in zip(g.edges, f.colours):
        ufs[c - 1].union(u, v)
    return [g.n - uf.count for uf in ufs]


# ---------------------------------------------------------------------------
# Vertex connectivity (Menger, unit-capacity max-flow)
# ---------------------------------------------------------------------------


def local_vertex_connectivity(g: Graph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of internally vertex-disjoint ``s``-``t`` paths (``s``, ``t`` non-adjacent).

    Vertex ``v`` is split into ``2v`` (in) and ``2v+1`` (out) joined by a
    unit-capacity arc; augmenting paths are found by BFS.  Stops early once
    ``limit`` paths are found.
    """
    if g.has_edge(s, t):
        raise ValueError("local connectivity is defined for non-adjacent pairs")
    n = g.n
    cap: dict[tuple[int, int], int] = {}
    out: list[list[int]] = [[] for _ in range(2 * n)]

    def add(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            out[a].append(b)
            out[b].append(a)
            cap[(a, b)] = 0
            cap.setdefault((b, a), 0)
        cap[(a, b)] += c

    big = n
    for v in range(n):
        add(2 * v, 2 * v + 1, big if v in (s, t) else 1)
    for u, v in g.edges:
        add(2 * u + 1, 2 * v, 1)
        add(2 * v + 1, 2 * u, 1)
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while limit is None or flow < limit:
        prev = {source: -1}
        queue = deque([source])
        while queue and sink not in prev:
            a = queue.popleft()
            for b in out[a]:
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    queue.append(b)
        if sink not in prev:
            break
        b = sink
        while prev[b] != -1:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return flow


def vertex_connectivity(g: Graph) -> int:
    """Exact vertex connectivity; ``K_n`` gives ``n - 1`` and disconnected graphs give 0."""
    n = g.n
    if n <= 1:
        return 0
    if not g.is_connected():
        return 0
    best = n - 1
    if g.m == n * (n - 1) // 2:
        return best
    best = min(best, g.min_degree)
    # some vertex among the first kappa+1 lies outside a minimum cut, and a
    # vertex it is separated from has a larger index
    i = 0
    while i <= best and i < n:
        for j in range(i + 1, n):
            if not g.has_edge(i, j):
                best = min(best, local_vertex_connectivity(g, i, j, limit=best))
        i += 1
    return best


# ---------------------------------------------------------------------------
# Isoperimetry and beta-graphs
# ---------------------------------------------------------------------------


class IsoperimetricResult(NamedTuple):
    value: Fraction
    witness: frozenset[int]


def isoperimetric_constant(g: Graph, cap: int = 20) -> IsoperimetricResult:
    """Exact vertex isoperimetric constant ``min |N(U)|/|U|`` over ``0 < |U| <= n/2``.

    On a disconnected graph the literal minimum is returned (0 whenever a
    component has at most ``n/2`` vertices) and a warning is logged.
    """
    n = g.n
    if n < 2:
        raise InvalidGraphError("isoperimetric constant needs at least 2 vertices")
    if n > cap:
        raise SizeLimitError(
            f"n={n} exceeds brute-force cap {cap}; use separation_lower_bounds "
            "with an externally supplied iota or raise the cap"
        )
    if not g.is_connected():
        log.warning("isoperimetric constant of a disconnected graph requested")
    nbr = g.neighbour_masks
    half = n // 2
    best_num, best_den, best_mask = n, 1, 0

    # DFS over subsets in increasing-vertex order, carrying the neighbour union
    stack: list[tuple[int, int, int, int]] = [(0, 0, 0, 0)]  # (next vertex, mask, union, size)
    while stack:
        start, mask, union, size = stack.pop()
        if size:
            boundary = popcount(union & ~mask)
            if boundary * best_den < best_num * size or (
                boundary * best_den == best_num * size and best_mask == 0
            ):
                best_num, best_den, best_mask = boundary, size, mask
        if size == half:
            continue
        for v in range(n - 1, start - 1, -1):
            stack.append((v + 1, mask | (1 << v), union | nbr[v], size + 1))
    return IsoperimetricResult(Fraction(best_num, best_den), mask_to_set(best_mask))


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


class BetaResult(NamedTuple):
    holds: bool
    witness: tuple[frozenset[int], frozenset[int]] | None


def is_beta_graph(g: Graph, beta, cap: int = 16) -> BetaResult:
    """Decide whether every two disjoint ``ceil(beta*n)``-sets span an edge."""
    n = g.n
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds beta-graph brute-force cap {cap}")
    b = _as_fraction(beta)
    if b <= 0:
        raise ValueError("beta must be positive")
    s = max(1, math.ceil(b * n))
    if 2 * s > n:
        return BetaResult(True, None)
    nbr = g.neighbour_masks
    full = (1 << n) - 1
    for U in itertools.combinations(range(n), s):
        umask = set_to_mask(U)
        union = 0
        for v in U:
            union |= nbr[v]
        free = full & ~umask & ~union
        if popcount(free) >= s:
            W = sorted(mask_to_set(free))[:s]
            return BetaResult(False, (frozenset(U), frozenset(W)))
    return BetaResult(True, None)


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a


def second_adjacency_eigenvalue(
    g: Graph, max_iter: int = 200_000, tol: float = 1e-10, seed: int = 0
) -> float:
    """Second largest adjacency eigenvalue of a regular graph by deflated power iteration.

    Iterates ``A + dI`` (positive semidefinite) on the complement of the
    all-ones vector and returns the Rayleigh quotient once the residual drops
    below ``tol``.
    """
    degs = set(g.degrees)
    if len(degs) != 1:
        raise RegularityError(f"graph is not regular (degrees {sorted(degs)})")
    d = degs.pop()
    n = g.n
    if n < 2:
        raise RegularityError("need at least two vertices")
    a = adjacency_matrix(g)
    shifted = a + d * np.eye(n)
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.standard_normal(n)
    ones = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        x -= ones * (ones @ x)
        x /= np.linalg.norm(x)
        y = shifted @ x
        lam = float(x @ y)
        resid = np.linalg.norm(y - lam * x)
        if resid < tol:
            break
        x = y
    return lam - d


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_DOT_PALETTE = ["red", "blue", "green", "orange", "purple", "brown", "cyan", "magenta"]


def to_dot(g: Graph, f: EdgeColouring | None = None, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        lines.append(f"  {v};")
    for i, (u, v) in enumerate(g.edges):
        if f is None:
            lines.append(f"  {u} -- {v};")
        else:
            c = f.colours[i]
            colour = _DOT_PALETTE[(c - 1) % len(_DOT_PALETTE)]
            lines.append(f'  {u} -- {v} [color="{colour}", label="{c}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def layered_separator(g: Graph, layers, r: int):
    """See :func:`disclab.separation.layered_separator` (re-exported here)."""
    from .separation import layered_separator as _impl

    return _impl(g, layers, r)
