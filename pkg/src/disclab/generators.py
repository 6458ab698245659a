"""Constructions of the graph families used throughout the library.

Numbering conventions (so edge indices are reproducible):

* grids ``P_k^d``: the point ``(x_1, ..., x_d)`` with ``0 <= x_j < k`` is
  vertex ``sum x_j * k**(d-j)`` (row-major, first coordinate most
  significant); layers are the slices of constant first coordinate;
* hypercubes: vertex ``v`` is the binary vector of ``v``; layer ``i`` holds
  the vertices of Hamming weight ``i``;
* hedgehogs: body vertices first, then spikes grouped by body vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import SamplingError, SpecError
from .graph import EdgeColouring, Graph, complete_graph_edges


def philox(seed: int) -> np.random.Generator:
    """Counter-based generator; independent streams for distinct seeds."""
    return np.random.Generator(np.random.Philox(int(seed)))


# ---------------------------------------------------------------------------
# Elementary families
# ---------------------------------------------------------------------------


def gen_complete(n: int) -> Graph:
    if n < 1:
        raise SpecError("complete graph needs n >= 1")
    return Graph(n, complete_graph_edges(n))


def gen_path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise SpecError("cycle needs n >= 3")
    return Graph(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def gen_star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gen_complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def gen_petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def from_networkx(nxg) -> Graph:
    nodes = sorted(nxg.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    return Graph(len(nodes), sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in nxg.edges()))


@lru_cache(maxsize=None)
def small_connected_graphs(n: int) -> tuple[Graph, ...]:
    """All connected graphs on ``n <= 7`` vertices up to isomorphism (networkx graph atlas)."""
    if not 1 <= n <= 7:
        raise SpecError("the graph atlas covers 1 <= n <= 7")
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    return tuple(
        from_networkx(h)
        for h in graph_atlas_g()
        if h.number_of_nodes() == n and nx.is_connected(h)
    )


# ---------------------------------------------------------------------------
# Hedgehogs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HedgehogSpec:
    r: int
    n: int
    regular_variant: int | None = None  # degree d for the regular hedgehog

    def validate(self) -> None:
        if self.r < 2:
            raise SpecError(f"hedgehog proportion must be >= 2, got r={self.r}")
        if self.regular_variant is None:
            if self.n % self.r:
                raise SpecError(f"r={self.r} does not divide n={self.n}")
            if self.n // self.r < 1:
                raise SpecError("hedgehog body is empty")
        else:
            d = self.regular_variant
            if d < 5:
                raise SpecError(f"regular hedgehog needs d >= 5, got d={d}")
            if self.n % (d + 2):
                raise SpecError(f"d+2={d + 2} does not divide n={self.n}")


def gen_hedgehog(spec: HedgehogSpec, seed: int = 0) -> tuple[Graph, EdgeColouring | None]:
    """Hedgehog graph with its canonical colouring (``None`` for the regular variant).

    Plain variant: body ``0..b-1`` (``b = n/r``) coloured ``r``; spike ``j`` of
    body vertex ``v`` is vertex ``b + v(r-1) + j`` and its edge gets colour
    ``j + 1``.  Regular variant: see :func:`gen_regular_hedgehog`.
    """
    spec.validate()
    if spec.regular_variant is not None:
        return gen_regular_hedgehog(spec.n, spec.regular_variant, seed), None
    r, n = spec.r, spec.n
    b = n // r
    edges = list(complete_graph_edges(b))
    colours = [r] * len(edges)
    for v in range(b):
        for j in range(r - 1):
            edges.append((v, b + v * (r - 1) + j))
            colours.append(j + 1)
    return Graph(n, edges), EdgeColouring(r, colours)


def gen_regular_hedgehog(n: int, d: int, seed: int = 0) -> Graph:
    """``d``-regular hedgehog: ``m = n/(d+2)`` near-cliques with private hubs.

    Block ``i`` uses vertices ``i(d+2) .. i(d+2)+d`` for the clique ``K_{d+1}``
    minus the edge between its first two vertices, and ``i(d+2)+d+1`` for the
    hub, which is joined to both endpoints of the missing edge.  The hubs carry
    a random ``(d-2)``-regular graph drawn with ``seed``.
    """
    HedgehogSpec(2, n, d).validate()
    m = n // (d + 2)
    if m <= d - 2 or (m * (d - 2)) % 2:
        raise SpecError(f"cannot place a {d - 2}-regular graph on {m} hubs")
    edges: list[tuple[int, int]] = []
    hubs = []
    for i in range(m):
        base = i * (d + 2)
        clique = list(range(base, base + d + 1))
        hub = base + d + 1
        hubs.append(hub)
        for u, v in itertools.combinations(clique, 2):
            if (u, v) != (clique[0], clique[1]):
                edges.append((u, v))
        edges.append((clique[0], hub))
        edges.append((clique[1], hub))
    expander = gen_random_regular(m, d - 2, seed)
    for a, b in expander.edges:
        edges.append((hubs[a], hubs[b]))
    return Graph(n, edges)


# ---------------------------------------------------------------------------
# Clique cycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliqueCycleMeta:
    """Where the cycle and the cliques sit inside a clique-cycle graph."""

    r: int
    k: int
    x: tuple[int, ...]
    cycle: tuple[int, ...]  # w_0 .. w_{rk-1}
    cliques: tuple[tuple[int, ...], ...]  # A_0 .. A_{rk-1}, sorted vertex lists
    b: tuple[int, ...]

    def clique_colour(self, i: int) -> int:
        """Colour of the clique ``A_i``: ``t_i + 1`` where ``i = q_i r + t_i``."""
        return i % self.r + 1


def check_sequence_params(r: int, k: int, x: Sequence[int]) -> None:
    if r < 2:
        raise SpecError(f"need r >= 2, got {r}")
    if len(x) != r:
        raise SpecError(f"x must have length r={r}, got {len(x)}")
    if any(v < 0 for v in x) or any(b <= a for a, b in zip(x, x[1:])):
        raise SpecError(f"x must be strictly increasing and nonnegative, got {tuple(x)}")
    if k <= x[-1]:
        raise SpecError(f"need k > x_r, got k={k}, x_r={x[-1]}")
    if sum(x) % r == 0:
        raise SpecError(f"mu(x) = {sum(x)}/{r} is an integer")


def b_sequence(r: int, k: int, x: Sequence[int]) -> list[int]:
    out = []
    for i in range(r * k):
        q, t = divmod(i, r)
        xt = x[t]
        out.append(xt if q < xt else k + xt)
    return out


def gen_clique_cycle(r: int, k: int, x: Sequence[int]) -> tuple[Graph, CliqueCycleMeta]:
    """Clique cycle on ``rk^2 + rk`` vertices.

    The cycle vertices are ``0..rk-1``; the private vertices ``A_i'`` of the
    cliques follow in order of ``i``.  Edges are listed clique by clique.
    """
    x = tuple(int(v) for v in x)
    check_sequence_params(r, k, x)
    b = b_sequence(r, k, x)
    L = r * k
    nxt = L
    cliques = []
    edges = []
    for i in range(L):
        private = list(range(nxt, nxt + b[i]))
        nxt += b[i]
        members = sorted({i, (i + 1) % L, *private})
        cliques.append(tuple(members))
        edges.extend(itertools.combinations(members, 2))
    n = nxt
    assert n == r * k * k + r * k
    meta = CliqueCycleMeta(r, k, x, tuple(range(L)), tuple(cliques), tuple(b))
    return Graph(n, edges), meta


# ---------------------------------------------------------------------------
# Grids and hypercubes
# ---------------------------------------------------------------------------


def gen_grid(k: int, d: int, plus: bool = False) -> Graph:
    """``P_k^d``; with ``plus`` (``d = 2`` only) add the cycle through the four corners."""
    if k < 2 or d < 1:
        raise SpecError(f"grid needs k >= 2 and d >= 1, got k={k}, d={d}")
    n = k**d
    edges = []
    for v in range(n):
        stride = 1
        for _ in range(d):
            coord = (v // stride) % k
            if coord + 1 < k:
                edges.append((v, v + stride))
            stride *= k
    edges.sort()
    if plus:
        if d != 2:
            raise SpecError("the corner cycle is defined for d = 2")
        corners = [0, k - 1, k * k - 1, k * (k - 1)]
        present = set(edges)
        for a, b in zip(corners, corners[1:] + corners[:1]):
            e = (min(a, b), max(a, b))
            if e not in present:
                edges.append(e)
                present.add(e)
    return Graph(n, edges)


def grid_layers(k: int, d: int) -> list[list[int]]:
    """Slices of constant first coordinate; each has ``k^(d-1)`` vertices."""
    size = k ** (d - 1)
    return [list(range(i * size, (i + 1) * size)) for i in range(k)]


def gen_hypercube(d: int) -> tuple[Graph, list[list[int]]]:
    if d < 1:
        raise SpecError("hypercube needs d >= 1")
    n = 1 << d
    edges = sorted((v, v | (1 << b)) for v in range(n) for b in range(d) if not v >> b & 1)
    layers = [[] for _ in range(d + 1)]
    for v in range(n):
        layers[bin(v).count("1")].append(v)
    return Graph(n, edges), layers


# ---------------------------------------------------------------------------
# Random regular graphs
# ---------------------------------------------------------------------------


def gen_random_regular(n: int, d: int, seed: int, max_rejections: int = 10_000) -> Graph:
    """Configuration model with whole-graph rejection of loops and multi-edges.

    Conditioned on simplicity the output is uniform over labelled ``d``-regular
    graphs.  Edges are returned sorted.
    """
    if d < 0 or n < 1:
        raise SpecError(f"invalid parameters n={n}, d={d}")
    if (n * d) % 2:
        raise SpecError(f"n*d = {n * d} is odd")
    if d >= n:
        raise SpecError(f"need d < n, got d={d}, n={n}")
    rng = philox(seed)
    points = np.repeat(np.arange(n), d)
    for _ in range(max_rejections):
        perm = rng.permutation(points)
        pairs = perm.reshape(-1, 2)
        u = np.minimum(pairs[:, 0], pairs[:, 1])
        v = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(u == v):
            continue
        keys = u * n + v
        if len(np.unique(keys)) != len(keys):
            continue
        return Graph(n, sorted(zip(u.tolist(), v.tolist())))
    raise SamplingError(
        f"no simple {d}-regular graph on {n} vertices after {max_rejections} pairings"
    )


def expected_rejection_rate(d: int) -> float:
    """Asymptotic probability that a pairing is not simple, ``1 - exp((1-d^2)/4)``."""
    return 1.0 - math.exp((1 - d * d) / 4)
