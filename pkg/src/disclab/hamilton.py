"""Hamilton cycles, long paths and monochromatic matchings in dense graphs.

* :func:`dirac_hamilton` tries rotation-extension first and falls back to
  exhaustive backtracking;
* :func:`hamilton_with_forced_edges` searches for a Hamilton cycle through a
  prescribed path-forest;
* :func:`dfs_long_path` runs DFS on a bipartite graph and returns the deepest
  stack;
* :func:`monochromatic_matching` is the cherry-removal procedure for large
  monochromatic matchings under a minimum-degree condition.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .discrepancy import max_colour_hamilton_cycle
from .errors import DegreeError, SizeLimitError, SpecError, StructureError, TheoryViolationError
from .generators import philox
from .graph import EdgeColouring, Graph, UnionFind, complete_graph_edges

HAMILTON_CAP = 14


def _ratio(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**6)


def is_hamilton_cycle(g: Graph, cycle: Sequence[int]) -> bool:
    if len(cycle) != g.n or sorted(cycle) != list(range(g.n)) or g.n < 3:
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % g.n]) for i in range(g.n))


# ---------------------------------------------------------------------------
# Rotation-extension
# ---------------------------------------------------------------------------


def _rotation_extension(g: Graph) -> list[int] | None:
    """Path/cycle growing in the style of the constructive Dirac proof.

    Extend a path at either end while possible, close it into a cycle via a
    crossing pair, then open the cycle towards an outside vertex.  Returns
    ``None`` if it gets stuck (always possible outside the Dirac range).
    """
    n = g.n
    adj = g.adjacency
    path = [0]
    on = [False] * n
    on[0] = True
    for _ in range(4 * n * n):
        grown = True
        while grown:
            grown = False
            for w in adj[path[-1]]:
                if not on[w]:
                    path.append(w)
                    on[w] = True
                    grown = True
                    break
            else:
                for w in adj[path[0]]:
                    if not on[w]:
                        path.insert(0, w)
                        on[w] = True
                        grown = True
                        break
        # close the path into a cycle
        cycle = None
        if g.has_edge(path[0], path[-1]):
            cycle = path
        else:
            for i in range(len(path) - 1):
                if g.has_edge(path[0], path[i + 1]) and g.has_edge(path[i], path[-1]):
                    cycle = path[: i + 1] + path[i + 1:][::-1]
                    break
        if cycle is None:
            return None
        if len(cycle) == n:
            return cycle
        # open the cycle at a vertex with an outside neighbour
        for i, v in enumerate(cycle):
            outside = [w for w in adj[v] if not on[w]]
            if outside:
                path = cycle[i + 1:] + cycle[: i + 1] + [outside[0]]
                on[outside[0]] = True
                break
        else:
            return None  # disconnected
    return None


# ---------------------------------------------------------------------------
# Backtracking with forced edges
# ---------------------------------------------------------------------------


def _forced_adjacency(g: Graph, forced: Sequence[Sequence[int]]) -> list[set[int]]:
    fadj: list[set[int]] = [set() for _ in range(g.n)]
    uf = UnionFind(g.n)
    seen = set()
    for e in forced:
        u, v = int(e[0]), int(e[1])
        key = (min(u, v), max(u, v))
        if u == v or not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
            raise StructureError(f"forced edge {key} is not an edge of the graph")
        if key in seen:
            raise StructureError(f"forced edge {key} listed twice")
        seen.add(key)
        fadj[u].add(v)
        fadj[v].add(u)
        if len(fadj[u]) > 2 or len(fadj[v]) > 2:
            raise StructureError(f"forced edges are not a path-forest (degree 3 at {key})")
        if not uf.union(u, v):
            raise StructureError(f"forced edges are not a path-forest (cycle through {key})")
    return fadj


def _search(g: Graph, fadj: list[set[int]], budget: int) -> list[int] | None:
    n = g.n
    adj = g.adjacency
    visited = [False] * n
    path = [0]
    visited[0] = True
    nodes = 0

    def can_enter(w: int, v: int) -> bool:
        # w entered from v: every other forced neighbour must still be reachable
        if visited[w]:
            return False
        others = fadj[w] - {v}
        if len(others) > 1:
            return False
        for u in others:
            if visited[u] and not (u == 0 and len(path) + 1 == n):
                return False
        return True

    def rec() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SizeLimitError(f"Hamilton search exceeded {budget} nodes")
        v = path[-1]
        if len(path) == n:
            return g.has_edge(v, 0) and all(u in (path[-2], 0) for u in fadj[v]) and all(
                u in (path[1], v) for u in fadj[0]
            )
        prev = path[-2] if len(path) > 1 else None
        required = fadj[v] - ({prev} if prev is not None else set())
        if prev is None:
            cands = sorted(fadj[0]) if fadj[0] else adj[0]
        elif required:
            (w,) = required
            cands = [w] if w != 0 else []
        else:
            cands = adj[v]
        for w in cands:
            if w == 0 or not can_enter(w, v):
                continue
            visited[w] = True
            path.append(w)
            if rec():
                return True
            path.pop()
            visited[w] = False
        return False

    return list(path) if rec() else None


def _orient(cycle: list[int]) -> tuple[int, ...]:
    """Start at 0 with the smaller neighbour second."""
    i = cycle.index(0)
    c = cycle[i:] + cycle[:i]
    if len(c) > 2 and c[-1] < c[1]:
        c = [c[0]] + c[1:][::-1]
    return tuple(c)


def hamilton_with_forced_edges(
    g: Graph,
    forced: Sequence[Sequence[int]] = (),
    cap: int = HAMILTON_CAP,
    budget: int = 10**7,
) -> tuple[int, ...] | None:
    """Hamilton cycle containing every forced edge, or ``None``.

    With ``delta >= n/2 + a`` and ``|forced| <= 2a`` a cycle is guaranteed;
    failing to find one then raises :class:`TheoryViolationError`.
    """
    fadj = _forced_adjacency(g, forced)
    n = g.n
    if n < 3:
        return None
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds the Hamilton search cap {cap}")
    res = _search(g, fadj, budget)
    a = (len(forced) + 1) // 2
    guaranteed = 2 * g.min_degree >= n + 2 * a
    if res is None:
        if guaranteed:
            raise TheoryViolationError(
                "no Hamilton cycle through a small path-forest in a dense graph",
                {"n": n, "edges": [list(e) for e in g.edges], "forced": [list(e) for e in forced]},
            )
        return None
    out = _orient(res)
    assert is_hamilton_cycle(g, out)
    return out


def dirac_hamilton(g: Graph, cap: int = HAMILTON_CAP, budget: int = 10**7) -> tuple[int, ...] | None:
    """Hamilton cycle or ``None``; rotation-extension first, then backtracking."""
    n = g.n
    if n < 3:
        return None
    dirac = 2 * g.min_degree >= n
    cyc = _rotation_extension(g)
    if cyc is not None:
        out = _orient(cyc)
        assert is_hamilton_cycle(g, out)
        return out
    if n > cap:
        if dirac:
            raise TheoryViolationError("rotation-extension failed on a Dirac graph", {"n": n})
        raise SizeLimitError(f"n={n} exceeds the Hamilton search cap {cap}")
    res = _search(g, [set() for _ in range(n)], budget)
    if res is None:
        if dirac:
            raise TheoryViolationError(
                "Dirac graph without a Hamilton cycle", {"edges": [list(e) for e in g.edges]}
            )
        return None
    return _orient(res)


# ---------------------------------------------------------------------------
# DFS long paths
# ---------------------------------------------------------------------------


def _check_sides(g: Graph, X: Sequence[int], Y: Sequence[int]) -> None:
    xs, ys = set(X), set(Y)
    if xs & ys or len(xs | ys) != g.n or len(xs) != len(X) or len(ys) != len(Y):
        raise StructureError("sides must partition the vertex set")
    if len(xs) != len(ys):
        raise StructureError(f"sides must have equal size, got {len(xs)} and {len(ys)}")
    for u, v in g.edges:
        if (u in xs) == (v in xs):
            raise StructureError(f"edge {(u, v)} lies inside one side")


def bipartite_expansion_holds(g: Graph, X: Sequence[int], Y: Sequence[int], k: int, cap: int = 12) -> bool:
    """Every ``k``-subset of ``X`` and every ``k``-subset of ``Y`` span an edge."""
    if len(X) > cap:
        raise SizeLimitError(f"side size {len(X)} exceeds the expansion-check cap {cap}")
    if k > len(X) or k <= 0:
        return True
    masks = g.neighbour_masks
    ymask = sum(1 << y for y in Y)
    for sub in itertools.combinations(X, k):
        nb = 0
        for x in sub:
            nb |= masks[x]
        if bin(ymask & ~nb).count("1") >= k:
            return False
    return True


@dataclass(frozen=True)
class LongPath:
    path: tuple[int, ...]
    expansion: bool | None  # None when not checked
    bound: int  # 2 n_side - 4k

    @property
    def length(self) -> int:
        return max(len(self.path) - 1, 0)


def dfs_long_path(
    g: Graph, X: Sequence[int], Y: Sequence[int], k: int, verify: bool = True
) -> LongPath:
    """Deepest DFS stack in a balanced bipartite graph.

    DFS always continues from the lowest-index unvisited neighbour of the top
    of the stack and restarts at the lowest-index unvisited vertex.  The stack
    is always a path; the longest stack seen is returned.
    """
    _check_sides(g, X, Y)
    n_side = len(X)
    expansion = None
    if verify and n_side <= 12:
        expansion = bipartite_expansion_holds(g, X, Y, k)
    adj = g.adjacency
    visited = [False] * g.n
    nxt = [0] * g.n
    best: list[int] = []
    for root in range(g.n):
        if visited[root]:
            continue
        stack = [root]
        visited[root] = True
        while stack:
            if len(stack) > len(best):
                best = list(stack)
            v = stack[-1]
            nb = adj[v]
            while nxt[v] < len(nb) and visited[nb[nxt[v]]]:
                nxt[v] += 1
            if nxt[v] < len(nb):
                w = nb[nxt[v]]
                visited[w] = True
                stack.append(w)
            else:
                stack.pop()
    res = LongPath(tuple(best), expansion, 2 * n_side - 4 * k)
    if expansion and res.length < res.bound:
        raise TheoryViolationError(
            f"DFS path of length {res.length} below 2n-4k = {res.bound}",
            {"edges": [list(e) for e in g.edges], "X": list(X), "Y": list(Y), "k": k},
        )
    return res


# ---------------------------------------------------------------------------
# Monochromatic matchings
# ---------------------------------------------------------------------------


@dataclass
class MatchingResult:
    colour: int
    matching: tuple[tuple[int, int], ...]
    bound: float
    trace: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.matching)

    @property
    def slack(self) -> float:
        return self.size - self.bound


def _find_cherry(adjc: list[dict[int, int]], alive: list[bool]):
    n = len(adjc)
    for y in range(n):
        if not alive[y]:
            continue
        nbrs = sorted(w for w in adjc[y] if alive[w])
        for x in nbrs:
            for z in nbrs:
                if z != x and adjc[y][x] != adjc[y][z]:
                    return x, y, z
    return None


def monochromatic_matching(
    g: Graph, f: EdgeColouring, alpha, cap: int = HAMILTON_CAP, slack_warn: float = 2.0
) -> MatchingResult:
    """Cherry removal followed by a Hamilton cycle of what is left.

    Remove up to ``k = floor(2 alpha n / 3)`` bichromatic cherries (lowest
    middle vertex ``y``, then lowest ``x``, then lowest ``z``), take every
    other edge of a Hamilton cycle of the remaining graph as ``M``, and return
    the best ``A_i + B_i`` where ``A_i`` are the colour-``i`` cherry edges and
    ``B_i`` the colour-``i`` edges of ``M``.
    """
    f.check(g)
    a = _ratio(alpha)
    if not 0 < a < Fraction(1, 5):
        raise SpecError(f"alpha must lie in (0, 0.2), got {alpha}")
    n, r = g.n, f.r
    if g.min_degree < (Fraction(1, 2) + a) * n:
        raise DegreeError(f"minimum degree {g.min_degree} below (1/2 + alpha) n = {float((Fraction(1, 2) + a) * n)}")
    k = math.floor(Fraction(2, 3) * a * n)
    adjc: list[dict[int, int]] = [dict() for _ in range(n)]
    for (u, v), c in zip(g.edges, f.colours):
        adjc[u][v] = c
        adjc[v][u] = c
    alive = [True] * n
    triples = []
    while len(triples) < k:
        cherry = _find_cherry(adjc, alive)
        if cherry is None:
            break
        triples.append(cherry)
        for v in cherry:
            alive[v] = False
    ell = len(triples)
    rest = [v for v in range(n) if alive[v]]
    sub, labels = g.induced(rest)
    M: list[tuple[int, int]] = []
    if sub.n >= 3:
        cyc = dirac_hamilton(sub, cap=cap)
        if cyc is None:
            raise TheoryViolationError("remaining graph is not Hamiltonian", {"triples": triples})
        for j in range(0, sub.n - 1, 2):
            u, v = labels[cyc[j]], labels[cyc[j + 1]]
            M.append((min(u, v), max(u, v)))
    elif sub.n == 2 and sub.m == 1:
        M.append((labels[0], labels[1]))
    A = {i: [] for i in range(1, r + 1)}
    for x, y, z in triples:
        A[adjc[y][x]].append((min(x, y), max(x, y)))
        A[adjc[y][z]].append((min(y, z), max(y, z)))
    B = {i: [] for i in range(1, r + 1)}
    for u, v in M:
        B[adjc[u][v]].append((u, v))
    colour = max(range(1, r + 1), key=lambda i: (len(A[i]) + len(B[i]), -i))
    matching = tuple(sorted(A[colour] + B[colour]))
    used = [v for e in matching for v in e]
    assert len(used) == len(set(used)), "output is not a matching"
    assert all(adjc[u][v] == colour for u, v in matching)
    bound = (1 / (2 * r) + float(a) / (3 * r)) * n
    res = MatchingResult(
        colour,
        matching,
        bound,
        {
            "k": k,
            "ell": ell,
            "triples": [list(t) for t in triples],
            "remaining": rest,
            "hamilton_matching": [list(e) for e in M],
            "A": {str(i): [list(e) for e in A[i]] for i in A},
            "B": {str(i): [list(e) for e in B[i]] for i in B},
            "case": "early-stop" if ell < k else "full",
        },
    )
    if res.slack < -slack_warn:
        warnings.warn(f"matching size {res.size} is {-res.slack:.2f} below the bound {bound:.2f}")
    return res


# ---------------------------------------------------------------------------
# Dense-graph probe for long monochromatic Hamilton cycles
# ---------------------------------------------------------------------------


def random_dense_graph(n: int, min_degree: int, rng) -> Graph:
    """Delete edges of ``K_n`` in random order while the minimum degree allows it."""
    if min_degree > n - 1:
        raise SpecError(f"minimum degree {min_degree} impossible on {n} vertices")
    edges = complete_graph_edges(n)
    deg = [n - 1] * n
    keep = [True] * len(edges)
    p = float(rng.uniform(0.3, 1.0))
    for e in rng.permutation(len(edges)).tolist():
        u, v = edges[e]
        if deg[u] > min_degree and deg[v] > min_degree and rng.random() < p:
            keep[e] = False
            deg[u] -= 1
            deg[v] -= 1
    return Graph(n, [e for e, kp in zip(edges, keep) if kp])


@dataclass(frozen=True)
class ProbeOutcome:
    n: int
    extra: int
    graphs: int
    colourings: int
    failures: tuple


def dense_hamilton_probe(
    n: int, extra: int, graphs: int = 50, colourings: int = 20, seed: int = 0
) -> ProbeOutcome:
    """Sample graphs with ``delta >= ceil(3n/4) + extra`` and 2-colourings of them;
    record every case without a Hamilton cycle having ``n/2 + 2 extra`` edges of one colour."""
    rng = philox(seed)
    need = n // 2 + 2 * extra
    delta = -(-3 * n // 4) + extra
    failures = []
    for gi in range(graphs):
        g = random_dense_graph(n, delta, rng)
        assert g.min_degree >= delta
        for ci in range(colourings):
            f = EdgeColouring(2, (rng.integers(1, 3, size=g.m)).tolist())
            best = max(max_colour_hamilton_cycle(g, f, c)[0] for c in (1, 2))
            if best < need:
                failures.append((gi, ci, best))
    return ProbeOutcome(n, extra, graphs, colourings, tuple(failures))
