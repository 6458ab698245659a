"""Balanced r-separations: certificates, exact separation numbers and lower bounds.

A balanced r-separation is a partition ``V = V_1 u ... u V_r u S`` with equal
``|V_i|`` and no edge between distinct parts.  Empty parts are allowed, so the
all-separator partition ``S = V`` is always valid and ``s_r(G) <= n``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidLayeringError, SizeLimitError, TheoryViolationError
from .graph import (
    Graph,
    isoperimetric_constant,
    mask_to_set,
    popcount,
    set_to_mask,
    vertex_connectivity,
)


@dataclass(frozen=True)
class BalancedSeparation:
    r: int
    parts: tuple[frozenset[int], ...]
    separator: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.separator)

    @property
    def part_size(self) -> int:
        return len(self.parts[0]) if self.parts else 0

    @property
    def uses_empty_parts(self) -> bool:
        return any(not p for p in self.parts)

    @classmethod
    def trivial(cls, n: int, r: int) -> "BalancedSeparation":
        return cls(r, tuple(frozenset() for _ in range(r)), frozenset(range(n)))

    def to_labels(self, n: int) -> list[int]:
        """Per-vertex label: part index ``1..r`` or ``0`` for the separator."""
        lab = [0] * n
        for i, part in enumerate(self.parts, start=1):
            for v in part:
                lab[v] = i
        return lab


def is_balanced_separation(g: Graph, sep: BalancedSeparation) -> tuple[bool, list[str]]:
    """Check partition, equal part sizes and cross-edge freeness; never raises."""
    problems: list[str] = []
    if len(sep.parts) != sep.r:
        problems.append(f"expected {sep.r} parts, got {len(sep.parts)}")
    seen: dict[int, str] = {}
    named = [(f"V_{i + 1}", p) for i, p in enumerate(sep.parts)] + [("S", sep.separator)]
    for name, block in named:
        for v in sorted(block):
            if not (isinstance(v, int) and 0 <= v < g.n):
                problems.append(f"{name} contains {v!r}, not a vertex")
            elif v in seen:
                problems.append(f"vertex {v} lies in both {seen[v]} and {name}")
            else:
                seen[v] = name
    missing = [v for v in range(g.n) if v not in seen]
    if missing:
        problems.append(f"vertices not covered: {missing}")
    sizes = [len(p) for p in sep.parts]
    if len(set(sizes)) > 1:
        problems.append(f"part sizes differ: {sizes}")
    label = {}
    for i, p in enumerate(sep.parts):
        for v in p:
            label.setdefault(v, i)
    for u, v in g.edges:
        if u in label and v in label and label[u] != label[v]:
            problems.append(f"edge {(u, v)} joins V_{label[u] + 1} and V_{label[v] + 1}")
    return (not problems, problems)


# ---------------------------------------------------------------------------
# Exact separation number
# ---------------------------------------------------------------------------


def group_components(sizes: Sequence[int], r: int, target: int) -> list[int] | None:
    """Assign each component size to one of ``r`` groups so every group sums to ``target``.

    Returns the group index of each size (in input order) or ``None``.  The
    search places sizes in decreasing order, treats groups with equal fill as
    interchangeable and memoises failed states.
    """
    if sum(sizes) != r * target:
        return None
    if any(s > target for s in sizes):
        return None
    order = sorted(range(len(sizes)), key=lambda i: -sizes[i])
    vals = [sizes[i] for i in order]
    failed: set[tuple[int, tuple[int, ...]]] = set()
    assign = [0] * len(vals)

    def rec(pos: int, fills: list[int]) -> bool:
        if pos == len(vals):
            return True
        key = (pos, tuple(sorted(fills)))
        if key in failed:
            return False
        tried = set()
        s = vals[pos]
        for gi in range(r):
            f = fills[gi]
            if f in tried or f + s > target:
                continue
            tried.add(f)
            fills[gi] = f + s
            assign[pos] = gi
            if rec(pos + 1, fills):
                return True
            fills[gi] = f
        failed.add(key)
        return False

    if not rec(0, [0] * r):
        return None
    out = [0] * len(sizes)
    for pos, i in enumerate(order):
        out[i] = assign[pos]
    return out


def _try_separator(g: Graph, r: int, smask: int, target: int) -> BalancedSeparation | None:
    comps = g.components(smask)
    if len(comps) < r and target > 0:
        return None
    sizes = [popcount(c) for c in comps]
    grouping = group_components(sizes, r, target)
    if grouping is None:
        return None
    parts = [0] * r
    for comp, gi in zip(comps, grouping):
        parts[gi] |= comp
    # order parts by minimum vertex for a canonical witness
    parts.sort(key=lambda m: (m & -m).bit_length() if m else g.n + 1)
    return BalancedSeparation(r, tuple(mask_to_set(p) for p in parts), mask_to_set(smask))


def _scan_stripe(args) -> tuple[int, ...] | None:
    g, r, s, target, first = args
    rest = range(first + 1, g.n)
    for tail in itertools.combinations(rest, s - 1):
        S = (first, *tail)
        if _try_separator(g, r, set_to_mask(S), target) is not None:
            return S
    return None


class SeparationResult(NamedTuple):
    s: int
    witness: BalancedSeparation
    candidates_checked: int


def exact_separation_number(
    g: Graph,
    r: int,
    cap: int = 16,
    workers: int = 1,
    min_size: int = 0,
) -> SeparationResult:
    """Exact ``s_r(G)`` with a witness.

    Separator sizes are tried in increasing order (sizes with ``r`` not
    dividing ``n - |S|`` are skipped); for each size the candidate sets are
    scanned in lexicographic order, so the witness is the lexicographically
    first minimum separator.  ``min_size`` lets a caller skip sizes already
    known to fail.
    """
    n = g.n
    if r < 1:
        raise ValueError("r must be positive")
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds separation brute-force cap {cap}")
    checked = 0
    for s in range(min_size, n + 1):
        if (n - s) % r:
            continue
        target = (n - s) // r
        if target == 0:
            return SeparationResult(s, BalancedSeparation.trivial(n, r), checked)
        if s == 0:
            checked += 1
            w = _try_separator(g, r, 0, target)
            if w is not None:
                return SeparationResult(0, w, checked)
            continue
        if workers > 1:
            firsts = list(range(n - s + 1))
            with ProcessPoolExecutor(max_workers=workers) as pool:
                found = list(pool.map(_scan_stripe, [(g, r, s, target, f) for f in firsts]))
            checked += sum(math.comb(n - f - 1, s - 1) for f in firsts)
            for S in found:
                if S is not None:
                    return SeparationResult(s, _try_separator(g, r, set_to_mask(S), target), checked)
            continue
        for S in itertools.combinations(range(n), s):
            checked += 1
            w = _try_separator(g, r, set_to_mask(S), target)
            if w is not None:
                return SeparationResult(s, w, checked)
    raise AssertionError("unreachable: S = V is always a balanced separation")


# ---------------------------------------------------------------------------
# Lower bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationBounds:
    kappa_bound: int
    iso_bound: int
    iota: Fraction | None

    @property
    def best(self) -> int:
        return max(self.kappa_bound, self.iso_bound)


def iso_separation_bound(n: int, r: int, iota: Fraction) -> int:
    """Smallest ``s`` with ``r*s/(n-s) >= iota``, i.e. ``ceil(iota*n/(r+iota))``."""
    iota = Fraction(iota)
    if iota <= 0:
        return 0
    return math.ceil(iota * n / (r + iota))


def separation_lower_bounds(
    g: Graph, r: int, iota: Fraction | None = None, iso_cap: int = 20
) -> SeparationBounds:
    """``s_r(G) >= kappa(G)`` and ``s_r(G) >= ceil(iota*n/(r+iota))``.

    Both bounds come from separations with nonempty parts.  The all-empty
    separation has ``|S| = n``, which exceeds both, so they hold unconditionally.
    """
    if not g.is_connected():
        return SeparationBounds(0, 0, Fraction(0))
    kappa = vertex_connectivity(g)
    if iota is None:
        iota = isoperimetric_constant(g, cap=iso_cap).value
    return SeparationBounds(kappa, iso_separation_bound(g.n, r, iota), Fraction(iota))


# ---------------------------------------------------------------------------
# Hamming balls
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def simplicial_order(d: int) -> tuple[int, ...]:
    """Vertices of ``Q_d`` by weight, then lexicographically by their sorted support.

    Initial segments of this order minimise the vertex boundary (Harper).
    """
    def key(v: int):
        support = tuple(b for b in range(d) if v >> b & 1)
        return (len(support), support)

    return tuple(sorted(range(1 << d), key=key))


def hamming_ball(d: int, size: int) -> list[int]:
    if not 1 <= size <= 1 << d:
        raise ValueError(f"size must lie in 1..{1 << d}")
    return list(simplicial_order(d)[:size])


def vertex_boundary_in_cube(d: int, vertices: Iterable[int]) -> int:
    inside = set(vertices)
    out = set()
    for v in inside:
        for b in range(d):
            w = v ^ (1 << b)
            if w not in inside:
                out.add(w)
    return len(out)


def hamming_ball_boundary(d: int, size: int) -> int:
    """``|N(B)|`` for the Hamming ball ``B`` of the given size centred at ``0``."""
    return vertex_boundary_in_cube(d, hamming_ball(d, size))


def min_boundary_bruteforce(d: int, size: int) -> int:
    """Minimum vertex boundary over all subsets of ``Q_d`` of the given size."""
    n = 1 << d
    nbr = [sum(1 << (v ^ (1 << b)) for b in range(d)) for v in range(n)]
    best = n
    for U in itertools.combinations(range(n), size):
        mask = 0
        union = 0
        for v in U:
            mask |= 1 << v
            union |= nbr[v]
        best = min(best, popcount(union & ~mask))
    return best


# ---------------------------------------------------------------------------
# Separators from layered partitions
# ---------------------------------------------------------------------------


def layered_separator(g: Graph, layers: Sequence[Sequence[int]], r: int) -> BalancedSeparation:
    """Balanced r-separation of size at most ``3rD`` from a layering with ``|L_i| <= D``.

    Vertices are labelled ``1..n`` layer by layer; the layers containing the
    labels ``floor(jn/r)`` (``j = 1..r-1``) are cut out, which leaves ``r``
    runs of consecutive layers with no edges between them.  The runs are then
    trimmed to the smallest run size.  When ``2D >= n/r`` the trivial
    separation ``S = V`` is returned.
    """
    n = g.n
    order = [v for layer in layers for v in layer]
    if sorted(order) != list(range(n)):
        raise InvalidLayeringError("layers do not partition the vertex set")
    layer_of = [0] * n
    for i, layer in enumerate(layers):
        for v in layer:
            layer_of[v] = i
    for u, v in g.edges:
        if abs(layer_of[u] - layer_of[v]) > 1:
            raise InvalidLayeringError(
                f"edge {(u, v)} joins layers {layer_of[u]} and {layer_of[v]}"
            )
    D = max((len(layer) for layer in layers), default=0)
    if 2 * D * r >= n:
        return BalancedSeparation.trivial(n, r)
    cut_layers = sorted({layer_of[order[(j * n) // r - 1]] for j in range(1, r)})
    runs: list[list[int]] = []
    current: list[int] = []
    for i, layer in enumerate(layers):
        if i in cut_layers:
            runs.append(current)
            current = []
        else:
            current.extend(layer)
    runs.append(current)
    if len(runs) != r:
        raise TheoryViolationError(
            "cut layers did not split the layering into r runs",
            {"cut_layers": cut_layers, "runs": [len(x) for x in runs], "D": D},
        )
    size = min(len(x) for x in runs)
    parts = tuple(frozenset(x[:size]) for x in runs)
    kept = set().union(*parts)
    sep = BalancedSeparation(r, parts, frozenset(v for v in range(n) if v not in kept))
    if sep.size > 3 * r * D:
        raise TheoryViolationError(
            f"layered separator has {sep.size} > 3rD = {3 * r * D} vertices",
            {"D": D, "r": r, "runs": [len(x) for x in runs]},
        )
    return sep
