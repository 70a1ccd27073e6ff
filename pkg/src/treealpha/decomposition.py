"""Tree decompositions, layerings and general covers.

A ``TreeDecomposition`` stores bags as frozensets of host vertex ids and the
tree as an edge list over node indices ``0..N-1``.  Decompositions of induced
subgraphs keep the host ids, and validation takes the vertex subset explicitly.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import Graph, Separation, SubgraphFamily, from_mask, to_mask
from .oracles import AlphaCache


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    def __len__(self):
        return len(self.bags)

    def neighbours(self) -> list:
        nb = [[] for _ in self.bags]
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def vertices(self) -> frozenset:
        return frozenset().union(*self.bags) if self.bags else frozenset()

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


@dataclass(frozen=True)
class Layering:
    """Ordered partition; ``layers[i]`` is layer ``i + 1``."""

    layers: tuple

    def __post_init__(self):
        layers = [frozenset(l) for l in self.layers]
        while layers and not layers[-1]:
            layers.pop()
        object.__setattr__(self, "layers", tuple(layers))

    @classmethod
    def from_index(cls, index: dict) -> "Layering":
        """Build from a vertex -> 1-based layer map."""
        if not index:
            return cls(())
        top = max(index.values())
        if min(index.values()) < 1:
            raise DecompositionError("layer indices are 1-based")
        layers = [set() for _ in range(top)]
        for v, i in index.items():
            layers[i - 1].add(v)
        return cls(tuple(layers))

    def index(self) -> dict:
        return {v: i + 1 for i, layer in enumerate(self.layers) for v in layer}

    def __len__(self):
        return len(self.layers)


@dataclass(frozen=True)
class GeneralCover:
    elements: tuple
    tds: tuple
    beta: Fraction
    bound: int | None = None
    provenance: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(frozenset(e) for e in self.elements))
        object.__setattr__(self, "tds", tuple(self.tds))
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        if len(self.elements) != len(self.tds):
            raise DecompositionError("one tree decomposition per cover element required")

    def __len__(self):
        return len(self.elements)

    def multiplicity(self, n: int) -> list:
        counts = [0] * n
        for e in self.elements:
            for v in e:
                counts[v] += 1
        return counts


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: tuple = ()

    def __str__(self):
        return f"{self.code}: {self.message}"


# ---------------------------------------------------------------------------
# validation


def _is_tree(num_nodes: int, edges: Sequence) -> Violation | None:
    if num_nodes == 0:
        return Violation("tree", "decomposition has no nodes")
    if len(edges) != num_nodes - 1:
        return Violation("tree", f"{num_nodes} nodes but {len(edges)} tree edges", ())
    nb = [[] for _ in range(num_nodes)]
    for a, b in edges:
        if not (0 <= a < num_nodes and 0 <= b < num_nodes) or a == b:
            return Violation("tree", f"bad tree edge {a}-{b}", (a, b))
        nb[a].append(b)
        nb[b].append(a)
    seen = {0}
    q = deque([0])
    while q:
        u = q.popleft()
        for w in nb[u]:
            if w not in seen:
                seen.add(w)
                q.append(w)
    if len(seen) != num_nodes:
        missing = min(set(range(num_nodes)) - seen)
        return Violation("tree", f"tree is disconnected (node {missing} unreachable)", (missing,))
    return None


def validate_td(g: Graph, td: TreeDecomposition, vertices: Iterable[int] | None = None) -> Violation | None:
    """Check (T1)-(T3) against ``g`` or against ``g[vertices]``; None means valid."""
    host = set(range(g.n)) if vertices is None else set(vertices)
    bad = _is_tree(len(td.bags), td.edges)
    if bad:
        return bad
    for t, bag in enumerate(td.bags):
        stray = bag - host
        if stray:
            v = min(stray)
            return Violation("vertex", f"bag {t} holds vertex {v} outside the host graph", (t, v))
    where = {v: [] for v in host}
    for t, bag in enumerate(td.bags):
        for v in bag:
            where[v].append(t)
    for v in sorted(host):
        if not where[v]:
            return Violation("T1", f"vertex {v} is in no bag", (v,))
    host_mask = to_mask(host)
    for u in sorted(host):
        for w in from_mask(g.nbr[u] & host_mask):
            if u < w and not any(w in td.bags[t] for t in where[u]):
                return Violation("T2", f"edge {u}-{w} is in no bag", (u, w))
    edge_count = {v: 0 for v in host}
    for a, b in td.edges:
        for v in td.bags[a] & td.bags[b]:
            edge_count[v] += 1
    for v in sorted(host):
        if edge_count[v] != len(where[v]) - 1:
            return Violation("T3", f"nodes holding vertex {v} do not form a subtree", (v, tuple(where[v])))
    return None


def check_layering(g: Graph, layering: Layering, vertices: Iterable[int] | None = None) -> Violation | None:
    host = set(range(g.n)) if vertices is None else set(vertices)
    idx = {}
    for i, layer in enumerate(layering.layers, start=1):
        for v in layer:
            if v in idx:
                return Violation("partition", f"vertex {v} is in layers {idx[v]} and {i}", (v,))
            idx[v] = i
    if set(idx) != host:
        diff = sorted(set(idx) ^ host)
        return Violation("partition", f"layers do not partition the vertex set (e.g. vertex {diff[0]})", (diff[0],))
    for u in sorted(host):
        for w in g.adj[u]:
            if w in idx and u < w and abs(idx[u] - idx[w]) > 1:
                return Violation("span", f"edge {u}-{w} joins layers {idx[u]} and {idx[w]}", (u, w))
    return None


def check_cover(g: Graph, cover: GeneralCover) -> Violation | None:
    m = len(cover)
    for v, c in enumerate(cover.multiplicity(g.n)):
        if Fraction(c) < cover.beta * m:
            return Violation("coverage", f"vertex {v} lies in {c} of {m} elements, below beta={cover.beta}", (v, c))
    for i, (elem, td) in enumerate(zip(cover.elements, cover.tds)):
        bad = validate_td(g, td, elem)
        if bad:
            return Violation(bad.code, f"element {i}: {bad.message}", (i,) + bad.witness)
    return None


# ---------------------------------------------------------------------------
# independence accounting


def td_independence_number(g: Graph, td: TreeDecomposition, cache: AlphaCache | None = None) -> int:
    cache = cache or AlphaCache(g)
    return max((cache(b) for b in td.bags), default=0)


def layered_independence_number(g: Graph, td: TreeDecomposition, layering: Layering,
                                cache: AlphaCache | None = None, witness: bool = False):
    """max over bags X_t and layers V_i of alpha(G[X_t & V_i]).

    With ``witness=True`` also returns ``(node, layer, independent set)`` for a
    maximising pair.
    """
    cache = cache or AlphaCache(g)
    idx = layering.index()
    best, arg = 0, None
    for t, bag in enumerate(td.bags):
        parts = {}
        for v in bag:
            parts.setdefault(idx[v], []).append(v)
        for i, part in parts.items():
            a = cache(part)
            if a > best:
                best, arg = a, (t, i, part)
    if witness:
        if arg is None:
            return best, None
        return best, (arg[0], arg[1], sorted(cache.witness(arg[2])))
    return best


# ---------------------------------------------------------------------------
# restriction and merging


def _restrict_component(td: TreeDecomposition, comp: frozenset) -> TreeDecomposition:
    """Decomposition of a connected vertex set: intersect bags, keep the nodes that meet it."""
    keep = [t for t, b in enumerate(td.bags) if b & comp]
    pos = {t: i for i, t in enumerate(keep)}
    bags = [td.bags[t] & comp for t in keep]
    edges = [(pos[a], pos[b]) for a, b in td.edges if a in pos and b in pos]
    return TreeDecomposition(tuple(bags), tuple(edges))


def merge_with_hub(parts: Sequence[TreeDecomposition]) -> TreeDecomposition:
    """Join several decompositions by attaching node 0 of each to a fresh empty hub."""
    if len(parts) == 1:
        return parts[0]
    bags = [frozenset()]
    edges = []
    for part in parts:
        off = len(bags)
        bags.extend(part.bags)
        edges.extend((a + off, b + off) for a, b in part.edges)
        edges.append((0, off))
    return TreeDecomposition(tuple(bags), tuple(edges))


def restrict_to_subset(g: Graph, td: TreeDecomposition, vertices: Iterable[int]) -> TreeDecomposition:
    """Decomposition of ``g[vertices]`` assembled from one restricted copy per component."""
    mask = to_mask(vertices)
    parts = [_restrict_component(td, frozenset(c)) for c in g.components(mask)]
    if not parts:
        return TreeDecomposition((frozenset(),), ())
    return merge_with_hub(parts)


def augment_bags(td: TreeDecomposition, extra: Iterable[int]) -> TreeDecomposition:
    extra = frozenset(extra)
    return TreeDecomposition(tuple(b | extra for b in td.bags), td.edges)


# ---------------------------------------------------------------------------
# constructions


def compression_period(n: int, k: int) -> int:
    """Smallest p >= 1 with p^2 >= n / k, i.e. ceil(sqrt(n/k)) in exact arithmetic."""
    if k < 1:
        raise DecompositionError("layered bound k must be >= 1")
    p = max(1, math.isqrt(max(n - 1, 0) // k))
    while p * p * k < n:
        p += 1
    while p > 1 and (p - 1) * (p - 1) * k >= n:
        p -= 1
    return p


def sqrt_compress(g: Graph, td: TreeDecomposition, layering: Layering, k: int) -> TreeDecomposition:
    """Trade the layering for a decomposition of independence number at most 2*sqrt(k*n).

    Layers are grouped by index modulo p = ceil(sqrt(n/k)); the lightest class W
    is deleted, the decomposition is restricted to every component of G - W,
    the pieces are glued at an empty hub and W is added to every bag.
    """
    n = g.n
    if n == 0:
        raise DecompositionError("empty graph")
    p = compression_period(n, k)
    classes = [set() for _ in range(p)]
    for i, layer in enumerate(layering.layers, start=1):
        classes[i % p] |= layer
    j = min(range(p), key=lambda c: (len(classes[c]), c))
    W = frozenset(classes[j])
    rest = frozenset(range(n)) - W
    base = restrict_to_subset(g, td, rest)
    return augment_bags(base, W)


def cover_from_layering(g: Graph, td: TreeDecomposition, layering: Layering, r: int,
                        ell: int | None = None) -> GeneralCover:
    """r elements, element m dropping the layers whose index is congruent to m mod r."""
    if r < 2:
        raise DecompositionError("cover_from_layering needs r >= 2")
    elements, tds, prov = [], [], []
    for m in range(r):
        elem = frozenset(v for i, layer in enumerate(layering.layers, start=1) if i % r != m for v in layer)
        elements.append(elem)
        tds.append(restrict_to_subset(g, td, elem))
        prov.append({"residue": m, "bound": None if ell is None else ell * (r - 1)})
    return GeneralCover(tuple(elements), tuple(tds), Fraction(r - 1, r),
                        None if ell is None else ell * (r - 1), tuple(prov))


def lift_td_to_power(g: Graph, td: TreeDecomposition, layering: Layering, d: int):
    """Decomposition and layering of G^(1+2d) from those of G.

    Bags grow to their distance-d neighbourhoods and every 1+2d consecutive
    layers merge into one.
    """
    if d < 0:
        raise DecompositionError("d must be >= 0")
    if d == 0:
        return td, layering
    bags = tuple(frozenset(g.multi_source_ball(b, d)) if b else frozenset() for b in td.bags)
    width = 1 + 2 * d
    groups = [set() for _ in range(-(-len(layering.layers) // width))]
    for i, layer in enumerate(layering.layers):
        groups[i // width] |= layer
    return TreeDecomposition(bags, td.edges), Layering(tuple(groups))


def lift_td_to_conflict(g: Graph, td: TreeDecomposition, fam: SubgraphFamily) -> TreeDecomposition:
    """Decomposition of the conflict graph: node t keeps every member meeting its bag."""
    where = {}
    for j, m in enumerate(fam.members):
        for v in m:
            where.setdefault(v, []).append(j)
    bags = []
    for b in td.bags:
        bag = set()
        for v in b:
            bag.update(where.get(v, ()))
        bags.append(frozenset(bag))
    return TreeDecomposition(tuple(bags), td.edges)


def restrict_to_ball(g: Graph, td: TreeDecomposition, layering: Layering | None, v: int, r: int) -> TreeDecomposition:
    """Decomposition of G[N^r[v]] on the unchanged tree (empty bags kept)."""
    if r < 0:
        raise DecompositionError("radius must be >= 0")
    ball = frozenset(g.bfs(v, limit=r))
    return TreeDecomposition(tuple(b & ball for b in td.bags), td.edges)


def ball(g: Graph, v: int, r: int) -> frozenset:
    return frozenset(g.bfs(v, limit=r))


# ---------------------------------------------------------------------------
# separations


def _components_without(g: Graph, vertices: frozenset, removed: frozenset) -> list:
    return g.components(to_mask(vertices - removed))


def balanced_separation_from_td(g: Graph, td: TreeDecomposition, vertices: Iterable[int] | None = None) -> Separation:
    """Balanced separation whose separator is one bag of ``td``.

    Walks towards the unique subtree holding a component of more than half the
    vertices until no such component remains, then distributes the components
    largest-first onto the currently smaller side.
    """
    V = frozenset(range(g.n)) if vertices is None else frozenset(vertices)
    n = len(V)
    nb = td.neighbours()
    t = 0
    visited = set()
    while True:
        visited.add(t)
        X = td.bags[t] & V
        comps = _components_without(g, V, X)
        big = [c for c in comps if 2 * len(c) > n]
        if not big:
            break
        target = set(big[0])
        step = None
        for s in nb[t]:
            if s in visited:
                continue
            if _subtree_touches(td, nb, s, t, target):
                step = s
                break
        if step is None:
            raise DecompositionError("no balanced bag found; is the decomposition valid?")
        t = step
    side_a, side_b = set(), set()
    for comp in sorted(comps, key=lambda c: (-len(c), c[0])):
        (side_a if len(side_a) <= len(side_b) else side_b).update(comp)
    return Separation(frozenset(side_a) | X, frozenset(side_b) | X)


def _subtree_touches(td, nb, start, blocked, target) -> bool:
    seen = {start, blocked}
    stack = [start]
    while stack:
        u = stack.pop()
        if td.bags[u] & target:
            return True
        for w in nb[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def separation_from_cover(g: Graph, cover: GeneralCover, c: int | None = None) -> Separation:
    """Balanced separation from the largest cover element, extended by everything it misses."""
    if not len(cover):
        raise DecompositionError("empty cover")
    i = max(range(len(cover)), key=lambda j: (len(cover.elements[j]), -j))
    C = cover.elements[i]
    inner = balanced_separation_from_td(g, cover.tds[i], C)
    outside = frozenset(range(g.n)) - C
    A, B = inner.A | outside, inner.B | outside
    alpha = AlphaCache(g)(A & B)
    return Separation(A, B, alpha)


# ---------------------------------------------------------------------------
# generic decompositions


def td_from_elimination_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Decomposition from an elimination ordering (bag = vertex plus later fill neighbours)."""
    n = g.n
    if sorted(order) != list(range(n)):
        raise DecompositionError("order must be a permutation of the vertices")
    if n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    nbr = [set(g.adj[v]) for v in range(n)]
    bags, parent = [], []
    for v in order:
        later = {u for u in nbr[v] if pos[u] > pos[v]}
        for a in later:
            nbr[a] |= later - {a}
        bags.append(frozenset(later | {v}))
        parent.append(min(later, key=pos.get) if later else None)
    edges = []
    roots = []
    for i, v in enumerate(order):
        if parent[i] is None:
            roots.append(i)
        else:
            edges.append((i, pos[parent[i]]))
    edges.extend((roots[k], roots[k + 1]) for k in range(len(roots) - 1))
    return TreeDecomposition(tuple(bags), tuple(edges))


def min_degree_order(g: Graph) -> list:
    nbr = [set(g.adj[v]) for v in range(g.n)]
    alive = set(range(g.n))
    order = []
    while alive:
        v = min(alive, key=lambda u: (len(nbr[u]), u))
        order.append(v)
        for a in nbr[v]:
            nbr[a] |= nbr[v] - {a}
            nbr[a].discard(v)
        alive.discard(v)
    return order


def heuristic_td(g: Graph) -> TreeDecomposition:
    return td_from_elimination_order(g, min_degree_order(g))


def trivial_layering(g: Graph) -> Layering:
    return Layering((frozenset(range(g.n)),))


def bfs_layering(g: Graph) -> Layering:
    """Layers by BFS distance from the lowest vertex of each component (components share indices)."""
    idx = {}
    for comp in g.components():
        for v, dist in g.bfs(comp[0]).items():
            idx[v] = dist + 1
    return Layering.from_index(idx)
