"""Simple undirected graphs, weighted graphs, subgraph families and separations.

Vertices are ``0..n-1``.  Besides the sorted adjacency lists every graph keeps
one neighbourhood bitmask per vertex; the exact solvers work on those masks.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import ObjectCollection, intersects, bounding_box


class GraphError(ValueError):
    pass


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def from_mask(mask: int) -> list:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    __slots__ = ("n", "adj", "nbr")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        nbr = [0] * n
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        self.n = n
        self.nbr = tuple(nbr)
        self.adj = tuple(tuple(from_mask(m)) for m in nbr)

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(masks)
        g.nbr = tuple(masks)
        g.adj = tuple(tuple(from_mask(m)) for m in masks)
        return g

    def edges(self) -> list:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.nbr[u] >> v & 1)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.nbr == other.nbr

    def __hash__(self):
        return hash((self.n, self.nbr))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges()})"

    def bfs(self, source: int, limit: int | None = None, within: int | None = None) -> dict:
        """Distances from ``source``; optionally capped at ``limit`` and restricted to mask ``within``."""
        dist = {source: 0}
        q = deque([source])
        while q:
            u = q.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in self.adj[u]:
                if v not in dist and (within is None or within >> v & 1):
                    dist[v] = dist[u] + 1
                    q.append(v)
        return dist

    def multi_source_ball(self, sources: Iterable[int], radius: int) -> set:
        dist = {s: 0 for s in sources}
        q = deque(dist)
        while q:
            u = q.popleft()
            if dist[u] >= radius:
                continue
            for v in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        return set(dist)

    def components(self, within: int | None = None) -> list:
        """Connected components (as sorted vertex lists) of the subgraph induced by ``within``."""
        rest = ((1 << self.n) - 1) if within is None else within
        comps = []
        while rest:
            low = rest & -rest
            comp = low
            frontier = low
            while frontier:
                b = frontier & -frontier
                frontier ^= b
                new = self.nbr[b.bit_length() - 1] & rest & ~comp
                comp |= new
                frontier |= new
            rest &= ~comp
            comps.append(from_mask(comp))
        return comps

    def is_connected_subset(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        if not vs:
            return False
        return len(self.components(to_mask(vs))) == 1

    def is_independent(self, vertices: Iterable[int]) -> bool:
        m = to_mask(vertices)
        return all(not (self.nbr[v] & m) for v in from_mask(m))

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", list]:
        """Induced subgraph relabelled to ``0..k-1``; returns (graph, old ids in order)."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        edges = [(pos[u], pos[w]) for u in vs for w in self.adj[u] if w in pos and u < w]
        return Graph(len(vs), edges), vs


@dataclass(frozen=True)
class WeightedGraph:
    graph: Graph
    weights: tuple

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) != self.graph.n:
            raise GraphError(f"expected {self.graph.n} weights, got {len(ws)}")
        if any(w < 0 for w in ws):
            raise GraphError("weights must be non-negative")

    @classmethod
    def unit(cls, g: Graph) -> "WeightedGraph":
        return cls(g, (1,) * g.n)

    @property
    def n(self) -> int:
        return self.graph.n

    def weight_of(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.weights[v] for v in vertices), Fraction(0))


@dataclass(frozen=True)
class SubgraphFamily:
    members: tuple
    weights: tuple
    h: int | None = None

    def __post_init__(self):
        ms = tuple(tuple(sorted(set(int(v) for v in m))) for m in self.members)
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "weights", ws)
        if len(ms) != len(ws):
            raise GraphError("one weight per family member required")
        if any(not m for m in ms):
            raise GraphError("family members must be non-empty")
        if any(w < 0 for w in ws):
            raise GraphError("weights must be non-negative")
        hmax = max((len(m) for m in ms), default=0)
        if self.h is None:
            object.__setattr__(self, "h", max(hmax, 1))
        elif hmax > self.h:
            raise GraphError(f"member of size {hmax} exceeds declared h={self.h}")

    def __len__(self):
        return len(self.members)

    @classmethod
    def singletons(cls, n: int, weights=None) -> "SubgraphFamily":
        ws = weights if weights is not None else (1,) * n
        return cls(tuple((v,) for v in range(n)), tuple(ws), 1)

    @classmethod
    def edges_and_vertices(cls, g: Graph) -> "SubgraphFamily":
        """All K1 and K2 subgraphs weighted by vertex count (dissociation sets)."""
        ms = [(v,) for v in range(g.n)] + [tuple(e) for e in g.edges()]
        return cls(tuple(ms), tuple(len(m) for m in ms), 2)

    @classmethod
    def all_edges(cls, g: Graph, weights=None) -> "SubgraphFamily":
        es = g.edges()
        return cls(tuple(es), tuple(weights) if weights is not None else (1,) * len(es), 2)

    def check_connected(self, g: Graph):
        for j, m in enumerate(self.members):
            if any(not (0 <= v < g.n) for v in m):
                raise GraphError(f"member {j} references a vertex outside the host graph")
            if not g.is_connected_subset(m):
                raise GraphError(f"member {j} = {list(m)} does not induce a connected subgraph")

    def restrict(self, vertices: Iterable[int]) -> tuple["SubgraphFamily", list]:
        """Members fully inside ``vertices``; returns (family, original member indices)."""
        vs = set(vertices)
        keep = [j for j, m in enumerate(self.members) if vs.issuperset(m)]
        return SubgraphFamily(tuple(self.members[j] for j in keep), tuple(self.weights[j] for j in keep), self.h), keep

    def total(self, indices: Iterable[int]) -> Fraction:
        return sum((self.weights[j] for j in indices), Fraction(0))


@dataclass(frozen=True)
class Separation:
    A: frozenset
    B: frozenset
    separator_alpha: int | None = field(default=None, compare=False)

    @property
    def separator(self) -> frozenset:
        return self.A & self.B

    def check(self, g: Graph) -> list:
        """List of problems; empty when (A, B) is a separation of ``g``."""
        problems = []
        if self.A | self.B != frozenset(range(g.n)):
            problems.append("A and B do not cover V")
        a_only = to_mask(self.A - self.B)
        for v in self.B - self.A:
            if g.nbr[v] & a_only:
                problems.append(f"edge between {v} and A-B")
                break
        return problems

    def is_balanced(self, n: int) -> bool:
        return 3 * len(self.A - self.B) <= 2 * n and 3 * len(self.B - self.A) <= 2 * n


# ---------------------------------------------------------------------------
# constructions


def intersection_graph(coll: ObjectCollection, mode: str | None = None) -> Graph:
    """Vertex i is object i; edges join intersecting objects (sweep on the first axis)."""
    mode = mode or coll.mode
    objs = coll.objects
    spans = [bounding_box(o) for o in objs]
    order = sorted(range(len(objs)), key=lambda i: (spans[i][0][0], i))
    edges = []
    active = []
    for i in order:
        x0 = spans[i][0][0]
        active = [j for j in active if spans[j][1][0] >= x0 - 1e-9]
        for j in active:
            if intersects(objs[i], objs[j], mode):
                edges.append((i, j))
        active.append(i)
    return Graph(len(objs), edges)


def graph_power(g: Graph, p: int) -> Graph:
    if p < 1:
        raise GraphError("power must be >= 1")
    if p == 1:
        return g
    masks = []
    for v in range(g.n):
        reach = 1 << v
        frontier = reach
        for _ in range(p):
            nxt = 0
            for u in from_mask(frontier):
                nxt |= g.nbr[u]
            nxt &= ~reach
            if not nxt:
                break
            reach |= nxt
            frontier = nxt
        masks.append(reach & ~(1 << v))
    return Graph.from_masks(masks)


def conflict_graph(g: Graph, fam: SubgraphFamily) -> Graph:
    """Members are adjacent when they share a vertex or a host edge joins them."""
    fam.check_connected(g)
    own = [to_mask(m) for m in fam.members]
    closed = []
    for m in fam.members:
        c = to_mask(m)
        for v in m:
            c |= g.nbr[v]
        closed.append(c)
    edges = [(i, j) for i in range(len(own)) for j in range(i + 1, len(own)) if closed[i] & own[j]]
    return Graph(len(own), edges)


def distance_between(g: Graph, a: Iterable[int], b: Iterable[int]) -> float:
    """Minimum BFS distance between two vertex sets (inf when disconnected)."""
    bm = to_mask(b)
    dist = {s: 0 for s in a}
    if any(bm >> s & 1 for s in dist):
        return 0
    q = deque(dist)
    while q:
        u = q.popleft()
        for v in g.adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                if bm >> v & 1:
                    return dist[v]
                q.append(v)
    return float("inf")


def grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.num_edges()}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise GraphError(f"unrecognised DIMACS line: {line!r}")
    if n is None:
        raise GraphError("missing problem line")
    return Graph(n, edges)
