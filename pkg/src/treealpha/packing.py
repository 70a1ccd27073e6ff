"""Exact maximum-weight independent set and independent packing over tree decompositions.

The DP runs on a nice decomposition.  A state at a node is the trace S of the
partial solution on the node's bag; the table maps S to the best (weight, set)
among partial solutions of the subtree with that trace.  With independence
number k per bag there are at most sum_{i<=k} C(|bag|, i) traces, which is the
n^O(k) behaviour the approximation schemes rely on.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction

from .decomposition import DecompositionError, TreeDecomposition, _is_tree, lift_td_to_conflict, validate_td
from .graph import Graph, SubgraphFamily, WeightedGraph, conflict_graph, from_mask, graph_power
from .oracles import GuardExceeded, pairwise_distance_ok

DEFAULT_MAX_STATES = 2_000_000

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


class StateLimitExceeded(GuardExceeded):
    pass


def max_states() -> int:
    raw = os.environ.get("TREEALPHA_MAX_STATES")
    if raw is None or raw == "":
        return DEFAULT_MAX_STATES
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"TREEALPHA_MAX_STATES must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError("TREEALPHA_MAX_STATES must be positive")
    return value


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Rooted nice decomposition; children always precede their parent."""

    kinds: tuple
    vertices: tuple
    bags: tuple
    children: tuple
    root: int

    def __len__(self):
        return len(self.kinds)

    def as_td(self) -> TreeDecomposition:
        edges = [(c, t) for t, cs in enumerate(self.children) for c in cs]
        return TreeDecomposition(self.bags, tuple(edges))

    def check(self) -> list:
        """Structural problems of the nice shape (empty when well formed)."""
        problems = []
        if self.bags[self.root]:
            problems.append("root bag is not empty")
        for t, (kind, v, bag, cs) in enumerate(zip(self.kinds, self.vertices, self.bags, self.children)):
            if kind == LEAF and (cs or bag):
                problems.append(f"leaf {t} has children or a non-empty bag")
            elif kind == INTRODUCE and (len(cs) != 1 or bag != self.bags[cs[0]] | {v} or v in self.bags[cs[0]]):
                problems.append(f"introduce node {t} is malformed")
            elif kind == FORGET and (len(cs) != 1 or bag != self.bags[cs[0]] - {v} or v not in self.bags[cs[0]]):
                problems.append(f"forget node {t} is malformed")
            elif kind == JOIN and (len(cs) != 2 or any(self.bags[c] != bag for c in cs)):
                problems.append(f"join node {t} is malformed")
            if any(c >= t for c in cs):
                problems.append(f"node {t} has a child with a larger index")
        return problems


def to_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Nice decomposition rooted at node 0 with the same bags along the way."""
    bad = _is_tree(len(td.bags), td.edges)
    if bad:
        raise DecompositionError(str(bad))
    nb = td.neighbours()
    kinds, verts, bags, children = [], [], [], []

    def add(kind, v, bag, cs):
        kinds.append(kind)
        verts.append(v)
        bags.append(frozenset(bag))
        children.append(tuple(cs))
        return len(kinds) - 1

    # iterative post-order from node 0
    order, parent = [], {0: None}
    stack = [0]
    while stack:
        t = stack.pop()
        order.append(t)
        for s in nb[t]:
            if s not in parent:
                parent[s] = t
                stack.append(s)
    top = {}
    for t in reversed(order):
        bag = td.bags[t]
        kids = sorted(s for s in nb[t] if parent.get(s) == t)
        branches = []
        for c in kids:
            cur = top.pop(c)
            cbag = td.bags[c]
            cur_bag = set(cbag)
            for v in sorted(cbag - bag):
                cur_bag.discard(v)
                cur = add(FORGET, v, cur_bag, [cur])
            for v in sorted(bag - cbag):
                cur_bag.add(v)
                cur = add(INTRODUCE, v, cur_bag, [cur])
            branches.append(cur)
        if not branches:
            cur = add(LEAF, None, (), [])
            cur_bag = set()
            for v in sorted(bag):
                cur_bag.add(v)
                cur = add(INTRODUCE, v, cur_bag, [cur])
            branches.append(cur)
        cur = branches[0]
        for other in branches[1:]:
            cur = add(JOIN, None, bag, [cur, other])
        top[t] = cur
    cur = top.pop(0)
    cur_bag = set(td.bags[0])
    for v in sorted(td.bags[0]):
        cur_bag.discard(v)
        cur = add(FORGET, v, cur_bag, [cur])
    return NiceTreeDecomposition(tuple(kinds), tuple(verts), tuple(bags), tuple(children), cur)


def mwis_on_td(wg: WeightedGraph, td: TreeDecomposition, stats: dict | None = None, check: bool = True,
               trace: list | None = None):
    """Maximum-weight independent set of ``wg`` using a valid decomposition.

    Returns (sorted vertex list, weight).  Ties are broken exactly as by
    ``bruteforce_mwis``.  Raises ``StateLimitExceeded`` when a table grows past
    the cap from ``TREEALPHA_MAX_STATES``.  When ``trace`` is a list, one
    (bag, table size) pair per nice node is appended to it.
    """
    g = wg.graph
    if check:
        bad = validate_td(g, td)
        if bad:
            raise DecompositionError(f"invalid tree decomposition: {bad}")
    cap = max_states()
    t0 = time.perf_counter()
    nice = to_nice(td)
    nbr = g.nbr
    # exact integer arithmetic: scale every weight by the common denominator
    scale = math.lcm(*(x.denominator for x in wg.weights)) if wg.weights else 1
    w = [int(x * scale) for x in wg.weights]
    tables = [None] * len(nice)
    peak = total = 0
    for t in range(len(nice)):
        kind = nice.kinds[t]
        cs = nice.children[t]
        if kind == LEAF:
            table = {0: (0, 0)}
        elif kind == INTRODUCE:
            v = nice.vertices[t]
            b = 1 << v
            child = tables[cs[0]]
            table = dict(child)
            for S, (wt, sol) in child.items():
                if not nbr[v] & S:
                    table[S | b] = (wt + w[v], sol | b)
        elif kind == FORGET:
            b = 1 << nice.vertices[t]
            table = {}
            for S, (wt, sol) in tables[cs[0]].items():
                key = S & ~b
                cur = table.get(key)
                # same preference as oracles.prefer, inlined for speed
                if cur is None or wt > cur[0] or (wt == cur[0] and sol & (sol ^ cur[1]) & -(sol ^ cur[1])):
                    table[key] = (wt, sol)
        else:
            left, right = tables[cs[0]], tables[cs[1]]
            table = {}
            for S, (w1, s1) in left.items():
                hit = right.get(S)
                if hit is None:
                    continue
                shared = sum(w[v] for v in from_mask(S))
                table[S] = (w1 + hit[0] - shared, s1 | hit[1])
        for c in cs:
            tables[c] = None
        if len(table) > cap:
            raise StateLimitExceeded(f"DP table at node {t} holds {len(table)} states (cap {cap})")
        peak = max(peak, len(table))
        total += len(table)
        if trace is not None:
            trace.append((nice.bags[t], len(table)))
        tables[t] = table
    wt, sol = tables[nice.root][0]
    if stats is not None:
        stats.update({"states": total, "peak_states": peak, "nice_nodes": len(nice),
                      "time": round(time.perf_counter() - t0, 6)})
    return from_mask(sol), Fraction(wt, scale)


def max_weight_independent_packing(g: Graph, fam: SubgraphFamily, td: TreeDecomposition,
                                   stats: dict | None = None):
    """Best family subset at pairwise distance >= 2, via MWIS on the conflict graph."""
    bad = validate_td(g, td)
    if bad:
        raise DecompositionError(f"invalid tree decomposition: {bad}")
    if not len(fam):
        if stats is not None:
            stats.update({"states": 0, "peak_states": 0, "nice_nodes": 0, "time": 0.0})
        return [], Fraction(0)
    cg = conflict_graph(g, fam)
    ltd = lift_td_to_conflict(g, td, fam)
    return mwis_on_td(WeightedGraph(cg, fam.weights), ltd, stats, check=False)


def distance_d_packing_exact(g: Graph, fam: SubgraphFamily, td_power: TreeDecomposition, d: int,
                             stats: dict | None = None):
    """Best family subset at pairwise distance >= d (d even), solved in the (d-1)-th power."""
    if d < 2 or d % 2:
        raise ValueError("distance-d packing is only supported for even d >= 2")
    gp = graph_power(g, d - 1)
    chosen, weight = max_weight_independent_packing(gp, fam, td_power, stats)
    if not pairwise_distance_ok(g, fam, chosen, d):
        raise AssertionError("returned members are closer than the requested distance")
    return chosen, weight
