"""Exact exponential-time solvers used as ground truth.

All set-valued answers share one deterministic tie-break: among optimal sets of
equal weight, prefer the one containing the smallest vertex on which the two
candidates differ.  This order only looks at the symmetric difference, so it
composes over disjoint parts and the tree-decomposition DP reproduces it
exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from .graph import Graph, SubgraphFamily, WeightedGraph, distance_between, from_mask, to_mask

ALPHA_GUARD = 200
MWIS_GUARD = 40
PACKING_GUARD = 64


class GuardExceeded(RuntimeError):
    """An exact computation was asked to handle more than its configured size."""


def prefer(m1: int, m2: int) -> bool:
    """True when set ``m1`` wins the tie-break against ``m2``."""
    x = m1 ^ m2
    return bool(m1 & x & -x)


def better(w1, m1: int, w2, m2: int) -> bool:
    return w1 > w2 or (w1 == w2 and prefer(m1, m2))


def _component_of_lowest(nbr, mask: int) -> int:
    low = mask & -mask
    comp = low
    frontier = low
    while frontier:
        b = frontier & -frontier
        frontier ^= b
        new = nbr[b.bit_length() - 1] & mask & ~comp
        comp |= new
        frontier |= new
    return comp


def _mis_size(nbr, mask: int, memo: dict) -> int:
    if not mask:
        return 0
    hit = memo.get(mask)
    if hit is not None:
        return hit
    comp = _component_of_lowest(nbr, mask)
    if comp != mask:
        res = _mis_size(nbr, comp, memo) + _mis_size(nbr, mask & ~comp, memo)
        memo[mask] = res
        return res
    best_v, best_deg = -1, -1
    m = mask
    while m:
        b = m & -m
        m ^= b
        v = b.bit_length() - 1
        deg = (nbr[v] & mask).bit_count()
        if deg <= 1:
            res = 1 + _mis_size(nbr, mask & ~(nbr[v] | b), memo)
            memo[mask] = res
            return res
        if deg > best_deg:
            best_v, best_deg = v, deg
    b = 1 << best_v
    res = max(_mis_size(nbr, mask & ~b, memo), 1 + _mis_size(nbr, mask & ~(nbr[best_v] | b), memo))
    memo[mask] = res
    return res


def alpha_exact(g: Graph, subset: Iterable[int] | None = None, guard: int = ALPHA_GUARD) -> int:
    """Independence number of the subgraph induced by ``subset`` (all of ``g`` by default)."""
    mask = ((1 << g.n) - 1) if subset is None else to_mask(subset)
    if mask.bit_count() > guard:
        raise GuardExceeded(f"alpha_exact on {mask.bit_count()} vertices exceeds guard {guard}")
    return _mis_size(g.nbr, mask, {})


class AlphaCache:
    """Memoised alpha over one host graph, keyed by vertex subset."""

    def __init__(self, g: Graph, guard: int = ALPHA_GUARD):
        self.g = g
        self.guard = guard
        self._memo = {}
        self._by_set = {}

    def __call__(self, subset: Iterable[int]) -> int:
        mask = to_mask(subset)
        hit = self._by_set.get(mask)
        if hit is None:
            if mask.bit_count() > self.guard:
                raise GuardExceeded(f"alpha on {mask.bit_count()} vertices exceeds guard {self.guard}")
            hit = _mis_size(self.g.nbr, mask, self._memo)
            self._by_set[mask] = hit
        return hit

    def witness(self, subset: Iterable[int]) -> list:
        """One maximum independent set of the induced subgraph."""
        mask = to_mask(subset)
        target = self(subset)
        chosen = []
        while mask:
            v = (mask & -mask).bit_length() - 1
            rest = mask & ~(self.g.nbr[v] | (1 << v))
            if 1 + _mis_size(self.g.nbr, rest, self._memo) == target:
                chosen.append(v)
                target -= 1
                mask = rest
            else:
                mask &= ~(1 << v)
        return chosen


def _int_weights(weights) -> tuple:
    """Weights scaled to integers by their common denominator, with the scale."""
    scale = math.lcm(*(Fraction(w).denominator for w in weights)) if weights else 1
    return tuple(int(Fraction(w) * scale) for w in weights), scale


def _mwis(nbr, weights, mask: int, memo: dict):
    if not mask:
        return 0, 0
    hit = memo.get(mask)
    if hit is not None:
        return hit
    comp = _component_of_lowest(nbr, mask)
    if comp != mask:
        w1, s1 = _mwis(nbr, weights, comp, memo)
        w2, s2 = _mwis(nbr, weights, mask & ~comp, memo)
        res = (w1 + w2, s1 | s2)
        memo[mask] = res
        return res
    best_v, best_deg = -1, -1
    m = mask
    while m:
        b = m & -m
        m ^= b
        v = b.bit_length() - 1
        deg = (nbr[v] & mask).bit_count()
        if deg > best_deg:
            best_v, best_deg = v, deg
    b = 1 << best_v
    if best_deg == 0:
        # a single isolated vertex: taking it never hurts and wins ties
        res = (weights[best_v], b)
    else:
        w_out, s_out = _mwis(nbr, weights, mask & ~b, memo)
        w_in, s_in = _mwis(nbr, weights, mask & ~(nbr[best_v] | b), memo)
        w_in += weights[best_v]
        s_in |= b
        res = (w_in, s_in) if better(w_in, s_in, w_out, s_out) else (w_out, s_out)
    memo[mask] = res
    return res


def bruteforce_mwis(wg: WeightedGraph, guard: int = MWIS_GUARD) -> tuple[list, Fraction]:
    """Exact maximum-weight independent set by memoised branching."""
    if wg.n > guard:
        raise GuardExceeded(f"bruteforce_mwis on n={wg.n} exceeds guard {guard}")
    iw, scale = _int_weights(wg.weights)
    w, s = _mwis(wg.graph.nbr, iw, (1 << wg.n) - 1, {})
    return from_mask(s), Fraction(w, scale)


def max_weight_independent_set(g: Graph, weights, guard: int = MWIS_GUARD) -> tuple[list, Fraction]:
    return bruteforce_mwis(WeightedGraph(g, tuple(weights)), guard)


def bruteforce_packing(g: Graph, fam: SubgraphFamily, d: int, guard: int = PACKING_GUARD) -> tuple[list, Fraction]:
    """Exact maximum-weight distance-``d`` packing.

    Pairwise member distances come straight from BFS in ``g``; two members may
    both be chosen iff their distance is at least ``d``.  The subfamily search
    then branches over member indices with conflict pruning.
    """
    if d < 2:
        raise ValueError("packing distance must be >= 2")
    J = len(fam)
    if J > guard:
        raise GuardExceeded(f"bruteforce_packing on |J|={J} exceeds guard {guard}")
    fam.check_connected(g)
    clash = [0] * J
    for i in range(J):
        for j in range(i + 1, J):
            if distance_between(g, fam.members[i], fam.members[j]) < d:
                clash[i] |= 1 << j
                clash[j] |= 1 << i
    iw, scale = _int_weights(fam.weights)
    w, s = _mwis(tuple(clash), iw, (1 << J) - 1, {})
    return from_mask(s), Fraction(w, scale)


def pairwise_distance_ok(g: Graph, fam: SubgraphFamily, indices, d: int) -> bool:
    idx = list(indices)
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if distance_between(g, fam.members[idx[a]], fam.members[idx[b]]) < d:
                return False
    return True
