"""Shifted hierarchical-grid general cover for c-fat collections.

With base r = f(r0), an object of size s gets rank floor(log_{1/r} s).  For a
shift vector y the rank-i grid consists of the hyperplanes

    x_j = m * r^(1-i) + y_j * sum_{k=i}^{k0+1} r^(-k),   m in Z,

and the cover element C(y) keeps the objects missing the grid of their own
rank.  Grid arithmetic is exact (``Fraction``); object coordinates enter as the
exact rationals of their float values, widened by the tangency tolerance.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .decomposition import GeneralCover, TreeDecomposition
from .geometry import EPS, Box, GeometryError, ObjectCollection, UnionObject, bounding_box, intersects, object_size, rank_of
from .graph import Graph, graph_power, intersection_graph

_EPS = Fraction(EPS)


def fragility_function(r0: int, d: int) -> int:
    """2 * ceil(1 / (1 - (1 - 1/r0)^(1/d))), evaluated exactly.

    ceil(1/(1-q)) is the least integer m with 1 - 1/m >= q, i.e. with
    ((m-1)/m)^d >= (r0-1)/r0.
    """
    if r0 < 2 or d < 1:
        raise GeometryError("need r0 >= 2 and d >= 1")
    target = Fraction(r0 - 1, r0)
    m = 2
    while Fraction(m - 1, m) ** d < target:
        m += 1
    return 2 * m


class HierGrid:
    """Grid family for one shift vector ``y``."""

    def __init__(self, r: int, y: tuple, k0: int):
        if r < 2 or r % 2:
            raise GeometryError("grid base must be an even integer >= 2")
        self.r = r
        self.y = tuple(y)
        self.k0 = k0
        self._period = {}
        self._offset = {}

    def period(self, i: int) -> Fraction:
        p = self._period.get(i)
        if p is None:
            p = self._period[i] = Fraction(1, self.r) ** (i - 1)
        return p

    def offsets(self, i: int) -> tuple:
        off = self._offset.get(i)
        if off is None:
            s = sum((Fraction(1, self.r) ** k for k in range(i, self.k0 + 2)), Fraction(0))
            off = self._offset[i] = tuple(yj * s for yj in self.y)
        return off

    def hits_interval(self, i: int, axis: int, lo: Fraction, hi: Fraction) -> bool:
        """Does some rank-i hyperplane orthogonal to ``axis`` meet [lo, hi]?"""
        p, off = self.period(i), self.offsets(i)[axis]
        return math.ceil((lo - off) / p) <= math.floor((hi - off) / p)

    def cell_of(self, i: int, point) -> tuple:
        p, off = self.period(i), self.offsets(i)
        return tuple(math.floor((Fraction(x) - o) / p) for x, o in zip(point, off))

    def cell_bounds(self, i: int, m: tuple) -> tuple:
        p, off = self.period(i), self.offsets(i)
        lo = tuple(o + mj * p for o, mj in zip(off, m))
        return lo, tuple(x + p for x in lo)

    def cell_center(self, i: int, m: tuple) -> tuple:
        lo, hi = self.cell_bounds(i, m)
        return tuple((a + b) / 2 for a, b in zip(lo, hi))


def _widened(o) -> tuple:
    lo, hi = bounding_box(o)
    return tuple(Fraction(x) - _EPS for x in lo), tuple(Fraction(x) + _EPS for x in hi)


def survives_by_axes(grid: HierGrid, rank: int, box) -> bool:
    lo, hi = box
    return not any(grid.hits_interval(rank, j, lo[j], hi[j]) for j in range(len(lo)))


def survives_by_cell(grid: HierGrid, rank: int, box) -> bool:
    """Alternative test: the widened box lies strictly inside the cell holding its min corner."""
    lo, hi = box
    m = grid.cell_of(rank, lo)
    clo, chi = grid.cell_bounds(rank, m)
    return all(a < l and h < b for a, l, h, b in zip(clo, lo, hi, chi))


def _check_scaled(coll: ObjectCollection):
    if not coll.objects:
        raise GeometryError("empty collection")
    smax = max(object_size(o) for o in coll.objects)
    if smax > 1 + 1e-12:
        raise GeometryError(f"largest object has size {smax}; rescale with scale_collection first")


def cover_element(coll: ObjectCollection, ranks: list, grid: HierGrid, boxes: list, mode: str = "v"):
    """Element C(y) and its decomposition for one shift; returns (members, td, stats)."""
    survivors = []
    for v, (rk, box) in enumerate(zip(ranks, boxes)):
        a = survives_by_axes(grid, rk, box)
        if a != survives_by_cell(grid, rk, box):
            raise AssertionError(f"survival tests disagree for object {v} at shift {grid.y}")
        if a:
            survivors.append(v)
    # materialise rank-i cells holding a rank-i survivor
    cells = {}
    for v in survivors:
        key = (ranks[v], grid.cell_of(ranks[v], boxes[v][0]))
        cells.setdefault(key, []).append(v)
    order = sorted(cells)
    node_of = {key: t + 1 for t, key in enumerate(order)}
    bags = [frozenset()]
    for i, m in order:
        lo, hi = grid.cell_bounds(i, m)
        cell = Box(tuple(float(x) for x in lo), tuple(float(x) for x in hi))
        bag = set()
        for u in survivors:
            if ranks[u] > i:
                continue
            ulo, uhi = boxes[u]
            if any(uh < a or b < ul for ul, uh, a, b in zip(ulo, uhi, lo, hi)):
                continue
            if intersects(coll.objects[u], cell, mode):
                bag.add(u)
        bags.append(frozenset(bag))
    edges = []
    for i, m in order:
        center = grid.cell_center(i, m)
        parent = 0
        for j in range(i - 1, -1, -1):
            pm = grid.cell_of(j, center)
            if (j, pm) in node_of:
                clo, chi = grid.cell_bounds(i, m)
                plo, phi = grid.cell_bounds(j, pm)
                if not all(a <= b and c <= e for a, b, c, e in zip(plo, clo, chi, phi)):
                    raise AssertionError("finer cell is not nested in its coarser cell")
                parent = node_of[(j, pm)]
                break
        edges.append((parent, node_of[(i, m)]))
    return frozenset(survivors), TreeDecomposition(tuple(bags), tuple(edges))


def general_cover_fat(coll: ObjectCollection, cfat: int, r0: int) -> GeneralCover:
    """(1 - 1/r0)-general cover of a c-fat collection of size at most 1.

    One element per shift y in {0, ..., f/2 - 1}^d; each element carries the
    decomposition built from the nested cells, glued at an empty root.
    Declared bound on the independence number of every element bag: c * f^(2d).
    """
    _check_scaled(coll)
    d = coll.dimension
    r = fragility_function(r0, d)
    ranks = [rank_of(o, r) for o in coll.objects]
    k0 = max(ranks)
    boxes = [_widened(o) for o in coll.objects]
    bound = int(cfat) * r ** (2 * d)
    elements, tds, prov = [], [], []
    for y in itertools.product(range(r // 2), repeat=d):
        grid = HierGrid(r, y, k0)
        elem, td = cover_element(coll, ranks, grid, boxes, coll.mode)
        elements.append(elem)
        tds.append(td)
        prov.append({"shift": list(y), "bound": bound, "base": r})
    return GeneralCover(tuple(elements), tuple(tds), Fraction(r0 - 1, r0), bound, tuple(prov))


def odd_power_fat_realization(coll: ObjectCollection, g: Graph, k: int, cfat: int | None = None) -> ObjectCollection:
    """Union objects whose intersection graph is the (2k+1)-th power of ``g``.

    Object v becomes the union of the objects within graph distance k of v.
    """
    if k < 0:
        raise GeometryError("k must be >= 0")
    if intersection_graph(coll) != g:
        raise GeometryError("graph is not the intersection graph of the collection")
    if k == 0:
        return coll
    objs = []
    for v in range(g.n):
        near = sorted(g.bfs(v, limit=k))
        objs.append(UnionObject(tuple(coll.objects[u] for u in near)))
    d = coll.dimension
    c = cfat if cfat is not None else coll.params.get("c")
    params = {"c": None if c is None else 3 ** d * (2 * k + 1) ** d * int(c), "power": 2 * k + 1}
    out = ObjectCollection(d, tuple(objs), "generic", params)
    if intersection_graph(out, coll.mode) != graph_power(g, 2 * k + 1):
        raise AssertionError("union realization does not reproduce the graph power")
    return out
