"""Approximation drivers built on covers, layerings and shifting.

Every driver returns ``(chosen, weight, report)`` where ``chosen`` indexes the
original vertices (or family members) and is feasible in the original graph.
Ratios are exact fractions.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .decomposition import (
    GeneralCover,
    Layering,
    TreeDecomposition,
    cover_from_layering,
    lift_td_to_power,
    sqrt_compress,
    td_independence_number,
    validate_td,
)
from .fatcover import general_cover_fat
from .geometry import EPS, Box, Disk, GeometryError, GridPath, ObjectCollection, bounding_box, scale_collection
from .graph import Graph, SubgraphFamily, WeightedGraph, from_mask, graph_power, intersection_graph, to_mask
from .layered import realization_width, strip_bound, strip_td
from .oracles import AlphaCache, GuardExceeded, pairwise_distance_ok
from .packing import max_weight_independent_packing, mwis_on_td


class PtasError(ValueError):
    pass


@dataclass
class PtasReport:
    instance: str
    method: str
    parameter: str
    achieved: Fraction
    guaranteed: Fraction
    optimum: Fraction | None = None
    achieved_ratio: Fraction | None = None
    elements: list = field(default_factory=list)
    wall_time: float = 0.0

    def with_optimum(self, opt) -> "PtasReport":
        self.optimum = Fraction(opt)
        self.achieved_ratio = Fraction(1) if self.optimum == 0 else self.achieved / self.optimum
        return self

    def meets_guarantee(self) -> bool | None:
        if self.optimum is None:
            return None
        return self.achieved >= self.guaranteed * self.optimum

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("achieved", "guaranteed", "optimum", "achieved_ratio"):
            if out[key] is not None:
                out[key] = str(out[key])
        return out


def _fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


# ---------------------------------------------------------------------------
# cover-based schemes


def _solve_on_element(g: Graph, elem, td: TreeDecomposition, fam: SubgraphFamily):
    sub, ids = g.induced(sorted(elem))
    pos = {v: i for i, v in enumerate(ids)}
    local_td = TreeDecomposition(tuple(frozenset(pos[v] for v in b) for b in td.bags), td.edges)
    inside, keep = fam.restrict(elem)
    local_fam = SubgraphFamily(tuple(tuple(pos[v] for v in m) for m in inside.members), inside.weights, fam.h)
    stats = {}
    chosen, weight = max_weight_independent_packing(sub, local_fam, local_td, stats)
    return [keep[j] for j in chosen], weight, stats


def ptas_packing_from_cover(g: Graph, cover: GeneralCover, fam: SubgraphFamily, r: int,
                            instance: str = "", method: str = "cover-packing"):
    """Best per-element exact packing; at least (1 - h/r) of the optimum."""
    h = fam.h
    if r <= h:
        raise PtasError(f"need r > h (r={r}, h={h})")
    t0 = time.perf_counter()
    best = None
    rows = []
    alpha = AlphaCache(g)
    for i, (elem, td) in enumerate(zip(cover.elements, cover.tds)):
        chosen, weight, stats = _solve_on_element(g, elem, td, fam)
        stats.update({"element": i, "size": len(elem), "weight": str(weight),
                      "alpha": td_independence_number(g, td, alpha)})
        rows.append(stats)
        if best is None or weight > best[1]:
            best = (chosen, weight)
    chosen, weight = best
    if not pairwise_distance_ok(g, fam, chosen, 2):
        raise AssertionError("cover solution is not an independent packing")
    report = PtasReport(instance, method, f"r={r}", weight, 1 - Fraction(h, r), elements=rows,
                        wall_time=round(time.perf_counter() - t0, 6))
    return sorted(chosen), weight, report


def ptas_mwis_fat(coll: ObjectCollection, cfat: int, weights, r: int, instance: str = ""):
    """Independent set of weight at least (1 - 1/r) OPT in the intersection graph of a fat collection."""
    if r < 2:
        raise PtasError("r must be >= 2")
    g = intersection_graph(coll)
    scaled, _ = scale_collection(coll)
    if intersection_graph(scaled) != g:
        raise GeometryError("rescaling changed the intersection graph; coordinates are too close to tangency")
    cover = general_cover_fat(scaled, cfat, r)
    fam = SubgraphFamily.singletons(g.n, weights)
    chosen, weight, report = ptas_packing_from_cover(g, cover, fam, r, instance, "fat-cover")
    if not g.is_independent(chosen):
        raise AssertionError("fat-cover solution is not independent")
    return chosen, weight, report


def ptas_distance_d(g: Graph, td: TreeDecomposition, layering: Layering, ell: int, fam: SubgraphFamily,
                    d: int, r: int, instance: str = ""):
    """Distance-d packing (d even) of weight at least (1 - h/r) OPT from a layered decomposition."""
    if d < 2 or d % 2:
        raise PtasError("distance-d packing schemes exist here only for even d; odd d is an open question")
    k = d // 2
    gp = graph_power(g, d - 1)
    ltd, llay = lift_td_to_power(g, td, layering, k - 1)
    lifted_bound = (4 * k - 3) * ell
    cover = cover_from_layering(gp, ltd, llay, r, lifted_bound)
    chosen, weight, report = ptas_packing_from_cover(gp, cover, fam, r, instance, f"distance-{d}")
    if not pairwise_distance_ok(g, fam, chosen, d):
        raise AssertionError("distance-d solution violates the distance requirement")
    report.parameter = f"r={r},d={d}"
    return chosen, weight, report


# ---------------------------------------------------------------------------
# shifting schemes


def _ceil_ratio(num, eps: Fraction) -> int:
    return math.ceil(Fraction(num) / eps)


def _check_eps(eps) -> Fraction:
    e = _fraction(eps)
    if not 0 < e < 1:
        raise PtasError(f"epsilon must lie in (0, 1), got {eps}")
    return e


def residue_classes(classes: dict, period: int) -> list:
    """V_d for d = 0..period-1: vertices owning a column index congruent to d."""
    return [frozenset(v for i, vs in classes.items() if (i - dres) % period == 0 for v in vs)
            for dres in range(period)]


def path_column_classes(coll: ObjectCollection) -> dict:
    """Column index -> paths with a horizontal lattice edge starting in that column."""
    x0 = min(bounding_box(o)[0][0] for o in coll.objects)
    classes = {}
    for v, o in enumerate(coll.objects):
        for (a, b) in o.lattice_edges():
            if a[1] == b[1]:
                classes.setdefault(min(a[0], b[0]) - x0, set()).add(v)
    return classes


def unit_column_classes(coll: ObjectCollection) -> dict:
    """Unit column index -> objects whose x-extent meets that column."""
    x0 = min(bounding_box(o)[0][0] for o in coll.objects)
    classes = {}
    for v, o in enumerate(coll.objects):
        lo, hi = bounding_box(o)
        for i in range(math.floor(lo[0] - x0), math.floor(hi[0] - x0) + 1):
            classes.setdefault(i, set()).add(v)
    return classes


def _shift_solve(coll: ObjectCollection, g: Graph, weights, classes: dict, period: int, window,
                 instance: str, method: str, eps: Fraction, multiplicity_cap: int):
    """Shared residue loop: drop one residue class, solve the pieces exactly, keep the best.

    Components of ``g`` that already fit the window are never cut; only wide
    components lose their residue-class vertices.
    """
    t0 = time.perf_counter()
    residue_sets = residue_classes(classes, period)
    narrow = set()
    for comp in g.components():
        if realization_width(coll.subset(comp)) <= float(window) + EPS:
            narrow.update(comp)
    counts = [0] * g.n
    for s in residue_sets:
        for v in s:
            counts[v] += 1
    if counts and max(counts) > multiplicity_cap:
        raise AssertionError(f"a vertex lies in {max(counts)} residue classes (cap {multiplicity_cap})")
    best, rows = None, []
    for dres, removed in enumerate(residue_sets):
        keep = to_mask(set(range(g.n)) - (removed - narrow))
        chosen, total, peak, widest = [], Fraction(0), 0, 0
        for comp in g.components(keep):
            sub_coll = coll.subset(comp)
            td = strip_td(sub_coll, window)
            widest = max(widest, strip_bound(sub_coll, window))
            sub, ids = g.induced(comp)
            stats = {}
            local, w = mwis_on_td(WeightedGraph(sub, tuple(weights[v] for v in ids)), td, stats)
            peak = max(peak, stats["peak_states"])
            chosen.extend(ids[v] for v in local)
            total += w
        rows.append({"residue": dres, "removed": len(removed - narrow), "weight": str(total), "peak_states": peak,
                     "strip_bound": widest})
        if best is None or total > best[1]:
            best = (sorted(chosen), total)
    chosen, weight = best
    if not g.is_independent(chosen):
        raise AssertionError("shifting solution is not independent")
    report = PtasReport(instance, method, f"eps={eps}", weight, 1 - eps, elements=rows,
                        wall_time=round(time.perf_counter() - t0, 6))
    return chosen, weight, report


def ptas_mwis_shifting_paths(coll: ObjectCollection, mode: str, ell: int, eps, weights=None, instance: str = ""):
    """Shifting over lattice columns for grid paths whose horizontal parts span at most ``ell`` columns."""
    e = _check_eps(eps)
    if coll.kind != ("grid-paths-v" if mode == "v" else "grid-paths-e"):
        raise PtasError(f"mode {mode} does not match collection kind {coll.kind}")
    if any(not isinstance(o, GridPath) for o in coll.objects):
        raise PtasError("shifting for paths needs grid paths")
    c = int(ell)
    for o in coll.objects:
        lo, hi = bounding_box(o)
        if hi[0] - lo[0] > c:
            raise PtasError(f"horizontal part exceeds l={c}")
    k = _ceil_ratio(1, e)
    period = k * c
    classes = path_column_classes(coll)
    g = intersection_graph(coll, mode)
    weights = tuple(weights) if weights is not None else (1,) * g.n
    return _shift_solve(coll, g, weights, classes, period, period, instance, f"shifting-paths-{mode}", e, c)


def _normalize(coll: ObjectCollection):
    if coll.kind == "unit-disks":
        radii = {o.radius for o in coll.objects if isinstance(o, Disk)}
        if len(radii) != 1 or len(coll.objects) != sum(isinstance(o, Disk) for o in coll.objects):
            raise PtasError("unit-disk shifting needs disks of one common radius")
        f = 1.0 / radii.pop()
    elif coll.kind == "unit-width-rects":
        widths = {o.hi[0] - o.lo[0] for o in coll.objects if isinstance(o, Box)}
        if len(coll.objects) != sum(isinstance(o, Box) for o in coll.objects) or max(widths) - min(widths) > 1e-9:
            raise PtasError("rectangle shifting needs boxes of one common width")
        f = 1.0 / max(widths)
    else:
        raise PtasError(f"no shifting scheme for kind {coll.kind!r}")
    if f == 1.0:
        return coll
    objs = []
    for o in coll.objects:
        if isinstance(o, Disk):
            objs.append(Disk(tuple(x * f for x in o.center), 1.0))
        else:
            objs.append(Box(tuple(x * f for x in o.lo), (o.lo[0] * f + 1.0,) + tuple(x * f for x in o.hi[1:])))
    params = {"radius": 1.0} if coll.kind == "unit-disks" else {"width": 1.0}
    return ObjectCollection(coll.dimension, tuple(objs), coll.kind, params)


def ptas_mwis_shifting_geom(coll: ObjectCollection, eps, weights=None, instance: str = ""):
    """Shifting over unit columns for unit disks (k = ceil(3/eps)) or unit-width rectangles (k = ceil(2/eps))."""
    e = _check_eps(eps)
    g = intersection_graph(coll)
    norm = _normalize(coll)
    if intersection_graph(norm) != g:
        raise GeometryError("normalisation changed the intersection graph")
    disks = norm.kind == "unit-disks"
    k = _ceil_ratio(3 if disks else 2, e)
    classes = unit_column_classes(norm)
    weights = tuple(weights) if weights is not None else (1,) * g.n
    method = "shifting-disks" if disks else "shifting-rects"
    return _shift_solve(norm, g, weights, classes, k, k - 1, instance, method, e, 3 if disks else 2)


# ---------------------------------------------------------------------------
# subexponential exact path


def subexp_exact(g: Graph, td: TreeDecomposition, layering: Layering, ell: int, fam: SubgraphFamily, d: int = 2,
                 stats: dict | None = None):
    """Exact distance-d packing through a compressed decomposition of independence number O(sqrt(n))."""
    if d < 2 or d % 2:
        raise PtasError("only even d is supported")
    k = d // 2
    if k > 1:
        host = graph_power(g, d - 1)
        htd, hlay = lift_td_to_power(g, td, layering, k - 1)
        bound = (4 * k - 3) * ell
    else:
        host, htd, hlay, bound = g, td, layering, ell
    ctd = sqrt_compress(host, htd, hlay, bound)
    bad = validate_td(host, ctd)
    if bad:
        raise AssertionError(f"compressed decomposition is invalid: {bad}")
    alpha = td_independence_number(host, ctd)
    if alpha * alpha > 4 * bound * g.n:
        raise AssertionError(f"compressed independence number {alpha} exceeds 2*sqrt({bound}*{g.n})")
    info = {}
    chosen, weight = max_weight_independent_packing(host, fam, ctd, info)
    if not pairwise_distance_ok(g, fam, chosen, d):
        raise AssertionError("subexponential solution violates the distance requirement")
    if stats is not None:
        stats.update(info)
        stats.update({"compressed_alpha": alpha, "layered_bound": bound})
    return chosen, weight


# ---------------------------------------------------------------------------
# explicit F-copies


def connected_subsets(g: Graph, h: int, guard: int = 5000) -> list:
    """All connected vertex subsets of size at most ``h`` (sorted tuples), by canonical extension."""
    if h < 1:
        raise PtasError("h must be >= 1")
    found = set()
    frontier = {(v,) for v in range(g.n)}
    found |= frontier
    for _ in range(h - 1):
        nxt = set()
        for s in frontier:
            m = to_mask(s)
            ext = 0
            for v in s:
                ext |= g.nbr[v]
            for u in from_mask(ext & ~m):
                nxt.add(tuple(sorted(s + (u,))))
        nxt -= found
        found |= nxt
        frontier = nxt
        if len(found) > guard:
            raise GuardExceeded(f"more than {guard} connected subsets of size <= {h}")
    return sorted(found, key=lambda s: (len(s), s))
