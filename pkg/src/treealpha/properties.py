"""Randomized property suite binding every construction to an exact oracle.

Each ``PropertyCase`` names one invariant of one module, a generator spec and
a seed range.  ``run_suite`` runs the selected cases (optionally in worker
processes; results are aggregated in registry order, so the report does not
depend on scheduling), shrinks every failing instance by greedy object or
vertex removal, and can write JUnit-style XML and a JSON failure dump.

    python -m treealpha.properties --filter 'decomposition.*' --junit out.xml
"""
from __future__ import annotations

import argparse
import fnmatch
import itertools
import json
import math
import sys
import tempfile
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import io
from .decomposition import (
    GeneralCover,
    TreeDecomposition,
    ball,
    balanced_separation_from_td,
    check_cover,
    check_layering,
    cover_from_layering,
    heuristic_td,
    layered_independence_number,
    lift_td_to_conflict,
    lift_td_to_power,
    restrict_to_ball,
    separation_from_cover,
    sqrt_compress,
    td_from_elimination_order,
    td_independence_number,
    validate_td,
)
from .fatcover import HierGrid, fragility_function, general_cover_fat, odd_power_fat_realization, survives_by_axes, survives_by_cell
from .fatcover import _widened
from .generators import generate_instance, random_graph, random_weights, stream
from .geometry import (
    EPS,
    Box,
    Disk,
    GridPath,
    ObjectCollection,
    UnionObject,
    bounding_box,
    estimate_fatness,
    intersects,
    object_size,
    rank_of,
    scale_collection,
)
from .graph import Graph, SubgraphFamily, WeightedGraph, conflict_graph, graph_power, intersection_graph, to_mask
from .layered import ceil_2sqrt2, layered_td, realization_width, strip_structure, strip_td
from .oracles import AlphaCache, bruteforce_mwis, bruteforce_packing, pairwise_distance_ok
from .packing import distance_d_packing_exact, max_weight_independent_packing, mwis_on_td
from .ptas import (
    _normalize,
    path_column_classes,
    ptas_distance_d,
    ptas_mwis_fat,
    ptas_mwis_shifting_geom,
    ptas_mwis_shifting_paths,
    ptas_packing_from_cover,
    residue_classes,
    unit_column_classes,
)

SHRINK_BUDGET = 150


@dataclass(frozen=True)
class PropertyCase:
    pid: str
    invariant: str
    generator: dict
    check: Callable
    seeds: range = range(10)
    tolerance: str = "exact"

    @property
    def module(self) -> str:
        return self.pid.split(".")[0]


@dataclass
class CaseResult:
    pid: str
    runs: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class SuiteReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list:
        return [f for r in self.results for f in r.failures]

    def summary(self) -> str:
        bad = [r.pid for r in self.results if not r.passed]
        runs = sum(r.runs for r in self.results)
        line = f"{len(self.results)} properties, {runs} runs, {len(bad)} failing"
        return line + (": " + ", ".join(bad) if bad else "")

    def write_junit(self, path) -> None:
        suite = ET.Element("testsuite", name="treealpha-properties", tests=str(len(self.results)),
                           failures=str(sum(not r.passed for r in self.results)))
        for r in self.results:
            case = ET.SubElement(suite, "testcase", classname=r.pid.split(".")[0], name=r.pid,
                                 time=f"{r.seconds:.3f}")
            for f in r.failures:
                node = ET.SubElement(case, "failure", message=f"seed {f['seed']}: {f['message']}")
                node.text = json.dumps(f["witness"], sort_keys=True)
        ET.ElementTree(suite).write(path, encoding="utf-8", xml_declaration=True)

    def write_failures(self, path) -> None:
        Path(path).write_text(io.dumps({"failures": self.failures}))


# ---------------------------------------------------------------------------
# instances and shrinking


def make_instance(generator: dict, seed: int):
    spec = dict(generator)
    n = spec.get("n")
    if isinstance(n, (list, tuple)):
        lo, hi = n
        spec["n"] = int(stream(seed, "property-size").integers(lo, hi + 1))
    if spec["kind"] == "gnp":
        return random_graph(spec["n"], spec.get("p", 0.3), seed)
    if spec["kind"] == "two-blocks":
        return _two_blocks(spec, seed)
    return generate_instance({**spec, "seed": seed})


def _size(inst):
    if isinstance(inst, ObjectCollection):
        return len(inst)
    if isinstance(inst, Graph):
        return inst.n
    return None


def _drop(inst, i):
    keep = [j for j in range(_size(inst)) if j != i]
    if isinstance(inst, ObjectCollection):
        return inst.subset(keep)
    return inst.induced(keep)[0]


def _witness(inst):
    if isinstance(inst, ObjectCollection):
        return io.instance_to_dict(inst)
    if isinstance(inst, Graph):
        return io.graph_to_dict(inst)
    return {"repr": repr(inst)}


def _outcome(check, inst, seed):
    try:
        return check(inst, seed)
    except Exception as exc:  # a crash is a failure of the property, with the same shrinking
        return f"raised {type(exc).__name__}: {exc}"


def shrink(check, inst, seed, budget: int = SHRINK_BUDGET):
    """Greedily remove objects (or vertices) while the check keeps failing."""
    if _size(inst) is None:
        return inst, _outcome(check, inst, seed)
    message = _outcome(check, inst, seed)
    calls = 0
    progress = True
    while progress and calls < budget and _size(inst) > 1:
        progress = False
        for i in range(_size(inst) - 1, -1, -1):
            if calls >= budget:
                break
            cand = _drop(inst, i)
            calls += 1
            msg = _outcome(check, cand, seed)
            if msg:
                inst, message, progress = cand, msg, True
                break
    return inst, message


# ---------------------------------------------------------------------------
# helpers shared by checks


def _fail_if(cond, msg):
    return msg if cond else None


def _first(*msgs):
    for m in msgs:
        if m:
            return m
    return None


def theorem_bound(coll: ObjectCollection) -> int:
    kind = coll.kind
    if kind == "unit-disks":
        return 3
    if kind == "unit-width-rects":
        return 1
    if kind == "grid-paths-v":
        return 2 * int(coll.params["l"])
    if kind == "grid-paths-e":
        return 6 * int(coll.params["l"]) - 1
    if kind == "similarly-sized-fat":
        return ceil_2sqrt2(Fraction(coll.params["k"])) * int(coll.params["c"])
    raise ValueError(f"no layered theorem for {kind}")


def _bfs_distance(g: Graph, a, b) -> float:
    best = math.inf
    targets = set(b)
    for u in a:
        dist = g.bfs(u)
        for v in targets:
            if v in dist:
                best = min(best, dist[v])
    return best


def _lens_y_range(p: Disk, q: Disk):
    (x1, y1), (x2, y2) = p.center, q.center
    d = math.dist(p.center, q.center)
    if d + min(p.radius, q.radius) <= max(p.radius, q.radius) + EPS:
        small = p if p.radius <= q.radius else q
        return [(small.center[1] - small.radius, small.center[1] + small.radius)]
    ys = []
    for a, b in ((p, q), (q, p)):
        for sgn in (1, -1):
            top = (a.center[0], a.center[1] + sgn * a.radius)
            if math.dist(top, b.center) <= b.radius + EPS:
                ys.append(top[1])
    along = (p.radius ** 2 - q.radius ** 2 + d * d) / (2 * d)
    h = math.sqrt(max(0.0, p.radius ** 2 - along ** 2))
    ux, uy = (x2 - x1) / d, (y2 - y1) / d
    for sgn in (1, -1):
        ys.append(y1 + along * uy + sgn * h * ux)
    return [(min(ys), max(ys))]


def common_y_ranges(a, b, mode: str):
    """y-intervals containing common points of two intersecting objects."""
    if isinstance(a, Disk) and isinstance(b, Disk):
        return _lens_y_range(a, b)
    if isinstance(a, Box) and isinstance(b, Box):
        return [(max(a.lo[1], b.lo[1]), min(a.hi[1], b.hi[1]))]
    if isinstance(a, GridPath) and isinstance(b, GridPath):
        if mode == "e":
            shared = a.lattice_edges() & b.lattice_edges()
            return [(min(p[1], q[1]), max(p[1], q[1])) for p, q in shared]
        return [(p[1], p[1]) for p in a.lattice_points() & b.lattice_points()]
    raise ValueError("unsupported pair for the strip witness check")


# ---------------------------------------------------------------------------
# geometry


def chk_intersects_symmetric(coll, seed):
    objs, mode = coll.objects, coll.mode
    for i, o in enumerate(objs):
        if not intersects(o, o, mode):
            return f"object {i} does not meet itself"
    g = intersection_graph(coll)
    unions = [UnionObject((objs[u], objs[v])) for u, v in g.edges()[:5]] if coll.kind != "grid-paths-e" else []
    pool = list(objs) + unions
    for u in unions:
        if not intersects(u, u, mode):
            return "union object does not meet itself"
    for i, j in itertools.combinations(range(len(pool)), 2):
        if intersects(pool[i], pool[j], mode) != intersects(pool[j], pool[i], mode):
            return f"intersects({i}, {j}) is not symmetric"
    return None


def chk_union_size(coll, seed):
    g = intersection_graph(coll)
    objs = coll.objects
    for u, v in g.edges():
        un = UnionObject((objs[u], objs[v]))
        s = object_size(un)
        if s + EPS < max(object_size(objs[u]), object_size(objs[v])):
            return f"union of {u},{v} is smaller than a member"
        lo, hi = bounding_box(un)
        if abs(s - max(h - l for l, h in zip(lo, hi))) > EPS:
            return f"union of {u},{v}: size differs from its bounding-box side"
    return None


def chk_rank(coll, seed):
    scaled, _ = scale_collection(coll)
    sizes = [object_size(o) for o in scaled.objects]
    for r in (2, 4, 8):
        for i in range(6):
            if rank_of(float(r) ** -i, r) != i:
                return f"rank_of(r^-{i}) != {i} for r={r}"
        ranks = [rank_of(o, r) for o in scaled.objects]
        for s, i in zip(sizes, ranks):
            lo, hi = float(r) ** -(i + 1), float(r) ** -i
            if not (lo < s * (1 + 1e-12) and s <= hi * (1 + 1e-12)):
                return f"size {s} has rank {i} outside ({lo}, {hi}] for r={r}"
        order = sorted(range(len(sizes)), key=lambda v: sizes[v])
        for a, b in zip(order, order[1:]):
            if sizes[b] > sizes[a] and ranks[b] > ranks[a]:
                return f"rank increases with size ({sizes[a]} -> {sizes[b]}) for r={r}"
    return None


def chk_generate_deterministic(coll, seed):
    spec = {"kind": coll.kind if coll.kind != "generic" else "biclique", "n": len(coll), "seed": seed}
    first = io.dumps(io.instance_to_dict(generate_instance(spec)))
    second = io.dumps(io.instance_to_dict(generate_instance(spec)))
    return _fail_if(first != second, "equal specs produced different instances")


def chk_fatness_sound(coll, seed):
    est = estimate_fatness(coll, probes=10 ** 9)
    objs = coll.objects
    d = coll.dimension
    best = 1
    for side in sorted({object_size(o) for o in objs}):
        big = [i for i, o in enumerate(objs) if object_size(o) >= side - EPS]
        for o in objs:
            lo, hi = bounding_box(o)
            for mask in range(1 << d):
                corner = tuple(hi[k] if mask >> k & 1 else lo[k] for k in range(d))
                for start in (corner, tuple(x - side for x in corner)):
                    probe = Box(start, tuple(x + side for x in start))
                    hit = [i for i in big if intersects(objs[i], probe)]
                    for m in range(len(hit), best, -1):
                        if any(all(not intersects(objs[a], objs[b]) for a, b in itertools.combinations(c, 2))
                               for c in itertools.combinations(hit, m)):
                            best = m
                            break
    return _fail_if(est > best, f"estimate {est} exceeds the brute-force maximum {best}")


# ---------------------------------------------------------------------------
# graph core


def chk_power_monotone(coll, seed):
    g = intersection_graph(coll)
    prev = set(g.edges())
    for p in range(2, 6):
        cur = set(graph_power(g, p).edges())
        if not prev <= cur:
            return f"power {p - 1} has an edge missing from power {p}"
        prev = cur
    return None


def chk_conflict_singletons(g, seed):
    return _fail_if(conflict_graph(g, SubgraphFamily.singletons(g.n)) != g,
                    "conflict graph of singletons differs from the host")


def chk_bruteforce_packing_distance(coll, seed):
    g = intersection_graph(coll)
    fams = [SubgraphFamily.singletons(g.n, random_weights(g.n, seed))]
    if g.num_edges() <= 30:
        fams.append(SubgraphFamily.edges_and_vertices(g))
    for fam in fams:
        for d in (2, 3, 4):
            chosen, _ = bruteforce_packing(g, fam, d)
            for i, j in itertools.combinations(chosen, 2):
                if _bfs_distance(g, fam.members[i], fam.members[j]) < d:
                    return f"members {i},{j} closer than {d}"
    return None


def chk_permutation(coll, seed):
    rng = stream(seed, "permutation")
    perm = [int(x) for x in rng.permutation(len(coll))]  # new position p holds old object perm[p]
    moved = ObjectCollection(coll.dimension, tuple(coll.objects[i] for i in perm), coll.kind, coll.params)
    g, h = intersection_graph(coll), intersection_graph(moved)
    mapped = {tuple(sorted((perm[a], perm[b]))) for a, b in h.edges()}
    return _fail_if(mapped != set(g.edges()), "permuted objects give a non-isomorphic graph")


# ---------------------------------------------------------------------------
# decomposition


def chk_all_tds_valid(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    checks = [("layered", validate_td(g, td)), ("heuristic", validate_td(g, heuristic_td(g))),
              ("strip", validate_td(g, strip_td(coll, realization_width(coll))))]
    order = [int(x) for x in stream(seed, "order").permutation(g.n)]
    checks.append(("elimination", validate_td(g, td_from_elimination_order(g, order))))
    cover = cover_from_layering(g, td, lay, 3, k)
    checks.append(("cover", check_cover(g, cover)))
    for d in (1, 2):
        ptd, play = lift_td_to_power(g, td, lay, d)
        checks.append((f"power-{d}", validate_td(graph_power(g, 1 + 2 * d), ptd)))
    fam = SubgraphFamily.edges_and_vertices(g)
    checks.append(("conflict", validate_td(conflict_graph(g, fam), lift_td_to_conflict(g, td, fam))))
    checks.append(("ball", validate_td(g, restrict_to_ball(g, td, lay, 0, 2), ball(g, 0, 2))))
    for name, bad in checks:
        if bad:
            return f"{name} decomposition invalid: {bad}"
    return None


def chk_cover_from_layering(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    idx = lay.index()
    for r in (2, 3, 5):
        cover = cover_from_layering(g, td, lay, r, k)
        mult = cover.multiplicity(g.n)
        if any(m != r - 1 for m in mult):
            return f"r={r}: membership counts {sorted(set(mult))} are not exactly {r - 1}"
        for e, etd in zip(cover.elements, cover.tds):
            bad = validate_td(g, etd, e)
            if bad:
                return f"r={r}: element decomposition invalid: {bad}"
            for comp in g.components(to_mask(e)):
                layers = {idx[v] for v in comp}
                if max(layers) - min(layers) + 1 > r - 1:
                    return f"r={r}: a component spans {max(layers) - min(layers) + 1} layers"
    return None


def chk_sqrt_valid(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    out = sqrt_compress(g, td, lay, k)
    bad = validate_td(g, out)
    return f"compressed decomposition invalid: {bad}" if bad else None


def chk_sqrt_bound(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    alpha = td_independence_number(g, sqrt_compress(g, td, lay, k))
    return _fail_if(alpha * alpha > 4 * k * g.n, f"compressed alpha {alpha} exceeds 2*sqrt({k}*{g.n})")


def chk_power_layering(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    for d in (1, 2):
        ptd, play = lift_td_to_power(g, td, lay, d)
        gp = graph_power(g, 1 + 2 * d)
        bad = check_layering(gp, play) or validate_td(gp, ptd)
        if bad:
            return f"d={d}: {bad}"
        value = layered_independence_number(gp, ptd, play, AlphaCache(gp))
        if value > (1 + 4 * d) * k:
            return f"d={d}: lifted layered independence {value} exceeds {(1 + 4 * d) * k}"
    return None


def chk_conflict_lift(coll, seed):
    g = intersection_graph(coll)
    td, _, _, _ = layered_td(coll)
    for fam in (SubgraphFamily.edges_and_vertices(g), SubgraphFamily.all_edges(g)):
        bad = validate_td(conflict_graph(g, fam), lift_td_to_conflict(g, td, fam))
        if bad:
            return f"conflict lift invalid: {bad}"
    return None


def chk_balanced_td(coll, seed):
    g = intersection_graph(coll)
    td, _, _, _ = layered_td(coll)
    sep = balanced_separation_from_td(g, td)
    limit = math.ceil(2 * g.n / 3)
    return _first(
        "; ".join(sep.check(g)),
        _fail_if(len(sep.A - sep.B) > limit or len(sep.B - sep.A) > limit, "a side exceeds ceil(2n/3)"),
        _fail_if(sep.separator not in set(td.bags), "separator is not a bag"),
    )


def chk_separation_from_cover(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    sep = separation_from_cover(g, cover_from_layering(g, td, lay, 3, k))
    return _first(
        "; ".join(sep.check(g)),
        _fail_if(not sep.is_balanced(g.n), "cover separation is not balanced"),
        _fail_if(sep.separator_alpha != AlphaCache(g)(sep.separator), "reported separator alpha is wrong"),
    )


# ---------------------------------------------------------------------------
# layered constructions


def chk_layered_valid(coll, seed):
    g = intersection_graph(coll)
    td, lay, _, _ = layered_td(coll)
    bad = validate_td(g, td) or check_layering(g, lay)
    return f"{bad}" if bad else None


def chk_layered_bound(coll, seed):
    g = intersection_graph(coll)
    td, lay, bound, _ = layered_td(coll)
    expect = theorem_bound(coll)
    if bound != expect:
        return f"declared bound {bound} differs from the theorem value {expect}"
    value, wit = layered_independence_number(g, td, lay, AlphaCache(g), witness=True)
    return _fail_if(value > bound, f"layered independence {value} > {bound}; witness {wit}")


def chk_layered_path_shape(coll, seed):
    td, _, _, _ = layered_td(coll)
    n = len(coll)
    ok_edges = set(td.edges) == {(i, i + 1) for i in range(len(td) - 1)}
    return _first(_fail_if(not ok_edges, "tree is not a path"),
                  _fail_if(len(td) > max(1, 4 * n - 2), f"{len(td)} nodes exceed 4n-2"))


def chk_layered_edge_witness(coll, seed):
    g = intersection_graph(coll)
    td, _, _, _ = layered_td(coll)
    strips = strip_structure(coll).strips
    if len(strips) != len(td):
        return "bags do not correspond to strips"
    for u, v in g.edges():
        spans = common_y_ranges(coll.objects[u], coll.objects[v], coll.mode)
        if not any(u in bag and v in bag and any(a <= hi + EPS and lo <= b + EPS for lo, hi in spans)
                   for (a, b), bag in zip(strips, td.bags)):
            return f"edge {u}-{v} has no bag whose strip holds a common point"
    return None


# ---------------------------------------------------------------------------
# fat cover


def _scaled(coll):
    scaled, _ = scale_collection(coll)
    return scaled


def chk_grid_refinement(coll, seed):
    scaled = _scaled(coll)
    for r0 in (2, 3):
        r = fragility_function(r0, 2)
        ranks = [rank_of(o, r) for o in scaled.objects]
        k0 = max(ranks)
        for y in itertools.product(range(r // 2), repeat=2):
            grid = HierGrid(r, y, k0)
            for o in scaled.objects:
                lo = _widened(o)[0]
                for i in range(1, k0 + 2):
                    m = grid.cell_of(i, lo)
                    clo, chi = grid.cell_bounds(i, m)
                    pm = grid.cell_of(i - 1, grid.cell_center(i, m))
                    plo, phi = grid.cell_bounds(i - 1, pm)
                    if not all(a <= b and c <= e for a, b, c, e in zip(plo, clo, chi, phi)):
                        return f"rank-{i} cell {m} is not inside rank-{i - 1} cell {pm} (shift {y})"
                    if grid.cell_of(i - 1, clo) != pm:
                        return f"rank-{i} cell {m} touches two rank-{i - 1} cells (shift {y})"
    return None


def chk_survival_two_ways(coll, seed):
    scaled = _scaled(coll)
    for r0 in (2, 3):
        r = fragility_function(r0, 2)
        ranks = [rank_of(o, r) for o in scaled.objects]
        boxes = [_widened(o) for o in scaled.objects]
        for y in itertools.product(range(r // 2), repeat=2):
            grid = HierGrid(r, y, max(ranks))
            for v, (rk, box) in enumerate(zip(ranks, boxes)):
                if survives_by_axes(grid, rk, box) != survives_by_cell(grid, rk, box):
                    return f"object {v} at shift {y}: survival tests disagree"
    return None


def chk_unique_rank_bag(coll, seed):
    scaled = _scaled(coll)
    for r0 in (2, 3):
        cover = general_cover_fat(scaled, 16, r0)
        r = fragility_function(r0, 2)
        ranks = [rank_of(o, r) for o in scaled.objects]
        boxes = [_widened(o) for o in scaled.objects]
        k0 = max(ranks)
        for elem, td, prov in zip(cover.elements, cover.tds, cover.provenance):
            grid = HierGrid(r, tuple(prov["shift"]), k0)
            order = sorted({(ranks[v], grid.cell_of(ranks[v], boxes[v][0])) for v in elem})
            node_rank = {t + 1: key[0] for t, key in enumerate(order)}
            for v in elem:
                hits = [t for t, rk in node_rank.items() if rk == ranks[v] and v in td.bags[t]]
                if len(hits) != 1:
                    return f"vertex {v} of rank {ranks[v]} lies in {len(hits)} bags of its rank"
    return None


def chk_fat_cover(coll, seed):
    g = intersection_graph(coll)
    scaled = _scaled(coll)
    if intersection_graph(scaled) != g:
        return "rescaling changed the graph"
    cache = AlphaCache(g)
    for r0 in (2, 3):
        cover = general_cover_fat(scaled, 16, r0)
        f = fragility_function(r0, 2)
        if len(cover) != (f // 2) ** 2:
            return f"r0={r0}: {len(cover)} elements, expected {(f // 2) ** 2}"
        need = Fraction(r0 - 1, r0) * len(cover)
        low = min(cover.multiplicity(g.n))
        if low < need:
            return f"r0={r0}: a vertex is covered {low} < {need} times"
        for e, td in zip(cover.elements, cover.tds):
            bad = validate_td(g, td, e)
            if bad:
                return f"r0={r0}: element decomposition invalid: {bad}"
            if td_independence_number(g, td, cache) > 16 * f ** 4:
                return f"r0={r0}: element alpha exceeds c*f^4"
    return None


def chk_odd_power(coll, seed):
    g = intersection_graph(coll)
    for k in (1, 2):
        out = odd_power_fat_realization(coll, g, k)
        if intersection_graph(out, coll.mode) != graph_power(g, 2 * k + 1):
            return f"k={k}: realization differs from the {2 * k + 1}-th power"
    return None


# ---------------------------------------------------------------------------
# packing solver


def _random_td(g, seed):
    order = [int(x) for x in stream(seed, "td-order").permutation(g.n)]
    return td_from_elimination_order(g, order)


def chk_dp_equals_bruteforce(g, seed):
    weights = random_weights(g.n, seed)
    wg = WeightedGraph(g, weights)
    td = _random_td(g, seed)
    got = mwis_on_td(wg, td)
    want = bruteforce_mwis(wg)
    return _fail_if(got != want, f"DP {got} differs from brute force {want}")


def chk_dp_packing_equals_bruteforce(coll, seed):
    g = intersection_graph(coll)
    td, lay, _, _ = layered_td(coll)
    fam = SubgraphFamily.edges_and_vertices(g)
    if len(fam) > 40:
        fam = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    got = max_weight_independent_packing(g, fam, td)
    want = bruteforce_packing(g, fam, 2)
    if got != want:
        return f"packing DP {got} differs from brute force {want}"
    ptd, _ = lift_td_to_power(g, td, lay, 1)
    single = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    got = distance_d_packing_exact(g, single, ptd, 4)
    want = bruteforce_packing(g, single, 4)
    return _fail_if(got != want, f"distance-4 DP {got} differs from brute force {want}")


def chk_dp_state_bound(g, seed):
    wg = WeightedGraph(g, random_weights(g.n, seed))
    trace = []
    mwis_on_td(wg, _random_td(g, seed), trace=trace)
    cache = AlphaCache(g)
    for bag, size in trace:
        a = cache(bag)
        cap = sum(math.comb(len(bag), i) for i in range(a + 1))
        if size > cap:
            return f"table of {size} states over bag {sorted(bag)} exceeds {cap}"
    return None


def chk_dp_feasible(coll, seed):
    g = intersection_graph(coll)
    td, lay, _, _ = layered_td(coll)
    chosen, _ = mwis_on_td(WeightedGraph(g, random_weights(g.n, seed)), td)
    if not g.is_independent(chosen):
        return "DP set is not independent"
    fam = SubgraphFamily.all_edges(g)
    chosen, _ = max_weight_independent_packing(g, fam, td)
    if not pairwise_distance_ok(g, fam, chosen, 2):
        return "DP packing members are too close"
    ptd, _ = lift_td_to_power(g, td, lay, 1)
    chosen, _ = distance_d_packing_exact(g, SubgraphFamily.singletons(g.n), ptd, 4)
    return _fail_if(any(_bfs_distance(g, [a], [b]) < 4 for a, b in itertools.combinations(chosen, 2)),
                    "distance-4 packing members are too close")


def _two_blocks(spec, seed):
    """Two random blocks sharing the vertices 0..s-1, with a decomposition per block joined through S."""
    rng = stream(seed, "two-blocks")
    s, p, q = int(spec.get("s", 3)), int(spec.get("left", 6)), int(spec.get("right", 6))
    S = list(range(s))
    P = list(range(s, s + p))
    Q = list(range(s + p, s + p + q))
    edges = set()
    for block in (S + P, S + Q):
        for u, v in itertools.combinations(block, 2):
            if rng.random() < 0.35:
                edges.add((u, v))
    g = Graph(s + p + q, sorted(edges))
    bags, tedges, anchors = [], [], []
    for block in (S + P, S + Q):
        # decompose the block with S made a clique, so that some bag holds all of S
        local = {v: i for i, v in enumerate(block)}
        inner = {(local[u], local[v]) for u, v in edges if u in local and v in local}
        inner |= {(local[u], local[v]) for u, v in itertools.combinations(S, 2)}
        td = heuristic_td(Graph(len(block), sorted(inner)))
        off = len(bags)
        bags.extend(frozenset(block[i] for i in b) for b in td.bags)
        tedges.extend((x + off, y + off) for x, y in td.edges)
        anchors.append(next(off + t for t, b in enumerate(td.bags) if set(S) <= {block[i] for i in b}))
    tedges.append(tuple(anchors))
    return {"graph": g, "td": TreeDecomposition(tuple(bags), tuple(tedges)), "shared": S, "left": P,
            "right": Q, "weights": random_weights(g.n, seed)}


def chk_join(inst, seed):
    g, td, S, w = inst["graph"], inst["td"], inst["shared"], inst["weights"]
    bad = validate_td(g, td)
    if bad:
        return f"glued decomposition invalid: {bad}"
    _, got = mwis_on_td(WeightedGraph(g, w), td)
    best = None
    for m in range(len(S) + 1):
        for T in itertools.combinations(S, m):
            if not g.is_independent(T):
                continue
            shared = sum((w[t] for t in T), Fraction(0))
            opt = []
            for block in (inst["left"], inst["right"]):
                free = [v for v in block if not any(g.has_edge(v, t) for t in T)]
                opt.append(shared + _block_opt(g, w, free))
            total = opt[0] + opt[1] - shared
            best = total if best is None else max(best, total)
    return _fail_if(got != best, f"DP {got} differs from the block combination {best}")


def _block_opt(g, w, vertices):
    if not vertices:
        return Fraction(0)
    sub, ids = g.induced(vertices)
    return bruteforce_mwis(WeightedGraph(sub, tuple(w[v] for v in ids)))[1]


# ---------------------------------------------------------------------------
# approximation schemes


def _ratio_msg(name, value, rep, opt):
    rep.with_optimum(opt)
    return _fail_if(not rep.meets_guarantee(), f"{name}: {value} < {rep.guaranteed} x {opt}")


def chk_ratio_fat(coll, seed):
    g = intersection_graph(coll)
    w = random_weights(g.n, seed)
    opt = bruteforce_mwis(WeightedGraph(g, w))[1]
    for r in (2, 3, 4):
        chosen, value, rep = ptas_mwis_fat(coll, int(coll.params.get("c", 16)), w, r)
        msg = _first(_fail_if(not g.is_independent(chosen), f"r={r}: not independent"),
                     _ratio_msg(f"r={r}", value, rep, opt))
        if msg:
            return msg
    return None


def chk_ratio_cover_packing(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fams = [SubgraphFamily.singletons(g.n, random_weights(g.n, seed))]
    pairs = SubgraphFamily.edges_and_vertices(g)
    if len(pairs) <= 64:
        fams.append(pairs)
    for fam in fams:
        opt = bruteforce_packing(g, fam, 2)[1]
        for r in (3, 5):
            cover = cover_from_layering(g, td, lay, r, k)
            chosen, value, rep = ptas_packing_from_cover(g, cover, fam, r)
            msg = _first(_fail_if(not pairwise_distance_ok(g, fam, chosen, 2), f"h={fam.h} r={r}: infeasible"),
                         _ratio_msg(f"h={fam.h} r={r}", value, rep, opt))
            if msg:
                return msg
    return None


def chk_ratio_distance(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    chosen, value, rep = ptas_distance_d(g, td, lay, k, fam, 4, 5)
    return _first(_fail_if(not pairwise_distance_ok(g, fam, chosen, 4), "distance-4 solution infeasible"),
                  _ratio_msg("d=4 r=5", value, rep, bruteforce_packing(g, fam, 4)[1]))


def chk_ratio_shifting(coll, seed):
    g = intersection_graph(coll, coll.mode)
    w = random_weights(g.n, seed)
    opt = bruteforce_mwis(WeightedGraph(g, w))[1]
    for eps in (Fraction(1, 2), Fraction(34, 100)):
        if coll.kind.startswith("grid-paths"):
            chosen, value, rep = ptas_mwis_shifting_paths(coll, coll.mode, int(coll.params["l"]), eps, w)
        else:
            chosen, value, rep = ptas_mwis_shifting_geom(coll, eps, w)
        msg = _first(_fail_if(not g.is_independent(chosen), f"eps={eps}: not independent"),
                     _ratio_msg(f"eps={eps}", value, rep, opt))
        if msg:
            return msg
    return None


def chk_cover_monotone(coll, seed):
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    cover = cover_from_layering(g, td, lay, 3, k)
    _, before, _ = ptas_packing_from_cover(g, cover, fam, 3)
    bigger = GeneralCover(cover.elements + (frozenset(range(g.n)),), cover.tds + (heuristic_td(g),),
                          cover.beta, None, cover.provenance + ({},))
    _, after, _ = ptas_packing_from_cover(g, bigger, fam, 3)
    return _fail_if(after < before, f"adding the full vertex set lowered the weight {before} -> {after}")


def chk_shifting_multiplicity(coll, seed):
    if coll.kind.startswith("grid-paths"):
        c = int(coll.params["l"])
        sets = residue_classes(path_column_classes(coll), 2 * c)
        cap = c
    else:
        norm = _normalize(coll)
        cap = 3 if norm.kind == "unit-disks" else 2
        sets = residue_classes(unit_column_classes(norm), 6)
    counts = [sum(v in s for s in sets) for v in range(len(coll))]
    return _fail_if(max(counts) > cap, f"a vertex lies in {max(counts)} residue classes (cap {cap})")


# ---------------------------------------------------------------------------
# command line


def chk_cli_reverify(coll, seed):
    from .cli import main

    with tempfile.TemporaryDirectory() as tmp:
        inst = Path(tmp, "inst.json")
        io.write_json(inst, io.instance_to_dict(coll))
        runs = [
            (["decompose", str(inst), "--out", f"{tmp}/dec.json"], "dec.json"),
            (["cover", str(inst), "--method", "layering", "--r", "3", "--out", f"{tmp}/cov.json"], "cov.json"),
            (["solve", str(inst), "--problem", "dissociation", "--out", f"{tmp}/sol.json"], "sol.json"),
            (["ptas", str(inst), "--method", "shifting", "--weights", "random", "--seed", str(seed),
              "--out", f"{tmp}/pt.json", "--report", f"{tmp}/rep.json"], "pt.json"),
        ]
        import contextlib
        import io as stdio

        sink = stdio.StringIO()
        with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
            for argv, out in runs:
                code = main(argv)
                if code != 0:
                    return f"{argv[0]} exited {code}: {sink.getvalue().strip()[-200:]}"
                for artifact in (out, "rep.json") if out == "pt.json" else (out,):
                    code = main(["verify", f"{tmp}/{artifact}", "--instance", str(inst)])
                    if code != 0:
                        return f"verify {artifact} exited {code}: {sink.getvalue().strip()[-200:]}"
    return None


# ---------------------------------------------------------------------------
# registry

LAYERED_KINDS = (
    {"kind": "unit-disks"},
    {"kind": "similarly-sized-fat", "k": 1},
    {"kind": "similarly-sized-fat", "k": 2},
    {"kind": "unit-width-rects"},
    {"kind": "grid-paths-v", "l": 1},
    {"kind": "grid-paths-v", "l": 2},
    {"kind": "grid-paths-e", "l": 1},
    {"kind": "grid-paths-e", "l": 2},
)


def _tag(gen):
    extra = "".join(f"-{k}{v}" for k, v in sorted(gen.items()) if k not in ("kind", "n"))
    return gen["kind"] + extra


def _build_registry():
    cases = []

    def add(pid, invariant, generator, check, seeds=range(10), tolerance="exact"):
        cases.append(PropertyCase(pid, invariant, generator, check, seeds, tolerance))

    geo = "eps_geo"
    for gen in ({"kind": "disks", "n": 14}, {"kind": "unit-width-rects", "n": 14},
                {"kind": "grid-paths-v", "n": 14, "l": 2}, {"kind": "grid-paths-e", "n": 14, "l": 2}):
        add(f"geometry.intersects.symmetric_reflexive[{_tag(gen)}]",
            "intersects is symmetric and reflexive for every object variant", gen, chk_intersects_symmetric,
            tolerance=geo)
    add("geometry.object_size.union", "a union object is at least as large as each member and its size is its "
        "bounding-box side", {"kind": "disks", "n": 16}, chk_union_size, tolerance=geo)
    add("geometry.rank_of.interval", "rank_of is monotone in size and places sizes in (r^-(i+1), r^-i]",
        {"kind": "disks", "n": 20}, chk_rank, tolerance=geo)
    add("geometry.generate.deterministic", "equal generator specs give identical instances",
        {"kind": "disks", "n": 20}, chk_generate_deterministic)
    add("geometry.estimate_fatness.sound", "estimate_fatness never exceeds the brute-force maximum over probes",
        {"kind": "disks", "n": 8}, chk_fatness_sound, seeds=range(5), tolerance=geo)

    add("graph.power.monotone", "graph_power(g, p) is a subgraph of graph_power(g, p+1)",
        {"kind": "unit-disks", "n": 25}, chk_power_monotone)
    add("graph.conflict.singletons", "the conflict graph of the singleton family is the host graph",
        {"kind": "gnp", "n": 15, "p": 0.3}, chk_conflict_singletons)
    add("graph.bruteforce_packing.distance", "brute-force packings are pairwise at distance >= d by BFS",
        {"kind": "unit-disks", "n": 12}, chk_bruteforce_packing_distance)
    add("graph.intersection.permutation", "permuting objects relabels the intersection graph",
        {"kind": "disks", "n": 25}, chk_permutation)

    add("decomposition.outputs.valid", "every decomposition-returning operation validates against its host",
        {"kind": "unit-disks", "n": 30}, chk_all_tds_valid)
    add("decomposition.cover_from_layering.multiplicity", "each vertex lies in exactly r-1 elements and every "
        "element component spans at most r-1 layers", {"kind": "unit-disks", "n": 40}, chk_cover_from_layering)
    for gen in ({"kind": "unit-disks", "n": [20, 60]}, {"kind": "unit-width-rects", "n": [20, 60]},
                {"kind": "grid-paths-v", "n": [20, 60], "l": 1}):
        add(f"decomposition.sqrt_compress.valid[{_tag(gen)}]", "sqrt_compress output validates", gen,
            chk_sqrt_valid)
        add(f"decomposition.sqrt_compress.bound[{_tag(gen)}]", "sqrt_compress output has alpha <= 2 sqrt(kn)",
            gen, chk_sqrt_bound)
    add("decomposition.lift_td_to_power.layering", "the lifted layering is a layering of the power graph and "
        "the lifted layered independence is at most (1+4d)k", {"kind": "unit-disks", "n": 25}, chk_power_layering)
    add("decomposition.lift_td_to_conflict.valid", "the conflict lift validates on the conflict graph",
        {"kind": "unit-disks", "n": 20}, chk_conflict_lift)
    add("decomposition.balanced_separation.td", "sides are at most ceil(2n/3) and the separator is a bag",
        {"kind": "unit-disks", "n": [10, 60]}, chk_balanced_td)
    add("decomposition.balanced_separation.cover", "the cover separation is valid, balanced and reports its "
        "separator alpha exactly", {"kind": "unit-disks", "n": [10, 60]}, chk_separation_from_cover)

    for gen in LAYERED_KINDS:
        gen = {**gen, "n": [10, 80]}
        tag = _tag(gen)
        add(f"layered.valid[{tag}]", "decomposition and layering validate", gen, chk_layered_valid)
        add(f"layered.bound[{tag}]", "exact layered independence is at most the theorem bound", gen,
            chk_layered_bound)
        add(f"layered.path_shape[{tag}]", "the tree is a path with at most 4n-2 nodes", gen,
            chk_layered_path_shape)
        add(f"layered.edge_witness[{tag}]", "each edge has a bag whose strip contains a common point", gen,
            chk_layered_edge_witness, tolerance=geo)

    add("fatcover.grid.refinement", "every rank-(i+1) cell lies inside exactly one rank-i cell",
        {"kind": "disks", "n": 12}, chk_grid_refinement, seeds=range(5))
    add("fatcover.survival.two_ways", "axis-interval and cell-containment survival tests agree",
        {"kind": "disks", "n": 20}, chk_survival_two_ways)
    add("fatcover.element.unique_rank_bag", "a surviving vertex of rank i lies in exactly one rank-i bag",
        {"kind": "disks", "n": 20}, chk_unique_rank_bag, seeds=range(5))
    add("fatcover.cover.coverage_and_bound", "coverage >= (1-1/r0) of the (f/2)^d elements, element "
        "decompositions validate with alpha <= c f^(2d)", {"kind": "disks", "n": 20}, chk_fat_cover,
        seeds=range(5))
    add("fatcover.odd_power.realization", "union objects realize the (2k+1)-th power exactly",
        {"kind": "disks", "n": 15}, chk_odd_power)

    add("packing.mwis.equals_bruteforce", "mwis_on_td equals bruteforce_mwis (weight and set)",
        {"kind": "gnp", "n": [4, 20], "p": 0.3}, chk_dp_equals_bruteforce, seeds=range(30))
    add("packing.packing.equals_bruteforce", "packing DPs equal brute force (distance 2 and 4)",
        {"kind": "unit-disks", "n": 12}, chk_dp_packing_equals_bruteforce)
    add("packing.states.bound", "each table has at most sum_{i<=alpha(bag)} C(|bag|, i) states",
        {"kind": "gnp", "n": [4, 18], "p": 0.3}, chk_dp_state_bound, seeds=range(20))
    add("packing.solutions.feasible", "returned sets are independent and packings keep their distance",
        {"kind": "unit-disks", "n": 20}, chk_dp_feasible)
    add("packing.join.blocks", "on two blocks sharing a bag the DP equals the best trace combination",
        {"kind": "two-blocks", "s": 3, "left": 6, "right": 6}, chk_join)

    add("ptas.ratio.fat_cover", "fat-cover MWIS achieves (1-1/r) of the optimum for r in 2..4",
        {"kind": "disks", "n": 14}, chk_ratio_fat, seeds=range(5))
    add("ptas.ratio.cover_packing", "cover packing achieves (1-h/r) of the optimum",
        {"kind": "unit-disks", "n": 12}, chk_ratio_cover_packing)
    add("ptas.ratio.distance", "distance-4 packing achieves (1-1/r) of the optimum",
        {"kind": "unit-disks", "n": 14}, chk_ratio_distance)
    for gen in ({"kind": "unit-disks", "n": 16}, {"kind": "unit-width-rects", "n": 16},
                {"kind": "grid-paths-v", "n": 16, "l": 1}, {"kind": "grid-paths-e", "n": 16, "l": 2}):
        add(f"ptas.ratio.shifting[{_tag(gen)}]", "shifting achieves (1-eps) of the optimum", gen,
            chk_ratio_shifting)
        add(f"ptas.shifting.multiplicity[{_tag(gen)}]", "each vertex lies in at most c residue classes", gen,
            chk_shifting_multiplicity)
    add("ptas.cover.monotone", "adding the full vertex set as an element never lowers the weight",
        {"kind": "unit-disks", "n": 14}, chk_cover_monotone)

    add("cli.artifacts.reverify", "every artifact the command line writes re-verifies with exit 0",
        {"kind": "unit-disks", "n": 12}, chk_cli_reverify, seeds=range(3))
    return {c.pid: c for c in cases}


REGISTRY = _build_registry()


def select(filter: str | None = None) -> list:
    if not filter:
        return list(REGISTRY.values())
    return [c for c in REGISTRY.values() if fnmatch.fnmatchcase(c.pid, filter) or filter in c.pid]


def run_case(case: PropertyCase, seed: int, do_shrink: bool = True):
    """One seed of one case; returns None or a failure record."""
    inst = make_instance(case.generator, seed)
    message = _outcome(case.check, inst, seed)
    if not message:
        return None
    original = _size(inst)
    if do_shrink:
        inst, message = shrink(case.check, inst, seed)
    return {"pid": case.pid, "seed": seed, "message": message, "original_size": original,
            "shrunk_size": _size(inst), "witness": _witness(inst)}


def _work(task):
    pid, seed, do_shrink = task
    return run_case(REGISTRY[pid], seed, do_shrink)


def run_suite(filter: str | None = None, seeds: range | None = None, jobs: int = 1, junit=None,
              failures_json=None, do_shrink: bool = True) -> SuiteReport:
    """Run the selected properties; ``seeds`` overrides every case's seed range."""
    cases = select(filter)
    if not cases:
        raise ValueError(f"no property matches {filter!r}")
    tasks = [(c.pid, s, do_shrink) for c in cases for s in (seeds if seeds is not None else c.seeds)]
    results = {c.pid: CaseResult(c.pid) for c in cases}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_work, tasks))
        for (pid, _, _), out in zip(tasks, outcomes):
            results[pid].runs += 1
            if out:
                results[pid].failures.append(out)
    else:
        for task in tasks:
            t0 = time.perf_counter()
            out = _work(task)
            res = results[task[0]]
            res.seconds += time.perf_counter() - t0
            res.runs += 1
            if out:
                res.failures.append(out)
    report = SuiteReport([results[c.pid] for c in cases])
    if junit:
        report.write_junit(junit)
    if failures_json:
        report.write_failures(failures_json)
    return report


def main(argv=None):
    p = argparse.ArgumentParser(prog="python -m treealpha.properties", description=__doc__.splitlines()[0])
    p.add_argument("--filter", help="glob or substring on property ids")
    p.add_argument("--seeds", type=int, help="run seeds 0..N-1 for every selected property")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--junit")
    p.add_argument("--failures")
    p.add_argument("--list", action="store_true")
    args = p.parse_args(argv)
    if args.list:
        for c in select(args.filter):
            print(f"{c.pid}: {c.invariant}")
        return 0
    report = run_suite(args.filter, range(args.seeds) if args.seeds else None, args.jobs, args.junit, args.failures)
    for r in report.results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.pid} ({r.runs} runs)")
        for f in r.failures:
            print(f"    seed {f['seed']}: {f['message']} (shrunk {f['original_size']} -> {f['shrunk_size']})")
    print(report.summary())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
