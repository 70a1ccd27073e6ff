"""Geometric objects in R^d and the predicates the constructions rely on.

Objects are closed sets.  Disks and boxes carry float coordinates and every
comparison goes through the tangency tolerance ``EPS``; grid paths live on the
integer lattice and are compared exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

EPS = 1e-9

KINDS = (
    "unit-disks",
    "disks",
    "similarly-sized-fat",
    "unit-width-rects",
    "grid-paths-v",
    "grid-paths-e",
    "generic",
)


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) < 2:
            raise GeometryError("dimension must be at least 2")
        if not all(math.isfinite(c) for c in self.center):
            raise GeometryError("non-finite coordinate")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError(f"disk radius must be positive, got {self.radius}")

    @property
    def dimension(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(c) for c in self.lo)
        hi = tuple(float(c) for c in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or len(lo) < 2:
            raise GeometryError("box corners must share a dimension >= 2")
        if not all(math.isfinite(c) for c in lo + hi):
            raise GeometryError("non-finite coordinate")
        if any(a > b for a, b in zip(lo, hi)):
            raise GeometryError(f"box min corner exceeds max corner: {lo} > {hi}")

    @property
    def dimension(self) -> int:
        return len(self.lo)


@dataclass(frozen=True)
class GridPath:
    """Axis-parallel lattice path given by its endpoints and bend points."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise GeometryError("grid path needs at least one point")
        dim = len(pts[0])
        if dim < 2 or any(len(p) != dim for p in pts):
            raise GeometryError("grid path points must share a dimension >= 2")
        for a, b in zip(pts, pts[1:]):
            if sum(x != y for x, y in zip(a, b)) != 1:
                raise GeometryError(f"consecutive points {a} -> {b} are not an axis-parallel step")

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def segments(self):
        if len(self.points) == 1:
            return [(self.points[0], self.points[0])]
        return list(zip(self.points, self.points[1:]))

    def lattice_points(self) -> frozenset:
        out = set()
        for a, b in self.segments():
            axis = _axis_of(a, b)
            if axis is None:
                out.add(a)
                continue
            lo, hi = sorted((a[axis], b[axis]))
            for t in range(lo, hi + 1):
                p = list(a)
                p[axis] = t
                out.add(tuple(p))
        return frozenset(out)

    def lattice_edges(self) -> frozenset:
        out = set()
        for a, b in self.segments():
            axis = _axis_of(a, b)
            if axis is None:
                continue
            lo, hi = sorted((a[axis], b[axis]))
            for t in range(lo, hi):
                p = list(a)
                q = list(a)
                p[axis] = t
                q[axis] = t + 1
                out.add((tuple(p), tuple(q)))
        return frozenset(out)

    def bends(self) -> int:
        return max(0, len(self.points) - 2)


@dataclass(frozen=True)
class UnionObject:
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise GeometryError("union object needs at least one member")
        dim = members[0].dimension
        if any(m.dimension != dim for m in members):
            raise GeometryError("union members must share a dimension")
        # path-connected: the member intersection graph must be connected
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(len(members)):
                if j not in seen and intersects(members[i], members[j]):
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(members):
            raise GeometryError("union members are not connected through intersections")

    @property
    def dimension(self) -> int:
        return self.members[0].dimension


GeometricObject = Disk | Box | GridPath | UnionObject


def _axis_of(a, b):
    for k, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return k
    return None


def _segment_box(a, b) -> Box:
    return Box(tuple(min(x, y) for x, y in zip(a, b)), tuple(max(x, y) for x, y in zip(a, b)))


# ---------------------------------------------------------------------------
# bounding boxes, sizes, projections


def bounding_box(o) -> tuple[tuple, tuple]:
    if isinstance(o, Disk):
        return (tuple(c - o.radius for c in o.center), tuple(c + o.radius for c in o.center))
    if isinstance(o, Box):
        return o.lo, o.hi
    if isinstance(o, GridPath):
        cols = list(zip(*o.points))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)
    if isinstance(o, UnionObject):
        boxes = [bounding_box(m) for m in o.members]
        d = o.dimension
        lo = tuple(min(b[0][k] for b in boxes) for k in range(d))
        hi = tuple(max(b[1][k] for b in boxes) for k in range(d))
        return lo, hi
    raise GeometryError(f"unsupported object {type(o).__name__}")


def object_size(o) -> float:
    """Side of the smallest enclosing axis-aligned hypercube."""
    lo, hi = bounding_box(o)
    return max(h - l for l, h in zip(lo, hi))


def horizontal_part(o) -> tuple[float, float]:
    lo, hi = bounding_box(o)
    return lo[0], hi[0]


def rank_of(o, r: int) -> int:
    """floor(log_{1/r} s(o)) for an object of size at most one."""
    if r < 2:
        raise GeometryError("rank base must be >= 2")
    s = object_size(o) if not isinstance(o, (int, float, Fraction)) else float(o)
    if s <= 0:
        raise GeometryError("object of size zero has no rank")
    if s > 1 + 1e-12:
        raise GeometryError(f"object size {s} exceeds 1; rescale the collection first")
    if s >= 1:
        return 0
    x = math.log(s) / math.log(1.0 / r)
    k = round(x)
    if k >= 0 and abs(s - float(r) ** -k) <= 1e-12 * float(r) ** -k:
        return k
    i = math.floor(x)
    # repair floating boundary error so that r^-(i+1) < s <= r^-i
    while s > float(r) ** -i:
        i -= 1
    while s <= float(r) ** -(i + 1):
        i += 1
    return i


# ---------------------------------------------------------------------------
# intersection


def _boxes_meet(alo, ahi, blo, bhi, eps=EPS) -> bool:
    return all(a0 <= b1 + eps and b0 <= a1 + eps for a0, a1, b0, b1 in zip(alo, ahi, blo, bhi))


def _point_box_dist(p, lo, hi) -> float:
    return math.sqrt(sum(max(l - x, 0.0, x - h) ** 2 for x, l, h in zip(p, lo, hi)))


def intersects(a, b, mode: str = "v") -> bool:
    """Closed-set intersection test.

    ``mode`` only matters when both objects are grid paths: ``"v"`` means they
    share a lattice point, ``"e"`` that they share a unit lattice edge.
    """
    if a.dimension != b.dimension:
        raise GeometryError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if isinstance(a, UnionObject):
        return any(intersects(m, b, mode) for m in a.members)
    if isinstance(b, UnionObject):
        return any(intersects(a, m, mode) for m in b.members)
    if isinstance(a, GridPath) and isinstance(b, GridPath):
        if mode == "e":
            return not a.lattice_edges().isdisjoint(b.lattice_edges())
        if mode != "v":
            raise GeometryError(f"unknown grid path mode {mode!r}")
        return not a.lattice_points().isdisjoint(b.lattice_points())
    if isinstance(a, GridPath):
        return any(intersects(_segment_box(p, q), b) for p, q in a.segments())
    if isinstance(b, GridPath):
        return any(intersects(a, _segment_box(p, q)) for p, q in b.segments())
    if isinstance(a, Disk) and isinstance(b, Disk):
        return math.dist(a.center, b.center) <= a.radius + b.radius + EPS
    if isinstance(a, Box) and isinstance(b, Box):
        return _boxes_meet(a.lo, a.hi, b.lo, b.hi)
    if isinstance(a, Disk) and isinstance(b, Box):
        return _point_box_dist(a.center, b.lo, b.hi) <= a.radius + EPS
    if isinstance(a, Box) and isinstance(b, Disk):
        return _point_box_dist(b.center, a.lo, a.hi) <= b.radius + EPS
    raise GeometryError(f"unsupported pair {type(a).__name__}/{type(b).__name__}")


# ---------------------------------------------------------------------------
# collections


@dataclass(frozen=True)
class ObjectCollection:
    dimension: int
    objects: tuple
    kind: str = "generic"
    params: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if self.dimension < 2:
            raise GeometryError("dimension must be >= 2")
        if self.kind not in KINDS:
            raise GeometryError(f"unknown collection kind {self.kind!r}")
        for o in self.objects:
            if o.dimension != self.dimension:
                raise GeometryError("object dimension differs from collection dimension")
        self._check_kind()

    def _check_kind(self):
        p = self.params
        if self.kind == "unit-disks":
            r = p.get("radius")
            for o in self.objects:
                if not isinstance(o, Disk) or (r is not None and abs(o.radius - r) > EPS):
                    raise GeometryError("unit-disks collection must hold disks of the declared radius")
        elif self.kind == "unit-width-rects":
            w = p.get("width")
            for o in self.objects:
                if not isinstance(o, Box) or (w is not None and abs((o.hi[0] - o.lo[0]) - w) > EPS):
                    raise GeometryError("unit-width-rects collection must hold boxes of the declared width")
        elif self.kind in ("grid-paths-v", "grid-paths-e"):
            ell = p.get("l")
            for o in self.objects:
                if not isinstance(o, GridPath):
                    raise GeometryError("grid path collection must hold grid paths")
                lo, hi = horizontal_part(o)
                if ell is not None and hi - lo > ell:
                    raise GeometryError(f"horizontal part {hi - lo} exceeds declared l={ell}")

    def __len__(self):
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    def __getitem__(self, i):
        return self.objects[i]

    @property
    def mode(self) -> str:
        return "e" if self.kind == "grid-paths-e" else "v"

    def subset(self, indices: Sequence[int], kind: str | None = None) -> "ObjectCollection":
        return ObjectCollection(self.dimension, [self.objects[i] for i in indices], kind or self.kind, dict(self.params))


def _scale_object(o, f: float):
    if isinstance(o, Disk):
        return Disk(tuple(c * f for c in o.center), o.radius * f)
    if isinstance(o, Box):
        return Box(tuple(c * f for c in o.lo), tuple(c * f for c in o.hi))
    if isinstance(o, UnionObject):
        return UnionObject(tuple(_scale_object(m, f) for m in o.members))
    raise GeometryError("grid paths live on the integer lattice and cannot be rescaled")


_SCALED_PARAMS = ("radius", "width", "window")


def scale_collection(coll: ObjectCollection) -> tuple[ObjectCollection, float]:
    """Uniformly rescale so that the largest object has size exactly 1."""
    if not coll.objects:
        raise GeometryError("cannot scale an empty collection")
    smax = max(object_size(o) for o in coll.objects)
    if smax <= 0:
        raise GeometryError("all objects have size zero")
    if smax == 1:
        return coll, 1.0
    f = 1.0 / smax
    params = dict(coll.params)
    for key in _SCALED_PARAMS:
        if key in params and params[key] is not None:
            params[key] = params[key] * f
    objs = tuple(_scale_object(o, f) for o in coll.objects)
    return ObjectCollection(coll.dimension, objs, coll.kind, params), f


# ---------------------------------------------------------------------------
# empirical fatness


def estimate_fatness(coll: ObjectCollection, probes: int = 200) -> int:
    """Certified lower bound on the fatness constant of ``coll``.

    Boxes are anchored (as min and as max corner) at the bounding-box corners of
    the objects, with side lengths drawn from the object sizes.  For every probe
    the exact maximum number of pairwise disjoint objects of size at least the
    side that meet the box is computed; the maximum over probes is returned.
    """
    from .graph import intersection_graph
    from .oracles import alpha_exact

    if probes < 1:
        raise GeometryError("probes must be >= 1")
    objs = coll.objects
    if not objs:
        return 0
    d = coll.dimension
    sizes = sorted({object_size(o) for o in objs}, reverse=True)
    anchors = []
    for o in objs:
        lo, hi = bounding_box(o)
        for mask in range(1 << d):
            anchors.append(tuple(hi[k] if mask >> k & 1 else lo[k] for k in range(d)))
    g = intersection_graph(coll)
    best = 1
    done = 0
    for side in sizes:
        big = [i for i, o in enumerate(objs) if object_size(o) >= side - EPS]
        for a in anchors:
            for lower in (True, False):
                if done >= probes:
                    return best
                done += 1
                lo = a if lower else tuple(x - side for x in a)
                probe = Box(lo, tuple(x + side for x in lo))
                hit = [i for i in big if intersects(objs[i], probe)]
                if len(hit) > best:
                    best = max(best, alpha_exact(g, hit))
    return best


def iter_pairs(objs: Iterable) -> Iterable:
    objs = list(objs)
    for i in range(len(objs)):
        for j in range(i + 1, len(objs)):
            yield i, j
