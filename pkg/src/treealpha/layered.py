"""Layered tree decompositions of planar geometric intersection graphs.

All constructions share one skeleton.  The sorted y-projection endpoints
z_1 <= ... <= z_2n cut the plane into 4n-2 closed horizontal strips (each gap
between consecutive endpoints is split at its midpoint); bag i holds the
objects whose y-projection meets strip i, and consecutive strips are adjacent
on a path.  Layers are vertical slabs of a kind-specific width, an object
belonging to the slab that holds its leftmost point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .decomposition import Layering, TreeDecomposition
from .geometry import EPS, Disk, Box, GeometryError, ObjectCollection, bounding_box, object_size


@dataclass(frozen=True)
class StripStructure:
    breakpoints: tuple
    strips: tuple

    def __len__(self):
        return len(self.strips)


def strip_structure(coll: ObjectCollection) -> StripStructure:
    if not coll.objects:
        raise GeometryError("empty collection")
    ends = []
    for i, o in enumerate(coll.objects):
        lo, hi = bounding_box(o)
        ends.append((lo[1], i))
        ends.append((hi[1], i))
    z = [v for v, _ in sorted(ends)]
    strips = []
    for a, b in zip(z, z[1:]):
        mid = (a + b) / 2
        strips.append((a, mid))
        strips.append((mid, b))
    return StripStructure(tuple(z), tuple(strips))


def _strip_bags(coll: ObjectCollection, st: StripStructure) -> list:
    """Bag per strip via a sweep: object i meets strip [a, b] iff ylo <= b and a <= yhi."""
    spans = [(bounding_box(o)[0][1], bounding_box(o)[1][1]) for o in coll.objects]
    bags = []
    for a, b in st.strips:
        bags.append(frozenset(i for i, (lo, hi) in enumerate(spans) if lo <= b + EPS and a <= hi + EPS))
    return bags


def _path_td(bags) -> TreeDecomposition:
    return TreeDecomposition(tuple(bags), tuple((i, i + 1) for i in range(len(bags) - 1)))


def _layering_by_slabs(coll: ObjectCollection, width) -> Layering:
    lefts = [bounding_box(o)[0][0] for o in coll.objects]
    x0 = min(lefts)
    w = float(width)
    idx = {i: math.floor((x - x0) / w + EPS) + 1 for i, x in enumerate(lefts)}
    return Layering.from_index(idx)


def _strip_td(coll: ObjectCollection) -> TreeDecomposition:
    return _path_td(_strip_bags(coll, strip_structure(coll)))


def _common(coll, attr):
    vals = set()
    for o in coll.objects:
        if attr == "radius":
            if not isinstance(o, Disk):
                raise GeometryError("expected disks")
            vals.add(o.radius)
        else:
            if not isinstance(o, Box):
                raise GeometryError("expected boxes")
            vals.add(o.hi[0] - o.lo[0])
    v = min(vals)
    if max(vals) - v > EPS:
        raise GeometryError(f"objects do not share a common {attr}")
    return v


def ceil_2sqrt2(k) -> int:
    """ceil(2*sqrt(2)*k), exactly: the least m >= 0 with m^2 >= 8 k^2."""
    k = Fraction(k)
    t = 8 * k * k
    m = math.isqrt(t.numerator // t.denominator)
    while Fraction(m * m) < t:
        m += 1
    while m > 0 and Fraction((m - 1) ** 2) >= t:
        m -= 1
    return m


def layered_td_fat_similar(coll: ObjectCollection, k, cfat: int):
    """Strips of width k * (smallest size); declared bound ceil(2 sqrt2 k) * c."""
    if coll.dimension != 2:
        raise GeometryError("layered strip constructions are planar")
    if not coll.objects:
        raise GeometryError("empty collection")
    sizes = [object_size(o) for o in coll.objects]
    dmin = min(sizes)
    if dmin <= 0:
        raise GeometryError("objects of size zero are not similarly sized")
    if max(sizes) > float(k) * dmin * (1 + 1e-12) + EPS:
        raise GeometryError(f"size ratio {max(sizes) / dmin:.6g} exceeds declared k={k}")
    td = _strip_td(coll)
    lay = _layering_by_slabs(coll, float(k) * dmin)
    return td, lay, ceil_2sqrt2(k) * int(cfat)


def layered_td_unit_disks(coll: ObjectCollection):
    """Slabs of width 2r; layered independence number at most 3."""
    if coll.kind != "unit-disks":
        raise GeometryError(f"expected a unit-disks collection, got {coll.kind}")
    if coll.dimension != 2:
        raise GeometryError("layered strip constructions are planar")
    r = _common(coll, "radius")
    return _strip_td(coll), _layering_by_slabs(coll, 2 * r)


def layered_td_unit_rects(coll: ObjectCollection):
    """Slabs of the common width; layered independence number at most 1."""
    if coll.kind != "unit-width-rects":
        raise GeometryError(f"expected a unit-width-rects collection, got {coll.kind}")
    if coll.dimension != 2:
        raise GeometryError("layered strip constructions are planar")
    c = _common(coll, "width")
    return _strip_td(coll), _layering_by_slabs(coll, c)


def path_horizontal_bound(coll: ObjectCollection) -> int:
    return max(1, max(bounding_box(o)[1][0] - bounding_box(o)[0][0] for o in coll.objects))


def layered_td_grid_paths(coll: ObjectCollection, mode: str, ell: int | None = None):
    """Slabs of width l; bound 2l for vertex contacts, 6l-1 for edge contacts."""
    expect = {"v": "grid-paths-v", "e": "grid-paths-e"}.get(mode)
    if expect is None:
        raise GeometryError(f"unknown grid path mode {mode!r}")
    if coll.kind != expect:
        raise GeometryError(f"mode {mode} needs a {expect} collection, got {coll.kind}")
    if coll.dimension != 2:
        raise GeometryError("layered strip constructions are planar")
    if ell is None:
        ell = int(coll.params.get("l") or path_horizontal_bound(coll))
    if path_horizontal_bound(coll) > ell:
        raise GeometryError(f"a horizontal part exceeds l={ell}")
    return _strip_td(coll), _layering_by_slabs(coll, ell)


def grid_path_bound(mode: str, ell: int) -> int:
    return 2 * ell if mode == "v" else 6 * ell - 1


def layered_td(coll: ObjectCollection):
    """Dispatch on the collection kind; returns (td, layering, declared bound, construction tag)."""
    kind = coll.kind
    if kind == "unit-disks":
        td, lay = layered_td_unit_disks(coll)
        return td, lay, 3, "unit-disks"
    if kind == "unit-width-rects":
        td, lay = layered_td_unit_rects(coll)
        return td, lay, 1, "unit-width-rects"
    if kind in ("grid-paths-v", "grid-paths-e"):
        mode = kind[-1]
        ell = int(coll.params.get("l") or path_horizontal_bound(coll))
        td, lay = layered_td_grid_paths(coll, mode, ell)
        return td, lay, grid_path_bound(mode, ell), kind
    if kind in ("similarly-sized-fat", "disks"):
        k = coll.params.get("k")
        if k is None:
            sizes = [object_size(o) for o in coll.objects]
            k = Fraction(max(sizes)) / Fraction(min(sizes))
        c = int(coll.params.get("c", 16))
        td, lay, bound = layered_td_fat_similar(coll, k, c)
        return td, lay, bound, "similarly-sized-fat"
    raise GeometryError(f"no layered construction for kind {kind!r}")


# ---------------------------------------------------------------------------
# bounded-width strips


def realization_width(coll: ObjectCollection) -> float:
    los = [bounding_box(o)[0][0] for o in coll.objects]
    his = [bounding_box(o)[1][0] for o in coll.objects]
    if coll.kind in ("grid-paths-v", "grid-paths-e"):
        return max(his) - min(los) + 1  # number of lattice columns
    return max(his) - min(los)


def strip_bound(coll: ObjectCollection, ell) -> int:
    kind = coll.kind
    if kind == "unit-disks":
        r = Fraction(_common(coll, "radius"))
        return 3 * math.ceil(Fraction(ell) / (2 * r))
    if kind == "unit-width-rects":
        c = Fraction(_common(coll, "width"))
        return math.ceil(Fraction(ell) / c)
    if kind == "grid-paths-v":
        return int(ell)
    if kind == "grid-paths-e":
        return 3 * int(ell) - 1
    raise GeometryError(f"no strip bound for kind {kind!r}")


def strip_td(coll: ObjectCollection, ell) -> TreeDecomposition:
    """Path decomposition of an instance confined to a vertical window of width l.

    For grid paths l counts lattice columns.  The independence number of every
    bag is bounded by ``strip_bound``.
    """
    if not coll.objects:
        raise GeometryError("empty collection")
    if coll.dimension != 2:
        raise GeometryError("strip constructions are planar")
    w = realization_width(coll)
    if w > float(ell) + EPS:
        raise GeometryError(f"realization width {w} exceeds l={ell}")
    return _strip_td(coll)
