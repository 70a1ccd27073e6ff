import math

import pytest

from treealpha.decomposition import (
    check_layering,
    layered_independence_number,
    td_independence_number,
    validate_td,
)
from treealpha.generators import generate_instance
from treealpha.geometry import Box, Disk, GeometryError, GridPath, ObjectCollection, bounding_box
from treealpha.graph import intersection_graph
from treealpha.layered import (
    ceil_2sqrt2,
    layered_td,
    layered_td_fat_similar,
    layered_td_grid_paths,
    layered_td_unit_disks,
    layered_td_unit_rects,
    strip_bound,
    strip_td,
    strip_structure,
)


def check_layered(coll, td, lay, bound):
    g = intersection_graph(coll)
    assert validate_td(g, td) is None
    assert check_layering(g, lay) is None
    assert len(td.bags) <= max(1, 4 * len(coll.objects) - 2)
    assert layered_independence_number(g, td, lay) <= bound
    return g


def test_ceil_2sqrt2():
    assert [ceil_2sqrt2(k) for k in (1, 2, 3)] == [3, 6, 9]
    for k in range(1, 40):
        assert ceil_2sqrt2(k) == math.ceil(2 * math.sqrt(2) * k - 1e-12)


def test_strip_structure():
    coll = generate_instance({"kind": "unit-disks", "n": 10, "seed": 1})
    st = strip_structure(coll)
    assert len(st) == 4 * 10 - 2
    assert list(st.breakpoints) == sorted(st.breakpoints)
    for (a, b), (c, _) in zip(st.strips, st.strips[1:]):
        assert a <= b and b == c


def test_fat_similar_one_object():
    coll = ObjectCollection(2, (Disk((3, 3), 1),), "similarly-sized-fat", {"k": 1, "c": 16})
    td, lay, bound = layered_td_fat_similar(coll, 1, 16)
    assert [b for b in td.bags if b] and len(lay.layers) == 1
    assert bound == 3 * 16
    check_layered(coll, td, lay, bound)


def test_fat_similar_unit_disks_generic_bound():
    coll = generate_instance({"kind": "unit-disks", "n": 40, "seed": 2})
    td, lay, bound = layered_td_fat_similar(coll, 1, 16)
    assert bound == math.ceil(2 * math.sqrt(2)) * 16
    check_layered(coll, td, lay, bound)


@pytest.mark.parametrize("seed", range(3))
def test_fat_similar_random(seed):
    coll = generate_instance({"kind": "similarly-sized-fat", "n": 50, "seed": seed, "k": 2})
    td, lay, bound = layered_td_fat_similar(coll, 2, 16)
    check_layered(coll, td, lay, bound)


def test_fat_similar_rejects_ratio():
    coll = ObjectCollection(2, (Disk((0, 0), 1), Disk((5, 0), 3)), "disks", {})
    with pytest.raises(GeometryError):
        layered_td_fat_similar(coll, 2, 16)


def test_unit_disks_row():
    objs = tuple(Disk((3.0 * i, 0.0), 1.0) for i in range(8))
    coll = ObjectCollection(2, objs, "unit-disks", {"radius": 1.0})
    td, lay = layered_td_unit_disks(coll)
    g = check_layered(coll, td, lay, 3)
    assert layered_independence_number(g, td, lay) <= 1


def test_unit_disks_random():
    coll = generate_instance({"kind": "unit-disks", "n": 200, "seed": 3})
    td, lay = layered_td_unit_disks(coll)
    check_layered(coll, td, lay, 3)


def test_unit_disks_kind_mismatch():
    coll = generate_instance({"kind": "unit-width-rects", "n": 5, "seed": 0})
    with pytest.raises(GeometryError):
        layered_td_unit_disks(coll)


def test_nested_rects_share_a_bag():
    objs = (Box((0, 0), (1, 5)), Box((0, 1), (1, 2)))
    coll = ObjectCollection(2, objs, "unit-width-rects", {"width": 1})
    td, lay = layered_td_unit_rects(coll)
    assert any(b == {0, 1} for b in td.bags)
    check_layered(coll, td, lay, 1)


def test_disjoint_rect_stack():
    objs = tuple(Box((0.0, 2.0 * i), (1.0, 2.0 * i + 1)) for i in range(6))
    coll = ObjectCollection(2, objs, "unit-width-rects", {"width": 1})
    td, lay = layered_td_unit_rects(coll)
    check_layered(coll, td, lay, 1)


def test_unit_rects_random():
    coll = generate_instance({"kind": "unit-width-rects", "n": 100, "seed": 4})
    td, lay = layered_td_unit_rects(coll)
    check_layered(coll, td, lay, 1)


def test_grid_paths_examples():
    single = ObjectCollection(2, (GridPath(((0, 0), (1, 0), (1, 3))),), "grid-paths-v", {"l": 1})
    td, lay = layered_td_grid_paths(single, "v", 1)
    check_layered(single, td, lay, 2)
    assert layered_td(single)[2] == 2
    coll = generate_instance({"kind": "grid-paths-e", "n": 60, "seed": 5, "l": 2, "bends": 1})
    td, lay = layered_td_grid_paths(coll, "e", 2)
    check_layered(coll, td, lay, 11)
    with pytest.raises(GeometryError):
        layered_td_grid_paths(coll, "v", 2)


def test_grid_paths_vertex_mode_random():
    coll = generate_instance({"kind": "grid-paths-v", "n": 60, "seed": 6, "l": 3, "bends": 2})
    td, lay, bound, _ = layered_td(coll)
    assert bound == 6
    check_layered(coll, td, lay, bound)


def test_strip_td_disks():
    objs = tuple(Disk((x, y), 1.0) for x, y in [(1, 0), (2.5, 1), (3, 3), (1.5, 5), (2, 7), (3, 8.5)])
    coll = ObjectCollection(2, objs, "unit-disks", {"radius": 1.0})
    assert strip_bound(coll, 4) == 6
    td = strip_td(coll, 4)
    g = intersection_graph(coll)
    assert validate_td(g, td) is None
    assert td_independence_number(g, td) <= 6


def test_strip_td_paths_column():
    objs = tuple(GridPath(((0, i), (0, i + 1))) for i in range(0, 12, 2))
    coll = ObjectCollection(2, objs, "grid-paths-v", {"l": 1})
    assert strip_bound(coll, 1) == 1
    td = strip_td(coll, 1)
    g = intersection_graph(coll)
    assert validate_td(g, td) is None
    assert td_independence_number(g, td) <= 1


@pytest.mark.parametrize("kind,ell", [("unit-disks", 6), ("unit-width-rects", 3), ("grid-paths-v", 4),
                                      ("grid-paths-e", 4)])
def test_strip_td_random(kind, ell):
    spec = {"kind": kind, "n": 30, "seed": 7, "window": 40}
    if kind.startswith("grid"):
        spec.update({"l": 1, "bends": 1})
    full = generate_instance(spec)
    x0 = min(bounding_box(o)[0][0] for o in full.objects)
    slack = 1 if kind.startswith("grid") else 0  # lattice paths: width counts columns
    inside = [i for i, o in enumerate(full.objects) if bounding_box(o)[1][0] - x0 <= ell - slack]
    assert inside
    coll = full.subset(inside)
    td = strip_td(coll, ell)
    g = intersection_graph(coll)
    assert validate_td(g, td) is None
    assert td_independence_number(g, td) <= strip_bound(coll, ell)


def test_strip_td_width_error():
    coll = ObjectCollection(2, (Disk((0, 0), 1.0), Disk((10, 0), 1.0)), "unit-disks", {"radius": 1.0})
    with pytest.raises(GeometryError):
        strip_td(coll, 4)
