import itertools
from fractions import Fraction

import pytest

from treealpha.decomposition import check_cover, td_independence_number, validate_td
from treealpha.fatcover import (
    HierGrid,
    fragility_function,
    general_cover_fat,
    odd_power_fat_realization,
    survives_by_axes,
)
from treealpha.generators import generate_instance
from treealpha.geometry import Disk, GeometryError, ObjectCollection, UnionObject, scale_collection
from treealpha.graph import graph_power, intersection_graph
from treealpha.oracles import AlphaCache


def test_fragility_values():
    assert fragility_function(2, 2) == 8
    assert fragility_function(4, 2) == 16
    for r0 in range(2, 12):
        for d in (2, 3):
            f = fragility_function(r0, d)
            assert f % 2 == 0 and f >= 4


def test_grid_refinement():
    grid = HierGrid(8, (1, 3), 3)
    for i in range(1, 4):
        for m in itertools.product(range(-2, 3), repeat=2):
            lo, hi = grid.cell_bounds(i + 1, m)
            centre = tuple((a + b) / 2 for a, b in zip(lo, hi))
            plo, phi = grid.cell_bounds(i, grid.cell_of(i, centre))
            assert all(a <= b and c <= e for a, b, c, e in zip(plo, lo, hi, phi))


def test_single_object_coverage():
    coll, _ = scale_collection(ObjectCollection(2, (Disk((0.37, 0.61), 0.05),), "disks", {"c": 16}))
    cover = general_cover_fat(coll, 16, 2)
    f = fragility_function(2, 2)
    assert len(cover.elements) == (f // 2) ** 2
    hits = sum(0 in e for e in cover.elements)
    assert hits >= (f // 2 - 1) ** 2


def test_cover_forty_disks():
    coll = generate_instance({"kind": "disks", "n": 40, "seed": 3})
    scaled, _ = scale_collection(coll)
    g = intersection_graph(scaled)
    assert g == intersection_graph(coll)
    cover = general_cover_fat(scaled, 16, 2)
    assert len(cover.elements) == 16
    assert check_cover(g, cover) is None
    counts = cover.multiplicity(g.n)
    assert all(Fraction(c, len(cover.elements)) >= Fraction(1, 2) for c in counts)
    cache = AlphaCache(g)
    for elem, td in zip(cover.elements, cover.tds):
        assert validate_td(g, td, elem) is None
        assert len(td.bags) <= len(elem) + 1
        assert td_independence_number(g, td, cache) <= cover.bound


def test_survival_two_ways_agree():
    coll = generate_instance({"kind": "disks", "n": 30, "seed": 8})
    scaled, _ = scale_collection(coll)
    cover = general_cover_fat(scaled, 16, 3)  # raises if the two survival tests disagree
    assert len(cover.elements) == (fragility_function(3, 2) // 2) ** 2
    grid = HierGrid(fragility_function(3, 2), (0, 0), 4)
    assert not survives_by_axes(grid, 1, ((Fraction(-1, 10),) * 2, (Fraction(1, 10),) * 2))


def test_cover_needs_scaling():
    coll = ObjectCollection(2, (Disk((0, 0), 3.0),), "disks", {})
    with pytest.raises(GeometryError):
        general_cover_fat(coll, 16, 2)


def test_odd_power_identity_and_isolated():
    coll = ObjectCollection(2, (Disk((0, 0), 1.0), Disk((10, 0), 1.0)), "disks", {"c": 16})
    g = intersection_graph(coll)
    assert odd_power_fat_realization(coll, g, 0) is coll
    out = odd_power_fat_realization(coll, g, 2)
    assert all(isinstance(o, UnionObject) and o.members == (c,) for o, c in zip(out.objects, coll.objects))
    assert out.params["c"] == 9 * 25 * 16


def test_odd_power_path():
    objs = tuple(Disk((2.0 * i, 0.0), 1.0) for i in range(5))
    coll = ObjectCollection(2, objs, "disks", {"c": 16})
    g = intersection_graph(coll)
    out = odd_power_fat_realization(coll, g, 1)
    assert intersection_graph(out) == graph_power(g, 3)


def test_odd_power_random():
    coll = generate_instance({"kind": "disks", "n": 25, "seed": 9})
    g = intersection_graph(coll)
    for k in (1, 2):
        assert intersection_graph(odd_power_fat_realization(coll, g, k)) == graph_power(g, 2 * k + 1)


def test_odd_power_graph_mismatch():
    coll = ObjectCollection(2, (Disk((0, 0), 1.0), Disk((1, 0), 1.0)), "disks", {})
    other = intersection_graph(ObjectCollection(2, (Disk((0, 0), 1.0), Disk((9, 0), 1.0)), "disks", {}))
    with pytest.raises(GeometryError):
        odd_power_fat_realization(coll, other, 1)
