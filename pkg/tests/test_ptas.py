import math
from fractions import Fraction

import pytest

from treealpha.decomposition import (
    GeneralCover,
    cover_from_layering,
    heuristic_td,
    lift_td_to_power,
    restrict_to_subset,
    td_independence_number,
    trivial_layering,
)
from treealpha.generators import generate_instance, random_graph, random_weights
from treealpha.geometry import Box, Disk, GridPath, ObjectCollection
from treealpha.graph import Graph, SubgraphFamily, WeightedGraph, graph_power, intersection_graph
from treealpha.layered import layered_td
from treealpha.oracles import bruteforce_mwis, bruteforce_packing, pairwise_distance_ok
from treealpha.ptas import (
    PtasError,
    connected_subsets,
    path_column_classes,
    ptas_distance_d,
    ptas_mwis_fat,
    ptas_mwis_shifting_geom,
    ptas_mwis_shifting_paths,
    ptas_packing_from_cover,
    residue_classes,
    subexp_exact,
)


def optimum(g, weights):
    return bruteforce_mwis(WeightedGraph(g, weights))[1]


def test_full_cover_is_exact():
    g = random_graph(14, 0.25, 3)
    w = random_weights(14, 3)
    cover = GeneralCover((frozenset(range(14)),), (heuristic_td(g),), 1)
    chosen, value, report = ptas_packing_from_cover(g, cover, SubgraphFamily.singletons(14, w), 4)
    assert value == optimum(g, w)
    assert report.with_optimum(value).meets_guarantee()


def test_cover_members_stay_in_element():
    g = Graph(6, [(i, i + 1) for i in range(5)])
    td = heuristic_td(g)
    elems = (frozenset({0, 1, 2}), frozenset({3, 4, 5}))
    tds = tuple(restrict_to_subset(g, td, e) for e in elems)
    fam = SubgraphFamily.all_edges(g)
    chosen, value, _ = ptas_packing_from_cover(g, GeneralCover(elems, tds, Fraction(1, 2)), fam, 3)
    assert any(all(set(fam.members[j]) <= e for j in chosen) for e in elems)
    assert pairwise_distance_ok(g, fam, chosen, 2)


def test_cover_needs_r_above_h():
    g = Graph(2, [(0, 1)])
    cover = GeneralCover((frozenset({0, 1}),), (heuristic_td(g),), 1)
    with pytest.raises(PtasError):
        ptas_packing_from_cover(g, cover, SubgraphFamily.all_edges(g), 2)


@pytest.mark.parametrize("seed", range(4))
def test_cover_packing_ratio(seed):
    coll = generate_instance({"kind": "unit-disks", "n": 18, "seed": seed})
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    w = random_weights(g.n, seed)
    cover = cover_from_layering(g, td, lay, 4, k)
    _, value, report = ptas_packing_from_cover(g, cover, SubgraphFamily.singletons(g.n, w), 4)
    assert value >= Fraction(3, 4) * optimum(g, w)
    bigger = GeneralCover(cover.elements + (frozenset(range(g.n)),), cover.tds + (td,), cover.beta)
    assert ptas_packing_from_cover(g, bigger, SubgraphFamily.singletons(g.n, w), 4)[1] >= value


def test_fat_disjoint_is_exact():
    objs = tuple(Disk((3.0 * i, 0.0), 0.5 + 0.1 * i) for i in range(6))
    coll = ObjectCollection(2, objs, "disks", {"c": 16})
    chosen, value, _ = ptas_mwis_fat(coll, 16, (1,) * 6, 2)
    assert chosen == list(range(6)) and value == 6


def test_fat_cover_has_sixteen_elements():
    coll = generate_instance({"kind": "disks", "n": 15, "seed": 1})
    _, _, report = ptas_mwis_fat(coll, 16, (1,) * 15, 2)
    assert len(report.elements) == 16


@pytest.mark.parametrize("seed", range(3))
def test_fat_ratio(seed):
    coll = generate_instance({"kind": "disks", "n": 20, "seed": seed})
    g = intersection_graph(coll)
    w = random_weights(g.n, seed)
    chosen, value, report = ptas_mwis_fat(coll, 16, w, 3)
    assert g.is_independent(chosen)
    assert report.with_optimum(optimum(g, w)).meets_guarantee()
    assert value >= Fraction(2, 3) * optimum(g, w)


def test_distance_rejects_odd_d():
    g = Graph(3, [(0, 1), (1, 2)])
    with pytest.raises(PtasError):
        ptas_distance_d(g, heuristic_td(g), trivial_layering(g), 1, SubgraphFamily.singletons(3), 3, 2)


def test_distance_two_is_cover_packing():
    coll = generate_instance({"kind": "unit-disks", "n": 16, "seed": 2})
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.singletons(g.n, random_weights(g.n, 2))
    direct = ptas_packing_from_cover(g, cover_from_layering(g, td, lay, 3, k), fam, 3)
    via = ptas_distance_d(g, td, lay, k, fam, 2, 3)
    assert direct[:2] == via[:2]


@pytest.mark.parametrize("seed", range(3))
def test_distance_four_ratio(seed):
    coll = generate_instance({"kind": "unit-disks", "n": 16, "seed": seed, "window": 9})
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    chosen, value, _ = ptas_distance_d(g, td, lay, k, fam, 4, 5)
    assert pairwise_distance_ok(g, fam, chosen, 4)
    assert value >= Fraction(4, 5) * bruteforce_packing(g, fam, 4)[1]


def test_distance_lifted_element_bound():
    coll = generate_instance({"kind": "unit-disks", "n": 40, "seed": 4})
    g = intersection_graph(coll)
    td, lay, ell, _ = layered_td(coll)
    d, r = 4, 3
    kk = d // 2
    gp = graph_power(g, d - 1)
    ltd, llay = lift_td_to_power(g, td, lay, kk - 1)
    cover = cover_from_layering(gp, ltd, llay, r, (4 * kk - 3) * ell)
    assert cover.bound == ell * (4 * kk - 3) * (r - 1)
    for etd in cover.tds:
        assert td_independence_number(gp, etd) <= cover.bound


def test_shifting_rejects_eps():
    coll = generate_instance({"kind": "unit-disks", "n": 5, "seed": 0})
    for eps in (0, 1, 1.5):
        with pytest.raises(PtasError):
            ptas_mwis_shifting_geom(coll, eps)


def test_shifting_disjoint_rects_exact():
    objs = tuple(Box((2.0 * i, 0.0), (2.0 * i + 1, 1.0 + i)) for i in range(7))
    coll = ObjectCollection(2, objs, "unit-width-rects", {"width": 1.0})
    chosen, value, _ = ptas_mwis_shifting_geom(coll, 0.5)
    assert value == 7


@pytest.mark.parametrize("seed", range(3))
def test_shifting_disks_ratio(seed):
    coll = generate_instance({"kind": "unit-disks", "n": 18, "seed": seed})
    g = intersection_graph(coll)
    w = random_weights(g.n, seed)
    chosen, value, report = ptas_mwis_shifting_geom(coll, 0.5, w)
    k = math.ceil(3 / 0.5)
    assert all(row["strip_bound"] <= 3 * math.ceil((k - 1) / 2) for row in report.elements)
    assert g.is_independent(chosen)
    assert value >= Fraction(1, 2) * optimum(g, w)


def test_shifting_disjoint_paths_exact():
    objs = tuple(GridPath(((3 * i, 0), (3 * i + 1, 0), (3 * i + 1, 2))) for i in range(5))
    coll = ObjectCollection(2, objs, "grid-paths-v", {"l": 1})
    _, value, _ = ptas_mwis_shifting_paths(coll, "v", 1, 0.5)
    assert value == 5


@pytest.mark.parametrize("seed", range(3))
def test_shifting_paths_ratio(seed):
    coll = generate_instance({"kind": "grid-paths-v", "n": 15, "seed": seed, "l": 1, "bends": 1})
    g = intersection_graph(coll, "v")
    w = random_weights(g.n, seed)
    chosen, value, _ = ptas_mwis_shifting_paths(coll, "v", 1, 0.5, w)
    assert g.is_independent(chosen)
    assert value >= Fraction(1, 2) * optimum(g, w)


def test_shifting_paths_components_fit_window():
    coll = generate_instance({"kind": "grid-paths-e", "n": 30, "seed": 2, "l": 2, "bends": 2})
    g = intersection_graph(coll, "e")
    k, ell = 2, 2
    classes = path_column_classes(coll)
    residues = residue_classes(classes, k * ell)
    counts = [sum(v in s for s in residues) for v in range(g.n)]
    assert max(counts) <= ell
    for removed in residues:
        keep = sum(1 << v for v in range(g.n) if v not in removed)
        for comp in g.components(keep):
            cols = {i for i, vs in classes.items() if set(vs) & set(comp)}
            if cols:
                assert max(cols) - min(cols) < k * ell


def test_shifting_paths_mode_mismatch():
    coll = generate_instance({"kind": "grid-paths-e", "n": 5, "seed": 0, "l": 1})
    with pytest.raises(PtasError):
        ptas_mwis_shifting_paths(coll, "v", 1, 0.5)


@pytest.mark.parametrize("seed", range(3))
def test_subexp_exact_matches_bruteforce(seed):
    coll = generate_instance({"kind": "unit-disks", "n": 14, "seed": seed})
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.singletons(g.n, random_weights(g.n, seed))
    for d in (2, 4):
        stats = {}
        chosen, value = subexp_exact(g, td, lay, k, fam, d, stats)
        assert value == bruteforce_packing(g, fam, d)[1]
        assert stats["compressed_alpha"] ** 2 <= 4 * stats["layered_bound"] * g.n


def test_subexp_induced_matching():
    coll = generate_instance({"kind": "unit-disks", "n": 12, "seed": 7})
    g = intersection_graph(coll)
    td, lay, k, _ = layered_td(coll)
    fam = SubgraphFamily.all_edges(g)
    assert subexp_exact(g, td, lay, k, fam)[1] == bruteforce_packing(g, fam, 2, guard=200)[1]


def test_connected_subsets():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert len(connected_subsets(g, 3)) == 4 + 3 + 2
    with pytest.raises(PtasError):
        connected_subsets(g, 0)
