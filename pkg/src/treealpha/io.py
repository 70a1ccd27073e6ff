"""JSON formats for every artifact.

Documents are written with sorted keys and two-space indentation, rationals as
strings such as ``"7/2"``.  Reading and re-writing a document reproduces it byte
for byte.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .decomposition import GeneralCover, Layering, TreeDecomposition
from .geometry import Box, Disk, GeometryError, GridPath, ObjectCollection, UnionObject
from .graph import Graph, GraphError, SubgraphFamily
from .ptas import PtasReport


class FormatError(ValueError):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(path, doc: dict) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _frac(text) -> Fraction:
    try:
        return Fraction(text)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"not a rational number: {text!r}") from exc


def _need(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# instances


def object_to_dict(o) -> dict:
    if isinstance(o, Disk):
        return {"type": "disk", "center": list(o.center), "radius": o.radius}
    if isinstance(o, Box):
        return {"type": "box", "min": list(o.lo), "max": list(o.hi)}
    if isinstance(o, GridPath):
        return {"type": "path", "points": [list(p) for p in o.points]}
    if isinstance(o, UnionObject):
        return {"type": "union", "members": [object_to_dict(m) for m in o.members]}
    raise FormatError(f"cannot serialise {type(o).__name__}")


def object_from_dict(doc: dict):
    kind = _need(doc, "type", "object")
    try:
        if kind == "disk":
            return Disk(tuple(doc["center"]), float(doc["radius"]))
        if kind == "box":
            return Box(tuple(doc["min"]), tuple(doc["max"]))
        if kind == "path":
            return GridPath(tuple(tuple(p) for p in doc["points"]))
        if kind == "union":
            return UnionObject(tuple(object_from_dict(m) for m in doc["members"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed {kind} object: {exc}") from exc
    except GeometryError as exc:
        raise FormatError(str(exc)) from exc
    raise FormatError(f"unknown object type {kind!r}")


def instance_to_dict(coll: ObjectCollection) -> dict:
    return {
        "dimension": coll.dimension,
        "kind": coll.kind,
        "params": _plain(coll.params),
        "objects": [object_to_dict(o) for o in coll.objects],
    }


def instance_from_dict(doc: dict) -> ObjectCollection:
    dim = _need(doc, "dimension", "instance")
    kind = str(_need(doc, "kind", "instance")).replace("_", "-")
    objs = [object_from_dict(o) for o in _need(doc, "objects", "instance")]
    try:
        return ObjectCollection(int(dim), tuple(objs), kind, dict(doc.get("params", {})))
    except (GeometryError, TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# graphs and families


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()]}


def graph_from_dict(doc: dict) -> Graph:
    try:
        return Graph(int(_need(doc, "n", "graph")), [tuple(e) for e in _need(doc, "edges", "graph")])
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


def family_to_dict(fam: SubgraphFamily) -> dict:
    return {"members": [list(m) for m in fam.members], "weights": [str(w) for w in fam.weights], "h": fam.h}


def family_from_dict(doc: dict) -> SubgraphFamily:
    try:
        return SubgraphFamily(tuple(tuple(m) for m in _need(doc, "members", "family")),
                              tuple(_frac(w) for w in _need(doc, "weights", "family")), doc.get("h"))
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# decompositions


def td_to_dict(td: TreeDecomposition) -> dict:
    return {
        "nodes": [{"id": i, "bag": sorted(b)} for i, b in enumerate(td.bags)],
        "tree_edges": [list(e) for e in td.edges],
    }


def td_from_dict(doc: dict) -> TreeDecomposition:
    nodes = _need(doc, "nodes", "tree decomposition")
    ids = [int(_need(nd, "id", "node")) for nd in nodes]
    if sorted(ids) != list(range(len(ids))):
        raise FormatError("node ids must be 0..N-1")
    bags = [None] * len(ids)
    for nd, i in zip(nodes, ids):
        bags[i] = frozenset(int(v) for v in _need(nd, "bag", "node"))
    edges = [tuple(int(x) for x in e) for e in _need(doc, "tree_edges", "tree decomposition")]
    if any(len(e) != 2 for e in edges):
        raise FormatError("tree edges must be pairs")
    return TreeDecomposition(tuple(bags), tuple(edges))


def layering_to_dict(lay: Layering) -> dict:
    return {"layers": [sorted(l) for l in lay.layers]}


def layering_from_dict(doc: dict) -> Layering:
    return Layering(tuple(frozenset(int(v) for v in l) for l in _need(doc, "layers", "layering")))


def decomposition_to_dict(td: TreeDecomposition, lay: Layering | None, provenance: dict) -> dict:
    doc = {"td": td_to_dict(td), "provenance": _plain(provenance)}
    if lay is not None:
        doc["layering"] = layering_to_dict(lay)
    return doc


def decomposition_from_dict(doc: dict):
    td = td_from_dict(_need(doc, "td", "decomposition"))
    lay = layering_from_dict(doc["layering"]) if "layering" in doc else None
    return td, lay, doc.get("provenance", {})


def cover_to_dict(cover: GeneralCover) -> dict:
    prov = list(cover.provenance) + [{}] * (len(cover) - len(cover.provenance))
    return {
        "beta": str(cover.beta),
        "bound": cover.bound,
        "elements": [
            {"vertices": sorted(e), "td": td_to_dict(td), "provenance": _plain(p)}
            for e, td, p in zip(cover.elements, cover.tds, prov)
        ],
    }


def cover_from_dict(doc: dict) -> GeneralCover:
    elems = _need(doc, "elements", "cover")
    return GeneralCover(
        tuple(frozenset(int(v) for v in _need(e, "vertices", "cover element")) for e in elems),
        tuple(td_from_dict(_need(e, "td", "cover element")) for e in elems),
        _frac(_need(doc, "beta", "cover")),
        doc.get("bound"),
        tuple(e.get("provenance", {}) for e in elems),
    )


# ---------------------------------------------------------------------------
# solutions and reports


def solution_to_dict(value, chosen, certificate: str, stats: dict | None = None) -> dict:
    if certificate not in ("independent", "packing"):
        raise FormatError(f"unknown certificate {certificate!r}")
    key = "vertices" if certificate == "independent" else "members"
    return {"value": str(Fraction(value)), key: sorted(int(v) for v in chosen), "certificate": certificate,
            "stats": _plain(stats or {})}


def solution_from_dict(doc: dict):
    cert = _need(doc, "certificate", "solution")
    key = "vertices" if cert == "independent" else "members"
    return _frac(_need(doc, "value", "solution")), [int(v) for v in _need(doc, key, "solution")], cert, doc.get("stats", {})


def report_to_dict(rep: PtasReport) -> dict:
    return _plain(rep.to_dict())


def report_from_dict(doc: dict) -> PtasReport:
    opt = doc.get("optimum")
    ratio = doc.get("achieved_ratio")
    return PtasReport(
        instance=doc.get("instance", ""),
        method=_need(doc, "method", "report"),
        parameter=doc.get("parameter", ""),
        achieved=_frac(_need(doc, "achieved", "report")),
        guaranteed=_frac(_need(doc, "guaranteed", "report")),
        optimum=None if opt is None else _frac(opt),
        achieved_ratio=None if ratio is None else _frac(ratio),
        elements=list(doc.get("elements", [])),
        wall_time=float(doc.get("wall_time", 0.0)),
    )


def artifact_kind(doc: dict) -> str:
    """Guess the artifact type of a parsed document."""
    if "objects" in doc:
        return "instance"
    if "elements" in doc and "beta" in doc:
        return "cover"
    if "td" in doc:
        return "decomposition"
    if "nodes" in doc:
        return "td"
    if "layers" in doc:
        return "layering"
    if "certificate" in doc:
        return "solution"
    if "method" in doc and "guaranteed" in doc:
        return "report"
    if "members" in doc:
        return "family"
    if "n" in doc and "edges" in doc:
        return "graph"
    raise FormatError("unrecognised artifact")
