"""Seeded instance generators.

Every generator draws from its own numpy ``Generator`` obtained from a
``SeedSequence`` keyed by the user seed and the generator name, so equal specs
give bit-identical collections and different kinds never share a stream.
"""
from __future__ import annotations

import math
import zlib
from fractions import Fraction

import numpy as np

from .geometry import Box, Disk, GeometryError, GridPath, ObjectCollection
from .graph import Graph

GENERATOR_KINDS = (
    "unit-disks",
    "disks",
    "similarly-sized-fat",
    "unit-width-rects",
    "grid-paths-v",
    "grid-paths-e",
    "grid",
    "biclique",
)

DIGITS = 6


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent random stream for ``(seed, name)``."""
    if seed is None or int(seed) < 0:
        raise GeometryError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(name.encode()),))
    return np.random.default_rng(ss)


def _r(x: float) -> float:
    return round(float(x), DIGITS)


def _default_window(n: int, size: float, density: float = 1.1) -> float:
    return _r(max(2.0 * size, density * size * math.sqrt(n)))


def generate_instance(spec: dict) -> ObjectCollection:
    """Build a collection from ``{kind, n, seed, window?, ...kind params}``.

    Kind parameters: ``radius`` (unit-disks), ``rmin``/``rmax`` (disks), ``k``
    (similarly-sized-fat), ``width``/``hmax`` (unit-width-rects), ``l`` and
    ``bends`` (grid paths).  ``grid`` builds an n-by-n lattice of touching unit
    disks and ``biclique`` the K_{n,n} rectangle arrangement.
    """
    kind = spec.get("kind")
    if kind not in GENERATOR_KINDS:
        raise GeometryError(f"unknown generator kind {kind!r}")
    n = int(spec.get("n", 0))
    if n < 1:
        raise GeometryError("n must be >= 1")
    seed = int(spec.get("seed", 0))
    rng = stream(seed, kind)
    window = spec.get("window")

    if kind == "unit-disks":
        r = float(spec.get("radius", 1.0))
        w = float(window or _default_window(n, 2 * r))
        objs = [Disk((_r(x), _r(y)), r) for x, y in rng.uniform(0, w, size=(n, 2))]
        return ObjectCollection(2, objs, "unit-disks", {"radius": r, "window": w})

    if kind == "disks":
        rmin = float(spec.get("rmin", 0.2))
        rmax = float(spec.get("rmax", 2.0))
        if not 0 < rmin <= rmax:
            raise GeometryError("need 0 < rmin <= rmax")
        w = float(window or _default_window(n, rmin + rmax, 0.9))
        radii = np.exp(rng.uniform(math.log(rmin), math.log(rmax), size=n))
        centers = rng.uniform(0, w, size=(n, 2))
        objs = [Disk((_r(x), _r(y)), _r(rad)) for (x, y), rad in zip(centers, radii)]
        return ObjectCollection(2, objs, "disks", {"c": 16, "window": w})

    if kind == "similarly-sized-fat":
        k = float(spec.get("k", 2))
        if k < 1:
            raise GeometryError("similarity ratio k must be >= 1")
        w = float(window or _default_window(n, 1 + k, 0.9))
        radii = rng.uniform(0.5, 0.5 * k, size=n) if k > 1 else np.full(n, 0.5)
        centers = rng.uniform(0, w, size=(n, 2))
        objs = [Disk((_r(x), _r(y)), _r(rad)) for (x, y), rad in zip(centers, radii)]
        return ObjectCollection(2, objs, "similarly-sized-fat", {"k": k, "c": 16, "window": w})

    if kind == "unit-width-rects":
        c = float(spec.get("width", 1.0))
        hmax = float(spec.get("hmax", 3.0))
        w = float(window or _default_window(n, c + hmax / 2, 0.8))
        objs = []
        for x, y, h in zip(rng.uniform(0, w, n), rng.uniform(0, w, n), rng.uniform(0.2, hmax, n)):
            x, y = _r(x), _r(y)
            objs.append(Box((x, y), (_r(x + c), _r(y + h))))
        return ObjectCollection(2, objs, "unit-width-rects", {"width": c, "window": w})

    if kind in ("grid-paths-v", "grid-paths-e"):
        ell = int(spec.get("l", 1))
        bends = int(spec.get("bends", 1))
        if ell < 1 or bends < 0:
            raise GeometryError("grid paths need l >= 1 and bends >= 0")
        w = int(window or max(4, round(1.2 * math.sqrt(n) * (ell + 1))))
        objs = [_random_path(rng, w, ell, bends) for _ in range(n)]
        return ObjectCollection(2, objs, kind, {"l": ell, "bends": bends, "window": w})

    if kind == "grid":
        objs = [Disk((2.0 * i, 2.0 * j), 1.0) for i in range(n) for j in range(n)]
        return ObjectCollection(2, objs, "unit-disks", {"radius": 1.0})

    # biclique: n pairwise-disjoint vertical bars crossing n pairwise-disjoint horizontal bars
    objs = [Box((2.0 * i, 0.0), (2.0 * i + 1, 2.0 * n)) for i in range(n)]
    objs += [Box((0.0, 2.0 * j), (2.0 * n, 2.0 * j + 1)) for j in range(n)]
    return ObjectCollection(2, objs, "generic", {})


def _random_path(rng, window: int, ell: int, bends: int) -> GridPath:
    x = int(rng.integers(0, window + 1))
    y = int(rng.integers(0, window + 1))
    pts = [(x, y)]
    xmin = xmax = x
    horizontal = bool(rng.integers(0, 2))
    for _ in range(bends + 1):
        if horizontal:
            choices = [t for t in range(xmax - ell, xmin + ell + 1) if t != x]
            x = int(choices[int(rng.integers(0, len(choices)))])
            xmin, xmax = min(xmin, x), max(xmax, x)
        else:
            step = int(rng.integers(1, 4)) * (1 if rng.integers(0, 2) else -1)
            y += step
        pts.append((x, y))
        horizontal = not horizontal
    return GridPath(tuple(pts))


def random_weights(n: int, seed: int, low: int = 1, high: int = 10) -> tuple:
    rng = stream(seed, "weights")
    return tuple(Fraction(int(w)) for w in rng.integers(low, high + 1, size=n))


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = stream(seed, "gnp")
    coins = rng.random(size=(n, n))
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if coins[u, v] < p])
