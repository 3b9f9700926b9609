"""
Polarized smooth toric surfaces given by lattice polygons, and formal disjoint
unions of them.

A vertex u of the moment polygon is a torus-fixed point p; u is the character
of L at p and the primitive edge vectors e1, e2 leaving u are the characters
of the local coordinate functions there.  The torus weights of T_pS are
therefore -e1, -e2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import gcd
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .linalg import IncrementalEchelon


class InvalidPolygonError(ValueError):
    pass


class NonSmoothSurfaceError(ValueError):
    pass


class SurfaceFileError(ValueError):
    """Malformed surface description file."""


class ChernTuple(NamedTuple):
    x: int  # L^2
    y: int  # L.K_S
    z: int  # K_S^2
    t: int  # c_2(S)

    def __add__(self, other):
        return ChernTuple(*(a + b for a, b in zip(self, other)))

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z, "t": self.t}


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _det(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _primitive(v) -> tuple:
    g = gcd(v[0], v[1])
    return (v[0] // g, v[1] // g)


@dataclass(frozen=True)
class FixedPoint:
    vertex: tuple
    edges: tuple  # (e1, e2): towards the next and the previous vertex (ccw order)

    @property
    def tangent(self) -> tuple:
        """Torus weights of the tangent plane, as integer linear forms in (s, t)."""
        (a, b), (c, d) = self.edges
        return ((-a, -b), (-c, -d))

    @property
    def chi(self) -> tuple:
        return self.vertex


@dataclass(frozen=True)
class PolarizedToricSurface:
    """Validated convex lattice polygon, vertices in counterclockwise order."""

    vertices: tuple
    name: str = field(default="", compare=False)

    @property
    def fixed_points(self) -> tuple:
        vs = self.vertices
        n = len(vs)
        out = []
        for k, v in enumerate(vs):
            nxt, prv = vs[(k + 1) % n], vs[k - 1]
            e1 = _primitive((nxt[0] - v[0], nxt[1] - v[1]))
            e2 = _primitive((prv[0] - v[0], prv[1] - v[1]))
            out.append(FixedPoint(v, (e1, e2)))
        return tuple(out)

    @property
    def edge_lengths(self) -> tuple:
        vs = self.vertices
        n = len(vs)
        return tuple(
            gcd(vs[(k + 1) % n][0] - vs[k][0], vs[(k + 1) % n][1] - vs[k][1]) for k in range(n)
        )

    def twice_area(self) -> int:
        vs = self.vertices
        n = len(vs)
        return sum(_det(vs[k], vs[(k + 1) % n]) for k in range(n))

    def chern(self) -> ChernTuple:
        t = len(self.vertices)
        return ChernTuple(self.twice_area(), -sum(self.edge_lengths), 12 - t, t)

    @property
    def key(self) -> tuple:
        """Translation-invariant identity used for caching and deduplication."""
        x0, y0 = min(self.vertices)
        shifted = [(a - x0, b - y0) for a, b in self.vertices]
        i = shifted.index((0, 0))
        return tuple(shifted[i:] + shifted[:i])

    def __str__(self):
        return self.name or f"polygon{list(self.vertices)}"


def surface_from_polygon(vertices: Iterable[Sequence[int]], name: str = "") -> PolarizedToricSurface:
    """Validate a strictly convex lattice polygon with smooth vertex cones."""
    pts = []
    for v in vertices:
        if len(v) != 2 or not all(isinstance(c, int) and not isinstance(c, bool) for c in v):
            raise InvalidPolygonError(f"vertex {v!r} is not a pair of integers")
        pts.append((v[0], v[1]))
    n = len(pts)
    if n < 3:
        raise InvalidPolygonError("a polygon needs at least 3 vertices")
    if len(set(pts)) != n:
        raise InvalidPolygonError("repeated vertex")
    area2 = sum(_det(pts[k], pts[(k + 1) % n]) for k in range(n))
    if area2 == 0:
        raise InvalidPolygonError("degenerate polygon")
    if area2 < 0:
        pts.reverse()
    # every other vertex strictly left of every edge
    for k in range(n):
        a, b = pts[k], pts[(k + 1) % n]
        for j in range(n):
            if j in (k, (k + 1) % n):
                continue
            if _cross(a, b, pts[j]) <= 0:
                raise InvalidPolygonError(f"polygon is not strictly convex at edge {a}->{b}")
    surface = PolarizedToricSurface(tuple(pts), name)
    for fp in surface.fixed_points:
        if abs(_det(*fp.edges)) != 1:
            raise NonSmoothSurfaceError(f"vertex {fp.vertex} is not a smooth cone")
    return surface


@dataclass(frozen=True)
class SurfaceInstance:
    components: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.components:
            raise ValueError("an instance needs at least one component")

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    @property
    def key(self) -> tuple:
        return tuple(sorted(c.key for c in self.components))

    def __str__(self):
        if self.name:
            return self.name
        return " + ".join(str(c) for c in self.components)


def instance(*components: PolarizedToricSurface, name: str = "") -> SurfaceInstance:
    return SurfaceInstance(tuple(components), name)


def chern_numbers(inst: SurfaceInstance | PolarizedToricSurface) -> ChernTuple:
    if isinstance(inst, PolarizedToricSurface):
        return inst.chern()
    total = ChernTuple(0, 0, 0, 0)
    for c in inst.components:
        total = total + c.chern()
    return total


# standard polygons

def projective_plane(d: int) -> PolarizedToricSurface:
    return surface_from_polygon([(0, 0), (d, 0), (0, d)], f"P2(O({d}))")


def p1xp1(a: int, b: int) -> PolarizedToricSurface:
    return surface_from_polygon([(0, 0), (a, 0), (a, b), (0, b)], f"P1xP1(O({a},{b}))")


def hirzebruch(n: int, a: int, b: int) -> PolarizedToricSurface:
    """F_n with the polarization whose polygon has bottom edge a + n*b and top edge a."""
    return surface_from_polygon([(0, 0), (a + n * b, 0), (a, b), (0, b)], f"F{n}({a},{b})")


def cut_corners(surface: PolarizedToricSurface, cuts: dict, name: str = "") -> PolarizedToricSurface:
    """
    Toric blow-up: truncate the corner at vertex index k by size cuts[k],
    replacing u by u + c*e2 and u + c*e1.
    """
    new = []
    for k, fp in enumerate(surface.fixed_points):
        c = cuts.get(k, 0)
        if not c:
            new.append(fp.vertex)
            continue
        u = fp.vertex
        (a1, b1), (a2, b2) = fp.edges
        new.append((u[0] + c * a2, u[1] + c * b2))
        new.append((u[0] + c * a1, u[1] + c * b1))
    label = name or f"{surface}/cut{sorted(cuts.items())}"
    return surface_from_polygon(new, label)


# very-ampleness heuristic

@dataclass(frozen=True)
class Advisory:
    delta: int
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.warnings

    def __str__(self):
        if self.ok:
            return f"no ampleness warning for delta={self.delta}"
        return "; ".join(self.warnings)


def ampleness_advisory(inst: SurfaceInstance | PolarizedToricSurface, delta: int) -> Advisory:
    """Warn when some edge has lattice length < delta (heuristic for delta-very ampleness)."""
    comps = (inst,) if isinstance(inst, PolarizedToricSurface) else inst.components
    warnings = []
    for c in comps:
        short = min(c.edge_lengths)
        if short < delta:
            warnings.append(
                f"{c}: edge of lattice length {short} < {delta}; L may not be {delta}-very ample"
            )
    return Advisory(delta, tuple(warnings))


# generator libraries

def _component_pool(variant: int) -> list:
    """Connected building blocks; the two variants share no polygon."""
    if variant == 0:
        pool = [projective_plane(d) for d in range(1, 6)]
        pool += [p1xp1(a, b) for a in range(1, 4) for b in range(a, 5)]
        hexagon = cut_corners(projective_plane(4), {0: 1, 1: 1, 2: 1}, "P2(O(4)) cut at 3 corners")
        pool.append(hexagon)
        pool += [cut_corners(projective_plane(d), {0: 1}, f"F1 as P2(O({d})) cut once") for d in (3, 5)]
    elif variant == 1:
        pool = [hirzebruch(1, a, b) for a in (1, 3) for b in (1, 2, 3)]
        pool += [hirzebruch(2, a, b) for a in (1, 2) for b in (1, 2)]
        pool += [cut_corners(p1xp1(a, b), {0: 1}, f"P1xP1(O({a},{b})) cut once") for a, b in ((2, 2), (3, 4), (2, 5))]
        pool += [cut_corners(p1xp1(a, a + 1), {0: 1, 2: 1}, f"P1xP1(O({a},{a + 1})) cut twice") for a in (3, 4)]
        pool.append(cut_corners(p1xp1(4, 5), {0: 1, 1: 1, 2: 1}, "P1xP1(O(4,5)) cut 3 times"))
        pool.append(cut_corners(p1xp1(5, 5), {0: 1, 1: 2, 2: 1, 3: 2}, "P1xP1(O(5,5)) cut 4 times"))
    else:
        raise ValueError(f"unknown library variant {variant}")
    return pool


MAX_LIBRARY_DEGREE = 6


def monomial_exponents(degree: int) -> list:
    """Exponents (a, b, c, d) with a+b+c+d <= degree, by degree then lex."""
    out = []
    for total in range(degree + 1):
        for a in range(total, -1, -1):
            for b in range(total - a, -1, -1):
                for c in range(total - a - b, -1, -1):
                    out.append((a, b, c, total - a - b - c))
    return out


def monomial_row(chern: ChernTuple, exponents: Sequence) -> list:
    x, y, z, t = chern
    return [x ** a * y ** b * z ** c * t ** d for a, b, c, d in exponents]


def candidate_instances(variant: int, max_components: int) -> Iterable[SurfaceInstance]:
    pool = _component_pool(variant)
    for m in range(1, max_components + 1):
        for combo in combinations_with_replacement(range(len(pool)), m):
            yield SurfaceInstance(tuple(pool[i] for i in combo))


def generator_library(max_degree: int, variant: int = 0, extra: float = 0.25, held_out: int = 5) -> list:
    """
    Deterministic family of instances whose Chern tuples make the degree
    <= max_degree monomial matrix full rank, followed by ceil(extra * rank)
    + held_out further instances with new Chern tuples, at least one of them
    a disjoint union.

    Connected rational toric surfaces all have z + t = 12, so unions of up
    to max_degree + 1 components are needed to separate z from t.
    """
    return list(_generator_library(max_degree, variant, extra, held_out))


@lru_cache(maxsize=None)
def _generator_library(max_degree: int, variant: int, extra: float, held_out: int) -> tuple:

    if not 0 <= max_degree <= MAX_LIBRARY_DEGREE:
        raise ValueError(f"max_degree must be in 0..{MAX_LIBRARY_DEGREE}")
    exps = monomial_exponents(max_degree)
    need = len(exps)
    n_spare = -(-need * round(extra * 100) // 100) + held_out
    ech = IncrementalEchelon(need)
    basis, spare = [], []
    seen = set()
    for inst in candidate_instances(variant, max_degree + 1):
        ch = chern_numbers(inst)
        if ch in seen:
            continue
        seen.add(ch)
        if ech.rank < need and ech.add(monomial_row(ch, exps)):
            basis.append(inst)
        elif len(spare) < n_spare or (not inst.connected and all(s.connected for s in spare)):
            spare.append(inst)
        if ech.rank == need and len(spare) >= n_spare and any(not s.connected for s in spare):
            break
    if ech.rank < need:
        raise RuntimeError(f"component pool {variant} cannot reach rank {need}")
    return tuple(basis + spare)


# surface description files

def _parse_polygon(obj, where: str):
    if not isinstance(obj, list):
        raise SurfaceFileError(f"{where}: polygon must be an array of [int, int] pairs")
    pts = []
    for i, p in enumerate(obj):
        if not (isinstance(p, list) and len(p) == 2 and all(type(c) is int for c in p)):
            raise SurfaceFileError(f"{where}[{i}]: expected [int, int], got {json.dumps(p)}")
        pts.append(tuple(p))
    return pts


def instance_from_json(data, source: str = "<surface>") -> SurfaceInstance:
    if not isinstance(data, dict):
        raise SurfaceFileError(f"{source}: top level must be an object")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SurfaceFileError(f"{source}: field 'name' must be a string")
    has_poly, has_union = "polygon" in data, "union" in data
    if has_poly == has_union:
        raise SurfaceFileError(f"{source}: exactly one of 'polygon' or 'union' is required")
    polys = (
        [_parse_polygon(data["polygon"], f"{source}: field 'polygon'")]
        if has_poly
        else None
    )
    if has_union:
        if not isinstance(data["union"], list) or not data["union"]:
            raise SurfaceFileError(f"{source}: field 'union' must be a non-empty array of polygons")
        polys = [_parse_polygon(p, f"{source}: field 'union'[{i}]") for i, p in enumerate(data["union"])]
    comps = []
    for i, pts in enumerate(polys):
        try:
            comps.append(surface_from_polygon(pts, name if len(polys) == 1 else f"{name}[{i}]"))
        except (InvalidPolygonError, NonSmoothSurfaceError) as exc:
            raise SurfaceFileError(f"{source}: polygon {i}: {exc}") from exc
    return SurfaceInstance(tuple(comps), name)


def load_surface_file(path: str | Path) -> SurfaceInstance:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise SurfaceFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except _FloatSeen as exc:
        raise SurfaceFileError(f"{path}: non-integer coordinate {exc.args[0]}") from exc
    return instance_from_json(data, str(path))


class _FloatSeen(Exception):
    pass


def _reject_float(s):
    raise _FloatSeen(s)


def instance_to_json(inst: SurfaceInstance) -> dict:
    polys = [[list(v) for v in c.vertices] for c in inst.components]
    if inst.connected:
        return {"name": str(inst), "polygon": polys[0]}
    return {"name": str(inst), "union": polys}
