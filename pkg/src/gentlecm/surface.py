"""The marked surface of a gentle algebra, glued from one polygon per maximal path.

A path ``w`` through vertices ``v_0, ..., v_n`` gives a polygon whose edges,
counterclockwise, carry the labels ``v_0, ..., v_n`` followed by one unlabeled
boundary edge with a marked point in its middle.  Edges with the same label are
glued, reversing orientation.  Corner ``k`` of a polygon with ``m`` edges sits
between edge ``k - 1`` and edge ``k``; edge ``k`` runs from corner ``k`` to
corner ``k + 1``.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .quiver import GentlePresentation, Path

__all__ = [
    "Polygon",
    "SurfaceModel",
    "SurfaceInvariants",
    "SurfaceError",
    "build_surface",
    "invariants",
    "finite_gldim_geometric",
    "render_svg",
]


class SurfaceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Polygon:
    owner: Path
    labels: tuple[str, ...]

    @property
    def edge_count(self) -> int:
        return len(self.labels) + 1

    @property
    def marked_edge(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SurfaceInvariants:
    euler_characteristic: int
    boundary_components: int
    marked_points: int
    genus: int


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


class SurfaceModel:
    def __init__(self, algebra: GentlePresentation, polygons: list[Polygon]):
        self.algebra = algebra
        self.polygons = polygons
        occurrences: dict[str, list[tuple[int, int]]] = {}
        for i, P in enumerate(polygons):
            for k, v in enumerate(P.labels):
                occurrences.setdefault(v, []).append((i, k))
        bad = {v: len(o) for v, o in occurrences.items() if len(o) != 2}
        missing = [v for v in algebra.vertices if v not in occurrences]
        if bad or missing:
            raise SurfaceError(f"labels must occur exactly twice: {bad or missing}")
        # gluing: label -> the two (polygon, edge) sides it joins
        self.gluing: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
            v: (o[0], o[1]) for v, o in occurrences.items()}
        self._corners = self._glue_corners()

    def partner(self, polygon: int, edge: int) -> tuple[int, int]:
        a, b = self.gluing[self.polygons[polygon].labels[edge]]
        return b if a == (polygon, edge) else a

    def _glue_corners(self) -> _UnionFind:
        uf = _UnionFind()
        for i, P in enumerate(self.polygons):
            for k in range(P.edge_count):
                uf.find((i, k))
        for (i, k), (j, m) in self.gluing.values():
            ni, nj = self.polygons[i].edge_count, self.polygons[j].edge_count
            uf.union((i, k), (j, (m + 1) % nj))
            uf.union((i, (k + 1) % ni), (j, m))
        return uf

    def corner_classes(self) -> dict:
        classes: dict = {}
        for i, P in enumerate(self.polygons):
            for k in range(P.edge_count):
                classes.setdefault(self._corners.find((i, k)), []).append((i, k))
        return classes

    def boundary_corners(self) -> set:
        """Classes of corners touching a marked (boundary) edge."""
        out = set()
        for i, P in enumerate(self.polygons):
            m = P.marked_edge
            out.add(self._corners.find((i, m)))
            out.add(self._corners.find((i, (m + 1) % P.edge_count)))
        return out

    @property
    def marked_points(self) -> int:
        return len(self.polygons)


def build_surface(A: GentlePresentation) -> SurfaceModel:
    polys = [Polygon(w, tuple(A.path_vertices(w))) for w in A.maximal_paths_geo]
    return SurfaceModel(A, polys)


def invariants(S: SurfaceModel) -> SurfaceInvariants:
    # each marked edge is split in two by its marked point
    V = len(S.corner_classes()) + S.marked_points
    E = len(S.gluing) + 2 * len(S.polygons)
    F = len(S.polygons)
    chi = V - E + F
    uf = _UnionFind()
    for i, P in enumerate(S.polygons):
        m = P.marked_edge
        dot = ("marked", i)
        uf.union(dot, S._corners.find((i, m)))
        uf.union(dot, S._corners.find((i, (m + 1) % P.edge_count)))
    b = len({uf.find(("marked", i)) for i in range(len(S.polygons))})
    twice_g = 2 - chi - b
    if twice_g < 0 or twice_g % 2:
        raise SurfaceError(f"inconsistent topology: chi={chi}, b={b}")
    return SurfaceInvariants(chi, b, S.marked_points, twice_g // 2)


def finite_gldim_geometric(S: SurfaceModel) -> bool:
    """Every corner lies on the boundary after gluing."""
    return set(S.corner_classes()) <= S.boundary_corners()


# ------------------------------------------------------------------ drawing
_R = 60.0
_GAP = 50.0


def _vertices_of(P: Polygon, cx: float, cy: float):
    m = P.edge_count
    start = math.pi / 2 + math.pi / m
    pts = []
    for k in range(m):
        t = start + 2 * math.pi * (k - P.marked_edge) / m
        pts.append((cx + _R * math.cos(t), cy + _R * math.sin(t)))
    return pts


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _edge_geometry(P: Polygon, pts, k: int):
    """SVG path data of edge ``k`` and the point where curves meet it."""
    m = P.edge_count
    (x0, y0), (x1, y1) = pts[k], pts[(k + 1) % m]
    mx, my = (x0 + x1) / 2, (y0 + y1) / 2
    if m == 2:
        # a digon is a circle cut into two half-circles; angles grow clockwise on screen
        d = f"M {_fmt(x0)} {_fmt(y0)} A {_fmt(_R)} {_fmt(_R)} 0 0 1 {_fmt(x1)} {_fmt(y1)}"
        cx, cy = mx, my
        return d, (cx, cy + _R) if k == 0 else (cx, cy - _R)
    return f"M {_fmt(x0)} {_fmt(y0)} L {_fmt(x1)} {_fmt(y1)}", (mx, my)


def render_svg(S: SurfaceModel, curves=()) -> str:
    """Deterministic SVG atlas: polygons in a row, gluing partners, marked points, curves."""
    A = S.algebra
    n = len(S.polygons)
    width = max(1, n) * (2 * _R + _GAP) + _GAP
    height = 2 * _R + 2 * _GAP
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "version": "1.1",
        "width": _fmt(width),
        "height": _fmt(height),
        "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
    })
    geometry = []
    for i, P in enumerate(S.polygons):
        cx = _GAP + _R + i * (2 * _R + _GAP)
        cy = _GAP + _R
        pts = _vertices_of(P, cx, cy)
        g = ET.SubElement(svg, "g", {"id": f"polygon{i}", "class": "polygon"})
        title = ET.SubElement(g, "title")
        title.text = str(P.owner)
        mids = []
        for k in range(P.edge_count):
            d, mid = _edge_geometry(P, pts, k)
            mids.append(mid)
            if k == P.marked_edge:
                ET.SubElement(g, "path", {"id": f"polygon{i}-boundary", "class": "boundary-edge",
                                          "d": d, "fill": "none", "stroke": "black",
                                          "stroke-width": "2"})
                ET.SubElement(g, "circle", {"id": f"polygon{i}-marked", "class": "marked-point",
                                            "cx": _fmt(mid[0]), "cy": _fmt(mid[1]), "r": "4",
                                            "fill": "green"})
                continue
            j, m = S.partner(i, k)
            ET.SubElement(g, "path", {"id": f"polygon{i}-edge{k}", "class": "labeled-edge",
                                      "d": d, "fill": "none", "stroke": "grey",
                                      "stroke-dasharray": "4 2"})
            lx = cx + 1.25 * (mid[0] - cx)
            ly = cy + 1.25 * (mid[1] - cy)
            if P.edge_count == 2:
                ly = mid[1] + 16
            text = ET.SubElement(g, "text", {"class": "edge-label", "x": _fmt(lx), "y": _fmt(ly),
                                             "font-size": "11", "text-anchor": "middle"})
            text.text = f"{P.labels[k]} ~ P{j}.{m}"
        for k, (x, y) in enumerate(pts):
            ET.SubElement(g, "circle", {"class": "corner", "cx": _fmt(x), "cy": _fmt(y), "r": "2.5",
                                        "fill": "red"})
        geometry.append(((cx, cy), mids))
    owner_polygon = {}
    for i, P in enumerate(S.polygons):
        owner_polygon.setdefault(P.owner, i)
    for c, curve in enumerate(curves):
        g = ET.SubElement(svg, "g", {"id": f"curve{c}", "class": "curve"})
        title = ET.SubElement(g, "title")
        title.text = str(curve)
        for s, letter in enumerate(curve.letters):
            whole, hat, _ = A.maximal_path_of(letter.path)
            i = owner_polygon[whole]
            (cx, cy), mids = geometry[i]
            a = len(hat)
            b = a + len(letter.path)
            if letter.inverse:
                a, b = b, a
            (x0, y0), (x1, y1) = mids[a], mids[b]
            d = (f"M {_fmt(x0)} {_fmt(y0)} Q {_fmt(cx)} {_fmt(cy)} {_fmt(x1)} {_fmt(y1)}")
            ET.SubElement(g, "path", {"id": f"curve{c}-seg{s}", "class": "curve-segment", "d": d,
                                      "fill": "none", "stroke": _palette(c), "stroke-width": "1.5"})
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def _palette(c: int) -> str:
    colors = ["#1f77b4", "#d62728", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"]
    return colors[c % len(colors)]
