"""Delaunay triangulation and Voronoi diagram of a packing.

Torus configurations are triangulated by replicating the centers over a
(2k+1) x (2k+1) block of periodic copies, running incremental
Bowyer-Watson (exact predicates) on the block, and keeping one canonical
representative of each periodic structure. Correctness of the replication
is *checked*, not assumed: every collected circumradius must stay below
k * min(width, height) / 2, and the canonical cocircular polygons must tile
the torus rectangle exactly; if either fails, k grows and the block is
rebuilt.

Circumcenters closer than eps_merge are merged into a single Voronoi
vertex whose generator set is the union, which is what turns exactly
cocircular configurations (square grids) into degenerate vertices of
degree >= 4.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from thuelab import backend
from thuelab.geometry import (
    DEFAULT_TOL,
    DegenerateGeometryError,
    Point,
    Segment,
    ToleranceConfig,
    segments_intersect,
)
from thuelab.packing import Domain, PackingConfiguration

__all__ = [
    "Triangulation",
    "VoronoiVertex",
    "VoronoiEdge",
    "VoronoiCell",
    "VoronoiDiagram",
    "TorusScanner",
    "delaunay",
    "voronoi_dual",
    "build_diagram",
    "classify_vertex",
    "classify_edge_pitteway",
    "largest_empty_circle",
    "locate_point",
    "euler_check",
    "PointLocation",
]

_MAX_RINGS = 8


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class VoronoiVertex:
    """Merged circumcenter with its cocircular generator polygon.

    `generators` are center indices in CCW order around `position`,
    starting at the generator with lexicographically smallest coordinates;
    `generator_points` are their coordinates placed around `position`
    (torus: the periodic copy at lattice offset `generator_shifts`)."""

    index: int
    position: Point
    generators: tuple
    generator_shifts: tuple
    generator_points: tuple
    circumradius: float

    @property
    def degree(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class VoronoiEdge:
    """Voronoi edge between two merged vertices.

    `endpoints` and `generator_points` share one local frame (the frame of
    the first incident vertex); on a torus the second endpoint may be a
    periodic translate of its vertex's canonical position."""

    index: int
    generators: tuple  # pair of center indices
    vertex_indices: tuple
    endpoints: tuple  # pair of Point
    generator_points: tuple  # pair of Point, same frame
    pitteway: str  # "pitteway" | "non_pitteway"
    clipped: bool = False

    @property
    def length(self) -> float:
        (ax, ay), (bx, by) = self.endpoints
        return math.hypot(bx - ax, by - ay)


@dataclass(frozen=True)
class VoronoiCell:
    center_index: int
    center: Point
    boundary: tuple  # CCW corners, cell-local frame
    vertex_indices: tuple  # aligned with boundary; -1 where no merged vertex
    area: float
    analyzable: bool


@dataclass
class Triangulation:
    """Delaunay triangles as CCW center-index triples.

    On a torus each triple carries per-vertex integer lattice shifts (the
    torus lift) and concrete coordinates near the Voronoi vertex it
    belongs to; `neighbors[t][k]` is the triangle across the edge opposite
    vertex k (-1 on a box hull edge)."""

    config: PackingConfiguration
    tol: ToleranceConfig
    triangles: list
    shifts: list
    points: list
    neighbors: list
    _structure: object = field(repr=False, default=None)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_area_sum(self) -> float:
        total = 0.0
        for (a, b, c) in self.points:
            total += 0.5 * abs(
                (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            )
        return total


@dataclass
class VoronoiDiagram:
    config: PackingConfiguration
    tol: ToleranceConfig
    vertices: list
    edges: list
    cells: list
    triangulation: Triangulation
    excluded_cells: int = 0
    _incidence: dict = field(default=None, repr=False)

    def cell_area_sum(self) -> float:
        return sum(c.area for c in self.cells)

    def polygon_area_sum(self) -> float:
        """Total area of the cocircular generator polygons of all vertices."""
        total = 0.0
        for v in self.vertices:
            pts = v.generator_points
            acc = 0.0
            for i in range(len(pts)):
                x0, y0 = pts[i]
                x1, y1 = pts[(i + 1) % len(pts)]
                acc += x0 * y1 - x1 * y0
            total += 0.5 * acc
        return total

    def edges_of_cell(self, center_index: int):
        """Incident edges translated into the cell's local frame.

        Yields (edge, endpoints, other_generator_point): segment endpoints
        and the opposite generator position, both relative to the cell's
        actual center coordinates."""
        if self._incidence is None:
            incidence = {}
            for e in self.edges:
                for slot in (0, 1):
                    incidence.setdefault(e.generators[slot], []).append((e, slot))
            self._incidence = incidence
        cx, cy = self.config.centers[center_index]
        for e, slot in self._incidence.get(center_index, ()):
            gx, gy = e.generator_points[slot]
            tx, ty = cx - gx, cy - gy
            endpoints = (
                Point(e.endpoints[0][0] + tx, e.endpoints[0][1] + ty),
                Point(e.endpoints[1][0] + tx, e.endpoints[1][1] + ty),
            )
            ox, oy = e.generator_points[1 - slot]
            yield e, endpoints, Point(ox + tx, oy + ty)


# ---------------------------------------------------------------------------
# small helpers


def _spatial_order(xs, ys):
    """Insertion order with spatial locality (serpentine grid sweep)."""
    n = len(xs)
    if n <= 2:
        return list(range(n))
    minx, maxx = min(xs), max(xs)
    miny, maxy = min(ys), max(ys)
    span = max(maxx - minx, maxy - miny, 1e-30)
    ncell = max(1, int(math.sqrt(n)))
    cell = span / ncell

    def key(i):
        gx = min(int((xs[i] - minx) / cell), ncell - 1)
        gy = min(int((ys[i] - miny) / cell), ncell - 1)
        return (gy, gx if gy % 2 == 0 else -gx, xs[i], ys[i], i)

    return sorted(range(n), key=key)


def _circumdata(px, py, tris):
    """Vectorized circumcenters and radii for index triples into px/py."""
    t = np.asarray(tris, dtype=np.intp)
    ax, ay = px[t[:, 0]], py[t[:, 0]]
    bx = px[t[:, 1]] - ax
    by = py[t[:, 1]] - ay
    cx = px[t[:, 2]] - ax
    cy = py[t[:, 2]] - ay
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return ax + ux, ay + uy, np.hypot(ux, uy)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _cluster_points(xs, ys, eps, torus: Optional[Domain]):
    """Group points whose pairwise distance (torus metric if periodic) is
    below eps. Returns a list of index lists."""
    n = len(xs)
    uf = _UnionFind(n)
    order = sorted(range(n), key=lambda i: (xs[i], ys[i]))

    def close(i, j):
        if torus is not None:
            return torus.distance((xs[i], ys[i]), (xs[j], ys[j])) <= eps
        return math.hypot(xs[i] - xs[j], ys[i] - ys[j]) <= eps

    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if xs[j] - xs[i] > eps:
                break
            if close(i, j):
                uf.union(i, j)
    if torus is not None:
        w = torus.width
        left = [i for i in range(n) if xs[i] <= eps]
        right = [i for i in range(n) if xs[i] >= w - eps]
        for i in left:
            for j in right:
                if close(i, j):
                    uf.union(i, j)
    groups = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return list(groups.values())


def _ccw_start_lex(points):
    """Order positions CCW around their frame and rotate so the
    lexicographically smallest comes first. Returns the permutation."""
    # caller guarantees a strictly convex (cocircular) polygon around its
    # circumcenter, so angular order is well defined
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    idx = sorted(
        range(len(points)),
        key=lambda i: (math.atan2(points[i][1] - cy, points[i][0] - cx),),
    )
    start = min(range(len(idx)), key=lambda k: (points[idx[k]][0], points[idx[k]][1]))
    return idx[start:] + idx[:start]


def _edge_key(i, si, j, sj):
    """Translation-invariant identity of the (torus) edge between centers
    i and j at relative lattice offset sj - si."""
    a = (i, j, sj[0] - si[0], sj[1] - si[1])
    b = (j, i, si[0] - sj[0], si[1] - sj[1])
    return a if a <= b else b


# ---------------------------------------------------------------------------
# torus construction


class _TorusBlock:
    """Replicated-block triangulation of a torus configuration.

    Keeps the kernel triangulator alive so saturation can insert points
    incrementally (each torus insertion adds all (2k+1)^2 copies)."""

    def __init__(self, config: PackingConfiguration, k: int):
        self.config = config
        self.k = k
        domain = config.domain
        w, h = domain.width, domain.height
        shifts = [(sx, sy) for sx in range(-k, k + 1) for sy in range(-k, k + 1)]
        self.shifts = shifts
        xs, ys, labels = [], [], []
        for i, (x, y) in enumerate(config.centers):
            for (sx, sy) in shifts:
                xs.append(x + sx * w)
                ys.append(y + sy * h)
                labels.append((i, sx, sy))
        order = _spatial_order(xs, ys)
        bounds = (-(k + 0.5) * w, -(k + 0.5) * h, (k + 1.5) * w, (k + 1.5) * h)
        tri = backend.Triangulator(bounds)
        self.labels = []
        for pos in order:
            tri.add_point(xs[pos], ys[pos])
            self.labels.append(labels[pos])
        self.tri = tri
        self.n_centers = len(config.centers)

    def insert_center(self, p: Point):
        """Insert a new torus center (canonical coordinates) and all its
        periodic copies."""
        w = self.config.domain.width
        h = self.config.domain.height
        i = self.n_centers
        self.n_centers += 1
        for (sx, sy) in self.shifts:
            self.tri.add_point(p[0] + sx * w, p[1] + sy * h)
            self.labels.append((i, sx, sy))
        return i

    def central_triangles(self):
        """Triangles with at least one vertex in the central copy, plus
        their circumcenters/radii (block coordinates)."""
        tris = self.tri.triangles()
        lab = self.labels
        central = [
            t
            for t in tris
            if (lab[t[0]][1] == 0 and lab[t[0]][2] == 0)
            or (lab[t[1]][1] == 0 and lab[t[1]][2] == 0)
            or (lab[t[2]][1] == 0 and lab[t[2]][2] == 0)
        ]
        if not central:
            raise DegenerateGeometryError("replicated triangulation is empty")
        m = len(central)
        px = np.fromiter(
            (self.tri.point(i)[0] for t in central for i in t), dtype=float, count=3 * m
        )
        py = np.fromiter(
            (self.tri.point(i)[1] for t in central for i in t), dtype=float, count=3 * m
        )
        px = px.reshape(m, 3)
        py = py.reshape(m, 3)
        ax, ay = px[:, 0], py[:, 0]
        bx, by = px[:, 1] - ax, py[:, 1] - ay
        cx, cy = px[:, 2] - ax, py[:, 2] - ay
        d = 2.0 * (bx * cy - by * cx)
        b2 = bx * bx + by * by
        c2 = cx * cx + cy * cy
        ux = (cy * b2 - by * c2) / d
        uy = (bx * c2 - cx * b2) / d
        return central, ax + ux, ay + uy, np.hypot(ux, uy)

    def radius_bound(self) -> float:
        return self.k * min(self.config.domain.width, self.config.domain.height) / 2.0

    def max_empty(self):
        """Largest circumradius over torus Voronoi vertices, with its
        canonical position; ties break lexicographically."""
        _, cx, cy, r = self.central_triangles()
        if np.max(r) >= self.radius_bound():
            raise DegenerateGeometryError(
                "circumradius exceeds the replication guarantee"
            )
        w = self.config.domain.width
        h = self.config.domain.height
        rx = cx - w * np.floor(cx / w)
        ry = cy - h * np.floor(cy / h)
        best = np.lexsort((ry, rx, -r))[0]
        return Point(float(rx[best]), float(ry[best])), float(r[best])


@dataclass
class _Structure:
    """Everything derived from one tessellation build."""

    config: PackingConfiguration
    tol: ToleranceConfig
    vertices: list
    tri_triples: list
    tri_shifts: list
    tri_points: list
    tri_neighbors: list
    edges: list
    cells: list
    excluded_cells: int
    block: object = None  # torus only


def _torus_vertices(config, tol, block):
    """Merged Voronoi vertices of the torus from the replicated block.

    Returns None when the block's canonical polygons fail to tile the
    torus rectangle, which signals that k must grow."""
    domain = config.domain
    w, h = domain.width, domain.height
    central, ccx, ccy, rad = block.central_triangles()
    if float(np.max(rad)) >= block.radius_bound():
        return None

    mx = np.floor(ccx / w)
    my = np.floor(ccy / h)
    rx = ccx - w * mx
    ry = ccy - h * my

    clusters = _cluster_points(rx.tolist(), ry.tolist(), tol.eps_merge, domain)
    centers = config.centers
    vertices = []
    for members in clusters:
        pos_idx = min(members, key=lambda t: (rx[t], ry[t]))
        pos = Point(float(rx[pos_idx]), float(ry[pos_idx]))
        gens = {}
        for t in members:
            # reduce relative to the cluster representative: a floor-based
            # reduction could disagree between periodic copies when the
            # circumcenter sits within an ulp of the rectangle boundary
            tmx = round((float(ccx[t]) - pos[0]) / w)
            tmy = round((float(ccy[t]) - pos[1]) / h)
            for kid in central[t]:
                i, sx, sy = block.labels[kid]
                key = (i, sx - tmx, sy - tmy)
                if key not in gens:
                    gens[key] = Point(
                        centers[i][0] + key[1] * w, centers[i][1] + key[2] * h
                    )
        items = sorted(gens.items())
        pts = [p for _, p in items]
        perm = _ccw_start_lex(pts)
        ordered = [items[j] for j in perm]
        gen_idx = tuple(key[0] for key, _ in ordered)
        gen_shift = tuple((key[1], key[2]) for key, _ in ordered)
        gen_pts = tuple(p for _, p in ordered)
        radius = max(math.hypot(p[0] - pos[0], p[1] - pos[1]) for p in gen_pts)
        vertices.append((pos, gen_idx, gen_shift, gen_pts, radius))

    vertices.sort(key=lambda v: (v[0][0], v[0][1]))
    out = [
        VoronoiVertex(i, pos, gi, gs, gp, r)
        for i, (pos, gi, gs, gp, r) in enumerate(vertices)
    ]

    # tiling validation: the canonical cocircular polygons must cover the
    # torus exactly once
    total = 0.0
    for v in out:
        pts = v.generator_points
        acc = 0.0
        for i in range(len(pts)):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % len(pts)]
            acc += x0 * y1 - x1 * y0
        total += 0.5 * acc
    if abs(total - w * h) > 1e-9 * max(1.0, w * h):
        return None
    return out


def _fan_triangulation(vertices):
    """Canonical triangles: fan every vertex's generator polygon from its
    lexicographically smallest generator."""
    triples, shifts, points, owners = [], [], [], []
    for v in vertices:
        gi, gs, gp = v.generators, v.generator_shifts, v.generator_points
        for k in range(1, len(gi) - 1):
            triples.append((gi[0], gi[k], gi[k + 1]))
            shifts.append((gs[0], gs[k], gs[k + 1]))
            points.append((gp[0], gp[k], gp[k + 1]))
            owners.append(v.index)
    return triples, shifts, points, owners


def _triangle_neighbors(triples, shifts, closed: bool):
    """Adjacency from translation-invariant edge keys. On a torus (closed)
    every edge must appear exactly twice."""
    edge_map = {}
    for t, (tri, sh) in enumerate(zip(triples, shifts)):
        for k in range(3):
            a, b = (k + 1) % 3, (k + 2) % 3
            key = _edge_key(tri[a], sh[a], tri[b], sh[b])
            edge_map.setdefault(key, []).append((t, k))
    neighbors = [[-1, -1, -1] for _ in triples]
    for key, uses in edge_map.items():
        if len(uses) == 2:
            (t1, k1), (t2, k2) = uses
            neighbors[t1][k1] = t2
            neighbors[t2][k2] = t1
        elif closed or len(uses) != 1:
            raise DegenerateGeometryError(
                f"inconsistent triangle adjacency at edge {key}"
            )
    return [tuple(nb) for nb in neighbors]


def _torus_edges(config, tol, vertices):
    """Voronoi edges from consecutive generator pairs around each vertex."""
    w, h = config.domain.width, config.domain.height
    sides = {}
    for v in vertices:
        d = v.degree
        for t in range(d):
            u = (t + 1) % d
            ia, sa = v.generators[t], v.generator_shifts[t]
            ib, sb = v.generators[u], v.generator_shifts[u]
            key = _edge_key(ia, sa, ib, sb)
            rec = (v, (ia, sa, v.generator_points[t]), (ib, sb, v.generator_points[u]))
            sides.setdefault(key, []).append(rec)

    edges = []
    for key in sorted(sides):
        uses = sides[key]
        if len(uses) != 2:
            raise DegenerateGeometryError(
                f"voronoi edge {key} borders {len(uses)} vertices"
            )
        (v1, a1, b1), (v2, a2, b2) = uses
        ds1 = (b1[1][0] - a1[1][0], b1[1][1] - a1[1][1])
        ds2 = (b2[1][0] - a2[1][0], b2[1][1] - a2[1][1])
        if a1[0] != b1[0]:
            # distinct centers: match rec2's slots by center index
            same_orientation = a2[0] == a1[0]
        else:
            # periodic self-edge: orientation read off the shift difference
            same_orientation = ds2 == ds1
        partner = a2 if same_orientation else b2
        # translation bringing v2's frame onto v1's
        tx = a1[2][0] - partner[2][0]
        ty = a1[2][1] - partner[2][1]
        p2 = Point(v2.position[0] + tx, v2.position[1] + ty)
        gens = (a1[0], b1[0])
        gpts = (a1[2], b1[2])
        seg = Segment(gpts[0], gpts[1])
        label = (
            "pitteway"
            if segments_intersect(seg, Segment(v1.position, p2))
            else "non_pitteway"
        )
        edges.append(
            VoronoiEdge(
                index=len(edges),
                generators=gens,
                vertex_indices=(v1.index, v2.index),
                endpoints=(v1.position, p2),
                generator_points=gpts,
                pitteway=label,
            )
        )
    return edges


def _torus_cells(config, tol, vertices):
    w, h = config.domain.width, config.domain.height
    incident = {i: [] for i in range(config.n)}
    for v in vertices:
        seen = set()
        for i, (sx, sy) in zip(v.generators, v.generator_shifts):
            if i in seen:
                raise DegenerateGeometryError(
                    "cell touches the same vertex through two periodic copies; "
                    "domain too small relative to the empty circles"
                )
            seen.add(i)
            corner = Point(v.position[0] - sx * w, v.position[1] - sy * h)
            incident[i].append((corner, v.index))
    cells = []
    for i in range(config.n):
        cx, cy = config.centers[i]
        items = incident[i]
        if len(items) < 3:
            raise DegenerateGeometryError(f"cell of center {i} has fewer than 3 corners")
        items.sort(key=lambda it: math.atan2(it[0][1] - cy, it[0][0] - cx))
        start = min(range(len(items)), key=lambda k: (items[k][0][0], items[k][0][1]))
        items = items[start:] + items[:start]
        boundary = tuple(it[0] for it in items)
        vidx = tuple(it[1] for it in items)
        acc = 0.0
        for t in range(len(boundary)):
            x0, y0 = boundary[t]
            x1, y1 = boundary[(t + 1) % len(boundary)]
            acc += x0 * y1 - x1 * y0
        cells.append(
            VoronoiCell(
                center_index=i,
                center=Point(cx, cy),
                boundary=boundary,
                vertex_indices=vidx,
                area=0.5 * acc,
                analyzable=True,
            )
        )
    return cells


def _build_torus(
    config: PackingConfiguration, tol: ToleranceConfig, vertices_only: bool = False
) -> _Structure:
    """Build the torus structure, growing the replication ring count until
    the construction validates. With vertices_only (saturation scans of
    possibly very sparse configurations) the cell/edge assembly is skipped:
    cells are undefined while a cell can wrap around the torus onto itself."""
    last_error = None
    for k in range(1, _MAX_RINGS + 1):
        block = _TorusBlock(config, k)
        try:
            vertices = _torus_vertices(config, tol, block)
        except DegenerateGeometryError as exc:
            last_error = exc
            continue
        if vertices is None:
            continue
        if vertices_only:
            return _Structure(
                config=config,
                tol=tol,
                vertices=vertices,
                tri_triples=[],
                tri_shifts=[],
                tri_points=[],
                tri_neighbors=[],
                edges=[],
                cells=[],
                excluded_cells=0,
                block=block,
            )
        triples, shifts, points, _owners = _fan_triangulation(vertices)
        neighbors = _triangle_neighbors(triples, shifts, closed=True)
        edges = _torus_edges(config, tol, vertices)
        cells = _torus_cells(config, tol, vertices)
        return _Structure(
            config=config,
            tol=tol,
            vertices=vertices,
            tri_triples=triples,
            tri_shifts=shifts,
            tri_points=points,
            tri_neighbors=neighbors,
            edges=edges,
            cells=cells,
            excluded_cells=0,
            block=block,
        )
    raise DegenerateGeometryError(
        f"could not validate a periodic triangulation with up to {_MAX_RINGS} "
        f"replication rings{f': {last_error}' if last_error else ''}"
    )


# ---------------------------------------------------------------------------
# box construction


def _clip_halfplane(poly, px, py, nx, ny):
    """Keep the part of a convex polygon with (q - p) . n <= 0."""
    out = []
    n = len(poly)
    for idx in range(n):
        a = poly[idx]
        b = poly[(idx + 1) % n]
        da = (a[0] - px) * nx + (a[1] - py) * ny
        db = (b[0] - px) * nx + (b[1] - py) * ny
        if da <= 0.0:
            out.append(a)
        if (da < 0.0 < db) or (db < 0.0 < da):
            t = da / (da - db)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def _clip_segment_rect(ax, ay, bx, by, w, h):
    """Liang-Barsky clip of segment (a,b) to [0,w] x [0,h]; None if outside."""
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, ax), (dx, w - ax), (-dy, ay), (dy, h - ay)):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return None
            if r < t1:
                t1 = r
    return (ax + t0 * dx, ay + t0 * dy), (ax + t1 * dx, ay + t1 * dy), t0, t1


def _verify_box_delaunay(config, tris):
    """Exact empty-circumcircle and hull-coverage verification (small n)."""
    centers = config.centers
    n = len(centers)
    for (a, b, c) in tris:
        pa, pb, pc = centers[a], centers[b], centers[c]
        for d in range(n):
            if d in (a, b, c):
                continue
            pd = centers[d]
            if (
                backend.incircle(
                    pa[0], pa[1], pb[0], pb[1], pc[0], pc[1], pd[0], pd[1]
                )
                > 0
            ):
                return False
    # coverage: triangle areas must sum to the convex hull area
    pts = sorted(set((p[0], p[1]) for p in centers))
    if len(pts) < 3:
        return False

    def half_hull(seq):
        hull = []
        for p in seq:
            while (
                len(hull) >= 2
                and backend.orient2d(
                    hull[-2][0], hull[-2][1], hull[-1][0], hull[-1][1], p[0], p[1]
                )
                <= 0
            ):
                hull.pop()
            hull.append(p)
        return hull

    lower = half_hull(pts)
    upper = half_hull(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    hull_area = 0.0
    for i in range(len(hull)):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % len(hull)]
        hull_area += 0.5 * (x0 * y1 - x1 * y0)
    tri_area = 0.0
    for (a, b, c) in tris:
        pa, pb, pc = centers[a], centers[b], centers[c]
        tri_area += 0.5 * abs(
            (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        )
    return abs(tri_area - hull_area) <= 1e-9 * max(1.0, hull_area)


def _box_triangulate(config):
    xs = [p[0] for p in config.centers]
    ys = [p[1] for p in config.centers]
    inflate = 1.0
    for _attempt in range(3):
        minx, maxx = min(xs), max(xs)
        miny, maxy = min(ys), max(ys)
        cx, cy = 0.5 * (minx + maxx), 0.5 * (miny + maxy)
        half = 0.5 * max(maxx - minx, maxy - miny, 1.0) * inflate
        bounds = (cx - half, cy - half, cx + half, cy + half)
        order = _spatial_order(xs, ys)
        tri = backend.Triangulator(bounds)
        perm = []
        for pos in order:
            tri.add_point(xs[pos], ys[pos])
            perm.append(pos)
        raw = tri.triangles()
        tris = [(perm[a], perm[b], perm[c]) for (a, b, c) in raw]
        if config.n > 256 or _verify_box_delaunay(config, tris):
            return tris
        inflate *= 1024.0
    raise DegenerateGeometryError("could not build a verified Delaunay triangulation")


def _build_box(config: PackingConfiguration, tol: ToleranceConfig) -> _Structure:
    domain = config.domain
    w, h = domain.width, domain.height
    centers = config.centers
    tris = _box_triangulate(config)
    shifts = [((0, 0), (0, 0), (0, 0))] * len(tris)
    points = [
        (centers[a], centers[b], centers[c]) for (a, b, c) in tris
    ]
    neighbors = _triangle_neighbors(tris, [s for s in shifts], closed=False)

    px = np.array([p[0] for p in centers])
    py = np.array([p[1] for p in centers])
    ccx, ccy, rad = _circumdata(px, py, tris)
    clusters = _cluster_points(ccx.tolist(), ccy.tolist(), tol.eps_merge, None)

    vertices = []
    tri_vertex = [-1] * len(tris)
    drafts = []
    for members in clusters:
        pos_idx = min(members, key=lambda t: (ccx[t], ccy[t]))
        pos = Point(float(ccx[pos_idx]), float(ccy[pos_idx]))
        gens = sorted({i for t in members for i in tris[t]})
        pts = [centers[i] for i in gens]
        perm = _ccw_start_lex(pts)
        gen_idx = tuple(gens[j] for j in perm)
        gen_pts = tuple(centers[i] for i in gen_idx)
        radius = max(math.hypot(p[0] - pos[0], p[1] - pos[1]) for p in gen_pts)
        drafts.append((pos, gen_idx, gen_pts, members, radius))
    drafts.sort(key=lambda d: (d[0][0], d[0][1]))
    for vi, (pos, gen_idx, gen_pts, members, radius) in enumerate(drafts):
        shifts0 = tuple((0, 0) for _ in gen_idx)
        vertices.append(
            VoronoiVertex(vi, pos, gen_idx, shifts0, gen_pts, radius)
        )
        for t in members:
            tri_vertex[t] = vi

    # Voronoi edges from the Delaunay edges
    edge_map = {}
    for t, tri in enumerate(tris):
        for k in range(3):
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            key = (min(a, b), max(a, b))
            edge_map.setdefault(key, []).append(t)
    edges = []
    for key in sorted(edge_map):
        inc = edge_map[key]
        i, j = key
        gpts = (centers[i], centers[j])
        if len(inc) == 2:
            va, vb = tri_vertex[inc[0]], tri_vertex[inc[1]]
            if va == vb:
                continue  # diagonal inside a cocircular polygon, zero length
            p1, p2 = vertices[va].position, vertices[vb].position
            clip = _clip_segment_rect(p1[0], p1[1], p2[0], p2[1], w, h)
            if clip is None:
                continue
            (e1, e2, t0, t1) = clip
            if math.hypot(e2[0] - e1[0], e2[1] - e1[1]) <= tol.eps_eq:
                continue  # clipping left a zero-length stub on the boundary
            label = (
                "pitteway"
                if segments_intersect(Segment(*gpts), Segment(Point(*e1), Point(*e2)))
                else "non_pitteway"
            )
            edges.append(
                VoronoiEdge(
                    index=len(edges),
                    generators=key,
                    vertex_indices=(va, vb),
                    endpoints=(Point(*e1), Point(*e2)),
                    generator_points=gpts,
                    pitteway=label,
                    clipped=(t0 > 0.0 or t1 < 1.0),
                )
            )
        else:
            # hull edge: infinite ray from the single circumcenter, clipped
            t = inc[0]
            va = tri_vertex[t]
            pos = vertices[va].position
            third = next(v for v in tris[t] if v not in key)
            ci, cj, ck = centers[i], centers[j], centers[third]
            dx, dy = -(cj[1] - ci[1]), cj[0] - ci[0]
            norm = math.hypot(dx, dy)
            dx, dy = dx / norm, dy / norm
            mx, my = 0.5 * (ci[0] + cj[0]), 0.5 * (ci[1] + cj[1])
            if (mx - ck[0]) * dx + (my - ck[1]) * dy < 0.0:
                dx, dy = -dx, -dy
            # long enough to traverse the rectangle from wherever the
            # circumcenter landed
            reach = math.hypot(pos[0] - 0.5 * w, pos[1] - 0.5 * h) + 2.0 * (w + h)
            clip = _clip_segment_rect(
                pos[0], pos[1], pos[0] + reach * dx, pos[1] + reach * dy, w, h
            )
            if clip is None:
                continue
            (e1, e2, _t0, _t1) = clip
            if math.hypot(e2[0] - e1[0], e2[1] - e1[1]) <= tol.eps_eq:
                continue  # ray only touches the rectangle boundary
            label = (
                "pitteway"
                if segments_intersect(Segment(*gpts), Segment(Point(*e1), Point(*e2)))
                else "non_pitteway"
            )
            edges.append(
                VoronoiEdge(
                    index=len(edges),
                    generators=key,
                    vertex_indices=(va, -1),
                    endpoints=(Point(*e1), Point(*e2)),
                    generator_points=gpts,
                    pitteway=label,
                    clipped=True,
                )
            )

    # cells: domain rectangle intersected with the bisector half-planes of
    # the Delaunay neighbors
    neighbor_sets = {i: set() for i in range(config.n)}
    for (a, b) in edge_map:
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)
    vert_positions = [v.position for v in vertices]
    shrink = domain.margin
    cells = []
    excluded = 0
    for i in range(config.n):
        ci = centers[i]
        poly = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
        for j in sorted(neighbor_sets[i]):
            cj = centers[j]
            mx, my = 0.5 * (ci[0] + cj[0]), 0.5 * (ci[1] + cj[1])
            nx, ny = cj[0] - ci[0], cj[1] - ci[1]
            poly = _clip_halfplane(poly, mx, my, nx, ny)
            if len(poly) < 3:
                raise DegenerateGeometryError(f"cell of center {i} collapsed")
        dedup = []
        for q in poly:
            if not dedup or math.hypot(q[0] - dedup[-1][0], q[1] - dedup[-1][1]) > tol.eps_eq:
                dedup.append(q)
        if len(dedup) > 1 and math.hypot(
            dedup[0][0] - dedup[-1][0], dedup[0][1] - dedup[-1][1]
        ) <= tol.eps_eq:
            dedup.pop()
        start = min(range(len(dedup)), key=lambda k: (dedup[k][0], dedup[k][1]))
        dedup = dedup[start:] + dedup[:start]
        vidx = []
        analyzable = True
        for q in dedup:
            best, bestd = -1, tol.eps_merge * 8.0
            for vi, vp in enumerate(vert_positions):
                d = math.hypot(q[0] - vp[0], q[1] - vp[1])
                if d < bestd:
                    best, bestd = vi, d
            vidx.append(best)
            if best < 0:
                analyzable = False
            else:
                vtx = vertices[best]
                r = vtx.circumradius
                if not (
                    shrink <= vtx.position[0] - r
                    and vtx.position[0] + r <= w - shrink
                    and shrink <= vtx.position[1] - r
                    and vtx.position[1] + r <= h - shrink
                ):
                    analyzable = False
        acc = 0.0
        for t in range(len(dedup)):
            x0, y0 = dedup[t]
            x1, y1 = dedup[(t + 1) % len(dedup)]
            acc += x0 * y1 - x1 * y0
        if not analyzable:
            excluded += 1
        cells.append(
            VoronoiCell(
                center_index=i,
                center=Point(*ci),
                boundary=tuple(Point(*q) for q in dedup),
                vertex_indices=tuple(vidx),
                area=0.5 * acc,
                analyzable=analyzable,
            )
        )

    return _Structure(
        config=config,
        tol=tol,
        vertices=vertices,
        tri_triples=tris,
        tri_shifts=shifts,
        tri_points=points,
        tri_neighbors=neighbors,
        edges=edges,
        cells=cells,
        excluded_cells=excluded,
    )


# ---------------------------------------------------------------------------
# public API


def _build_structure(config, tol):
    from thuelab.packing import validate

    bad = validate(config, tol)
    if bad:
        raise ValueError(f"invalid packing: {len(bad)} violation(s), first {bad[0]}")
    if config.domain.is_torus:
        if config.n < 1:
            raise DegenerateGeometryError("torus packing needs at least one center")
        return _build_torus(config, tol)
    if config.n < 3:
        raise DegenerateGeometryError("box triangulation needs at least 3 centers")
    a, b = config.centers[0], config.centers[1]
    if all(
        backend.orient2d(a[0], a[1], b[0], b[1], c[0], c[1]) == 0
        for c in config.centers[2:]
    ):
        raise DegenerateGeometryError("all centers are collinear")
    return _build_box(config, tol)


def delaunay(
    config: PackingConfiguration, tol: ToleranceConfig = DEFAULT_TOL
) -> Triangulation:
    """Delaunay triangulation of the configuration (canonical torus
    triangles on a periodic domain)."""
    s = _build_structure(config, tol)
    return Triangulation(
        config=config,
        tol=tol,
        triangles=s.tri_triples,
        shifts=s.tri_shifts,
        points=s.tri_points,
        neighbors=s.tri_neighbors,
        _structure=s,
    )


def voronoi_dual(tri: Triangulation) -> VoronoiDiagram:
    """Voronoi diagram dual to a triangulation: circumcenters merged within
    eps_merge become the vertices, cells assemble CCW around each center."""
    s = tri._structure
    return VoronoiDiagram(
        config=tri.config,
        tol=tri.tol,
        vertices=s.vertices,
        edges=s.edges,
        cells=s.cells,
        triangulation=tri,
        excluded_cells=s.excluded_cells,
    )


def build_diagram(
    config: PackingConfiguration, tol: ToleranceConfig = DEFAULT_TOL
) -> VoronoiDiagram:
    return voronoi_dual(delaunay(config, tol))


def classify_vertex(v: VoronoiVertex) -> str:
    """'regular' for exactly three generators, 'degenerate' for more."""
    return "regular" if v.degree == 3 else "degenerate"


def classify_edge_pitteway(e: VoronoiEdge, config=None) -> str:
    """An edge is a Pitteway edge when the closed segment between its two
    generating centers meets the closed edge segment."""
    seg = Segment(e.generator_points[0], e.generator_points[1])
    edge = Segment(e.endpoints[0], e.endpoints[1])
    return "pitteway" if segments_intersect(seg, edge) else "non_pitteway"


class TorusScanner:
    """Incremental largest-empty-circle scans for torus saturation.

    Builds a validated periodic triangulation once, then supports
    insert/rescan cycles without rebuilding."""

    def __init__(self, config: PackingConfiguration, tol: ToleranceConfig = DEFAULT_TOL):
        if not config.domain.is_torus:
            raise ValueError("TorusScanner requires a torus domain")
        self._structure = _build_torus(config, tol, vertices_only=True)
        self._block = self._structure.block

    def max_empty(self):
        return self._block.max_empty()

    def insert(self, p: Point):
        self._block.insert_center(p)


def _nearest_center_distance(config, x, y):
    best = math.inf
    for c in config.centers:
        d = config.domain.distance((x, y), c)
        if d < best:
            best = d
    return best


def largest_empty_circle(
    config: PackingConfiguration, tol: ToleranceConfig = DEFAULT_TOL
):
    """Center and radius of the largest circle empty of configuration
    points, over the analysis region.

    Torus: the maximum sits at a Voronoi vertex; ties break to the
    lexicographically smallest canonical position. Box: the search region
    is the margin-shrunk rectangle, where the maximum sits at a Voronoi
    vertex, at an edge crossing of the region boundary, or at a region
    corner; all three candidate families are examined."""
    if config.domain.is_torus:
        block_structure = _build_torus(config, tol, vertices_only=True)
        return block_structure.block.max_empty()

    domain = config.domain
    w, h, m = domain.width, domain.height, domain.margin
    x0, y0, x1, y1 = m, m, w - m, h - m
    if not (x0 < x1 and y0 < y1):
        raise DegenerateGeometryError("margin leaves no analysis region")
    s = _build_structure(config, tol)
    candidates = []
    for v in s.vertices:
        px, py = v.position
        if x0 <= px <= x1 and y0 <= py <= y1:
            candidates.append((px, py))
    for e in s.edges:
        (ax, ay), (bx, by) = e.endpoints
        clip = _clip_segment_rect(ax - x0, ay - y0, bx - x0, by - y0, x1 - x0, y1 - y0)
        if clip is None:
            continue
        (c1, c2, t0, t1) = clip
        if t0 > 0.0:
            candidates.append((c1[0] + x0, c1[1] + y0))
        if t1 < 1.0:
            candidates.append((c2[0] + x0, c2[1] + y0))
    candidates.extend([(x0, y0), (x1, y0), (x0, y1), (x1, y1)])
    best = None
    for (px, py) in candidates:
        r = _nearest_center_distance(config, px, py)
        item = (-r, px, py)
        if best is None or item < best:
            best = item
    return Point(best[1], best[2]), -best[0]


@dataclass(frozen=True)
class PointLocation:
    kind: str  # "interior" | "edge" | "vertex"
    centers: tuple  # indices of the nearest centers (1, 2, or >= 3)
    vertex: Optional[VoronoiVertex] = None


def locate_point(diagram_or_config, y, tol: ToleranceConfig = DEFAULT_TOL):
    """Classify a query point by its set of nearest centers: one nearest
    center means the interior of that cell, two means a cell edge, three or
    more means a Voronoi vertex (ties within eps_merge)."""
    if isinstance(diagram_or_config, VoronoiDiagram):
        diagram = diagram_or_config
        config = diagram.config
        tol = diagram.tol
    else:
        diagram = None
        config = diagram_or_config
    dists = [config.domain.distance(y, c) for c in config.centers]
    dmin = min(dists)
    near = tuple(i for i, d in enumerate(dists) if d <= dmin + tol.eps_merge)
    if len(near) == 1:
        return PointLocation("interior", near)
    if len(near) == 2:
        return PointLocation("edge", near)
    vertex = None
    if diagram is not None:
        for v in diagram.vertices:
            if config.domain.distance(y, v.position) <= tol.eps_merge * 8.0:
                vertex = v
                break
    return PointLocation("vertex", near, vertex)


def euler_check(diagram: VoronoiDiagram) -> bool:
    """V - E + F == 0 for the merged diagram on a torus."""
    if not diagram.config.domain.is_torus:
        raise ValueError("euler_check applies to torus diagrams")
    v = len(diagram.vertices)
    e = len(diagram.edges)
    f = len(diagram.cells)
    return v - e + f == 0
