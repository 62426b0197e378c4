"""Polytopal mesh data structures for 2D polygons and 3D polyhedra.

A 2D mesh is built from counterclockwise vertex loops, a 3D mesh from
cells given as lists of outward-oriented planar face loops.  Facets
(edges/faces), 3D edges, adjacency, measures and normals are derived at
construction time and the mesh is immutable afterwards.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import polygon_rule, polyhedron_rule

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


class MeshError(Exception):
    pass


@dataclass
class Facet:
    vertices: tuple          # vertex loop (pair in 2D, planar loop in 3D)
    cells: tuple             # one entry (boundary) or two, lower index first
    boundary: bool
    measure: float = 0.0
    normal: np.ndarray = None    # interior: lower -> higher cell; boundary: outward
    tangent: np.ndarray = None   # 2D only, normal rotated +90 degrees
    centroid: np.ndarray = None


@dataclass
class Edge3D:
    vertices: tuple          # (a, b) with a < b
    facets: list = field(default_factory=list)
    cells: list = field(default_factory=list)
    boundary: bool = False


@dataclass
class TopologyCounts:
    n_cells: int
    n_interior_facets: int
    n_interior_vertices: int
    n_interior_edges: int = 0


@dataclass
class VertexHull:
    vertex: int
    edges: list              # [(interior facet index, oriented unit normal)], CCW
    cells: list


@dataclass
class EdgeSolid:
    edge: int
    direction: np.ndarray    # unit vector along the edge (low -> high vertex index)
    faces: list              # [(interior facet index, oriented unit normal)], loop order
    cells: list


def _polygon_area_centroid(pts):
    """Signed area and centroid of a 2D polygon."""
    x = pts[:, 0]
    y = pts[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def _check_convex_polygon(pts, cell_id):
    """Raise unless the loop is counterclockwise and convex (collinear ok)."""
    n = len(pts)
    area, _ = _polygon_area_centroid(pts)
    if area <= 0:
        raise MeshError(f"cell {cell_id}: vertex loop is not counterclockwise")
    scale = math.sqrt(area)
    for i in range(n):
        a = pts[i]
        b = pts[(i + 1) % n]
        c = pts[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -1e-12 * scale * scale:
            raise MeshError(f"cell {cell_id}: not convex at vertex {i}")


def _face_area_normal_centroid(loop_pts):
    """Area, oriented unit normal and centroid of a planar 3D polygon loop."""
    c0 = loop_pts.mean(axis=0)
    avec = np.zeros(3)
    cacc = np.zeros(3)
    n = len(loop_pts)
    for i in range(n):
        a = loop_pts[i] - c0
        b = loop_pts[(i + 1) % n] - c0
        tri = 0.5 * np.cross(a, b)
        avec += tri
        cacc += np.linalg.norm(tri) * (c0 + loop_pts[i] + loop_pts[(i + 1) % n]) / 3.0
    area = np.linalg.norm(avec)
    if area <= 0:
        raise MeshError("degenerate face")
    return area, avec / area, cacc / area


class Mesh:
    """Immutable polytopal mesh.

    2D: `cells[c]` is a CCW vertex loop.
    3D: `cells[c]` is a list of (facet index, outward flag); the raw face
    loops are kept in `cell_faces` for quadrature and I/O.
    """

    def __init__(self, dim, vertices, cell_loops):
        self.dim = int(dim)
        self.vertices = np.asarray(vertices, dtype=float)
        if self.dim not in (2, 3):
            raise MeshError(f"unsupported dimension {dim}")
        if len(cell_loops) == 0:
            raise MeshError("mesh has no cells")
        if self.dim == 2:
            self._build_2d(cell_loops)
        else:
            self._build_3d(cell_loops)
        self._check_closed_cells()

    # ------------------------------------------------------------------
    # construction

    def _build_2d(self, cell_loops):
        nv = len(self.vertices)
        self.cells = [list(map(int, loop)) for loop in cell_loops]
        nc = len(self.cells)
        self.cell_measure = np.zeros(nc)
        self.cell_centroid = np.zeros((nc, 2))
        self.cell_diameter = np.zeros(nc)

        for c, loop in enumerate(self.cells):
            if len(loop) < 3:
                raise MeshError(f"cell {c}: fewer than 3 vertices")
            if max(loop) >= nv or min(loop) < 0:
                raise MeshError(f"cell {c}: vertex index out of range")
            pts = self.vertices[loop]
            _check_convex_polygon(pts, c)
            area, centroid = _polygon_area_centroid(pts)
            self.cell_measure[c] = area
            self.cell_centroid[c] = centroid
            d = pts[:, None, :] - pts[None, :, :]
            self.cell_diameter[c] = np.sqrt((d * d).sum(axis=2)).max()

        # collect edges keyed by sorted vertex pair
        incidence = {}
        for c, loop in enumerate(self.cells):
            n = len(loop)
            for i in range(n):
                a, b = loop[i], loop[(i + 1) % n]
                key = (a, b) if a < b else (b, a)
                incidence.setdefault(key, []).append((c, a, b))
        self.facets = []
        self.facet_index = {}
        for key in sorted(incidence):
            inc = incidence[key]
            if len(inc) > 2:
                raise MeshError(f"edge {key} has {len(inc)} incident cells")
            cells = tuple(sorted(x[0] for x in inc))
            boundary = len(inc) == 1
            # directed edge as traversed by the lower-indexed incident cell
            owner = min(inc, key=lambda x: x[0])
            a, b = owner[1], owner[2]
            pa, pb = self.vertices[a], self.vertices[b]
            tvec = pb - pa
            length = np.linalg.norm(tvec)
            if length <= 0:
                raise MeshError(f"edge {key}: zero length")
            # outward normal of the owner cell: CCW loop => rotate tangent by -90
            normal = np.array([tvec[1], -tvec[0]]) / length
            f = Facet(
                vertices=key,
                cells=cells,
                boundary=boundary,
                measure=length,
                normal=normal,
                tangent=_ROT90 @ normal,
                centroid=0.5 * (pa + pb),
            )
            self.facet_index[key] = len(self.facets)
            self.facets.append(f)
        self.edges3d = []
        self._finish_common()

    def _build_3d(self, cell_face_loops):
        nv = len(self.vertices)
        self.cell_faces = [[list(map(int, loop)) for loop in faces]
                           for faces in cell_face_loops]
        nc = len(self.cell_faces)

        facet_key_index = {}
        incidence = {}
        loops_by_key = {}
        for c, faces in enumerate(self.cell_faces):
            if len(faces) < 4:
                raise MeshError(f"cell {c}: fewer than 4 faces")
            for loop in faces:
                if max(loop) >= nv or min(loop) < 0:
                    raise MeshError(f"cell {c}: vertex index out of range")
                key = tuple(sorted(loop))
                incidence.setdefault(key, []).append(c)
                loops_by_key.setdefault(key, loop)
        self.facets = []
        self.facet_index = {}
        for key in sorted(incidence):
            inc = incidence[key]
            if len(inc) > 2:
                raise MeshError(f"face {key} has {len(inc)} incident cells")
            cells = tuple(sorted(inc))
            loop = loops_by_key[key]
            pts = self.vertices[loop]
            area, normal, centroid = _face_area_normal_centroid(pts)
            # planarity check
            dev = abs((pts - centroid) @ normal).max()
            if dev > 1e-9 * math.sqrt(area):
                raise MeshError(f"face {key} is not planar")
            f = Facet(
                vertices=tuple(loop),
                cells=cells,
                boundary=len(inc) == 1,
                measure=area,
                normal=normal,     # oriented below
                centroid=centroid,
            )
            self.facet_index[key] = len(self.facets)
            self.facets.append(f)

        # cell geometry from outward-oriented face loops
        self.cell_measure = np.zeros(nc)
        self.cell_centroid = np.zeros((nc, 3))
        self.cell_diameter = np.zeros(nc)
        self.cells = [[] for _ in range(nc)]
        for c, faces in enumerate(self.cell_faces):
            loops = [self.vertices[loop] for loop in faces]
            pts, wts = polyhedron_rule(loops, 1)
            vol = wts.sum()
            if vol <= 0:
                raise MeshError(f"cell {c}: non-positive volume (check face orientation)")
            self.cell_measure[c] = vol
            self.cell_centroid[c] = (wts[:, None] * pts).sum(axis=0) / vol
            vs = self.vertices[sorted({v for loop in faces for v in loop})]
            d = vs[:, None, :] - vs[None, :, :]
            self.cell_diameter[c] = np.sqrt((d * d).sum(axis=2)).max()
        for c, faces in enumerate(self.cell_faces):
            for loop in faces:
                fi = self.facet_index[tuple(sorted(loop))]
                f = self.facets[fi]
                _, nrm, _ = _face_area_normal_centroid(self.vertices[loop])
                # loop as listed by this cell must be outward for it
                outward_ok = (f.centroid - self.cell_centroid[c]) @ nrm > 0
                if not outward_ok:
                    raise MeshError(f"cell {c}: face {loop} not outward oriented")
                self.cells[c].append((fi, True))
        # convexity: every cell vertex weakly inside each face plane
        for c, faces in enumerate(self.cell_faces):
            vs = self.vertices[sorted({v for loop in faces for v in loop})]
            hc = self.cell_diameter[c]
            for fi, _ in self.cells[c]:
                f = self.facets[fi]
                out = f.normal if (f.centroid - self.cell_centroid[c]) @ f.normal > 0 \
                    else -f.normal
                if ((vs - f.centroid) @ out).max() > 1e-9 * hc:
                    raise MeshError(f"cell {c}: not convex")

        # global facet normal: lower -> higher incident cell
        for f in self.facets:
            c0 = f.cells[0]
            if (f.centroid - self.cell_centroid[c0]) @ f.normal < 0:
                f.normal = -f.normal

        # edges from face loops
        edge_map = {}
        for fi, f in enumerate(self.facets):
            loop = f.vertices
            n = len(loop)
            for i in range(n):
                a, b = loop[i], loop[(i + 1) % n]
                key = (a, b) if a < b else (b, a)
                e = edge_map.setdefault(key, Edge3D(vertices=key))
                e.facets.append(fi)
                for c in f.cells:
                    if c not in e.cells:
                        e.cells.append(c)
                if f.boundary:
                    e.boundary = True
        self.edges3d = [edge_map[k] for k in sorted(edge_map)]
        for e in self.edges3d:
            e.facets = sorted(set(e.facets))
            e.cells = sorted(e.cells)
        self._finish_common()

    def _finish_common(self):
        nv = len(self.vertices)
        self.vertex_boundary = np.zeros(nv, dtype=bool)
        for f in self.facets:
            if f.boundary:
                for v in f.vertices:
                    self.vertex_boundary[v] = True
        self.interior_facets = [i for i, f in enumerate(self.facets) if not f.boundary]
        self.boundary_facets = [i for i, f in enumerate(self.facets) if f.boundary]
        used = np.zeros(nv, dtype=bool)
        for f in self.facets:
            for v in f.vertices:
                used[v] = True
        self.interior_vertices = [v for v in range(nv)
                                  if used[v] and not self.vertex_boundary[v]]
        self.interior_edges = [i for i, e in enumerate(self.edges3d) if not e.boundary]

        # vertex -> interior facets (2D) and vertex/edge incidence (3D)
        self._vertex_facets = {}
        if self.dim == 2:
            for i in self.interior_facets:
                for v in self.facets[i].vertices:
                    self._vertex_facets.setdefault(v, []).append(i)
        else:
            self._vertex_edges = {}
            for i in self.interior_edges:
                for v in self.edges3d[i].vertices:
                    self._vertex_edges.setdefault(v, []).append(i)

    def _check_closed_cells(self):
        for c in range(self.n_cells):
            acc = np.zeros(self.dim)
            scale = 0.0
            for fi, n_out, meas, _ in self.cell_facets(c):
                acc += meas * n_out
                scale += meas
            if np.linalg.norm(acc) > 1e-12 * scale:
                raise MeshError(f"cell {c}: facet normals do not close up")

    # ------------------------------------------------------------------
    # queries

    @property
    def n_cells(self):
        return len(self.cells)

    def cell_facets(self, c):
        """[(facet index, outward unit normal, measure, facet centroid)] for cell c."""
        out = []
        if self.dim == 2:
            loop = self.cells[c]
            n = len(loop)
            for i in range(n):
                a, b = loop[i], loop[(i + 1) % n]
                key = (a, b) if a < b else (b, a)
                fi = self.facet_index[key]
                f = self.facets[fi]
                sign = 1.0 if f.cells[0] == c else -1.0
                out.append((fi, sign * f.normal, f.measure, f.centroid))
        else:
            for fi, _ in self.cells[c]:
                f = self.facets[fi]
                sign = 1.0 if f.cells[0] == c else -1.0
                out.append((fi, sign * f.normal, f.measure, f.centroid))
        return out

    def cell_quadrature(self, c, order):
        """Points and weights over cell c; weights sum to the cell measure."""
        if self.dim == 2:
            return polygon_rule(self.vertices[self.cells[c]], order)
        loops = [self.vertices[loop] for loop in self.cell_faces[c]]
        return polyhedron_rule(loops, order)

    def facet_quadrature(self, fi, order=None, npts=2):
        """Points and weights on facet fi; weights sum to the facet measure."""
        f = self.facets[fi]
        if self.dim == 2:
            a, b = f.vertices
            from .quadrature import gauss_segment
            return gauss_segment(self.vertices[a], self.vertices[b], npts)
        return polygon_rule(self.vertices[list(f.vertices)], order if order else 2)

    def topology_counts(self):
        return TopologyCounts(
            n_cells=self.n_cells,
            n_interior_facets=len(self.interior_facets),
            n_interior_vertices=len(self.interior_vertices),
            n_interior_edges=len(self.interior_edges),
        )

    def euler_check(self):
        """Dimension-appropriate Euler identity on interior entity counts."""
        t = self.topology_counts()
        if self.dim == 2:
            return t.n_interior_facets + 1 == t.n_interior_vertices + t.n_cells
        return (t.n_interior_vertices + t.n_interior_facets + 1
                == t.n_interior_edges + t.n_cells)

    def vertex_hull(self, v):
        """CCW-ordered interior edges and normals around interior vertex v (2D)."""
        if self.dim != 2:
            raise MeshError("vertex_hull is a 2D operation")
        if self.vertex_boundary[v]:
            raise MeshError(f"vertex {v} is on the boundary")
        fids = self._vertex_facets.get(v, [])
        if not fids:
            raise MeshError(f"vertex {v} has no interior edges")
        p = self.vertices[v]
        entries = []
        for fi in fids:
            f = self.facets[fi]
            d = f.centroid - p
            ang = math.atan2(d[1], d[0])
            dn = d / np.linalg.norm(d)
            entries.append((ang, fi, _ROT90 @ dn))
        entries.sort(key=lambda t: t[0])
        cells = sorted({c for _, fi, _ in entries for c in self.facets[fi].cells})
        return VertexHull(vertex=v,
                          edges=[(fi, nrm) for _, fi, nrm in entries],
                          cells=cells)

    def edge_solid(self, ei, direction=None):
        """Oriented loop of interior faces around interior edge ei (3D)."""
        if self.dim != 3:
            raise MeshError("edge_solid is a 3D operation")
        e = self.edges3d[ei]
        if e.boundary:
            raise MeshError(f"edge {e.vertices} is on the boundary")
        a, b = e.vertices
        pa = self.vertices[a]
        t = self.vertices[b] - pa
        t = t / np.linalg.norm(t)
        if direction is not None:
            d = np.asarray(direction, dtype=float)
            t = math.copysign(1.0, d @ t) * t
        # local in-plane frame perpendicular to t
        ref = np.array([1.0, 0.0, 0.0])
        if abs(ref @ t) > 0.9:
            ref = np.array([0.0, 1.0, 0.0])
        u1 = ref - (ref @ t) * t
        u1 /= np.linalg.norm(u1)
        u2 = np.cross(t, u1)
        entries = []
        for fi in e.facets:
            f = self.facets[fi]
            d = f.centroid - pa
            d -= (d @ t) * t
            ang = math.atan2(d @ u2, d @ u1)
            dn = d / np.linalg.norm(d)
            entries.append((ang, fi, np.cross(t, dn)))
        entries.sort(key=lambda x: x[0])
        cells = sorted(set(e.cells))
        return EdgeSolid(edge=ei, direction=t,
                         faces=[(fi, nrm) for _, fi, nrm in entries],
                         cells=cells)

    def vertex_star_3d(self, v):
        """Interior edges at an interior vertex v and the cells sharing it (3D)."""
        if self.dim != 3:
            raise MeshError("vertex_star_3d is a 3D operation")
        if self.vertex_boundary[v]:
            raise MeshError(f"vertex {v} is on the boundary")
        edges = sorted(self._vertex_edges.get(v, []))
        cells = sorted({c for ei in edges for c in self.edges3d[ei].cells})
        return edges, cells
