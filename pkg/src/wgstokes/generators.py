"""Deterministic mesh generators on the unit square / unit cube."""

import numpy as np

from .mesh import Mesh, MeshError


def generate_rectangular(n):
    """n x n uniform square cells on the unit square, h = 1/n."""
    if n < 1:
        raise MeshError("n must be >= 1")
    xs = np.linspace(0.0, 1.0, n + 1)
    verts = np.array([[x, y] for y in xs for x in xs])
    vid = lambda i, j: j * (n + 1) + i
    cells = [[vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
             for j in range(n) for i in range(n)]
    return Mesh(2, verts, cells)


def generate_triangular(n):
    """2 n^2 triangles: n x n squares each cut by the negative-slope diagonal."""
    if n < 1:
        raise MeshError("n must be >= 1")
    xs = np.linspace(0.0, 1.0, n + 1)
    verts = np.array([[x, y] for y in xs for x in xs])
    vid = lambda i, j: j * (n + 1) + i
    cells = []
    for j in range(n):
        for i in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            # negative-slope diagonal: from (i, j+1) to (i+1, j)
            cells.append([a, b, d])
            cells.append([b, c, d])
    return Mesh(2, verts, cells)


def _mixed_level0():
    """Fixed mixed triangle/quad base mesh: 3x3 squares, corner squares
    split into two triangles by alternating diagonals, the other five
    squares kept as quads."""
    xs = np.linspace(0.0, 1.0, 4)
    verts = [[x, y] for y in xs for x in xs]
    vid = lambda i, j: j * 4 + i
    cells = []
    for j in range(3):
        for i in range(3):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            corner = (i in (0, 2)) and (j in (0, 2))
            if not corner:
                cells.append([a, b, c, d])
            elif (i + j) % 4 == 0:
                # diagonal a-c
                cells.append([a, b, c])
                cells.append([a, c, d])
            else:
                # diagonal b-d
                cells.append([a, b, d])
                cells.append([b, c, d])
    return np.array(verts, dtype=float), cells


def _refine_once(verts, cells):
    """Midpoint refinement: triangle -> 4 triangles, quad -> 4 quads."""
    old = np.asarray(verts, dtype=float)
    new_verts = [tuple(v) for v in old]

    def vkey(p):
        return (round(p[0], 12), round(p[1], 12))

    index = {vkey(v): i for i, v in enumerate(new_verts)}

    def add(p):
        k = vkey(p)
        if k not in index:
            index[k] = len(new_verts)
            new_verts.append(tuple(p))
        return index[k]

    out = []
    for loop in cells:
        pts = old[loop]
        mids = [add(0.5 * (pts[i] + pts[(i + 1) % len(loop)]))
                for i in range(len(loop))]
        if len(loop) == 3:
            a, b, c = loop
            mab, mbc, mca = mids
            out += [[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mab, mbc, mca]]
        elif len(loop) == 4:
            a, b, c, d = loop
            mab, mbc, mcd, mda = mids
            ctr = add(pts.mean(axis=0))
            out += [[a, mab, ctr, mda], [mab, b, mbc, ctr],
                    [ctr, mbc, c, mcd], [mda, ctr, mcd, d]]
        else:
            raise MeshError("mixed refinement handles triangles and quads only")
    return np.array(new_verts, dtype=float), out


def generate_mixed_polygonal(level):
    """Mixed triangle/quad mesh; level k is the base mesh refined k times."""
    if level < 0:
        raise MeshError("level must be >= 0")
    verts, cells = _mixed_level0()
    for _ in range(level):
        verts, cells = _refine_once(verts, cells)
    return Mesh(2, verts, cells)


def generate_hanging_node(n):
    """n x n squares with the lower-left quadrant refined once.

    Hanging nodes on the quadrant interface are inserted as collinear
    vertices into the loops of the adjacent coarse cells, so every facet
    keeps at most two incident cells.
    """
    if n < 2 or n % 2 != 0:
        raise MeshError("n must be even and >= 2")
    h = 1.0 / n
    m = n // 2
    verts = []
    index = {}

    def add(x, y):
        k = (round(x, 12), round(y, 12))
        if k not in index:
            index[k] = len(verts)
            verts.append(k)
        return index[k]

    cells = []
    for j in range(n):
        for i in range(n):
            x0, y0 = i * h, j * h
            x1, y1 = x0 + h, y0 + h
            if i < m and j < m:
                # refined into 4 subcells
                xm, ym = x0 + h / 2, y0 + h / 2
                for (ax, ay, bx, by) in [(x0, y0, xm, ym), (xm, y0, x1, ym),
                                         (x0, ym, xm, y1), (xm, ym, x1, y1)]:
                    cells.append([add(ax, ay), add(bx, ay), add(bx, by), add(ax, by)])
            else:
                loop = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
                expanded = []
                for k in range(4):
                    a = loop[k]
                    b = loop[(k + 1) % 4]
                    expanded.append(a)
                    mid = (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
                    # split the side if it borders the refined quadrant
                    if i == m and j < m and a[0] == x0 and b[0] == x0:
                        expanded.append(mid)
                    if j == m and i < m and a[1] == y0 and b[1] == y0:
                        expanded.append(mid)
                cells.append([add(x, y) for x, y in expanded])
    return Mesh(2, np.array(verts, dtype=float), cells)


def generate_hex(nx, ny, nz):
    """nx x ny x nz axis-aligned hexahedra on the unit cube."""
    if min(nx, ny, nz) < 1:
        raise MeshError("all subdivisions must be >= 1")
    xs = np.linspace(0.0, 1.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    zs = np.linspace(0.0, 1.0, nz + 1)
    verts = np.array([[x, y, z] for z in zs for y in ys for x in xs])
    vid = lambda i, j, k: (k * (ny + 1) + j) * (nx + 1) + i

    cells = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                v = [vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k),
                     vid(i, j + 1, k), vid(i, j, k + 1), vid(i + 1, j, k + 1),
                     vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1)]
                # outward-oriented face loops of the hexahedron
                faces = [
                    [v[0], v[3], v[2], v[1]],  # bottom  (z-)
                    [v[4], v[5], v[6], v[7]],  # top     (z+)
                    [v[0], v[1], v[5], v[4]],  # front   (y-)
                    [v[2], v[3], v[7], v[6]],  # back    (y+)
                    [v[0], v[4], v[7], v[3]],  # left    (x-)
                    [v[1], v[2], v[6], v[5]],  # right   (x+)
                ]
                cells.append(faces)
    return Mesh(3, verts, cells)
