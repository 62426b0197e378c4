"""Quadrature rules on segments, simplices, polygons and polyhedra.

Simplex rules are Grundmann-Moller rules of arbitrary degree, so both
triangle and tetrahedron integration come from a single construction.
Polygons and polyhedral faces/cells are integrated by fanning into
simplices from the centroid.
"""

import math
from functools import lru_cache

import numpy as np


def gauss_segment(a, b, npts=2):
    """Gauss-Legendre points/weights on the segment from a to b (in R^2 or R^3)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x, w = np.polynomial.legendre.leggauss(npts)
    pts = 0.5 * (1.0 - x)[:, None] * a + 0.5 * (1.0 + x)[:, None] * b
    length = np.linalg.norm(b - a)
    return pts, 0.5 * length * w


def _compositions(total, parts):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def grundmann_moller(dim, order):
    """Rule on the unit simplex in R^dim, exact for degree 2*order+1.

    Returns (points, weights) with weights summing to the simplex
    volume 1/dim!.
    """
    d = dim
    s = order
    pts = []
    wts = []
    vol = 1.0 / math.factorial(d)
    for i in range(s + 1):
        coeff = (
            (-1) ** i
            * 2.0 ** (-2 * s)
            * (d + 1 + 2 * s - 2 * i) ** (2 * s + 1)
            / (math.factorial(i) * math.factorial(d + 1 + 2 * s - i))
        )
        denom = d + 1 + 2 * (s - i)
        for beta in _compositions(s - i, d + 1):
            bary = np.array([(2 * bj + 1) / denom for bj in beta])
            pts.append(bary[1:])  # drop the first barycentric coordinate
            wts.append(coeff)
    pts = np.array(pts)
    wts = np.array(wts)
    assert abs(wts.sum() - vol) < 1e-13 * max(1.0, abs(wts).sum())
    return pts, wts


def simplex_rule(vertices, order):
    """Map a Grundmann-Moller rule onto the simplex with given vertices.

    vertices: (d+1, gdim) array; the simplex may live in a higher
    dimensional space (triangle in R^3).  Weights sum to the simplex
    measure.
    """
    vertices = np.asarray(vertices, dtype=float)
    d = vertices.shape[0] - 1
    ref_pts, ref_wts = grundmann_moller(d, order)
    v0 = vertices[0]
    edges = vertices[1:] - v0
    pts = v0 + ref_pts @ edges
    if vertices.shape[1] == d:
        measure = abs(np.linalg.det(edges)) / math.factorial(d)
    else:
        gram = edges @ edges.T
        measure = math.sqrt(abs(np.linalg.det(gram))) / math.factorial(d)
    wts = ref_wts * (measure / (1.0 / math.factorial(d)))
    return pts, wts


def polygon_rule(loop, order):
    """Quadrature on a planar polygon (2D coords or 3D planar loop).

    Fans the polygon into triangles about the vertex average.
    """
    loop = np.asarray(loop, dtype=float)
    center = loop.mean(axis=0)
    pts = []
    wts = []
    n = len(loop)
    for i in range(n):
        tri = np.array([center, loop[i], loop[(i + 1) % n]])
        p, w = simplex_rule(tri, order)
        pts.append(p)
        wts.append(w)
    return np.vstack(pts), np.concatenate(wts)


def polyhedron_rule(face_loops, order):
    """Quadrature on a convex polyhedron given by outward-oriented face loops.

    Fans each face into triangles about its vertex average and each
    triangle into a tetrahedron with the cell vertex average as apex.
    """
    all_v = np.vstack(face_loops)
    center = all_v.mean(axis=0)
    pts = []
    wts = []
    for loop in face_loops:
        loop = np.asarray(loop, dtype=float)
        fc = loop.mean(axis=0)
        n = len(loop)
        for i in range(n):
            tet = np.array([center, fc, loop[i], loop[(i + 1) % n]])
            # signed orientation: outward face loops give positive volume
            p, w = simplex_rule(tet, order)
            pts.append(p)
            wts.append(w)
    return np.vstack(pts), np.concatenate(wts)
