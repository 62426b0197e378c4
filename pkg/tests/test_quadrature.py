import math

import numpy as np
import pytest

from wgstokes.quadrature import (gauss_segment, grundmann_moller,
                                 polygon_rule, polyhedron_rule, simplex_rule)


def tri_monomial(a, b):
    # int over unit triangle of x^a y^b
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def tet_monomial(a, b, c):
    return (math.factorial(a) * math.factorial(b) * math.factorial(c)
            / math.factorial(a + b + c + 3))


def test_reference_weights_sum():
    for dim in (2, 3):
        for order in (1, 3, 5, 7):
            pts, wts = grundmann_moller(dim, order)
            assert abs(wts.sum() - 1.0 / math.factorial(dim)) < 1e-14


@pytest.mark.parametrize("order", [1, 3, 5, 7])
def test_triangle_monomials(order):
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    pts, wts = simplex_rule(verts, order)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            got = (wts * pts[:, 0]**a * pts[:, 1]**b).sum()
            assert abs(got - tri_monomial(a, b)) < 1e-13


@pytest.mark.parametrize("order", [2, 4, 6])
def test_tet_monomials(order):
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                      [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    pts, wts = simplex_rule(verts, order)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            for c in range(order + 1 - a - b):
                got = (wts * pts[:, 0]**a * pts[:, 1]**b * pts[:, 2]**c).sum()
                assert abs(got - tet_monomial(a, b, c)) < 1e-13


def test_mapped_triangle_area():
    verts = np.array([[1.0, 1.0], [3.0, 1.5], [1.5, 4.0]])
    pts, wts = simplex_rule(verts, 3)
    area = 0.5 * abs((verts[1] - verts[0])[0] * (verts[2] - verts[0])[1]
                     - (verts[1] - verts[0])[1] * (verts[2] - verts[0])[0])
    assert abs(wts.sum() - area) < 1e-13


def test_gauss_segment_cubic():
    a, b = np.array([0.0, 0.0]), np.array([1.0, 2.0])
    pts, wts = gauss_segment(a, b, npts=2)
    # int of x^3 along the segment, arclength measure
    L = np.sqrt(5.0)
    exact = L / 4.0
    got = (wts * pts[:, 0]**3).sum()
    assert abs(got - exact) < 1e-13
    assert abs(wts.sum() - L) < 1e-14


def test_polygon_square():
    loop = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
    pts, wts = polygon_rule(loop, 4)
    assert abs(wts.sum() - 4.0) < 1e-13
    got = (wts * pts[:, 0]**2 * pts[:, 1]).sum()
    assert abs(got - 16.0 / 3.0) < 1e-12  # int x^2 dx * int y dy


def test_polyhedron_cube():
    v = np.array([[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)],
                 dtype=float)
    faces = [v[[0, 2, 3, 1]], v[[4, 5, 7, 6]], v[[0, 1, 5, 4]],
             v[[2, 6, 7, 3]], v[[0, 4, 6, 2]], v[[1, 3, 7, 5]]]
    pts, wts = polyhedron_rule(faces, 3)
    assert abs(wts.sum() - 1.0) < 1e-13
    for a in range(3):
        assert abs((wts * pts[:, a]).sum() - 0.5) < 1e-13
    got = (wts * pts[:, 0]**2 * pts[:, 1]).sum()
    assert abs(got - 1.0 / 6.0) < 1e-13
