import numpy as np
import pytest

from wgstokes.generators import (generate_hanging_node, generate_hex,
                                 generate_mixed_polygonal,
                                 generate_rectangular, generate_triangular)
from wgstokes.mesh import Mesh, MeshError
from wgstokes.meshio import MeshFileError, export_vtk, load_mesh, save_mesh

ALL_2D = [generate_rectangular(2), generate_rectangular(3),
          generate_triangular(2), generate_mixed_polygonal(0),
          generate_mixed_polygonal(1), generate_hanging_node(2),
          generate_hanging_node(4)]
ALL_3D = [generate_hex(1, 1, 1), generate_hex(2, 1, 1), generate_hex(2, 2, 2)]


def test_rectangular_counts():
    m = generate_rectangular(2)
    assert m.n_cells == 4
    assert len(m.facets) == 12
    assert len(m.vertices) == 9
    assert len(m.interior_facets) == 4
    assert len(m.interior_vertices) == 1


def test_triangular_counts():
    m = generate_triangular(2)
    assert m.n_cells == 8
    assert len(m.facets) == 16
    assert len(m.vertices) == 9


def test_hex_counts():
    m = generate_hex(2, 2, 2)
    assert m.n_cells == 8
    assert len(m.facets) == 36
    assert len(m.vertices) == 27
    assert len(m.edges3d) == 54


@pytest.mark.parametrize("mesh", ALL_2D + ALL_3D)
def test_euler_identity(mesh):
    assert mesh.euler_check()


@pytest.mark.parametrize("mesh", ALL_2D + ALL_3D)
def test_measures_positive(mesh):
    assert (mesh.cell_measure > 0).all()
    total = mesh.cell_measure.sum()
    assert abs(total - 1.0) < 1e-12  # all generators fill the unit domain


@pytest.mark.parametrize("mesh", ALL_2D + ALL_3D)
def test_facet_orientation(mesh):
    for fi, f in enumerate(mesh.facets):
        assert abs(np.linalg.norm(f.normal) - 1.0) < 1e-12
        assert f.boundary == (len(f.cells) == 1)
        if len(f.cells) == 2:
            assert f.cells[0] < f.cells[1]
            # normal points from the lower to the higher cell
            lo = mesh.cell_centroid[f.cells[0]]
            hi = mesh.cell_centroid[f.cells[1]]
            assert f.normal @ (hi - lo) > 0


@pytest.mark.parametrize("mesh", ALL_2D + ALL_3D)
def test_outward_normals_close(mesh):
    # sum over the boundary of each cell of |e| n_out is zero
    for c in range(mesh.n_cells):
        acc = np.zeros(mesh.dim)
        for fi, n_out, meas, _ in mesh.cell_facets(c):
            acc += meas * n_out
        assert np.abs(acc).max() < 1e-12


@pytest.mark.parametrize("mesh", ALL_2D + ALL_3D)
def test_cell_quadrature_measure(mesh):
    for c in range(mesh.n_cells):
        pts, wts = mesh.cell_quadrature(c, 2)
        assert abs(wts.sum() - mesh.cell_measure[c]) < 1e-12


def test_nonconvex_cell_rejected():
    verts = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 0.5],
                      [0.0, 2.0]])
    with pytest.raises(MeshError):
        Mesh(2, verts, [[0, 1, 2, 3, 4]])


def test_clockwise_loop_rejected():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(MeshError):
        Mesh(2, verts, [[0, 3, 2, 1]])


def test_vertex_hull_2d():
    m = generate_rectangular(2)
    v = m.interior_vertices[0]
    hull = m.vertex_hull(v)
    assert len(hull.edges) == 4
    # hull normals are unit and perpendicular to the spoke directions
    for fi, n in hull.edges:
        spoke = m.facets[fi].centroid - m.vertices[v]
        assert abs(np.linalg.norm(n) - 1.0) < 1e-12
        assert abs(n @ spoke) < 1e-12


def test_edge_solid_3d():
    m = generate_hex(2, 2, 2)
    e = m.interior_edges[0]
    solid = m.edge_solid(e)
    edge = m.edges3d[e]
    t = m.vertices[edge.vertices[1]] - m.vertices[edge.vertices[0]]
    t = t / np.linalg.norm(t)
    assert np.allclose(solid.direction, t)
    for fi, n in solid.faces:
        assert abs(np.linalg.norm(n) - 1.0) < 1e-12
        assert abs(n @ t) < 1e-12


def test_hanging_node_mesh():
    m = generate_hanging_node(4)
    # coarse cells adjacent to the refined quadrant gain loop vertices
    sizes = sorted(len(c) for c in m.cells)
    assert sizes[0] == 4 and sizes[-1] > 4
    assert m.euler_check()


@pytest.mark.parametrize("mesh", [generate_rectangular(3),
                                  generate_mixed_polygonal(1),
                                  generate_hanging_node(2),
                                  generate_hex(2, 2, 2)])
def test_json_roundtrip(tmp_path, mesh):
    path = tmp_path / "m.json"
    save_mesh(mesh, path)
    back = load_mesh(path)
    assert back.dim == mesh.dim
    assert back.n_cells == mesh.n_cells
    assert np.allclose(back.vertices, mesh.vertices)
    assert np.allclose(back.cell_measure, mesh.cell_measure)


def test_load_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2, "vertices": [[0, 0]]}')
    with pytest.raises(MeshFileError):
        load_mesh(path)
    path.write_text("not json at all")
    with pytest.raises(MeshFileError):
        load_mesh(path)


def test_vtk_export(tmp_path):
    m = generate_mixed_polygonal(0)
    path = tmp_path / "m.vtk"
    vel = np.zeros((m.n_cells, 2))
    export_vtk(m, path, cell_velocity=vel, cell_pressure=np.ones(m.n_cells))
    text = path.read_text()
    assert text.startswith("# vtk DataFile Version 3.0")
    assert "UNSTRUCTURED_GRID" in text
    assert "CELL_DATA" in text


def test_vtk_export_3d(tmp_path):
    m = generate_hex(2, 1, 1)
    path = tmp_path / "m3.vtk"
    export_vtk(m, path)
    assert "42" in path.read_text()  # polyhedron cell type
