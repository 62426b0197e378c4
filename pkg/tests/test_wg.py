import numpy as np
import pytest

from wgstokes import wg
from wgstokes.generators import (generate_hanging_node, generate_hex,
                                 generate_mixed_polygonal,
                                 generate_rectangular, generate_triangular)
from wgstokes.mesh import Mesh, MeshError

MESHES = [generate_rectangular(2), generate_triangular(2),
          generate_mixed_polygonal(0), generate_hanging_node(2),
          generate_hex(2, 1, 1)]


def random_convex_polygon(rng, k):
    # random support angles on an ellipse, hull is convex by construction
    ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=k))
    while np.min(np.diff(ang)) < 0.05:
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=k))
    a, b = rng.uniform(0.5, 2.0, size=2)
    pts = np.column_stack([a * np.cos(ang), b * np.sin(ang)])
    return pts + rng.uniform(-1.0, 1.0, size=2)


@pytest.mark.parametrize("mesh", MESHES)
def test_weak_operators_match_bruteforce(mesh):
    rng = np.random.default_rng(7)
    layout = wg.DofLayout(mesh)
    field = wg.WgField(layout, rng.standard_normal(layout.n_total))
    for c in range(mesh.n_cells):
        G = wg.weak_gradient(mesh, field, c)
        Gb = wg.weak_gradient_bruteforce(mesh, field, c)
        assert np.abs(G - Gb).max() < 1e-12
        dv = wg.weak_divergence(mesh, field, c)
        assert abs(dv - np.trace(G)) < 1e-12
        assert abs(dv - wg.weak_divergence_bruteforce(mesh, field, c)) < 1e-12


def test_weak_operators_random_polygons():
    rng = np.random.default_rng(20240817)
    for trial in range(100):
        k = rng.integers(3, 9)
        loop = random_convex_polygon(rng, int(k))
        mesh = Mesh(2, loop, [list(range(len(loop)))])
        layout = wg.DofLayout(mesh)
        field = wg.WgField(layout, rng.standard_normal(layout.n_total))
        G = wg.weak_gradient(mesh, field, 0)
        Gb = wg.weak_gradient_bruteforce(mesh, field, 0)
        scale = max(np.abs(G).max(), 1.0)
        assert np.abs(G - Gb).max() / scale < 1e-12
        dv = wg.weak_divergence(mesh, field, 0)
        assert abs(dv - np.trace(G)) / scale < 1e-12


def test_weak_gradient_of_linear_field():
    # a field filled from a globally linear u has weak gradient = grad u
    mesh = generate_mixed_polygonal(0)
    A = np.array([[1.5, -0.3], [0.2, 0.8]])

    def u(p):
        return p @ A.T

    field = wg.project_velocity(mesh, u)
    for c in range(mesh.n_cells):
        G = wg.weak_gradient(mesh, field, c)
        assert np.abs(G - A).max() < 1e-12


def test_projection_reproduces_linears():
    mesh = generate_triangular(2)
    A = np.array([[0.5, 2.0], [-1.0, 0.25]])
    b = np.array([0.3, -0.7])

    def u(p):
        return p @ A.T + b

    field = wg.project_velocity(mesh, u)
    rng = np.random.default_rng(3)
    for c in range(mesh.n_cells):
        pts = mesh.cell_centroid[c] + 0.05 * rng.standard_normal((4, 2))
        assert np.abs(field.eval_interior(c, pts) - u(pts)).max() < 1e-12


def test_boundary_average_quarter_edge():
    # average of x(1-x) over the edge from (0,0) to (1/4,0) is 5/48
    mesh = generate_rectangular(4)
    layout = wg.DofLayout(mesh)

    def g(p):
        out = np.zeros_like(p)
        out[:, 0] = p[:, 0] * (1.0 - p[:, 0])
        return out

    vals = wg.apply_dirichlet(mesh, layout, g)
    target = None
    for fi in mesh.boundary_facets:
        f = mesh.facets[fi]
        if np.allclose(f.centroid, [0.125, 0.0]):
            s = layout.facet_slot[fi] - layout.n_free
            target = vals[s]
    assert target is not None
    assert abs(target - 5.0 / 48.0) < 1e-13


@pytest.mark.parametrize("mesh", MESHES)
def test_forms_symmetric_psd(mesh):
    forms = wg.assemble_forms(mesh)
    A = forms.A
    assert abs(A - A.T).max() < 1e-12
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.standard_normal(A.shape[0])
        assert x @ (A @ x) > -1e-12
        assert x @ (forms.S @ x) > -1e-12


def test_reduced_block_spd():
    mesh = generate_rectangular(2)
    forms = wg.assemble_forms(mesh)
    A_ff = forms.A[:forms.layout.n_free, :forms.layout.n_free].toarray()
    eigs = np.linalg.eigvalsh(0.5 * (A_ff + A_ff.T))
    assert eigs.min() > 0


def test_divergence_matrix_closure():
    # each interior facet contributes opposite fluxes to its two cells
    mesh = generate_mixed_polygonal(1)
    forms = wg.assemble_forms(mesh)
    colsum = np.asarray(forms.B.sum(axis=0)).ravel()
    # boundary facet slots keep their one-sided flux
    assert np.abs(colsum[:forms.layout.n_free]).max() < 1e-12


def test_coefficient_matrix_checked():
    mesh = generate_rectangular(2)
    with pytest.raises(MeshError):
        wg.assemble_forms(mesh, coeff_A=lambda c: np.array([[1.0, 2.0],
                                                            [0.0, 1.0]]))
    with pytest.raises(MeshError):
        wg.assemble_forms(mesh, coeff_A=lambda c: -np.eye(2))


def test_l2_norm_of_projection():
    mesh = generate_rectangular(8)

    def u(p):
        out = np.zeros_like(p)
        out[:, 0] = np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1])
        return out

    field = wg.project_velocity(mesh, u)
    # ||u||^2 = 1/4 for this component; projection converges from below
    assert abs(wg.l2_interior_norm(mesh, field) - 0.5) < 5e-3


def test_pressure_mean_removal():
    mesh = generate_triangular(4)
    p = wg.project_pressure(mesh, lambda q: 3.0 + q[:, 0])
    p = p.remove_mean()
    assert abs((p.values * mesh.cell_measure).sum()) < 1e-12
