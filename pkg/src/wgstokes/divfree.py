"""Explicit basis of the discrete divergence-free velocity subspace.

Three families of sparse columns over the free velocity slots:
  * interior bubbles: one per interior cell coefficient, zero facet values;
  * tangential functions: facet-supported, tangent to their facet;
  * loop functions: normal facet values of magnitude 1/measure around an
    interior vertex (2D) or interior edge (3D), whose per-cell fluxes
    cancel in pairs.
In 3D the loop functions around each interior vertex sum to zero, so one
incident loop per interior vertex is dropped via a system of distinct
representatives before assembling the basis matrix.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import MeshError


@dataclass
class BasisFunction:
    kind: str            # 'bubble' | 'tangential' | 'loop'
    anchor: int          # cell / facet / vertex-or-edge index
    slots: np.ndarray    # free-slot indices
    coeffs: np.ndarray


@dataclass
class DivFreeBasis:
    functions: list
    matrix: sp.csc_matrix    # n_free x n_functions
    counts: dict

    @property
    def n_columns(self):
        return self.matrix.shape[1]


def build_interior_bubbles(mesh, layout):
    out = []
    for c in range(mesh.n_cells):
        base = c * layout.n_cell_dofs
        for k in range(layout.n_cell_dofs):
            out.append(BasisFunction('bubble', c,
                                     np.array([base + k]), np.array([1.0])))
    return out


def _face_tangent_pair(mesh, fi):
    """Deterministic orthonormal in-plane pair for a 3D face."""
    f = mesh.facets[fi]
    loop = mesh.vertices[list(f.vertices)]
    t1 = loop[1] - loop[0]
    t1 = t1 / np.linalg.norm(t1)
    t2 = np.cross(f.normal, t1)
    t2 = t2 / np.linalg.norm(t2)
    return t1, t2


def build_tangential(mesh, layout):
    out = []
    d = mesh.dim
    for fi in mesh.interior_facets:
        s = layout.facet_slot[fi]
        slots = np.arange(s, s + d)
        if d == 2:
            out.append(BasisFunction('tangential', fi, slots,
                                     mesh.facets[fi].tangent.copy()))
        else:
            t1, t2 = _face_tangent_pair(mesh, fi)
            out.append(BasisFunction('tangential', fi, slots, t1))
            out.append(BasisFunction('tangential', fi, slots, t2))
    return out


def build_vertex_loops_2d(mesh, layout):
    out = []
    for v in mesh.interior_vertices:
        hull = mesh.vertex_hull(v)
        slots = []
        coeffs = []
        for fi, nrm in hull.edges:
            s = layout.facet_slot[fi]
            slots.extend((s, s + 1))
            coeffs.extend(nrm / mesh.facets[fi].measure)
        out.append(BasisFunction('loop', v, np.array(slots), np.array(coeffs)))
    return out


def build_edge_loops_3d(mesh, layout):
    out = []
    for ei in mesh.interior_edges:
        solid = mesh.edge_solid(ei)
        slots = []
        coeffs = []
        for fi, nrm in solid.faces:
            s = layout.facet_slot[fi]
            slots.extend((s, s + 1, s + 2))
            coeffs.extend(nrm / mesh.facets[fi].measure)
        out.append(BasisFunction('loop', ei, np.array(slots), np.array(coeffs)))
    return out


def _sdr_matching(mesh):
    """Distinct incident interior edge per interior vertex (3D elimination).

    Greedy with a preference for edges whose other endpoint lies on the
    boundary; augmenting-path matching as fallback.
    """
    verts = list(mesh.interior_vertices)
    used = {}
    match_of_vertex = {}

    def candidates(v):
        eids = mesh._vertex_edges.get(v, [])
        def pref(ei):
            a, b = mesh.edges3d[ei].vertices
            other = b if a == v else a
            return (0 if mesh.vertex_boundary[other] else 1, ei)
        return sorted(eids, key=pref)

    for v in verts:
        picked = None
        for ei in candidates(v):
            if ei not in used:
                picked = ei
                break
        if picked is not None:
            used[picked] = v
            match_of_vertex[v] = picked

    unmatched = [v for v in verts if v not in match_of_vertex]
    for v in unmatched:
        # augmenting path over the vertex-edge incidence
        seen = set()

        def augment(vv):
            for ei in candidates(vv):
                if ei in seen:
                    continue
                seen.add(ei)
                owner = used.get(ei)
                if owner is None or augment(owner):
                    used[ei] = vv
                    match_of_vertex[vv] = ei
                    return True
            return False

        if not augment(v):
            raise MeshError(
                f"no distinct representative edge for interior vertex {v}")
    return match_of_vertex


def eliminate_dependent_loops(mesh, loops):
    """Drop one incident edge loop per interior vertex (3D)."""
    match = _sdr_matching(mesh)
    drop = set(match.values())
    return [lam for lam in loops if lam.anchor not in drop]


def vertex_loop_dependency_residual(mesh, layout, v):
    """Norm of the signed sum of edge loops around interior vertex v (3D).

    Signs orient every loop by the edge direction pointing away from v.
    """
    acc = np.zeros(layout.n_free)
    for ei in mesh._vertex_edges.get(v, []):
        a, b = mesh.edges3d[ei].vertices
        sign = 1.0 if a == v else -1.0
        solid = mesh.edge_solid(ei)
        for fi, nrm in solid.faces:
            s = layout.facet_slot[fi]
            acc[s:s + 3] += sign * nrm / mesh.facets[fi].measure
    return float(np.linalg.norm(acc))


def build_divfree_basis(mesh, layout):
    bubbles = build_interior_bubbles(mesh, layout)
    tangentials = build_tangential(mesh, layout)
    if mesh.dim == 2:
        loops = build_vertex_loops_2d(mesh, layout)
    else:
        loops = eliminate_dependent_loops(mesh, build_edge_loops_3d(mesh, layout))
    funcs = bubbles + tangentials + loops
    rows = np.concatenate([f.slots for f in funcs])
    cols = np.concatenate([np.full(len(f.slots), j) for j, f in enumerate(funcs)])
    vals = np.concatenate([f.coeffs for f in funcs])
    C = sp.coo_matrix((vals, (rows, cols)),
                      shape=(layout.n_free, len(funcs))).tocsc()
    counts = {'bubble': len(bubbles), 'tangential': len(tangentials),
              'loop': len(loops)}
    return DivFreeBasis(functions=funcs, matrix=C, counts=counts)


def expected_dimension(mesh):
    t = mesh.topology_counts()
    if mesh.dim == 2:
        return 6 * t.n_cells + t.n_interior_facets + t.n_interior_vertices
    return (12 * t.n_cells + 2 * t.n_interior_facets
            + t.n_interior_edges - t.n_interior_vertices)


def kernel_residual(forms, basis):
    """Max |B C| entry scaled by facet measures (rows are cell fluxes)."""
    nf = forms.layout.n_free
    BC = forms.B[:, :nf] @ basis.matrix
    BC = np.abs(BC.toarray() if sp.issparse(BC) else BC)
    scale = np.maximum(forms.layout.mesh.cell_measure, 1e-300)
    # flux entries scale like facet measure; normalize by cell perimeter scale
    per = np.zeros(forms.layout.mesh.n_cells)
    for c in range(forms.layout.mesh.n_cells):
        per[c] = sum(m for _, _, m, _ in forms.layout.mesh.cell_facets(c))
    return float((BC / per[:, None]).max())


def verify_basis(forms, basis, rank_check=True):
    """Kernel residual, column count versus the dimension formula, rank,
    and positivity of the reduced Gram matrix."""
    mesh = forms.layout.mesh
    res = kernel_residual(forms, basis)
    expected = expected_dimension(mesh)
    report = {
        'max_kernel_residual': res,
        'n_columns': basis.n_columns,
        'expected_dim': expected,
        'dim_ok': basis.n_columns == expected,
        'rank_ok': None,
        'gram_min_eig': None,
    }
    if rank_check:
        dense = basis.matrix.toarray()
        rank = np.linalg.matrix_rank(dense)
        report['rank'] = int(rank)
        report['rank_ok'] = rank == basis.n_columns
        nf = forms.layout.n_free
        M = (basis.matrix.T @ (forms.A[:nf, :nf] @ basis.matrix)).toarray()
        report['gram_min_eig'] = float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())
    ok = res <= 1e-12 and report['dim_ok'] and report['rank_ok'] in (None, True)
    if report['gram_min_eig'] is not None:
        ok = ok and report['gram_min_eig'] > 0
    report['ok'] = ok
    return report


def divfree_dimension_oracle(forms):
    """dim ker(B) over free slots via rank-revealing SVD (dense, desk scale)."""
    nf = forms.layout.n_free
    B = forms.B[:, :nf].toarray()
    rank = np.linalg.matrix_rank(B)
    return nf - rank, rank


def dump_basis_triplets(basis, path):
    """Sparse triplet text dump: one 'row col value' line per entry."""
    C = basis.matrix.tocoo()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {C.shape[0]} {C.shape[1]} {C.nnz}\n")
        for r, c, v in zip(C.row, C.col, C.data):
            fh.write(f"{r} {c} {v:.17g}\n")
