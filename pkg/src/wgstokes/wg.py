"""Lowest-order weak Galerkin velocity/pressure spaces on polytopal meshes.

Velocity unknowns are piecewise-linear vectors inside each cell plus one
constant vector per interior facet; boundary facets carry fixed
(prescribed) values.  Pressure is piecewise constant.  The weak gradient
and weak divergence of a field are constant per cell and depend only on
the facet values, which makes their closed forms cheap boundary sums.
"""

import numpy as np
import scipy.sparse as sp

from .mesh import MeshError

# quadrature orders (Grundmann-Moller parameter s, exact degree 2s+1)
CELL_ORDER = 3        # bilinear-form and error integrands
PROJ_ORDER = 4        # projections of smooth exact solutions
FACET_NPTS = 2        # 2D Gauss points per edge
FACE_ORDER = 2        # 3D face rule (triangulated)


class DofLayout:
    """Global indexing of velocity unknowns.

    Slots [0, n_interior): d*(d+1) per-cell coefficients in the local
    basis {1, (x-xc)/h_T, ...} per component.
    Slots [n_interior, n_free): d per interior facet.
    Slots [n_free, n_total): d per boundary facet (prescribed values).
    """

    def __init__(self, mesh):
        self.mesh = mesh
        d = mesh.dim
        self.d = d
        self.n_cell_dofs = d * (d + 1)
        self.n_interior = self.n_cell_dofs * mesh.n_cells
        self.facet_slot = {}
        pos = self.n_interior
        for fi in mesh.interior_facets:
            self.facet_slot[fi] = pos
            pos += d
        self.n_free = pos
        for fi in mesh.boundary_facets:
            self.facet_slot[fi] = pos
            pos += d
        self.n_total = pos

    def cell_dof(self, c, comp, k):
        return c * self.n_cell_dofs + comp * (self.d + 1) + k

    def cell_slice(self, c):
        return slice(c * self.n_cell_dofs, (c + 1) * self.n_cell_dofs)


class WgField:
    """Coefficient vector over all velocity slots (free + boundary)."""

    def __init__(self, layout, values=None):
        self.layout = layout
        self.values = np.zeros(layout.n_total) if values is None else values

    def facet_value(self, fi):
        s = self.layout.facet_slot[fi]
        return self.values[s:s + self.layout.d]

    def eval_interior(self, c, pts):
        """Evaluate v_0 of cell c at an (n, d) array of points."""
        lay = self.layout
        mesh = lay.mesh
        d = lay.d
        mono = _monomials(pts, mesh.cell_centroid[c], mesh.cell_diameter[c])
        coeffs = self.values[lay.cell_slice(c)].reshape(d, d + 1)
        return mono @ coeffs.T

    def cell_average(self, c):
        """Average of v_0 over cell c.

        The scaled monomials have zero cell average only up to centroid
        offset; integrate the linear field exactly with a degree-1 rule.
        """
        pts, wts = self.layout.mesh.cell_quadrature(c, 1)
        vals = self.eval_interior(c, pts)
        return (wts[:, None] * vals).sum(axis=0) / wts.sum()


class PressureField:
    """One value per cell."""

    def __init__(self, mesh, values=None):
        self.mesh = mesh
        self.values = np.zeros(mesh.n_cells) if values is None else values

    def remove_mean(self):
        w = self.mesh.cell_measure
        self.values -= (w * self.values).sum() / w.sum()
        return self


class FormMatrices:
    """Assembled sparse forms over all slots.

    A: grad part + stabilizer, symmetric, n_total x n_total.
    S: stabilizer alone.
    B: divergence form, rows = cells, B[c, j] = b(phi_j, 1_{T_c}).
    F: load vector (f, v_0), nonzero on interior slots only.
    """

    def __init__(self, layout, A, S, B, F):
        self.layout = layout
        self.A = A
        self.S = S
        self.B = B
        self.F = F

    @property
    def n_free(self):
        return self.layout.n_free

    def split(self):
        nf = self.layout.n_free
        return (self.A[:nf, :nf].tocsr(), self.A[:nf, nf:].tocsr(),
                self.B[:, :nf].tocsr(), self.B[:, nf:].tocsr())


def _monomials(pts, centroid, h):
    """Rows [1, (x-xc)/h, (y-yc)/h (, (z-zc)/h)] at each point."""
    pts = np.atleast_2d(pts)
    n, d = pts.shape
    out = np.ones((n, d + 1))
    h = np.asarray(h)
    out[:, 1:] = (pts - centroid) / (h[:, None] if h.ndim else h)
    return out


def facet_monomial_averages(mesh, c, fi):
    """Average of the cell-c monomial basis over facet fi.

    Exact: the monomials are affine, so the average is their value at
    the facet centroid.
    """
    return _monomials(mesh.facets[fi].centroid[None, :],
                      mesh.cell_centroid[c], mesh.cell_diameter[c])[0]


def weak_gradient(mesh, field, c):
    """Constant d x d weak gradient on cell c: (1/|T|) sum |e| v_b (x) n."""
    d = mesh.dim
    G = np.zeros((d, d))
    for fi, n_out, meas, _ in mesh.cell_facets(c):
        vb = field.facet_value(fi)
        G += meas * np.outer(vb, n_out)
    return G / mesh.cell_measure[c]


def weak_divergence(mesh, field, c):
    """Constant weak divergence on cell c: (1/|T|) sum |e| v_b . n."""
    acc = 0.0
    for fi, n_out, meas, _ in mesh.cell_facets(c):
        acc += meas * float(field.facet_value(fi) @ n_out)
    return acc / mesh.cell_measure[c]


def weak_gradient_bruteforce(mesh, field, c):
    """Solve the defining equation of the weak gradient by quadrature.

    Tests against all constant d x d matrices; the volume term vanishes
    for constant tests but is evaluated anyway as an independent path.
    """
    d = mesh.dim
    rhs = np.zeros((d, d))
    for fi, n_out, meas, _ in mesh.cell_facets(c):
        pts, wts = mesh.facet_quadrature(fi, order=FACE_ORDER, npts=FACET_NPTS)
        vb = field.facet_value(fi)
        for i in range(d):
            for j in range(d):
                # q = e_i e_j^T: div q = 0, <v_b, q n> = v_b[i] n[j]
                rhs[i, j] += (wts * (vb[i] * n_out[j])).sum()
    return rhs / mesh.cell_measure[c]


def weak_divergence_bruteforce(mesh, field, c):
    acc = 0.0
    for fi, n_out, meas, _ in mesh.cell_facets(c):
        pts, wts = mesh.facet_quadrature(fi, order=FACE_ORDER, npts=FACET_NPTS)
        vb = field.facet_value(fi)
        acc += (wts * (vb @ n_out)).sum()
    return acc / mesh.cell_measure[c]


class CellQuadratureCache:
    """Stacked quadrature points over all cells for vectorized integrals."""

    def __init__(self, mesh, order):
        pts = []
        wts = []
        owner = []
        for c in range(mesh.n_cells):
            p, w = mesh.cell_quadrature(c, order)
            pts.append(p)
            wts.append(w)
            owner.append(np.full(len(w), c))
        self.pts = np.vstack(pts)
        self.wts = np.concatenate(wts)
        self.owner = np.concatenate(owner)
        self.mono = _monomials(self.pts, mesh.cell_centroid[self.owner],
                               mesh.cell_diameter[self.owner])
        self.n_cells = mesh.n_cells

    def integrate_per_cell(self, values):
        """sum_q w_q values_q per cell; values shape (nq,) or (nq, k)."""
        v = np.asarray(values)
        if v.ndim == 1:
            return np.bincount(self.owner, weights=self.wts * v,
                               minlength=self.n_cells)
        return np.stack([np.bincount(self.owner, weights=self.wts * v[:, k],
                                     minlength=self.n_cells)
                         for k in range(v.shape[1])], axis=1)


def cell_mass_matrices(mesh, cache=None):
    """Per-cell (d+1) x (d+1) mass matrices of the scaled monomial basis."""
    cache = cache or CellQuadratureCache(mesh, CELL_ORDER)
    d = mesh.dim
    M = np.zeros((mesh.n_cells, d + 1, d + 1))
    for j in range(d + 1):
        for k in range(j, d + 1):
            vals = cache.integrate_per_cell(cache.mono[:, j] * cache.mono[:, k])
            M[:, j, k] = vals
            M[:, k, j] = vals
    return M


def assemble_forms(mesh, coeff_A=None, f=None):
    """Assemble the gradient form, stabilizer, divergence form and load.

    coeff_A: None (identity) or callable c -> SPD d x d matrix.
    f: callable mapping (n, d) points to (n, d) values, or None.
    """
    layout = DofLayout(mesh)
    d = mesh.dim
    rows, cols, vals = [], [], []
    srows, scols, svals = [], [], []
    brows, bcols, bvals = [], [], []

    eye = np.eye(d)
    for c in range(mesh.n_cells):
        facets = mesh.cell_facets(c)
        area = mesh.cell_measure[c]
        # stabilizer length scale: |T|^(1/d), the grid spacing on cartesian cells
        hs = area ** (1.0 / d)
        A_T = eye if coeff_A is None else np.asarray(coeff_A(c), dtype=float)
        if coeff_A is not None:
            if not np.allclose(A_T, A_T.T) or np.linalg.eigvalsh(A_T).min() <= 0:
                raise MeshError(f"cell {c}: coefficient matrix is not SPD")

        fslots = [layout.facet_slot[fi] for fi, _, _, _ in facets]

        # gradient part: entry((e,a),(e',b)) = |e||e'|/|T| (n_e.n_e') A[b,a]
        for ie, (fi, n_i, m_i, _) in enumerate(facets):
            for je, (fj, n_j, m_j, _) in enumerate(facets):
                coef = m_i * m_j * float(n_i @ n_j) / area
                for a in range(d):
                    for b in range(d):
                        v = coef * A_T[b, a]
                        if v != 0.0:
                            rows.append(fslots[je] + b)
                            cols.append(fslots[ie] + a)
                            vals.append(v)

        # stabilizer: h^-1 sum_e |e| (Qb v0 - v_b).(Qb w0 - w_b)
        # local column vector per facet and component over the cell's slots
        cslots = np.arange(c * layout.n_cell_dofs, (c + 1) * layout.n_cell_dofs)
        for ie, (fi, n_i, m_i, _) in enumerate(facets):
            mono_avg = facet_monomial_averages(mesh, c, fi)
            coef = m_i / hs
            for a in range(d):
                # residual functional r: slots of component a's monomials +mono_avg,
                # facet slot -1
                idx = np.concatenate([cslots[a * (d + 1):(a + 1) * (d + 1)],
                                      [fslots[ie] + a]])
                r = np.concatenate([mono_avg, [-1.0]])
                block = coef * np.outer(r, r)
                for p in range(len(idx)):
                    for q in range(len(idx)):
                        srows.append(idx[p])
                        scols.append(idx[q])
                        svals.append(block[p, q])

        # divergence rows: b(phi, 1_T) = sum_e |e| v_b.n_out
        for ie, (fi, n_i, m_i, _) in enumerate(facets):
            for a in range(d):
                if n_i[a] != 0.0:
                    brows.append(c)
                    bcols.append(fslots[ie] + a)
                    bvals.append(m_i * n_i[a])

    n = layout.n_total
    G = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    S = sp.coo_matrix((svals, (srows, scols)), shape=(n, n)).tocsr()
    A = (G + S).tocsr()
    B = sp.coo_matrix((bvals, (brows, bcols)), shape=(mesh.n_cells, n)).tocsr()

    F = np.zeros(n)
    if f is not None:
        cache = CellQuadratureCache(mesh, CELL_ORDER)
        fvals = np.asarray(f(cache.pts))
        for a in range(d):
            for k in range(d + 1):
                contrib = cache.integrate_per_cell(fvals[:, a] * cache.mono[:, k])
                F[np.arange(mesh.n_cells) * layout.n_cell_dofs
                  + a * (d + 1) + k] = contrib
    return FormMatrices(layout, A, S, B, F)


def project_velocity(mesh, u, layout=None):
    """Q_h u: per-cell L2 projection onto linear vectors plus facet averages.

    u maps an (n, d) point array to (n, d) values.  Fills boundary slots
    with the facet averages of the trace.
    """
    layout = layout or DofLayout(mesh)
    d = mesh.dim
    field = WgField(layout)
    cache = CellQuadratureCache(mesh, PROJ_ORDER)
    M = cell_mass_matrices(mesh, cache)
    uvals = np.asarray(u(cache.pts))
    rhs = np.zeros((mesh.n_cells, d, d + 1))
    for a in range(d):
        for k in range(d + 1):
            rhs[:, a, k] = cache.integrate_per_cell(uvals[:, a] * cache.mono[:, k])
    Mrep = M[:, None, :, :].repeat(d, axis=1).reshape(-1, d + 1, d + 1)
    coeffs = np.linalg.solve(Mrep, rhs.reshape(-1, d + 1, 1))[..., 0]
    coeffs = coeffs.reshape(mesh.n_cells, d, d + 1)
    field.values[:layout.n_interior] = coeffs.reshape(-1)

    for fi in range(len(mesh.facets)):
        pts, wts = mesh.facet_quadrature(fi, order=PROJ_ORDER, npts=4)
        avg = (wts[:, None] * np.asarray(u(pts))).sum(axis=0) / wts.sum()
        s = layout.facet_slot[fi]
        field.values[s:s + d] = avg
    return field


def project_pressure(mesh, p):
    """Cell averages of p."""
    cache = CellQuadratureCache(mesh, PROJ_ORDER)
    vals = cache.integrate_per_cell(np.asarray(p(cache.pts)))
    return PressureField(mesh, vals / mesh.cell_measure)


def apply_dirichlet(mesh, layout, g):
    """Boundary slot values: per-facet averages of g."""
    d = mesh.dim
    out = np.zeros(layout.n_total - layout.n_free)
    for fi in mesh.boundary_facets:
        pts, wts = mesh.facet_quadrature(fi, order=PROJ_ORDER, npts=4)
        avg = (wts[:, None] * np.asarray(g(pts))).sum(axis=0) / wts.sum()
        s = layout.facet_slot[fi] - layout.n_free
        out[s:s + d] = avg
    return out


# ----------------------------------------------------------------------
# norms

def triple_bar_norm(forms, field):
    """Energy norm sqrt(a(v, v)) of a field over all slots."""
    x = field.values
    return float(np.sqrt(max(x @ (forms.A @ x), 0.0)))


def h1_discrete_norm(mesh, field):
    """Discrete H1 variant with the plain (v_0 - v_b) facet penalty."""
    acc = 0.0
    for c in range(mesh.n_cells):
        G = weak_gradient(mesh, field, c)
        acc += mesh.cell_measure[c] * (G * G).sum()
        hs = mesh.cell_measure[c] ** (1.0 / mesh.dim)
        for fi, _, meas, _ in mesh.cell_facets(c):
            pts, wts = mesh.facet_quadrature(fi, order=FACE_ORDER, npts=FACET_NPTS)
            diff = field.eval_interior(c, pts) - field.facet_value(fi)
            acc += (wts * (diff * diff).sum(axis=1)).sum() / hs
    return float(np.sqrt(acc))


def l2_interior_norm(mesh, field):
    """sqrt(sum_T int |v_0|^2)."""
    M = cell_mass_matrices(mesh)
    d = mesh.dim
    coeffs = field.values[:field.layout.n_interior].reshape(mesh.n_cells, d, d + 1)
    acc = np.einsum('cak,ckj,caj->', coeffs, M, coeffs)
    return float(np.sqrt(acc))


def l2_pressure_error(mesh, p_h, p_exact):
    """sqrt(sum_T int (p_h|_T - p_exact)^2) by quadrature."""
    cache = CellQuadratureCache(mesh, CELL_ORDER)
    diff = p_h.values[cache.owner] - np.asarray(p_exact(cache.pts))
    return float(np.sqrt((cache.wts * diff * diff).sum()))
