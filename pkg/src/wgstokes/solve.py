"""Linear solvers, the reduced divergence-free solve, the saddle-point
cross-check, and pressure recovery by dual-graph tree integration."""

import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import MeshError
from .wg import WgField, PressureField

DENSE_LIMIT = 2000
CG_TOL = 1e-12


class SolverError(Exception):
    pass


@dataclass
class SolverStats:
    method: str = ""
    iterations: int = 0
    residual: float = 0.0
    wall_time: float = 0.0
    reduced_dim: int = 0
    removed_unknowns: int = 0


@dataclass
class StokesSolution:
    velocity: WgField
    pressure: PressureField = None
    stats: SolverStats = field(default_factory=SolverStats)
    jump_residual: float = 0.0


def cholesky_solve(M, rhs):
    """Direct SPD solve; dense Cholesky when small, sparse LU otherwise."""
    n = M.shape[0]
    if n <= DENSE_LIMIT:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M)
        try:
            L = np.linalg.cholesky(0.5 * (dense + dense.T))
        except np.linalg.LinAlgError as exc:
            raise SolverError("matrix is not positive definite") from exc
        y = np.linalg.solve(L, rhs)
        return np.linalg.solve(L.T, y)
    Mc = sp.csc_matrix(M)
    if Mc.diagonal().min() <= 0:
        raise SolverError("matrix is not positive definite")
    try:
        lu = spla.splu(Mc)
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise SolverError(f"sparse factorization failed: {exc}") from exc
    nr = np.linalg.norm(Mc @ x - rhs)
    if not np.isfinite(nr) or nr > 1e-6 * max(np.linalg.norm(rhs), 1.0):
        raise SolverError("factorization produced an inaccurate solution "
                          "(matrix likely not SPD)")
    return x


def cg_solve(M, rhs, tol=CG_TOL, max_iter=None):
    """Jacobi-preconditioned conjugate gradients; deterministic."""
    n = M.shape[0]
    if max_iter is None:
        max_iter = 10 * n
    dinv = 1.0 / M.diagonal()
    x = np.zeros(n)
    r = rhs - M @ x
    z = dinv * r
    p = z.copy()
    rz = r @ z
    nrhs = np.linalg.norm(rhs)
    if nrhs == 0:
        return x, 0
    history = []
    for k in range(max_iter):
        res = np.linalg.norm(r)
        history.append(res)
        if res <= tol * nrhs:
            return x, k
        Mp = M @ p
        alpha = rz / (p @ Mp)
        x += alpha * p
        r -= alpha * Mp
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(
        f"CG did not converge in {max_iter} iterations; "
        f"last residuals {history[-3:]}")


def _dual_tree(mesh):
    """BFS spanning tree of the dual graph from cell 0.

    Returns (parent cell, parent facet) per cell and the BFS order.
    """
    adj = [[] for _ in range(mesh.n_cells)]
    for fi in mesh.interior_facets:
        c0, c1 = mesh.facets[fi].cells
        adj[c0].append((c1, fi))
        adj[c1].append((c0, fi))
    parent = [None] * mesh.n_cells
    parent_facet = [None] * mesh.n_cells
    order = [0]
    seen = [False] * mesh.n_cells
    seen[0] = True
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for nb, fi in sorted(adj[c]):
            if not seen[nb]:
                seen[nb] = True
                parent[nb] = c
                parent_facet[nb] = fi
                order.append(nb)
                queue.append(nb)
    if not all(seen):
        raise MeshError("dual graph is disconnected")
    return parent, parent_facet, order


def lift_boundary(forms, bc_values):
    """Field with prescribed boundary slots and zero free slots."""
    lay = forms.layout
    lift = WgField(lay)
    if bc_values is not None:
        lift.values[lay.n_free:] = bc_values
    return lift


def divfree_correction(forms, bc_values):
    """Particular free-slot field cancelling the lift's per-cell divergence.

    Routes the boundary fluxes through normal facet functions on a
    spanning tree of the dual graph.  Returns the zero field when the
    lift is already discretely divergence free.
    """
    lay = forms.layout
    mesh = lay.mesh
    up = np.zeros(lay.n_free)
    if bc_values is None:
        return up
    resid = forms.B[:, lay.n_free:] @ bc_values
    if np.abs(resid).max() <= 1e-10 * max(1.0, np.abs(bc_values).max()):
        return up
    if abs(resid.sum()) > 1e-9 * np.abs(resid).max() * mesh.n_cells:
        raise SolverError("boundary data has nonzero net flux; "
                          "no divergence-free lift exists")
    parent, parent_facet, order = _dual_tree(mesh)
    target = -resid
    subtree = target.copy()
    for c in reversed(order):
        if parent[c] is not None:
            subtree[parent[c]] += subtree[c]
    # tree facet between c and parent carries the subtree imbalance of c
    for c in order:
        if parent[c] is None:
            continue
        fi = parent_facet[c]
        f = mesh.facets[fi]
        # B row entries: +|e| n for lower cell, -|e| n for higher cell
        sign = 1.0 if f.cells[0] == c else -1.0
        alpha = sign * subtree[c] / f.measure
        s = lay.facet_slot[fi]
        up[s:s + mesh.dim] += alpha * f.normal
    return up


def solve_reduced(forms, basis, bc_values=None, solver="direct"):
    """Divergence-free solve: (C^T A C) y = C^T (F - A u_lift), u = u_lift + C y."""
    lay = forms.layout
    t0 = time.perf_counter()
    A_ff, A_fb, B_f, B_b = forms.split()
    C = basis.matrix
    up = divfree_correction(forms, bc_values)
    rhs_free = forms.F[:lay.n_free] - A_ff @ up
    if bc_values is not None:
        rhs_free -= A_fb @ bc_values
    M = (C.T @ (A_ff @ C)).tocsc()
    M = 0.5 * (M + M.T)
    rhs = C.T @ rhs_free
    stats = SolverStats(method=solver, reduced_dim=M.shape[0],
                        removed_unknowns=lay.n_free - M.shape[0])
    if solver == "cg":
        y, stats.iterations = cg_solve(M, rhs)
    else:
        y = cholesky_solve(M, rhs)
    stats.residual = float(np.linalg.norm(M @ y - rhs))
    u = WgField(lay)
    u.values[:lay.n_free] = up + C @ y
    if bc_values is not None:
        u.values[lay.n_free:] = bc_values
    stats.wall_time = time.perf_counter() - t0
    return StokesSolution(velocity=u, stats=stats)


def solve_saddle(forms, bc_values=None):
    """Indefinite velocity-pressure solve with a mean-zero multiplier row."""
    lay = forms.layout
    mesh = lay.mesh
    t0 = time.perf_counter()
    A_ff, A_fb, B_f, B_b = forms.split()
    nf = lay.n_free
    nc = mesh.n_cells
    w = sp.csc_matrix(mesh.cell_measure[:, None])
    K = sp.bmat([[A_ff, -B_f.T, None],
                 [B_f, None, w],
                 [None, w.T, None]], format="csc")
    rhs = np.zeros(nf + nc + 1)
    rhs[:nf] = forms.F[:nf]
    if bc_values is not None:
        rhs[:nf] -= A_fb @ bc_values
        rhs[nf:nf + nc] -= B_b @ bc_values
    try:
        x = spla.splu(K).solve(rhs)
    except RuntimeError as exc:
        raise SolverError(f"saddle system is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("saddle system is singular")
    u = WgField(lay)
    u.values[:nf] = x[:nf]
    if bc_values is not None:
        u.values[nf:] = bc_values
    p = PressureField(mesh, x[nf:nf + nc].copy()).remove_mean()
    stats = SolverStats(method="saddle", reduced_dim=nf + nc,
                        wall_time=time.perf_counter() - t0)
    return StokesSolution(velocity=u, pressure=p, stats=stats)


def recover_pressure(forms, u_h):
    """Pressure from inter-cell jumps of normal facet test functions.

    For the facet normal function on interior facet e the divergence form
    gives |e| (p_low - p_high), and the momentum equation supplies the
    jump from a(u_h, .) alone since the test function has no interior
    part.  Jumps are integrated along a BFS spanning tree of the dual
    graph; off-tree jump mismatches are returned as a diagnostic.
    """
    lay = forms.layout
    mesh = lay.mesh
    g = forms.A @ u_h.values
    jump = {}
    for fi in mesh.interior_facets:
        s = lay.facet_slot[fi]
        f = mesh.facets[fi]
        jump[fi] = float(g[s:s + mesh.dim] @ f.normal) / f.measure
    parent, parent_facet, order = _dual_tree(mesh)
    p = np.zeros(mesh.n_cells)
    for c in order:
        if parent[c] is None:
            continue
        fi = parent_facet[c]
        f = mesh.facets[fi]
        lo, hi = f.cells
        if c == hi:
            p[hi] = p[lo] - jump[fi]
        else:
            p[lo] = p[hi] + jump[fi]
    tree_facets = {fi for fi in parent_facet if fi is not None}
    resid = 0.0
    for fi in mesh.interior_facets:
        if fi in tree_facets:
            continue
        lo, hi = mesh.facets[fi].cells
        resid = max(resid, abs(p[lo] - p[hi] - jump[fi]))
    field = PressureField(mesh, p).remove_mean()
    return field, resid
