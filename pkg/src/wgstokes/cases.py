"""Manufactured Stokes solutions with analytically derived right-hand sides."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy


@dataclass
class ManufacturedCase:
    name: str
    dim: int
    u: callable          # (n, d) points -> (n, d) velocity
    p: callable          # (n, d) points -> (n,) pressure
    f: callable          # (n, d) points -> (n, d) body force
    g: callable          # boundary trace of u
    div_u: callable
    homogeneous: bool


def _vectorize(exprs, syms):
    funcs = [sympy.lambdify(syms, e, "numpy") for e in exprs]

    def ev(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        cols = [np.broadcast_to(np.asarray(fn(*pts.T), dtype=float), (len(pts),))
                for fn in funcs]
        return np.stack(cols, axis=1)

    return ev


def _scalarize(expr, syms):
    fn = sympy.lambdify(syms, expr, "numpy")

    def ev(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.broadcast_to(np.asarray(fn(*pts.T), dtype=float), (len(pts),))

    return ev


def _build(name, u_exprs, p_expr, syms, homogeneous):
    d = len(syms)
    grad_p = [sympy.diff(p_expr, s) for s in syms]
    lap_u = [sum(sympy.diff(ui, s, 2) for s in syms) for ui in u_exprs]
    f_exprs = [sympy.simplify(-lap_u[i] + grad_p[i]) for i in range(d)]
    div_expr = sympy.simplify(sum(sympy.diff(u_exprs[i], syms[i]) for i in range(d)))
    u = _vectorize(u_exprs, syms)
    return ManufacturedCase(
        name=name,
        dim=d,
        u=u,
        p=_scalarize(p_expr, syms),
        f=_vectorize(f_exprs, syms),
        g=u,
        div_u=_scalarize(div_expr, syms),
        homogeneous=homogeneous,
    )


@lru_cache(maxsize=None)
def case1():
    """Homogeneous-boundary polynomial flow on the unit square."""
    x, y = sympy.symbols("x y")
    u1 = 10 * x**2 * y * (x - 1)**2 * (2*y - 1) * (y - 1)
    u2 = -10 * x * y**2 * (2*x - 1) * (x - 1) * (y - 1)**2
    p = 10 * (2*x - 1) * (2*y - 1)
    return _build("case1", (u1, u2), p, (x, y), homogeneous=True)


@lru_cache(maxsize=None)
def case2():
    """Nonhomogeneous-boundary quadratic flow with linear pressure."""
    x, y = sympy.symbols("x y")
    u1 = x * (1 - x) * (1 - 2*y)
    u2 = -y * (1 - y) * (1 - 2*x)
    p = 2 * (y - x)
    return _build("case2", (u1, u2), p, (x, y), homogeneous=False)


@lru_cache(maxsize=None)
def case_smoke3d():
    """Trigonometric divergence-free 3D field for hex-mesh smoke solves."""
    x, y, z = sympy.symbols("x y z")
    u1 = sympy.sin(sympy.pi * y)
    u2 = sympy.sin(sympy.pi * z)
    u3 = sympy.sin(sympy.pi * x)
    p = x + y + z - sympy.Rational(3, 2)
    return _build("smoke3d", (u1, u2, u3), p, (x, y, z), homogeneous=False)


def get_case(name):
    table = {"1": case1, "2": case2, "case1": case1, "case2": case2,
             "smoke3d": case_smoke3d}
    if str(name) not in table:
        raise KeyError(f"unknown manufactured case {name!r}")
    return table[str(name)]()


def finite_difference_f(case, pts, h=1e-3):
    """4th-order central-difference oracle for -lap(u) + grad(p)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    d = case.dim
    out = np.zeros((len(pts), d))
    stencil = [(-2, -1.0 / 12), (-1, 4.0 / 3), (0, -5.0 / 2),
               (1, 4.0 / 3), (2, -1.0 / 12)]
    dstencil = [(-2, 1.0 / 12), (-1, -2.0 / 3), (1, 2.0 / 3), (2, -1.0 / 12)]
    lap = np.zeros((len(pts), d))
    for axis in range(d):
        for off, w in stencil:
            q = pts.copy()
            q[:, axis] += off * h
            lap += w * case.u(q)
    lap /= h * h
    grad_p = np.zeros((len(pts), d))
    for axis in range(d):
        acc = np.zeros(len(pts))
        for off, w in dstencil:
            q = pts.copy()
            q[:, axis] += off * h
            acc += w * case.p(q)
        grad_p[:, axis] = acc / h
    return -lap + grad_p
