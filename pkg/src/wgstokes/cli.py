"""Command line front end.

Subcommands: mesh gen, verify-basis, solve, convergence, euler-check.
Exit codes: 0 success, 1 verification or solver failure, 2 usage error.
"""

import argparse
import sys

import numpy as np

from . import cases, convergence, divfree, generators, solve, wg
from .mesh import MeshError
from .meshio import MeshFileError, export_vtk, load_mesh, save_mesh


def _build_parser():
    p = argparse.ArgumentParser(prog="wgstokes")
    sub = p.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("mesh", help="mesh utilities")
    msub = pm.add_subparsers(dest="mesh_command", required=True)
    pg = msub.add_parser("gen", help="generate a mesh and write it as JSON")
    pg.add_argument("family", choices=["rectangular", "triangular", "mixed",
                                       "hanging", "hex"])
    pg.add_argument("params", type=int, nargs="+",
                    help="rectangular/triangular/hanging: n; mixed: level; "
                         "hex: nx ny nz")
    pg.add_argument("-o", "--output", required=True)

    pv = sub.add_parser("verify-basis",
                        help="build the divergence-free basis and verify it")
    pv.add_argument("-m", "--mesh", required=True)
    pv.add_argument("--3d", dest="require_3d", action="store_true",
                    help="fail unless the mesh is three dimensional")
    pv.add_argument("--smoke", action="store_true",
                    help="also run a manufactured solve on the mesh")

    ps = sub.add_parser("solve", help="solve a manufactured case on a mesh")
    ps.add_argument("-m", "--mesh", required=True)
    ps.add_argument("--case", required=True, choices=["1", "2", "smoke3d"])
    ps.add_argument("--saddle", action="store_true",
                    help="use the saddle-point solver instead of the "
                         "reduced one")
    ps.add_argument("--vtk", help="write cell velocity/pressure to a VTK file")

    pc = sub.add_parser("convergence", help="run a mesh refinement study")
    pc.add_argument("--case", required=True, choices=["1", "2"])
    pc.add_argument("--family", required=True,
                    choices=list(convergence.FAMILIES))
    pc.add_argument("--levels", type=int, required=True)
    pc.add_argument("--csv", help="write the table to a CSV file")
    pc.add_argument("--markdown", action="store_true",
                    help="print the table as markdown")

    pe = sub.add_parser("euler-check", help="check the Euler identity")
    pe.add_argument("-m", "--mesh", required=True)
    return p


def _cmd_mesh_gen(args):
    fam, params = args.family, args.params
    counts = {"rectangular": 1, "triangular": 1, "mixed": 1,
              "hanging": 1, "hex": 3}
    if len(params) != counts[fam]:
        print(f"error: family {fam} takes {counts[fam]} parameter(s)",
              file=sys.stderr)
        return 2
    if fam == "rectangular":
        mesh = generators.generate_rectangular(params[0])
    elif fam == "triangular":
        mesh = generators.generate_triangular(params[0])
    elif fam == "mixed":
        mesh = generators.generate_mixed_polygonal(params[0])
    elif fam == "hanging":
        mesh = generators.generate_hanging_node(params[0])
    else:
        mesh = generators.generate_hex(*params)
    save_mesh(mesh, args.output)
    print(f"wrote {args.output}: dim={mesh.dim} cells={mesh.n_cells} "
          f"facets={len(mesh.facets)} vertices={len(mesh.vertices)}")
    return 0


def _cmd_verify_basis(args):
    mesh = load_mesh(args.mesh)
    if args.require_3d and mesh.dim != 3:
        print(f"error: mesh is {mesh.dim}D, expected 3D", file=sys.stderr)
        return 1
    forms = wg.assemble_forms(mesh)
    basis = divfree.build_divfree_basis(mesh, forms.layout)
    report = divfree.verify_basis(forms, basis)
    res = report["max_kernel_residual"]
    print(f"dim = {report['n_columns']} (expected {report['expected_dim']}), "
          f"kernel residual = {res:.3e}, "
          f"rank {'OK' if report['rank_ok'] else 'FAIL'}, "
          f"gram min eig = {report['gram_min_eig']:.3e}")
    ok = report["ok"]
    if args.smoke:
        case = cases.case_smoke3d() if mesh.dim == 3 else cases.case1()
        forms_f = wg.assemble_forms(mesh, f=case.f)
        bc = wg.apply_dirichlet(mesh, forms_f.layout, case.g)
        sol = solve.solve_reduced(forms_f, basis, bc)
        q_h = wg.project_velocity(mesh, case.u, forms_f.layout)
        diff = wg.WgField(forms_f.layout, sol.velocity.values - q_h.values)
        err = wg.triple_bar_norm(forms_f, diff)
        ref = max(wg.triple_bar_norm(forms_f, q_h), 1.0)
        print(f"smoke solve: energy error = {err:.3e} "
              f"(relative {err / ref:.3e})")
        ok = ok and np.isfinite(err)
    return 0 if ok else 1


def _cmd_solve(args):
    mesh = load_mesh(args.mesh)
    case = cases.get_case(args.case)
    if case.dim != mesh.dim:
        print(f"error: case {case.name} is {case.dim}D but the mesh is "
              f"{mesh.dim}D", file=sys.stderr)
        return 1
    forms, sol = convergence.solve_case(mesh, case, use_saddle=args.saddle)
    errs = convergence.compute_errors(mesh, forms, sol, case)
    print(f"cells = {mesh.n_cells}, free velocity dofs = "
          f"{forms.layout.n_free}")
    print(f"energy error = {errs['tb']:.6e}")
    print(f"velocity L2 error = {errs['l2']:.6e}")
    print(f"pressure L2 error = {errs['p']:.6e}")
    if not args.saddle:
        print(f"pressure jump residual = {sol.jump_residual:.3e}")
    if args.vtk:
        vel = np.array([sol.velocity.cell_average(c)
                        for c in range(mesh.n_cells)])
        export_vtk(mesh, args.vtk, cell_velocity=vel,
                   cell_pressure=sol.pressure.values)
        print(f"wrote {args.vtk}")
    return 0


def _cmd_convergence(args):
    case = cases.get_case(args.case)
    report = convergence.run_convergence(case, args.family, args.levels)
    if args.markdown:
        print(report.to_markdown())
    else:
        print(report.to_csv(), end="")
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(report.to_csv())
    return 0


def _cmd_euler_check(args):
    mesh = load_mesh(args.mesh)
    if not mesh.euler_check():
        print("Euler identity FAILED")
        return 1
    if mesh.dim == 2 and _has_hanging_nodes(mesh):
        print("OK (hanging nodes counted as vertices)")
    else:
        print("OK")
    return 0


def _has_hanging_nodes(mesh):
    """A 2D cell with three collinear consecutive loop vertices has a
    hanging node in the middle."""
    for loop in mesh.cells:
        k = len(loop)
        for i in range(k):
            a = mesh.vertices[loop[i - 1]]
            b = mesh.vertices[loop[i]]
            c = mesh.vertices[loop[(i + 1) % k]]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) < 1e-12 * max(np.abs(c - a).max(), 1.0):
                return True
    return False


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "mesh":
            return _cmd_mesh_gen(args)
        if args.command == "verify-basis":
            return _cmd_verify_basis(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        return _cmd_euler_check(args)
    except (MeshError, MeshFileError, solve.SolverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
