"""Convergence studies: per-level errors, rates and table output."""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import divfree, solve, wg
from .generators import (generate_hanging_node, generate_mixed_polygonal,
                         generate_rectangular, generate_triangular)

FAMILIES = {
    "rectangular": generate_rectangular,
    "triangular": generate_triangular,
    "mixed": generate_mixed_polygonal,
    "hanging": generate_hanging_node,
}


@dataclass
class ConvergenceRow:
    h: float
    tb_err: float
    tb_rate: float
    l2_err: float
    l2_rate: float
    p_err: float
    p_rate: float
    h1_alt_err: float = math.nan


@dataclass
class ConvergenceReport:
    case: str
    family: str
    rows: list = field(default_factory=list)
    overall: dict = field(default_factory=dict)

    def finalize(self):
        hs = np.array([r.h for r in self.rows])
        for key in ("tb", "l2", "p"):
            errs = np.array([getattr(r, key + "_err") for r in self.rows])
            rates = np.full(len(errs), math.nan)
            for i in range(1, len(errs)):
                rates[i] = math.log(errs[i - 1] / errs[i]) / math.log(hs[i - 1] / hs[i])
            for r, rate in zip(self.rows, rates):
                setattr(r, key + "_rate", rate)
            slope = np.polyfit(np.log(hs), np.log(errs), 1)[0] if len(hs) > 1 else math.nan
            self.overall[key + "_rate"] = float(slope)
            self.overall[key + "_last_rate"] = float(rates[-1])
        return self

    def to_markdown(self):
        lines = [f"Case {self.case} on {self.family} meshes",
                 "| h | energy err | rate | L2 err | rate | p err | rate |",
                 "|---|---|---|---|---|---|---|"]
        for r in self.rows:
            lines.append(
                "| {:.5g} | {:.5g} | {:.5g} | {:.5g} | {:.5g} | {:.5g} | {:.5g} |"
                .format(r.h, r.tb_err, r.tb_rate, r.l2_err, r.l2_rate,
                        r.p_err, r.p_rate))
        lines.append("| rate (regression) | | {:.5g} | | {:.5g} | | {:.5g} |".format(
            self.overall["tb_rate"], self.overall["l2_rate"], self.overall["p_rate"]))
        return "\n".join(lines)

    def to_csv(self, stream=None):
        own = stream is None
        stream = stream or io.StringIO()
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["h", "h1_err", "h1_rate", "l2_err", "l2_rate",
                    "p_err", "p_rate"])
        for r in self.rows:
            w.writerow([repr(float(v)) for v in
                        (r.h, r.tb_err, r.tb_rate, r.l2_err, r.l2_rate,
                         r.p_err, r.p_rate)])
        return stream.getvalue() if own else None

    @staticmethod
    def from_csv(text):
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append(ConvergenceRow(
                h=float(rec["h"]), tb_err=float(rec["h1_err"]),
                tb_rate=float(rec["h1_rate"]), l2_err=float(rec["l2_err"]),
                l2_rate=float(rec["l2_rate"]), p_err=float(rec["p_err"]),
                p_rate=float(rec["p_rate"])))
        rep = ConvergenceReport(case="", family="", rows=rows)
        return rep


def solve_case(mesh, case, use_saddle=False, solver="direct"):
    """Assemble, solve and project on one mesh; returns a result bundle."""
    forms = wg.assemble_forms(mesh, f=case.f)
    lay = forms.layout
    bc = None
    if not case.homogeneous:
        bc = wg.apply_dirichlet(mesh, lay, case.g)
    else:
        bc = np.zeros(lay.n_total - lay.n_free)
    if use_saddle:
        sol = solve.solve_saddle(forms, bc)
        p_h = sol.pressure
        jump_resid = 0.0
    else:
        basis = divfree.build_divfree_basis(mesh, lay)
        sol = solve.solve_reduced(forms, basis, bc, solver=solver)
        p_h, jump_resid = solve.recover_pressure(forms, sol.velocity)
        sol.pressure = p_h
        sol.jump_residual = jump_resid
    return forms, sol


def compute_errors(mesh, forms, sol, case):
    """Triple-bar, alternative H1, velocity L2 and pressure L2 errors."""
    q_h = wg.project_velocity(mesh, case.u, forms.layout)
    diff = wg.WgField(forms.layout, sol.velocity.values - q_h.values)
    tb = wg.triple_bar_norm(forms, diff)
    h1 = wg.h1_discrete_norm(mesh, diff)
    l2 = wg.l2_interior_norm(mesh, diff)
    p_err = wg.l2_pressure_error(mesh, sol.pressure, case.p)
    return {"tb": tb, "h1_alt": h1, "l2": l2, "p": p_err}


def run_convergence(case, family, levels, solver="direct", start=0,
                    progress=None):
    """Run the reduced solver over a level sequence and tabulate errors.

    rectangular/triangular levels are n = 4, 8, 16, ...; mixed levels are
    refinement depths; hanging levels are n = 4, 8, 16, ...
    """
    gen = FAMILIES[family]
    report = ConvergenceReport(case=case.name, family=family)
    for lv in range(start, start + levels):
        if family == "mixed":
            mesh = gen(lv)
        else:
            mesh = gen(4 * 2**lv)
        h = float(mesh.cell_diameter.max()) if family == "mixed" \
            else 1.0 / (4 * 2**lv)
        forms, sol = solve_case(mesh, case, solver=solver)
        errs = compute_errors(mesh, forms, sol, case)
        report.rows.append(ConvergenceRow(
            h=h, tb_err=errs["tb"], tb_rate=math.nan,
            l2_err=errs["l2"], l2_rate=math.nan,
            p_err=errs["p"], p_rate=math.nan,
            h1_alt_err=errs["h1_alt"]))
        if progress:
            progress(lv, report.rows[-1])
    return report.finalize()
