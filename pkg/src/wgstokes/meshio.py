"""Mesh file I/O: JSON mesh format and legacy ASCII VTK export.

JSON schema: {"dim": 2|3, "vertices": [[x, y(, z)], ...], "cells": [...]}
where a 2D cell is a CCW vertex loop and a 3D cell is a list of
outward-oriented face vertex loops.
"""

import json

import numpy as np

from .mesh import Mesh, MeshError


class MeshFileError(MeshError):
    pass


def save_mesh(mesh, path):
    if mesh.dim == 2:
        cells = [list(loop) for loop in mesh.cells]
    else:
        cells = [[list(loop) for loop in faces] for faces in mesh.cell_faces]
    doc = {
        "dim": mesh.dim,
        "vertices": [list(v) for v in mesh.vertices.tolist()],
        "cells": cells,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_mesh(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MeshFileError(
                f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    for key in ("dim", "vertices", "cells"):
        if key not in doc:
            raise MeshFileError(f"{path}: missing field '{key}'")
    dim = doc["dim"]
    if dim not in (2, 3):
        raise MeshFileError(f"{path}: dim must be 2 or 3, got {dim!r}")
    verts = np.asarray(doc["vertices"], dtype=float)
    if verts.ndim != 2 or verts.shape[1] != dim:
        raise MeshFileError(f"{path}: vertices must be an N x {dim} array")
    if not doc["cells"]:
        raise MeshFileError(f"{path}: empty cell list")
    try:
        return Mesh(dim, verts, doc["cells"])
    except MeshError as exc:
        raise MeshFileError(f"{path}: {exc}") from exc


def export_vtk(mesh, path, cell_velocity=None, cell_pressure=None):
    """Legacy ASCII VTK unstructured grid with optional per-cell fields."""
    lines = [
        "# vtk DataFile Version 3.0",
        "wgstokes mesh",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
    ]
    nv = len(mesh.vertices)
    lines.append(f"POINTS {nv} double")
    for v in mesh.vertices:
        x, y = v[0], v[1]
        z = v[2] if mesh.dim == 3 else 0.0
        lines.append(f"{x:.17g} {y:.17g} {z:.17g}")

    if mesh.dim == 2:
        conn = [list(loop) for loop in mesh.cells]
        total = sum(len(c) + 1 for c in conn)
        lines.append(f"CELLS {len(conn)} {total}")
        for c in conn:
            lines.append(" ".join(map(str, [len(c)] + c)))
        lines.append(f"CELL_TYPES {len(conn)}")
        lines.extend("7" for _ in conn)  # VTK_POLYGON
    else:
        # VTK_POLYHEDRON: n_total, n_faces, then per face: n_pts, ids
        conn = []
        for faces in mesh.cell_faces:
            rec = [len(faces)]
            for loop in faces:
                rec.append(len(loop))
                rec.extend(loop)
            conn.append(rec)
        total = sum(len(r) + 1 for r in conn)
        lines.append(f"CELLS {len(conn)} {total}")
        for r in conn:
            lines.append(" ".join(map(str, [len(r)] + r)))
        lines.append(f"CELL_TYPES {len(conn)}")
        lines.extend("42" for _ in conn)  # VTK_POLYHEDRON

    if cell_velocity is not None or cell_pressure is not None:
        lines.append(f"CELL_DATA {mesh.n_cells}")
    if cell_velocity is not None:
        lines.append("VECTORS velocity double")
        for row in np.asarray(cell_velocity, dtype=float):
            x, y = row[0], row[1]
            z = row[2] if len(row) == 3 else 0.0
            lines.append(f"{x:.17g} {y:.17g} {z:.17g}")
    if cell_pressure is not None:
        lines.append("SCALARS pressure double 1")
        lines.append("LOOKUP_TABLE default")
        for p in np.asarray(cell_pressure, dtype=float):
            lines.append(f"{p:.17g}")

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
