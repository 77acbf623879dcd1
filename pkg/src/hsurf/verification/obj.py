"""Wavefront OBJ output for meshes."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from hsurf.verification.mesh import TriMesh

logger = logging.getLogger(__name__)


def write_obj(mesh: TriMesh, path: str | Path, normals: bool = True, comment: str | None = None) -> Path:
    """Write ``v``/``vn``/``f`` records with 9 significant digits and 1-indexed faces."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with_vn = normals and mesh.normals is not None
    with path.open("w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
        if with_vn:
            for x, y, z in mesh.normals:
                fh.write(f"vn {x:.9g} {y:.9g} {z:.9g}\n")
        for a, b, c in mesh.triangles + 1:
            if with_vn:
                fh.write(f"f {a}//{a} {b}//{b} {c}//{c}\n")
            else:
                fh.write(f"f {a} {b} {c}\n")
    logger.info(f"Wrote {mesh.n_vertices} vertices and {mesh.n_triangles} faces to {path}")
    return path


def read_obj(path: str | Path) -> TriMesh:
    """Read a triangle OBJ written by :func:`write_obj`.

    Source parameters are not stored in OBJ; ``z`` is NaN and ``sheet`` is 0.
    """
    vertices, normals, faces = [], [], []
    for line in Path(path).read_text().splitlines():
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        tag = tokens[0]
        if tag == "v":
            vertices.append([float(t) for t in tokens[1:4]])
        elif tag == "vn":
            normals.append([float(t) for t in tokens[1:4]])
        elif tag == "f":
            if len(tokens) != 4:
                raise ValueError(f"Only triangular faces are supported, got {line!r}")
            faces.append([int(t.split("/")[0]) - 1 for t in tokens[1:]])
    n = len(vertices)
    return TriMesh(
        np.array(vertices, dtype=float).reshape(n, 3),
        np.array(faces, dtype=int).reshape(-1, 3),
        np.full(n, np.nan + 0j),
        np.zeros(n, dtype=int),
        np.array(normals, dtype=float).reshape(-1, 3) if normals else None,
    )


__all__ = ["read_obj", "write_obj"]
