"""Wavefront OBJ export of nets, plane envelopes and sphere congruences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import NetFormatError
from .netio import NetDocument, plane_net


@dataclass
class ObjOptions:
    subdivision: int = 1
    precision: int = 17


@lru_cache(maxsize=8)
def icosphere(subdivision: int = 1):
    """Unit icosphere: ``(vertices, triangles)``; subdivision 0 is the icosahedron."""
    t = (1.0 + 5 ** 0.5) / 2.0
    v = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(p, dtype=float) / np.linalg.norm(p) for p in v]
    for _ in range(subdivision):
        cache: dict[tuple[int, int], int] = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                p = verts[a] + verts[b]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(verts), np.array(faces)


def grid_quads(extents) -> list[tuple[int, int, int, int]]:
    """Quadrilaterals (0-based, lattice order) of every elementary 2-face of a box."""
    extents = tuple(extents)
    m = len(extents)
    index = np.arange(int(np.prod(extents))).reshape(extents)
    quads = []
    for i, j in itertools.combinations(range(m), 2):
        for u in itertools.product(*(range(n - 1 if k in (i, j) else n) for k, n in enumerate(extents))):
            ui = list(u)
            ui[i] += 1
            uij = list(ui)
            uij[j] += 1
            uj = list(u)
            uj[j] += 1
            quads.append((int(index[u]), int(index[tuple(ui)]), int(index[tuple(uij)]), int(index[tuple(uj)])))
    return quads


def mesh_of(doc: NetDocument, options: ObjOptions | None = None):
    """``(vertices, faces)`` of a document, faces as tuples of 0-based indices."""
    options = options or ObjOptions()
    if doc.kind == "euclidean":
        v = doc.array("vertices")
        return v.reshape(-1, v.shape[-1]), grid_quads(v.shape[:-1])
    if doc.kind == "plane":
        pts = _envelope_points(doc)
        finite = np.all(np.isfinite(pts.reshape(-1, 3)), axis=1)
        faces = [q for q in grid_quads(pts.shape[:-1]) if all(finite[k] for k in q)]
        return np.nan_to_num(pts.reshape(-1, 3)), faces
    if doc.kind == "sphere":
        unit, tri = icosphere(options.subdivision)
        centers = doc.array("centers").reshape(-1, 3)
        radii = np.abs(doc.array("radii").ravel())
        verts, faces = [], []
        for k, (c, r) in enumerate(zip(centers, radii)):
            verts.append(c + r * unit)
            faces += [tuple(int(x) + k * len(unit) for x in f) for f in tri]
        return np.concatenate(verts) if verts else np.zeros((0, 3)), faces
    raise NetFormatError(f"OBJ export does not support kind {doc.kind!r}")


def _envelope_points(doc):
    from .laguerre import face_envelope_points
    return face_envelope_points(plane_net(doc))


def write_obj(objects, path, options: ObjOptions | None = None) -> None:
    """Write ``objects`` (a document or a list of ``(name, document)``) to one OBJ file.

    Each object gets ``o`` and ``g`` tags; face indices continue across objects.
    """
    options = options or ObjOptions()
    if isinstance(objects, NetDocument):
        objects = [("net", objects)]
    lines = ["# moutardnet OBJ export"]
    offset = 0
    fmt = f"%.{options.precision}g"
    for name, doc in objects:
        verts, faces = mesh_of(doc, options)
        if verts.shape[1] != 3:
            raise NetFormatError(f"OBJ export needs points in R^3, object {name!r} lives in R^{verts.shape[1]}")
        lines += [f"o {name}", f"g {name}"]
        lines += ["v " + " ".join(fmt % x for x in p) for p in verts]
        lines += ["f " + " ".join(str(k + 1 + offset) for k in f) for f in faces]
        offset += len(verts)
    Path(path).write_text("\n".join(lines) + "\n")


export_obj = write_obj
