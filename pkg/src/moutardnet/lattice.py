"""Finite boxes in Z^m and fields on their vertices, edges and faces.

Lattice directions are numbered 1..m as in the usual shift notation
f_i = f(u + e_i); a negative direction -i means the backward shift.  Vertex
fields are numpy arrays of shape ``extents + (dim,)``.  Edge functions in
direction i have extent ``n_i - 1`` along axis i; face functions for the pair
(i, j) have extents ``n_i - 1`` and ``n_j - 1`` along those axes.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import BoundaryError
from .report import VerificationReport

_THREADS = max(1, int(os.environ.get("MOUTARDNET_THREADS", "1")))


def set_threads(n: int) -> None:
    """Cap the number of worker threads certifiers use for per-cell checks."""
    global _THREADS
    _THREADS = max(1, int(n))


def map_cells(fn, cells):
    """Apply ``fn`` to every cell, in parallel when more than one thread is allowed.

    Results come back in input order, so reports stay deterministic.
    """
    cells = list(cells)
    if _THREADS == 1 or len(cells) < 64:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=_THREADS) as pool:
        return list(pool.map(fn, cells))


@dataclass(frozen=True)
class LatticeBox:
    extents: tuple[int, ...]

    def __post_init__(self):
        ext = tuple(int(n) for n in self.extents)
        if not ext or any(n < 1 for n in ext):
            raise ValueError(f"invalid extents {self.extents}")
        object.__setattr__(self, "extents", ext)

    @property
    def dimension(self) -> int:
        return len(self.extents)

    @property
    def size(self) -> int:
        return int(np.prod(self.extents))

    def contains(self, index) -> bool:
        return len(index) == self.dimension and all(0 <= u < n for u, n in zip(index, self.extents))

    def vertices(self) -> Iterator[tuple[int, ...]]:
        """All multi-indices in row-major lexicographic order."""
        return itertools.product(*(range(n) for n in self.extents))

    def vertices_by_level(self) -> list[tuple[int, ...]]:
        """Vertices sorted by coordinate sum (ties lexicographic): a valid propagation order."""
        return sorted(self.vertices(), key=lambda u: (sum(u), u))

    def edge_shape(self, direction: int) -> tuple[int, ...]:
        i = _axis(direction, self.dimension)
        return tuple(n - 1 if k == i else n for k, n in enumerate(self.extents))

    def face_shape(self, i: int, j: int) -> tuple[int, ...]:
        a, b = _axis(i, self.dimension), _axis(j, self.dimension)
        return tuple(n - 1 if k in (a, b) else n for k, n in enumerate(self.extents))


def box_of(values) -> LatticeBox:
    """The box of a vertex field ``values`` with trailing vector axis."""
    return LatticeBox(np.shape(values)[:-1])


def _axis(direction: int, m: int) -> int:
    if direction == 0 or abs(direction) > m:
        raise ValueError(f"direction {direction} out of range 1..{m}")
    return abs(direction) - 1


def unit(direction: int, m: int) -> tuple[int, ...]:
    """Signed unit multi-index +-e_i."""
    e = [0] * m
    e[_axis(direction, m)] = 1 if direction > 0 else -1
    return tuple(e)


def shifted(index, direction: int, steps: int = 1) -> tuple[int, ...]:
    u = list(index)
    a = _axis(direction, len(u))
    u[a] += steps if direction > 0 else -steps
    return tuple(u)


def shift(values, index, direction: int):
    """Value of the field at ``index`` shifted by one step in ``direction`` (signed, 1-based)."""
    box = box_of(values)
    if not box.contains(index):
        raise BoundaryError(index)
    target = shifted(index, direction)
    if not box.contains(target):
        raise BoundaryError(target)
    return np.asarray(values)[target]


def elementary_cells(box: LatticeBox, dims: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Base vertices of every 2-face (or 3-cube, ...) spanned by ``dims``.

    Each cell is yielded exactly once, in lexicographic order of its base
    vertex.  A box of extent 1 in one of ``dims`` has no such cells.
    """
    dims = tuple(dims)
    if len(set(abs(d) for d in dims)) != len(dims):
        raise ValueError(f"repeated directions in {dims}")
    axes = {_axis(d, box.dimension) for d in dims}
    ranges = [range(n - 1) if k in axes else range(n) for k, n in enumerate(box.extents)]
    return itertools.product(*ranges)


def face_vertices(index, i: int, j: int):
    """Multi-indices (u, u+e_i, u+e_i+e_j, u+e_j) of a face."""
    u = tuple(index)
    ui = shifted(u, i)
    uj = shifted(u, j)
    return u, ui, shifted(ui, j), uj


def interior_vertices(box: LatticeBox, dims=(1, 2)) -> Iterator[tuple[int, ...]]:
    """Vertices whose full 3x3 star in the directions ``dims`` lies in the box."""
    axes = {_axis(d, box.dimension) for d in dims}
    ranges = [range(1, n - 1) if k in axes else range(n) for k, n in enumerate(box.extents)]
    return itertools.product(*ranges)


@dataclass
class EdgeLabels:
    """Per-direction edge functions alpha_i, stored as arrays of the edge shape."""

    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.values = tuple(np.asarray(v, dtype=float) for v in self.values)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def __getitem__(self, direction: int) -> np.ndarray:
        return self.values[_axis(direction, self.dimension)]

    @classmethod
    def from_functions(cls, extents, per_direction) -> "EdgeLabels":
        """Labels alpha_i(u) = per_direction[i-1][u_i], i.e. depending on u_i only."""
        box = LatticeBox(extents)
        vals = []
        for i, seq in enumerate(per_direction, start=1):
            seq = np.asarray(seq, dtype=float)
            if np.ndim(seq) == 0:
                seq = np.full(box.extents[i - 1] - 1, float(seq))
            shape = [1] * box.dimension
            shape[i - 1] = -1
            vals.append(np.broadcast_to(seq.reshape(shape), box.edge_shape(i)).copy())
        return cls(tuple(vals))


def check_labelling(labels: EdgeLabels, tol: float = 1e-9) -> VerificationReport:
    """Certify that opposite edges of every elementary square carry equal labels.

    The residual on a face is the larger of its two opposite-edge defects,
    measured relative to max(|a|, |b|, largest label magnitude).
    """
    m = labels.dimension
    extents = tuple(labels.values[0].shape[k] + (1 if k == 0 else 0) for k in range(m))
    box = LatticeBox(extents)
    scale = max((float(np.max(np.abs(v))) for v in labels.values if v.size), default=0.0)
    scale = scale if scale > 0 else 1.0
    residuals: dict[tuple[int, ...], float] = {}
    for i, j in itertools.combinations(range(1, m + 1), 2):
        for u in elementary_cells(box, (i, j)):
            uj = shifted(u, j)
            ui = shifted(u, i)
            a, b = labels[i][u], labels[i][uj]
            c, d = labels[j][u], labels[j][ui]
            r = max(abs(a - b) / max(abs(a), abs(b), scale), abs(c - d) / max(abs(c), abs(d), scale))
            key = u if m == 2 else u + (i, j)
            residuals[key] = r
    report = VerificationReport.from_residuals("labelling", residuals, tol)
    if report.witnesses:
        report.details["worst_face"] = list(report.witnesses[0])
    return report


def face_corners(values, i: int, j: int, trailing: int = 1):
    """Arrays (y, y_i, y_ij, y_j) over all faces spanned by directions i, j.

    ``trailing`` is the number of value axes after the lattice axes (1 for
    vector fields, 0 for scalar fields).
    """
    values = np.asarray(values)
    m = values.ndim - trailing
    a, b = _axis(i, m), _axis(j, m)

    def corner(da, db):
        idx = [slice(None)] * values.ndim
        idx[a] = slice(da, values.shape[a] - 1 + da)
        idx[b] = slice(db, values.shape[b] - 1 + db)
        return values[tuple(idx)]

    return corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)
