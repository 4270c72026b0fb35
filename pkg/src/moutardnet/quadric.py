"""T-nets confined to a quadric <y, y> = kappa0.

On a quadric the fourth vertex of a face is determined by the other three:
besides the trivial root a = 0 the Moutard equation has the single solution

    a_12 = <y, y_1 - y_2> / (kappa0 - <y_1, y_2>).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PreconditionError, SingularConfigurationError
from .lattice import EdgeLabels, LatticeBox, face_corners, shifted
from .moutard_core import TNet, _check_axes, complete_quad
from .pseudo_euclidean import Space

TANGENCY_TOL = 1e-12
DEFECT_TOL = 1e-8
REPROJECT_TOL = 1e-13


@dataclass(frozen=True)
class QuadricSpec:
    space: Space
    kappa0: float = 0.0

    def defect(self, y):
        """Relative distance |<y,y> - kappa0| / max(1, |kappa0|, |y|^2) from the quadric."""
        y = np.asarray(y, dtype=float)
        scale = np.maximum(max(1.0, abs(self.kappa0)), np.sum(y * y, axis=-1))
        return np.abs(self.space.norm2(y) - self.kappa0) / scale

    def project(self, y, iterations: int = 3) -> np.ndarray:
        """Newton-project a nearby point onto the quadric along G y."""
        y = np.array(y, dtype=float)
        for _ in range(iterations):
            g = self.space.norm2(y) - self.kappa0
            grad = 2.0 * self.space.lower(y)
            nn = float(grad @ grad)
            if nn == 0.0:
                break
            y = y - g * grad / nn
        return y


class QuadStep(NamedTuple):
    point: np.ndarray
    coefficient: float
    degenerate: bool


def _prepare(spec: QuadricSpec, y, defect_tol):
    y = spec.space.check(y)
    d = float(spec.defect(y))
    if d > defect_tol:
        raise PreconditionError(f"point is off the quadric (relative defect {d:.2e})")
    if d > REPROJECT_TOL:
        y = spec.project(y)
    return y


def quadric_step(y, y1, y2, spec: QuadricSpec, tol: float = TANGENCY_TOL,
                 defect_tol: float = DEFECT_TOL) -> QuadStep:
    """Find the fourth vertex y_12 != y of a T-net face on the quadric.

    If y_1 == y_2 only the trivial root exists; the step then returns y_12 = y
    with ``degenerate=True``.  Near tangency (|kappa0 - <y_1, y_2>| small
    relative to |y_1||y_2|) a ``SingularConfigurationError`` is raised.
    """
    y, y1, y2 = (_prepare(spec, v, defect_tol) for v in (y, y1, y2))
    scale = max(1.0, float(np.linalg.norm(y1) * np.linalg.norm(y2)), abs(spec.kappa0))
    if np.linalg.norm(y1 - y2) <= 1e-14 * max(1.0, float(np.linalg.norm(y1))):
        return QuadStep(y.copy(), 0.0, True)
    den = spec.kappa0 - float(spec.space.inner(y1, y2))
    if abs(den) <= tol * scale:
        raise SingularConfigurationError(f"tangent configuration, kappa0 - <y1, y2> = {den:.3e}")
    a = float(spec.space.inner(y, y1 - y2)) / den
    return QuadStep(complete_quad(y, y1, y2, a), a, False)


def face_coefficients(vertices, spec: QuadricSpec) -> dict[tuple[int, int], np.ndarray]:
    """Closed-form a_ij for every face of a net on the quadric."""
    vertices = np.asarray(vertices, dtype=float)
    m = vertices.ndim - 1
    out = {}
    for i, j in itertools.combinations(range(1, m + 1), 2):
        y, yi, _, yj = face_corners(vertices, i, j)
        den = spec.kappa0 - spec.space.inner(yi, yj)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[(i, j)] = spec.space.inner(y, yi - yj) / den
    return out


def propagate_quadric_tnet(axes: Sequence, spec: QuadricSpec, tol: float = TANGENCY_TOL) -> TNet:
    """Build the T-net on the quadric determined by its values on the coordinate axes.

    Every vertex off the axes is found by :func:`quadric_step` on one face
    ending at it (sweeping by lattice level); the coefficients of all faces are
    then evaluated in closed form.
    """
    axes = _check_axes(axes)
    m = len(axes)
    if m < 2:
        raise ValueError("a T-net needs at least two lattice directions")
    for k, a in enumerate(axes):
        bad = np.argwhere(spec.defect(a) > DEFECT_TOL)
        if bad.size:
            raise PreconditionError(f"axis {k + 1} point {int(bad[0][0])} is off the quadric")
    box = LatticeBox(tuple(len(a) for a in axes))
    y = np.full(box.extents + (spec.space.dim,), np.nan)
    for i, a in enumerate(axes):
        idx = [0] * m
        idx[i] = slice(None)
        y[tuple(idx)] = a
    for u in box.vertices_by_level():
        nz = [k + 1 for k in range(m) if u[k] > 0]
        if len(nz) < 2:
            continue
        i, j = nz[0], nz[1]
        w = shifted(shifted(u, -i), -j)
        try:
            step = quadric_step(y[w], y[shifted(w, i)], y[shifted(w, j)], spec, tol)
        except (SingularConfigurationError, PreconditionError) as exc:
            raise SingularConfigurationError(str(exc), position=w) from exc
        if step.degenerate:
            raise SingularConfigurationError("degenerate face (y_i == y_j)", position=w)
        y[u] = step.point
    return TNet(y, face_coefficients(y, spec))


def cube_completions(y, y1, y2, y3, spec: QuadricSpec) -> np.ndarray:
    """The three values of y_123 obtained from the faces (12), (23), (31) at y_123.

    Rows are ordered: face (1,2) shifted in direction 3, face (2,3) shifted in
    direction 1, face (3,1) shifted in direction 2.
    """
    y12 = quadric_step(y, y1, y2, spec).point
    y23 = quadric_step(y, y2, y3, spec).point
    y13 = quadric_step(y, y1, y3, spec).point
    return np.array([
        quadric_step(y3, y13, y23, spec).point,
        quadric_step(y1, y12, y13, spec).point,
        quadric_step(y2, y23, y12, spec).point,
    ])


def extract_labelling(vertices, spec: QuadricSpec) -> EdgeLabels:
    """Edge functions alpha_i = <y, y_i> of a net on the quadric."""
    if isinstance(vertices, TNet):
        vertices = vertices.vertices
    vertices = np.asarray(vertices, dtype=float)
    m = vertices.ndim - 1
    labels = []
    for i in range(m):
        lo = [slice(None)] * (m + 1)
        hi = [slice(None)] * (m + 1)
        lo[i] = slice(0, vertices.shape[i] - 1)
        hi[i] = slice(1, None)
        labels.append(spec.space.inner(vertices[tuple(lo)], vertices[tuple(hi)]))
    return EdgeLabels(tuple(labels))


def quadric_darboux_transform(net, seed, spec: QuadricSpec, tol: float = TANGENCY_TOL):
    """Darboux transform of a T-net on the quadric, fixed by the transformed origin vertex.

    The pair (net, transform) is the (m+1)-dimensional quadric T-net with
    extent 2 in the new direction.  Returns ``(TNet, b)`` where ``b[i-1]``
    holds the edge functions b_i = a_{i,m+1}.
    """
    vertices = net.vertices if isinstance(net, TNet) else np.asarray(net, dtype=float)
    m = vertices.ndim - 1
    origin = vertices[(0,) * m]
    axes = []
    for i in range(m):
        idx = [0] * m
        idx[i] = slice(None)
        axes.append(vertices[tuple(idx)])
    axes.append(np.stack([origin, np.asarray(seed, dtype=float)]))
    big = propagate_quadric_tnet(axes, spec, tol)
    last = (Ellipsis, 1, slice(None))
    plus_coeffs = {(i, j): a[..., 1] for (i, j), a in big.coefficients.items() if j <= m}
    b = tuple(big.coefficients[(i, m + 1)][..., 0] for i in range(1, m + 1))
    return TNet(big.vertices[last], plus_coeffs), b
