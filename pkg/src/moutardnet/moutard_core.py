"""T-nets: the discrete Moutard equation y_ij - y = a_ij (y_j - y_i) on Z^m.

Face coefficients are stored for i < j only; ``TNet.coefficient(j, i)``
returns ``-a_ij``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InternalConsistencyError, PreconditionError, SingularConfigurationError
from .lattice import LatticeBox, face_corners, shifted
from .report import VerificationReport

STAR_TRIANGLE_TOL = 1e-12


@dataclass
class TNet:
    """Vertices ``extents + (N,)`` together with face coefficients a_ij (i < j)."""

    vertices: np.ndarray
    coefficients: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.coefficients = normalize_coefficients(self.coefficients)

    @property
    def box(self) -> LatticeBox:
        return LatticeBox(self.vertices.shape[:-1])

    @property
    def dimension(self) -> int:
        return self.vertices.ndim - 1

    def coefficient(self, i: int, j: int) -> np.ndarray:
        if i < j:
            return self.coefficients[(i, j)]
        return -self.coefficients[(j, i)]


def normalize_coefficients(coefficients: Mapping) -> dict[tuple[int, int], np.ndarray]:
    """Re-key a coefficient mapping to i < j, flipping signs of reversed keys."""
    out = {}
    for (i, j), a in coefficients.items():
        if i == j:
            raise ValueError(f"coefficient key ({i}, {j}) repeats a direction")
        a = np.asarray(a, dtype=float)
        out[(i, j) if i < j else (j, i)] = a if i < j else -a
    return out


def complete_quad(y, y_i, y_j, a_ij):
    """Fourth vertex y_ij = y + a_ij (y_j - y_i)."""
    return np.asarray(y) + a_ij * (np.asarray(y_j) - np.asarray(y_i))


def star_triangle(a12, a23, a31, tol: float = STAR_TRIANGLE_TOL):
    """Shifted coefficients across an elementary cube.

    Returns ``(tau_3 a12, tau_1 a23, tau_2 a31)``, listed in the same face
    order as the arguments, each equal to ``-a / (a12 a23 + a23 a31 + a31 a12)``.
    Works on any numeric type (floats, numpy arrays, ``fractions.Fraction``).
    The map is an involution.
    """
    d = a12 * a23 + a23 * a31 + a31 * a12
    if np.any(abs(d) <= tol):
        raise SingularConfigurationError(f"star-triangle denominator {d!r} vanishes")
    return -a12 / d, -a23 / d, -a31 / d


@dataclass
class CubeCompletion:
    y12: np.ndarray
    y23: np.ndarray
    y31: np.ndarray
    y123: np.ndarray
    shifted: tuple[float, float, float]  # (tau_3 a12, tau_1 a23, tau_2 a31)
    candidates: np.ndarray  # y123 computed from each of the three faces at y123
    disagreement: float


def complete_hexahedron(y, y1, y2, y3, a12, a23, a31, tol: float = 1e-10) -> CubeCompletion:
    """Complete an elementary cube of a 3D T-net from its corner star.

    The far vertex is computed independently from each of the three faces
    adjacent to it; they must agree (up to ``tol`` relative to the size of the
    configuration), otherwise ``InternalConsistencyError`` is raised.
    """
    y, y1, y2, y3 = (np.asarray(v, dtype=float) for v in (y, y1, y2, y3))
    t3a12, t1a23, t2a31 = star_triangle(a12, a23, a31)
    ys = {1: y1, 2: y2, 3: y3}
    a = {(1, 2): a12, (2, 3): a23, (3, 1): a31}
    t = {1: t1a23, 2: t2a31, 3: t3a12}
    candidates = []
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        aij, aki = a[(i, j)], a[(k, i)]
        candidates.append(
            (1 + t[i] * (aij + aki)) * ys[i] - t[i] * aij * ys[j] - t[i] * aki * ys[k]
        )
    candidates = np.array(candidates)
    scale = max(1e-300, float(np.max(np.abs(np.concatenate([np.stack([y, y1, y2, y3]), candidates])))))
    spread = max(
        float(np.max(np.abs(candidates[p] - candidates[q]))) for p, q in ((0, 1), (1, 2), (0, 2))
    )
    disagreement = spread / scale
    if disagreement > tol:
        raise InternalConsistencyError(f"cube completions disagree by {disagreement:.3e}")
    return CubeCompletion(
        y12=complete_quad(y, y1, y2, a12),
        y23=complete_quad(y, y2, y3, a23),
        y31=complete_quad(y, y3, y1, a31),
        y123=candidates.mean(axis=0),
        shifted=(t3a12, t1a23, t2a31),
        candidates=candidates,
        disagreement=disagreement,
    )


def _check_axes(axes: Sequence, tol: float = 1e-12):
    axes = [np.atleast_2d(np.asarray(a, dtype=float)) for a in axes]
    origin = axes[0][0]
    for a in axes[1:]:
        if a.shape[1:] != axes[0].shape[1:]:
            raise PreconditionError("axis data have different value dimensions")
        if np.max(np.abs(a[0] - origin)) > tol * max(1.0, float(np.max(np.abs(origin)))):
            raise PreconditionError("axis data must share the origin vertex")
    return axes


def _plane_index(u, i, j):
    return tuple(u[k] if k in (i - 1, j - 1) else 0 for k in range(len(u)))


def _full_coefficients(box: LatticeBox, coefficients: Mapping, tol: float):
    """Evolve coefficient seeds given on the coordinate planes to the whole box."""
    m = box.dimension
    seeds = normalize_coefficients(coefficients)
    full = {}
    for i, j in itertools.combinations(range(1, m + 1), 2):
        if (i, j) not in seeds:
            raise PreconditionError(f"missing coefficient seed for directions ({i}, {j})")
        shape = box.face_shape(i, j)
        arr = np.full(shape, np.nan)
        seed = seeds[(i, j)]
        plane = tuple(shape[k] if k in (i - 1, j - 1) else 1 for k in range(m))
        if seed.ndim == 0:
            arr[tuple(slice(0, n) for n in plane)] = float(seed)
        elif m == 2 or seed.shape == (shape[i - 1], shape[j - 1]):
            arr[tuple(slice(0, n) for n in plane)] = seed.reshape(plane)
        else:
            raise PreconditionError(
                f"seed for ({i}, {j}) must be a scalar or of shape {(shape[i - 1], shape[j - 1])}"
            )
        full[(i, j)] = arr
    if m == 2:
        return full

    def coeff(i, j, u):
        return full[(i, j)][u] if i < j else -full[(j, i)][u]

    for u in box.vertices_by_level():
        for j, k in itertools.combinations(range(1, m + 1), 2):
            if any(u[l] > box.extents[l] - 2 for l in (j - 1, k - 1)):
                continue
            others = [l for l in range(1, m + 1) if l not in (j, k) and u[l - 1] > 0]
            if not others:
                continue
            i = others[0]
            w = shifted(u, -i)
            aij, ajk, aki = coeff(i, j, w), coeff(j, k, w), coeff(k, i, w)
            d = aij * ajk + ajk * aki + aki * aij
            if not abs(d) > tol:
                raise SingularConfigurationError("star-triangle denominator vanishes", position=w)
            full[(j, k)][u] = -ajk / d
    return full


def propagate_tnet(axes: Sequence, coefficients: Mapping, tol: float = STAR_TRIANGLE_TOL) -> TNet:
    """Solve the Goursat problem for an m-dimensional T-net.

    ``axes[i-1]`` holds the vertices y(k e_i), k = 0..n_i-1, all sharing the
    origin vertex.  ``coefficients`` maps direction pairs to seeds: for m = 2
    the full array of a_12 over the faces; for m >= 3 the values of a_jk on
    the coordinate plane spanned by j and k (a scalar seeds a constant).  The
    remaining coefficients follow from the star-triangle map, the remaining
    vertices from the Moutard equation, sweeping by lattice level.
    """
    axes = _check_axes(axes)
    m = len(axes)
    if m < 2:
        raise ValueError("a T-net needs at least two lattice directions")
    box = LatticeBox(tuple(len(a) for a in axes))
    full = _full_coefficients(box, coefficients, tol)
    dim = axes[0].shape[1]
    y = np.full(box.extents + (dim,), np.nan)
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
        y[u] = complete_quad(y[w], y[shifted(w, i)], y[shifted(w, j)], full[(i, j)][w])
    return TNet(y, full)


@dataclass
class MoutardTransformData:
    """Edge functions b_i = a_{i,m+1} and the transformed face coefficients."""

    b: tuple[np.ndarray, ...]
    coefficients: dict[tuple[int, int], np.ndarray]


def moutard_transform(net: TNet, seed, b_axes: Sequence, tol: float = STAR_TRIANGLE_TOL):
    """Discrete Moutard (Darboux) transform y -> y+ of a T-net.

    ``seed`` is y+(0); ``b_axes[i-1]`` gives b_i on the edges of the i-th
    coordinate axis (array of length n_i - 1, or a scalar).  The b_i are
    extended by tau_i b_j = b_j / ((b_i - b_j) a_ij + b_i b_j), the vertices by
    y+_i = y + b_i (y+ - y_i), and a+_ij = a_ij / ((b_i - b_j) a_ij + b_i b_j).

    Returns ``(TNet, MoutardTransformData)``.
    """
    box = net.box
    m = box.dimension
    if len(b_axes) != m:
        raise ValueError(f"need {m} edge seeds b_i, got {len(b_axes)}")
    b = []
    for i in range(1, m + 1):
        arr = np.full(box.edge_shape(i), np.nan)
        seq = np.asarray(b_axes[i - 1], dtype=float)
        if seq.ndim == 0:
            seq = np.full(box.extents[i - 1] - 1, float(seq))
        idx = [0] * m
        idx[i - 1] = slice(None)
        arr[tuple(idx)] = seq
        b.append(arr)

    def denom(i, j, w):
        return (b[i - 1][w] - b[j - 1][w]) * net.coefficient(i, j)[w] + b[i - 1][w] * b[j - 1][w]

    for u in box.vertices_by_level():
        for j in range(1, m + 1):
            if u[j - 1] > box.extents[j - 1] - 2:
                continue
            others = [l for l in range(1, m + 1) if l != j and u[l - 1] > 0]
            if not others:
                continue
            i = others[0]
            w = shifted(u, -i)
            d = denom(i, j, w)
            if not abs(d) > tol:
                raise SingularConfigurationError("transformation denominator vanishes", position=w)
            b[j - 1][u] = b[j - 1][w] / d

    y = net.vertices
    yp = np.full_like(y, np.nan)
    yp[(0,) * m] = np.asarray(seed, dtype=float)
    for u in box.vertices_by_level():
        if not any(u):
            continue
        i = next(k + 1 for k in range(m) if u[k] > 0)
        w = shifted(u, -i)
        yp[u] = y[w] + b[i - 1][w] * (yp[w] - y[u])

    plus = {}
    for (i, j), a in net.coefficients.items():
        d = np.empty_like(a)
        for w in itertools.product(*(range(n) for n in a.shape)):
            d[w] = denom(i, j, w)
        bad = np.argwhere(~(np.abs(d) > tol))
        if bad.size:
            raise SingularConfigurationError("transformation denominator vanishes", position=bad[0])
        plus[(i, j)] = a / d
    return TNet(yp, plus), MoutardTransformData(tuple(b), plus)


def recover_coefficient(y, y_i, y_ij, y_j):
    """Least-squares a_ij for one face, from y_ij - y = a (y_j - y_i).

    Broadcasts over leading axes.  Swapping the roles of i and j negates it.
    """
    d = np.asarray(y_j) - np.asarray(y_i)
    rhs = np.asarray(y_ij) - np.asarray(y)
    dd = np.sum(d * d, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(dd > 0, np.sum(rhs * d, axis=-1) / np.where(dd > 0, dd, 1.0), np.nan)


def recover_coefficients(vertices) -> dict[tuple[int, int], np.ndarray]:
    vertices = np.asarray(vertices, dtype=float)
    m = vertices.ndim - 1
    return {
        (i, j): recover_coefficient(*face_corners(vertices, i, j))
        for i, j in itertools.combinations(range(1, m + 1), 2)
    }


def certify_tnet(net, tol: float = 1e-9, coefficients: Mapping | None = None) -> VerificationReport:
    """Certify that every elementary quadrilateral is planar with parallel diagonals.

    ``net`` is a :class:`TNet` or a bare vertex array.  Without stored
    coefficients they are recovered per face by least squares, and a face whose
    diagonal y_j - y_i is shorter than ``tol`` times the face diameter is a
    witness.  The residual on a face is |y_ij - y - a_ij (y_j - y_i)| divided by
    its longest edge.
    """
    if isinstance(net, TNet):
        vertices = net.vertices
        if coefficients is None and net.coefficients:
            coefficients = net.coefficients
    else:
        vertices = np.asarray(net, dtype=float)
    m = vertices.ndim - 1
    coefficients = normalize_coefficients(coefficients) if coefficients else None
    residuals = {}
    failures = []
    recovered = {}
    for i, j in itertools.combinations(range(1, m + 1), 2):
        y, yi, yij, yj = face_corners(vertices, i, j)
        d = yj - yi
        edges = np.stack(
            [np.linalg.norm(yi - y, axis=-1), np.linalg.norm(yj - y, axis=-1),
             np.linalg.norm(yij - yi, axis=-1), np.linalg.norm(yij - yj, axis=-1)]
        )
        scale = np.maximum(edges.max(axis=0), 1e-300)
        diam = np.maximum(scale, np.linalg.norm(yij - y, axis=-1))
        if coefficients is not None:
            a = coefficients[(i, j)]
        else:
            a = recover_coefficient(y, yi, yij, yj)
            degenerate = np.linalg.norm(d, axis=-1) < tol * diam
            for w in np.argwhere(degenerate):
                failures.append(tuple(w) if m == 2 else tuple(w) + (i, j))
            recovered[(i, j)] = a
        res = np.linalg.norm(yij - y - a[..., None] * d, axis=-1) / scale
        res = np.where(np.isnan(res), np.inf, res)
        for w in itertools.product(*(range(n) for n in res.shape)):
            residuals[w if m == 2 else w + (i, j)] = res[w]
    report = VerificationReport.from_residuals("tnet", residuals, tol, failures=failures)
    if recovered:
        report.details["recovered_coefficients"] = {f"{i},{j}": a for (i, j), a in recovered.items()}
    return report
