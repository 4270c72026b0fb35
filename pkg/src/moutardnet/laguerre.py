"""Discrete L-isothermic surfaces: nets of oriented planes in R^3.

An oriented plane <v, x> = d is represented in the Lie quadric of R^{4,2} by

    p^ = v + 0 e0 + 2d einf + e6,

and an oriented sphere (c, r) by s^ = c + e0 + (|c|^2 - r^2) einf + r e6.
Then <s^, p^> = <c, v> - d - r, so oriented contact means r = <c, v> - d.
A conical plane net is L-isothermic when its lift is a Moutard net.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, GeometryError, PreconditionError, SingularConfigurationError
from .lattice import LatticeBox, face_corners, interior_vertices, map_cells
from .moebius import (
    _STAR,
    _line_concurrency,
    certify_cross_ratio_factorization,
    certify_isothermic_fivepoint,
    generate_isothermic_with_metric,
    invert,
)
from .moutard_core import _check_axes
from .pseudo_euclidean import Space, singular_values
from .report import VerificationReport
from .spheres import UNIT_TOL, OrientedPlane, OrientedSphere

DEFAULT_TOL = 1e-9
LIE = Space.lie(3)


class NonUniqueSphereWarning(UserWarning):
    """Several spheres touch the given planes; a minimal-radius one was returned."""


@dataclass
class PlaneNet:
    """Oriented planes <v, x> = d over a 2D box: ``normals`` (n1, n2, 3), ``offsets`` (n1, n2)."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        self.normals = np.asarray(self.normals, dtype=float)
        self.offsets = np.asarray(self.offsets, dtype=float)
        if self.normals.ndim != 3 or self.normals.shape[-1] != 3:
            raise DimensionError(f"normals must have shape (n1, n2, 3), got {self.normals.shape}")
        if self.offsets.shape != self.normals.shape[:-1]:
            raise DimensionError("offsets must match the lattice shape of the normals")
        dev = np.abs(np.linalg.norm(self.normals, axis=-1) - 1.0)
        if np.any(dev > UNIT_TOL):
            pos = tuple(int(i) for i in np.unravel_index(np.argmax(dev), dev.shape))
            raise PreconditionError(f"normal at {pos} is not a unit vector")

    @property
    def shape(self) -> tuple[int, int]:
        return self.normals.shape[:2]

    def plane(self, u) -> OrientedPlane:
        return OrientedPlane(self.normals[u], self.offsets[u])


def laguerre_lift(plane) -> np.ndarray:
    """Lie-quadric representative (v, 0, 2d, 1) of an oriented plane.

    Accepts an :class:`OrientedPlane` or a :class:`PlaneNet` (lifting every plane).
    """
    if isinstance(plane, PlaneNet):
        v, d = plane.normals, plane.offsets
    else:
        if not isinstance(plane, OrientedPlane):
            raise TypeError("expected an OrientedPlane or PlaneNet")
        v, d = plane.normal, np.float64(plane.offset)
    d = np.asarray(d, dtype=float)[..., None]
    return np.concatenate([v, np.zeros_like(d), 2.0 * d, np.ones_like(d)], axis=-1)


def _lift_rows(normals, offsets):
    d = np.asarray(offsets, dtype=float)[:, None]
    return np.concatenate([normals, np.zeros_like(d), 2.0 * d, np.ones_like(d)], axis=1)


def lie_sphere_lift(sphere: OrientedSphere) -> np.ndarray:
    """Lie-quadric representative c + e0 + (|c|^2 - r^2) einf + r e6 of an oriented sphere."""
    c = sphere.center
    r = sphere.radius
    return np.concatenate([c, [1.0, float(c @ c) - r * r, r]])


def _normalise(normals, offsets):
    """Translate and scale a plane family to unit size.

    Returns ``(offsets', t, scale)`` with d' = (d - <v, t>) / scale; both maps act
    linearly on the lifts, so ranks are unchanged.
    """
    t, *_ = np.linalg.lstsq(normals, offsets, rcond=None)
    d = offsets - normals @ t
    # never blow rounding noise up to unit size (planes through a common point)
    scale = float(np.max(np.abs(d)))
    if not scale > 1e-6 * (1.0 + float(np.max(np.abs(offsets))) + float(np.linalg.norm(t))):
        scale = 1.0
    return d / scale, t, scale


def central_touching_sphere(planes: Sequence, tol: float = DEFAULT_TOL) -> OrientedSphere:
    """The oriented sphere in contact with five oriented planes.

    ``planes`` is a sequence of :class:`OrientedPlane` or an array of rows
    (v, d).  The sphere is the isotropic vector of the orthogonal complement
    span{einf, sigma} of the five lifts.  If the lifts span less than four
    dimensions a one-parameter family touches them; the member of minimal
    |r| is returned with a :class:`NonUniqueSphereWarning`.
    """
    normals, offsets = _plane_arrays(planes)
    if normals.shape[0] != 5:
        raise DimensionError("central_touching_sphere needs exactly five planes")
    d, t, scale = _normalise(normals, offsets)
    lifts = _lift_rows(normals, d)
    sv = singular_values(lifts)
    if sv[4] / sv[0] > tol:
        raise GeometryError(f"the five planes touch no common sphere (relative singular value {sv[4] / sv[0]:.2e})")
    if sv[3] / sv[0] <= tol:
        warnings.warn("planes admit a family of touching spheres; returning the one of minimal |r|",
                      NonUniqueSphereWarning, stacklevel=2)
        c, r = _minimal_touching(normals, d)
    else:
        _, _, vt = np.linalg.svd(lifts @ LIE.gram)
        comp = vt[-2:]
        # pick the complement vector farthest from einf, then add the einf multiple making it isotropic
        e0 = comp[:, 3]
        sigma = comp[int(np.argmax(np.abs(e0)))]
        if not abs(sigma[3]) > tol * np.linalg.norm(sigma):
            raise GeometryError("no isotropic sphere direction in the complement of the plane lifts")
        sigma = sigma / sigma[3]
        k = float(LIE.norm2(sigma))
        # <sigma + t einf, sigma + t einf> = k - t, since <sigma, einf> = -1/2
        x = sigma.copy()
        x[4] += k
        c, r = x[:3], x[5]
    return OrientedSphere(t + scale * np.asarray(c), scale * float(r))


def _minimal_touching(normals, d):
    """Solve <c, v_k> - r = d_k; among all solutions take the one with minimal |r|."""
    a = np.hstack([normals, -np.ones((len(d), 1))])
    sol, *_ = np.linalg.lstsq(a, d, rcond=None)
    _, s, vt = np.linalg.svd(a)
    rank = int(np.count_nonzero(s > 1e-10 * s[0]))
    null = vt[rank:]
    if null.size and np.max(np.abs(null[:, 3])) > 1e-12:
        k = int(np.argmax(np.abs(null[:, 3])))
        sol = sol - sol[3] / null[k, 3] * null[k]
    return sol[:3], sol[3]


def _plane_arrays(planes):
    if isinstance(planes, np.ndarray) and planes.ndim == 2 and planes.shape[1] == 4:
        return planes[:, :3].astype(float), planes[:, 3].astype(float)
    normals = np.array([p.normal for p in planes])
    offsets = np.array([p.offset for p in planes])
    return normals, offsets


def touching_residuals(sphere: OrientedSphere, planes) -> np.ndarray:
    """Oriented contact defects <c, v> - d - r for each plane."""
    normals, offsets = _plane_arrays(planes)
    return normals @ sphere.center - offsets - sphere.radius


def gauss_map(net: PlaneNet) -> np.ndarray:
    """The unit normals v of the plane net, a net on S^2."""
    return net.normals.copy()


def face_concurrence_residuals(net: PlaneNet) -> np.ndarray:
    """Normalised 4x4 determinants of rows (v, -d) for every face's four planes.

    Zero means the planes P, P_1, P_12, P_2 share a point (possibly at infinity).
    """
    rows = np.concatenate([net.normals, -net.offsets[..., None]], axis=-1)
    rows = rows / np.linalg.norm(rows, axis=-1, keepdims=True)
    y, yi, yij, yj = face_corners(rows, 1, 2)
    mats = np.stack([y, yi, yij, yj], axis=-2)
    return np.abs(np.linalg.det(mats))


def conical_residuals(net: PlaneNet) -> np.ndarray:
    """Relative fourth singular value of each face's four plane lifts (0 for a conical face)."""
    lifts = laguerre_lift(net)
    y, yi, yij, yj = face_corners(lifts, 1, 2)
    mats = np.stack([y, yi, yij, yj], axis=-2)
    mats = mats / np.linalg.norm(mats, axis=-1, keepdims=True)
    s = np.linalg.svd(mats, compute_uv=False)
    return s[..., 3] / s[..., 0]


def certify_L_isothermic(net: PlaneNet, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Certify the five-plane central sphere property at every interior vertex.

    The lifts of P and P_{+-1,+-2} must span at most four dimensions.  When all
    nine planes of the star touch one sphere the test is vacuous; the cone
    criterion is then checked on the Gauss map, where cones of planes tangent
    to a fixed sphere become circles of normals.  Faces whose four planes are
    not conical are reported as additional witnesses (base vertex of the face).
    """
    if not isinstance(net, PlaneNet):
        raise TypeError("expected a PlaneNet")
    box = LatticeBox(net.shape)
    cells = list(interior_vertices(box))

    def check(u):
        idx = [(u[0] + a, u[1] + b) for a, b in _STAR]
        normals = np.array([net.normals[i] for i in idx])
        offsets = np.array([net.offsets[i] for i in idx])
        d, _, _ = _normalise(normals, offsets)
        lifts = _lift_rows(normals, d)
        sv9 = singular_values(lifts)
        if sv9[4] / sv9[0] <= tol:
            rel = normals[1:] - normals[0]
            if np.any(np.linalg.norm(rel, axis=1) == 0):
                return float("inf"), True
            return _line_concurrency(invert(rel, np.zeros(3))), True
        sv5 = singular_values(lifts[:5])
        return float(sv5[4] / sv5[0]), False

    results = map_cells(check, cells)
    residuals = {u: r for u, (r, _) in zip(cells, results)}
    conical = conical_residuals(net)
    bad_faces = [tuple(int(i) for i in f) for f in np.argwhere(~(conical <= tol))]
    n_tangent = sum(1 for _, flag in results if flag)
    details = {
        "conical_max_residual": float(np.max(conical)) if conical.size else 0.0,
        "nonconical_faces": bad_faces[:200],
        "degenerate_global_tangency": n_tangent > 0 and n_tangent == len(cells),
        "tangent_star_vertices": n_tangent,
    }
    return VerificationReport.from_residuals(
        "laguerre", residuals, tol, skipped=box.size - len(cells), failures=bad_faces, details=details)


def certify_gauss_equivalence(net: PlaneNet, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check face concurrence of the planes and isothermicity of the Gauss map.

    (i) every face's four planes meet in a point, and (ii) the Gauss map on
    S^2 passes both isothermic certifiers.  The report passes iff both hold;
    ``details`` holds the sub-reports.
    """
    conc = face_concurrence_residuals(net)
    residuals = {tuple(int(i) for i in f): float(conc[tuple(f)]) for f in np.ndindex(*conc.shape)}
    concurrence = VerificationReport.from_residuals("concurrence", residuals, tol)
    v = gauss_map(net)
    five = certify_isothermic_fivepoint(v, tol)
    factor, _ = certify_cross_ratio_factorization(v, tol)
    gauss_ok = five.passed and factor.passed
    witnesses = list(concurrence.witnesses)
    for w in five.witnesses + factor.witnesses:
        if w not in witnesses:
            witnesses.append(w)
    return VerificationReport(
        check="gauss",
        passed=concurrence.passed and gauss_ok,
        max_residual=max(concurrence.max_residual, five.max_residual, factor.max_residual),
        mean_residual=concurrence.mean_residual,
        witnesses=witnesses[:200],
        skipped=five.skipped,
        tol=tol,
        checked=concurrence.checked + five.checked,
        details={
            "concurrence_passed": concurrence.passed,
            "gauss_isothermic": gauss_ok,
            "concurrence": concurrence.to_dict(),
            "fivepoint": five.to_dict(),
            "crossratio": factor.to_dict(),
        },
    )


def _propagate_scalar(z, coefficients):
    """Fill a scalar field given on the axes by z_12 = z + a (z_2 - z_1)."""
    n1, n2 = z.shape
    a = coefficients[(1, 2)]
    for k, l in itertools.product(range(n1 - 1), range(n2 - 1)):
        z[k + 1, l + 1] = z[k, l] + a[k, l] * (z[k, l + 1] - z[k + 1, l])
    return z


def generate_L_isothermic(gauss_axes: Sequence, labels: Sequence, offset_axes: Sequence,
                          tol: float = 1e-12) -> PlaneNet:
    """L-isothermic plane net from its Gauss map and offsets on the coordinate axes.

    The Gauss map is the isothermic net on S^2 with the given axes and labels;
    with its metric s the lift (v + e0 + einf) / s is a T-net, and the scalar
    z = d / s obeys the same Moutard equation, which fixes d off the axes.
    """
    axes = _check_axes(gauss_axes)
    if len(axes) != 2 or axes[0].shape[1] != 3:
        raise DimensionError("L-isothermic nets are 2D nets of planes in R^3")
    for k, ax in enumerate(axes, start=1):
        if np.any(np.abs(np.linalg.norm(ax, axis=1) - 1.0) > UNIT_TOL):
            raise PreconditionError(f"Gauss map axis {k} must lie on the unit sphere")
    d1, d2 = (np.asarray(d, dtype=float) for d in offset_axes)
    if d1.shape != (len(axes[0]),) or d2.shape != (len(axes[1]),):
        raise DimensionError("offset axes must match the Gauss map axes")
    if d1[0] != d2[0]:
        raise PreconditionError("offset axes must share the origin value")
    v, s, coeffs = generate_isothermic_with_metric(axes, labels, tol)
    z = np.full(s.shape, np.nan)
    z[:, 0] = d1 / s[:, 0]
    z[0, :] = d2 / s[0, :]
    z = _propagate_scalar(z, coeffs)
    # the generator keeps v on S^2 up to rounding; renormalise the last bits
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return PlaneNet(v, z * s)


def complete_concurrent_offsets(normals, offset_axes) -> np.ndarray:
    """Offsets d making every face's four planes concurrent, from d on the axes.

    d_12 = <v_12, x> where x is the common point of P, P_1, P_2.
    """
    v = np.asarray(normals, dtype=float)
    n1, n2 = v.shape[:2]
    d = np.full((n1, n2), np.nan)
    d[:, 0] = offset_axes[0]
    d[0, :] = offset_axes[1]
    for k, l in itertools.product(range(n1 - 1), range(n2 - 1)):
        a = np.array([v[k, l], v[k + 1, l], v[k, l + 1]])
        if abs(np.linalg.det(a)) < 1e-12:
            raise SingularConfigurationError("three planes of a face have no unique common point",
                                             position=(k, l))
        x = np.linalg.solve(a, [d[k, l], d[k + 1, l], d[k, l + 1]])
        d[k + 1, l + 1] = v[k + 1, l + 1] @ x
    return d


def face_envelope_points(net: PlaneNet) -> np.ndarray:
    """Common point of P, P_1, P_2 for every face (NaN where they have none)."""
    n1, n2 = net.shape
    out = np.full((n1 - 1, n2 - 1, 3), np.nan)
    for k, l in itertools.product(range(n1 - 1), range(n2 - 1)):
        idx = [(k, l), (k + 1, l), (k, l + 1)]
        a = np.array([net.normals[i] for i in idx])
        b = np.array([net.offsets[i] for i in idx])
        if abs(np.linalg.det(a)) > 1e-12:
            out[k, l] = np.linalg.solve(a, b)
    return out
