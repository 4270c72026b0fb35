"""Discrete isothermic nets in Moebius geometry.

A circular net f is isothermic when its light-cone lift

    f^ = f + e0 + |f|^2 einf

can be rescaled to y^ = f^ / s so that y^ is a T-net.  The scalar field s is
the discrete metric; the edge labels alpha_i = |f_i - f|^2 / (s s_i) factorize
the cross-ratios, q(f, f_1, f_12, f_2) = alpha_1 / alpha_2.

Nets are arrays of shape ``(n1, n2, N)``; generators also accept m > 2 axes.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .errors import (
    ClosureError,
    DegenerateConfigurationError,
    DimensionError,
    GaugeClosureError,
    GeometryError,
    NonUniqueError,
    PreconditionError,
    SingularConfigurationError,
)
from .lattice import EdgeLabels, LatticeBox, face_corners, interior_vertices, map_cells, shifted
from .moutard_core import _check_axes
from .pseudo_euclidean import Space, singular_values
from .quadric import QuadricSpec, quadric_step
from .report import VerificationReport
from .spheres import OrientedPlane, OrientedSphere

DEFAULT_TOL = 1e-9

# star of a vertex: centre, the four diagonal neighbours, then the four axial ones
_STAR = ((0, 0), (1, 1), (-1, 1), (1, -1), (-1, -1), (1, 0), (-1, 0), (0, 1), (0, -1))


def moebius_space(n: int) -> Space:
    return Space.moebius(n)


def moebius_lift(f, s=1.0) -> np.ndarray:
    """Light-cone lift (f + e0 + |f|^2 einf) / s, broadcasting over leading axes."""
    f = np.asarray(f, dtype=float)
    if f.ndim == 0 or f.shape[-1] < 1:
        raise DimensionError(f"expected points with a trailing coordinate axis, got shape {f.shape}")
    n2 = np.sum(f * f, axis=-1, keepdims=True)
    out = np.concatenate([f, np.ones_like(n2), n2], axis=-1)
    return out / np.asarray(s, dtype=float)[..., None]


def moebius_decode(y, tol: float = 1e-12) -> np.ndarray:
    """Inverse of :func:`moebius_lift` up to scale: divide by the e0-component."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1] - 2
    w = y[..., n]
    bad = np.abs(w) <= tol * np.linalg.norm(y, axis=-1)
    if np.any(bad):
        pos = tuple(int(i) for i in np.argwhere(bad)[0]) if bad.ndim else ()
        raise SingularConfigurationError("vector represents the point at infinity", position=pos)
    return y[..., :n] / w[..., None]


def invert(points, center, radius2: float = 1.0) -> np.ndarray:
    """Sphere inversion x -> c + r^2 (x - c) / |x - c|^2."""
    d = np.asarray(points, dtype=float) - np.asarray(center, dtype=float)
    return np.asarray(center, dtype=float) + radius2 * d / np.sum(d * d, axis=-1, keepdims=True)


def _plane_coordinates(points):
    """Complex coordinates of points in their best-fit plane, plus the relative out-of-plane error."""
    p = np.asarray(points, dtype=float)
    d = p - p.mean(axis=0)
    diam = float(np.max(np.linalg.norm(p[:, None] - p[None], axis=-1)))
    if p.shape[1] == 2:
        return d[:, 0] + 1j * d[:, 1], 0.0, diam
    _, _, vt = np.linalg.svd(d)
    z = d @ vt[0] + 1j * (d @ vt[1])
    off = float(np.max(np.linalg.norm(d @ vt[2:].T, axis=1))) if vt.shape[0] > 2 else 0.0
    return z, off / diam if diam > 0 else 0.0, diam


def _face_cross_ratio(points):
    """(q, concircularity residual) of a quadrilateral (f, f_1, f_12, f_2)."""
    z, off, diam = _plane_coordinates(points)
    for k in range(4):
        if not abs(z[(k + 1) % 4] - z[k]) > 1e-14 * diam:
            raise DegenerateConfigurationError("consecutive vertices of the quadrilateral coincide")
    z0, z1, z12, z2 = z
    q = (z1 - z0) / (z12 - z1) * (z12 - z2) / (z2 - z0)
    return q, max(off, abs(q.imag) / max(1.0, abs(q)))


def cross_ratio(f, f1, f12, f2, tol: float = DEFAULT_TOL) -> float:
    """Real cross-ratio (f_1 - f)(f_12 - f_1)^-1 (f_12 - f_2)(f_2 - f)^-1 of concircular points.

    The plane of the four points is identified with C.  Raises
    ``GeometryError`` when the points are not concircular within ``tol``.
    """
    q, res = _face_cross_ratio(np.array([f, f1, f12, f2], dtype=float))
    if res > tol:
        raise GeometryError(f"points are not concircular (residual {res:.2e})")
    return float(q.real)


def cross_ratios(net, tol: float = DEFAULT_TOL):
    """Cross-ratios of all faces of a 2D net.

    Returns ``(q, residual)``, both of shape ``(n1 - 1, n2 - 1)``; q is NaN on
    faces that are degenerate or not concircular within ``tol``.
    """
    net = _as_net(net)
    n1, n2 = net.shape[:2]
    q = np.full((n1 - 1, n2 - 1), np.nan)
    res = np.full((n1 - 1, n2 - 1), np.inf)
    for k, l in itertools.product(range(n1 - 1), range(n2 - 1)):
        quad = net[[k, k + 1, k + 1, k], [l, l, l + 1, l + 1]]
        try:
            qq, r = _face_cross_ratio(quad)
        except DegenerateConfigurationError:
            continue
        res[k, l] = r
        if r <= tol:
            q[k, l] = qq.real
    return q, res


def _as_net(net) -> np.ndarray:
    net = np.asarray(net, dtype=float)
    if net.ndim != 3 or net.shape[-1] < 2:
        raise DimensionError(f"expected a 2D net of shape (n1, n2, N), got {net.shape}")
    return net


def complete_circular_face(f, f1, f2, q: float) -> np.ndarray:
    """The point f_12 with q(f, f_1, f_12, f_2) = q, on the circle through f, f_1, f_2."""
    f, f1, f2 = (np.asarray(v, dtype=float) for v in (f, f1, f2))
    d1, d2 = f1 - f, f2 - f
    n1 = float(np.linalg.norm(d1))
    if n1 == 0 or np.linalg.norm(d2) == 0 or np.linalg.norm(f1 - f2) == 0:
        raise DegenerateConfigurationError("the three given points must be distinct")
    e1 = d1 / n1
    w = d2 - (d2 @ e1) * e1
    if np.linalg.norm(w) > 1e-14 * np.linalg.norm(d2):
        e2 = w / np.linalg.norm(w)
    else:
        # collinear data: any unit vector orthogonal to e1 spans the plane
        k = int(np.argmin(np.abs(e1)))
        w = -e1[k] * e1
        w[k] += 1.0
        e2 = w / np.linalg.norm(w)
    z1 = complex(n1, 0.0)
    z2 = complex(d2 @ e1, d2 @ e2)
    a = z1 / z2
    if abs(q - a) <= 1e-14 * max(1.0, abs(a)):
        raise SingularConfigurationError("prescribed cross-ratio sends f_12 to infinity")
    z12 = (q * z1 - a * z2) / (q - a)
    return f + z12.real * e1 + z12.imag * e2


def propagate_circular_net(axes: Sequence, q) -> np.ndarray:
    """Circular net with prescribed face cross-ratios ``q`` (shape (n1-1, n2-1)) from two axes."""
    axes = _check_axes(axes)
    if len(axes) != 2:
        raise ValueError("circular nets are propagated from exactly two axes")
    n1, n2 = len(axes[0]), len(axes[1])
    q = np.broadcast_to(np.asarray(q, dtype=float), (n1 - 1, n2 - 1))
    f = np.full((n1, n2, axes[0].shape[1]), np.nan)
    f[:, 0] = axes[0]
    f[0, :] = axes[1]
    for k, l in itertools.product(range(n1 - 1), range(n2 - 1)):
        try:
            f[k + 1, l + 1] = complete_circular_face(f[k, l], f[k + 1, l], f[k, l + 1], q[k, l])
        except (SingularConfigurationError, DegenerateConfigurationError) as exc:
            raise SingularConfigurationError(str(exc), position=(k, l)) from exc
    return f


def _axis_metric(pts, alpha, i):
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim == 0:
        alpha = np.full(len(pts) - 1, float(alpha))
    if alpha.shape != (len(pts) - 1,):
        raise ValueError(f"labels for axis {i} must have length {len(pts) - 1}")
    if np.any(alpha == 0):
        raise PreconditionError(f"labels on axis {i} must be nonzero")
    edge2 = np.sum(np.diff(pts, axis=0) ** 2, axis=1)
    if np.any(edge2 == 0):
        raise PreconditionError(f"consecutive points on axis {i} coincide")
    s = np.ones(len(pts))
    for k in range(len(pts) - 1):
        s[k + 1] = edge2[k] / (alpha[k] * s[k])
    return s


def _local_cone_step(f, s, spec, tol):
    """One light-cone quadric step for points ``f[0..2]`` = (f, f_i, f_j) with metric ``s``.

    The face is first moved to the origin and scaled to unit size.  Both maps
    act linearly on the lifts and scale the form by a constant, so the step
    coefficient is unchanged while the cancellation in <f^, g^> is avoided.
    """
    base = f[0]
    size = float(np.max(np.linalg.norm(f - base, axis=1)))
    if size == 0:
        raise DegenerateConfigurationError("face points coincide")
    y, y1, y2 = moebius_lift((f - base) / size, s)
    step = quadric_step(y, y1, y2, spec, tol)
    if step.degenerate:
        raise SingularConfigurationError("degenerate face (f_i == f_j)")
    w = step.point[-2]
    if not abs(w) > 1e-12 * np.linalg.norm(step.point):
        raise SingularConfigurationError("vertex is sent to infinity")
    return base + size * step.point[:-2] / w, 1.0 / w, step.coefficient


def generate_isothermic_with_metric(axes: Sequence, labels: Sequence, tol: float = 1e-12):
    """Like :func:`generate_isothermic`, returning ``(f, s, coefficients)``.

    ``s`` is the discrete metric of the generated T-net lift f^ / s and
    ``coefficients[(i, j)]`` its face coefficients.
    """
    axes = _check_axes(axes)
    m = len(axes)
    if m < 2:
        raise ValueError("an isothermic net needs at least two lattice directions")
    if len(labels) != m:
        raise ValueError(f"need {m} label sequences, got {len(labels)}")
    box = LatticeBox(tuple(len(a) for a in axes))
    dim = axes[0].shape[1]
    f = np.full(box.extents + (dim,), np.nan)
    s = np.full(box.extents, np.nan)
    for i, (pts, alpha) in enumerate(zip(axes, labels), start=1):
        idx = [0] * m
        idx[i - 1] = slice(None)
        f[tuple(idx)] = pts
        s[tuple(idx)] = _axis_metric(pts, alpha, i)
    spec = QuadricSpec(moebius_space(dim), 0.0)
    coeffs = {(i, j): np.full(box.face_shape(i, j), np.nan)
              for i, j in itertools.combinations(range(1, m + 1), 2)}
    for u in box.vertices_by_level():
        nz = [k + 1 for k in range(m) if u[k] > 0]
        if len(nz) < 2:
            continue
        i, j = nz[0], nz[1]
        w = shifted(shifted(u, -i), -j)
        corners = [w, shifted(w, i), shifted(w, j)]
        try:
            f[u], s[u], _ = _local_cone_step(
                np.array([f[c] for c in corners]), np.array([s[c] for c in corners]), spec, tol)
        except (SingularConfigurationError, DegenerateConfigurationError, PreconditionError) as exc:
            raise SingularConfigurationError(str(exc), position=w) from exc
    # every face coefficient from the e0-components, a = (1/s_ij - 1/s) / (1/s_j - 1/s_i)
    inv = 1.0 / s
    for (i, j), arr in coeffs.items():
        y, yi, yij, yj = face_corners(inv, i, j, trailing=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            arr[...] = (yij - y) / (yj - yi)
    return f, s, coeffs


def generate_isothermic(axes: Sequence, labels: Sequence, tol: float = 1e-12) -> np.ndarray:
    """Isothermic net with face cross-ratios q = alpha_i / alpha_j from its values on the axes.

    ``labels[i-1]`` is alpha_i along the i-th axis (length n_i - 1, or a
    scalar).  The axes are lifted to the light cone with the metric fixed by
    s(0) = 1 and alpha_i = |f_i - f|^2 / (s s_i); the T-net in the light cone
    is then propagated face by face with the quadric step and projected back
    by dividing by the e0-component.
    """
    return generate_isothermic_with_metric(axes, labels, tol)[0]


def _face_relation(quad):
    """Coefficients (c, c1, c2) with f^_12 = c f^ + c1 f^_1 + c2 f^_2, and the relative misfit.

    Lifts are linear in the translation and scale of the points, so the
    relation is computed for the face moved to the origin at unit size.
    """
    f = quad[0]
    diam = float(np.max(np.linalg.norm(quad - f, axis=-1)))
    if diam == 0:
        raise DegenerateConfigurationError("face collapses to a point")
    lifts = moebius_lift((quad - f) / diam)
    a = lifts[[0, 1, 3]].T
    coef, *_ = np.linalg.lstsq(a, lifts[2], rcond=None)
    misfit = float(np.linalg.norm(a @ coef - lifts[2]) / max(1.0, np.linalg.norm(lifts[2])))
    return coef, misfit


def extract_moutard_lift(net, tol: float = DEFAULT_TOL):
    """Discrete metric s and T-net lift y^ = f^ / s of an isothermic 2D net.

    Gauge: s = 1 at the origin and at its neighbour in direction 1.  Each face
    relation f^_12 = c f^ + c1 f^_1 + c2 f^_2 forces s_12 = c s and
    s_2 / s_1 = -c1 / c2; faces are visited row by row and every value reached
    twice must agree to within ``tol`` (relative), else ``GaugeClosureError``.

    Returns ``(s, y^)``.
    """
    net = _as_net(net)
    n1, n2 = net.shape[:2]
    if n1 < 2 or n2 < 2:
        raise ValueError("net needs at least one face")
    s = np.full((n1, n2), np.nan)
    s[0, 0] = s[1, 0] = 1.0

    def put(idx, value, face):
        if not np.isfinite(value) or value == 0:
            raise GaugeClosureError("metric degenerates", position=face)
        if np.isnan(s[idx]):
            s[idx] = value
        elif abs(s[idx] - value) > tol * max(abs(s[idx]), abs(value)):
            raise GaugeClosureError(
                f"metric closure mismatch {abs(s[idx] - value) / abs(s[idx]):.2e}", position=face)

    for l, k in itertools.product(range(n2 - 1), range(n1 - 1)):
        face = (k, l)
        quad = net[[k, k + 1, k + 1, k], [l, l, l + 1, l + 1]]
        try:
            (c, c1, c2), misfit = _face_relation(quad)
        except DegenerateConfigurationError as exc:
            raise GaugeClosureError(str(exc), position=face) from exc
        if misfit > tol:
            raise GaugeClosureError(f"face is not circular (misfit {misfit:.2e})", position=face)
        if c1 == 0 or c2 == 0:
            raise GaugeClosureError("face relation is degenerate", position=face)
        v, v1, v12, v2 = (k, l), (k + 1, l), (k + 1, l + 1), (k, l + 1)
        if not np.isnan(s[v1]):
            # bottom edge known (first row, and consistency check on later rows)
            put(v12, c * s[v], face)
            put(v2, -c1 * s[v1] / c2, face)
        else:
            put(v1, -c2 * s[v2] / c1, face)
            put(v12, c * s[v], face)
    return s, moebius_lift(net, s)


def isothermic_labels(net, s) -> EdgeLabels:
    """Edge labels alpha_i = |f_i - f|^2 / (s s_i) for any number of lattice directions."""
    net = np.asarray(net, dtype=float)
    s = np.asarray(s, dtype=float)
    m = net.ndim - 1
    vals = []
    for i in range(m):
        d = np.diff(net, axis=i)
        lo = [slice(None)] * m
        hi = [slice(None)] * m
        lo[i] = slice(0, -1)
        hi[i] = slice(1, None)
        vals.append(np.sum(d * d, axis=-1) / (s[tuple(lo)] * s[tuple(hi)]))
    return EdgeLabels(tuple(vals))


def _star(net, u):
    return np.array([net[u[0] + a, u[1] + b] for a, b in _STAR])


def _line_concurrency(g):
    """Normalised determinant of the lines (g_12, g_-1,2), (g_1,-2, g_-1,-2), (g_1, g_-1).

    ``g`` holds the eight inverted neighbours in ``_STAR`` order.  Zero means
    the three lines meet (possibly at infinity).  Also returns the relative
    distance of the points from their common plane.
    """
    z, off, diam = _plane_coordinates(g)
    pts = np.stack([z.real / diam, z.imag / diam, np.ones(len(z))], axis=1)
    d12, dm12, d1m2, dm1m2, d1, dm1 = pts[0], pts[1], pts[2], pts[3], pts[4], pts[5]
    lines = [np.cross(d12, dm12), np.cross(d1m2, dm1m2), np.cross(d1, dm1)]
    lines = [ln / np.linalg.norm(ln) for ln in lines]
    return max(abs(float(np.linalg.det(np.array(lines)))), off)


def certify_isothermic_fivepoint(net, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Certify the central-sphere property at every interior vertex of a 2D net.

    At a vertex the five points f, f_{+-1,+-2} must lie on a 2-sphere (or
    plane): the rank of their light-cone lifts is at most 4, measured by the
    smallest relative singular value.  When all nine points of the star lie on
    one sphere this test is vacuous; the vertex is then inverted to infinity
    and the circles (f, f_12, f_-1,2), (f, f_1,-2, f_-1,-2), (f, f_1, f_-1)
    must share a second point, i.e. their images must be concurrent lines.
    Boundary vertices are skipped.
    """
    net = _as_net(net)
    box = LatticeBox(net.shape[:2])
    dim = net.shape[-1] + 2
    cells = list(interior_vertices(box))

    def check(u):
        star = _star(net, u)
        rel = star - star[0]
        diam = float(np.max(np.linalg.norm(rel, axis=1)))
        if diam == 0 or np.any(np.linalg.norm(rel[1:], axis=1) == 0):
            return float("inf"), True
        lifts = moebius_lift(rel / diam)
        sv9 = singular_values(lifts)
        spherical = dim <= 4 or sv9[4] / sv9[0] <= tol
        if spherical:
            return _line_concurrency(invert(rel[1:] / diam, np.zeros(rel.shape[1]))), True
        sv5 = singular_values(lifts[:5])
        return float(sv5[4] / sv5[0]) if len(sv5) > 4 else 0.0, False

    results = map_cells(check, cells)
    residuals = {u: r for u, (r, _) in zip(cells, results)}
    n_sph = sum(1 for _, sph in results if sph)
    return VerificationReport.from_residuals(
        "fivepoint", residuals, tol, skipped=box.size - len(cells),
        details={"spherical_vertices": n_sph})


def certify_cross_ratio_factorization(net, tol: float = DEFAULT_TOL):
    """Certify q q_{-1,-2} = q_{-1} q_{-2} at every interior vertex of a circular 2D net.

    Returns ``(report, labels)``.  On success ``labels`` are edge functions
    with q = alpha_1 / alpha_2 on every face, normalised by alpha_2 = 1 on the
    first edge of axis 2 (so alpha_1 = q on the origin face); otherwise None.
    Faces that are not concircular make every vertex touching them a witness
    and are listed in ``details["noncircular_faces"]``.
    """
    net = _as_net(net)
    n1, n2 = net.shape[:2]
    q, res = cross_ratios(net, tol)
    bad_faces = [tuple(int(i) for i in f) for f in np.argwhere(np.isnan(q))]
    residuals = {}
    for k, l in itertools.product(range(1, n1 - 1), range(1, n2 - 1)):
        vals = q[k, l], q[k - 1, l - 1], q[k - 1, l], q[k, l - 1]
        if any(np.isnan(v) for v in vals):
            residuals[(k, l)] = float("inf")
            continue
        lhs, rhs = vals[0] * vals[1], vals[2] * vals[3]
        residuals[(k, l)] = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    interior = max(n1 - 2, 0) * max(n2 - 2, 0)
    report = VerificationReport.from_residuals(
        "crossratio", residuals, tol, skipped=n1 * n2 - interior,
        details={"noncircular_faces": bad_faces[:200]})
    if bad_faces:
        report.passed = False
        if not report.witnesses:
            report.witnesses = [bad_faces[0]]
    labels = None
    if report.passed:
        alpha1 = q[:, 0].copy()
        alpha2 = q[0, 0] / q[0, :]
        labels = EdgeLabels.from_functions((n1, n2), (alpha1, alpha2))
    return report, labels


def central_sphere(points, tol: float = DEFAULT_TOL):
    """The sphere or plane through five points of R^3.

    Found as the orthogonal complement of the five light-cone lifts.  Raises
    ``GeometryError`` if the points lie on no common sphere (rank 5) and
    ``NonUniqueError`` if they lie on a circle or line (rank <= 3).
    """
    p = np.asarray(points, dtype=float)
    if p.shape != (5, 3):
        raise DimensionError(f"expected five points in R^3, got shape {p.shape}")
    center = p.mean(axis=0)
    scale = float(np.max(np.linalg.norm(p[:, None] - p[None], axis=-1)))
    if scale == 0:
        raise DegenerateConfigurationError("points coincide")
    lifts = moebius_lift((p - center) / scale)
    sv = singular_values(lifts)
    if sv[4] / sv[0] > tol:
        raise GeometryError(f"no sphere through the five points (relative singular value {sv[4] / sv[0]:.2e})")
    if sv[3] / sv[0] <= tol:
        raise NonUniqueError("the five points lie on a circle or line; the sphere is not unique")
    space = moebius_space(3)
    _, _, vt = np.linalg.svd(lifts @ space.gram)
    sigma = vt[-1]
    if abs(sigma[3]) <= tol * np.linalg.norm(sigma):
        n = sigma[:3]
        nn = float(np.linalg.norm(n))
        v = n / nn
        d = sigma[4] / 2.0 / nn
        return OrientedPlane(v, scale * d + float(v @ center))
    sigma = sigma / sigma[3]
    c = sigma[:3]
    r2 = float(c @ c - sigma[4])
    return OrientedSphere(center + scale * c, scale * np.sqrt(max(r2, 0.0)))


def dual_one_form(net, s):
    """The one-form delta_i f* = delta_i f / (s s_i), one array per lattice direction."""
    net = np.asarray(net, dtype=float)
    s = np.asarray(s, dtype=float)
    m = net.ndim - 1
    forms = []
    for i in range(m):
        lo = [slice(None)] * m
        hi = [slice(None)] * m
        lo[i] = slice(0, -1)
        hi[i] = slice(1, None)
        forms.append(np.diff(net, axis=i) / (s[tuple(lo)] * s[tuple(hi)])[..., None])
    return forms


def closure_defects(forms):
    """Relative face-boundary sums of a vector one-form, keyed by (i, j) like face coefficients.

    Each defect is divided by the mean edge length of the form.
    """
    m = len(forms)
    mean_edge = float(np.mean(np.concatenate([np.linalg.norm(w, axis=-1).ravel() for w in forms])))
    mean_edge = mean_edge if mean_edge > 0 else 1.0
    out = {}
    for i, j in itertools.combinations(range(m), 2):
        wi, wj = forms[i], forms[j]
        # restrict both to the faces spanned by i and j
        a = [slice(None)] * m
        b = [slice(None)] * m
        c = [slice(None)] * m
        d = [slice(None)] * m
        a[j] = slice(0, -1)          # w_i at u
        b[i] = slice(1, None)        # w_j at u + e_i
        c[j] = slice(1, None)        # w_i at u + e_j
        d[i] = slice(0, -1)          # w_j at u
        loop = wi[tuple(a)] + wj[tuple(b)] - wi[tuple(c)] - wj[tuple(d)]
        out[(i + 1, j + 1)] = np.linalg.norm(loop, axis=-1) / mean_edge
    return out


def integrate_one_form(forms, origin=None) -> np.ndarray:
    """Vertex field with prescribed differences, integrated from ``origin`` (default 0).

    Integration runs along axis 1, then axis 2 from every point reached, and so
    on; the form is assumed closed.
    """
    m = len(forms)
    extents = tuple(forms[0].shape[k] + (1 if k == 0 else 0) for k in range(m))
    out = np.zeros(extents + forms[0].shape[m:])
    if origin is not None:
        out[(0,) * m] = origin
    for k in range(m):
        for t in range(1, extents[k]):
            cur = (slice(None),) * k + (t,) + (0,) * (m - k - 1)
            prev = (slice(None),) * k + (t - 1,) + (0,) * (m - k - 1)
            out[cur] = out[prev] + forms[k][prev]
    return out


def dualize_isothermic(net, s, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Christoffel dual f* with delta_i f* = delta_i f / (s s_i) and f*(0) = 0.

    The dual metric is s* = 1 / s.  Raises ``ClosureError`` when some face
    boundary sum exceeds ``tol`` times the mean dual edge length.
    """
    net = np.asarray(net, dtype=float)
    s = np.asarray(s, dtype=float)
    if s.shape != net.shape[:-1]:
        raise DimensionError(f"metric shape {s.shape} does not match net shape {net.shape[:-1]}")
    if np.any(s == 0) or not np.all(np.isfinite(s)):
        raise PreconditionError("metric must be finite and nonzero")
    forms = dual_one_form(net, s)
    for key, defect in closure_defects(forms).items():
        if defect.size and float(np.max(defect)) > tol:
            pos = tuple(int(i) for i in np.unravel_index(np.argmax(defect), defect.shape))
            raise ClosureError(
                f"dual one-form is not closed on faces {key} (defect {float(np.max(defect)):.2e})",
                position=pos)
    return integrate_one_form(forms)
