"""S-isothermic sphere congruences.

An oriented sphere (c, r), r != 0, is lifted to the hyperboloid <xi, xi> = kappa^2
of the Moebius space R^{4,1}:

    s^ = kappa / r (c + e0 + (|c|^2 - r^2) einf).

For two spheres <s^, s'^> = kappa^2 (r^2 + r'^2 - |c - c'|^2) / (2 r r'); with
kappa = 1 the value -1 means oriented contact of equally signed spheres.  A
congruence is S-isothermic when its lift is a T-net.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ClosureError,
    DimensionError,
    PreconditionError,
    SingularConfigurationError,
    TouchingConfigurationError,
)
from .lattice import EdgeLabels, LatticeBox, check_labelling, face_corners, shifted
from .moebius import closure_defects, integrate_one_form
from .moutard_core import TNet, certify_tnet, recover_coefficient
from .pseudo_euclidean import Space
from .quadric import QuadricSpec, face_coefficients, quadric_darboux_transform, quadric_step
from .report import VerificationReport
from .spheres import OrientedSphere

DEFAULT_TOL = 1e-9
MOEBIUS3 = Space.moebius(3)


@dataclass
class SphereCongruence:
    """Oriented spheres over a lattice box: ``centers`` (..., 3), signed ``radii`` (...)."""

    centers: np.ndarray
    radii: np.ndarray
    kappa: float = 1.0

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        self.radii = np.asarray(self.radii, dtype=float)
        self.kappa = float(self.kappa)
        if self.centers.shape[-1] != 3 or self.radii.shape != self.centers.shape[:-1]:
            raise DimensionError("centers must have shape (..., 3) and radii the matching lattice shape")
        if not self.kappa > 0:
            raise PreconditionError("kappa must be positive")
        if np.any(self.radii == 0):
            raise PreconditionError("point spheres (r = 0) have no lift")

    @property
    def box(self) -> LatticeBox:
        return LatticeBox(self.radii.shape)

    def sphere(self, u) -> OrientedSphere:
        return OrientedSphere(self.centers[u], self.radii[u])

    def lift(self) -> np.ndarray:
        return s_lift(self.centers, self.radii, self.kappa)


def s_lift(centers, radii, kappa: float = 1.0) -> np.ndarray:
    """kappa / r (c + e0 + (|c|^2 - r^2) einf), broadcasting over leading axes."""
    c = np.asarray(centers, dtype=float)
    r = np.asarray(radii, dtype=float)
    if np.any(r == 0):
        raise PreconditionError("point spheres (r = 0) have no lift")
    w = np.sum(c * c, axis=-1) - r * r
    out = np.concatenate([c, np.ones_like(r)[..., None], w[..., None]], axis=-1)
    return (kappa / r)[..., None] * out


def sphere_lift(sphere: OrientedSphere, kappa: float = 1.0) -> np.ndarray:
    return s_lift(sphere.center, np.float64(sphere.radius), kappa)


def s_decode(y, kappa: float = 1.0, tol: float = 1e-12):
    """Centers and radii from lifts: r = kappa / (e0-component), c = r / kappa * Euclidean part."""
    y = np.asarray(y, dtype=float)
    w = y[..., 3]
    bad = ~(np.abs(w) > tol * np.linalg.norm(y, axis=-1))
    if np.any(bad):
        pos = tuple(int(i) for i in np.argwhere(bad)[0]) if bad.ndim else ()
        raise SingularConfigurationError("lift has no e0-component (plane limit)", position=pos)
    r = kappa / w
    return (r / kappa)[..., None] * y[..., :3], r


def lie_lift(centers, radii, kappa: float = 1.0) -> np.ndarray:
    """Full Lie-quadric vector kappa / r (c + e0 + (|c|^2 - r^2) einf + r e6) in R^{4,2}."""
    base = s_lift(centers, radii, kappa)
    e6 = np.full(base.shape[:-1] + (1,), float(kappa))
    return np.concatenate([base, e6], axis=-1)


def inversive_product(a: OrientedSphere, b: OrientedSphere, kappa: float = 1.0) -> float:
    """<s^_a, s^_b> from the closed formula kappa^2 (r^2 + r'^2 - |c - c'|^2) / (2 r r')."""
    d2 = float(np.sum((a.center - b.center) ** 2))
    return kappa ** 2 * (a.radius ** 2 + b.radius ** 2 - d2) / (2.0 * a.radius * b.radius)


def _local_step(c, r, kappa, tol):
    """Quadric step for spheres (c, r)[0..2] = S, S_i, S_j in a frame centred at S.

    Translation is an isometry of R^{4,1}; scaling all spheres by 1/lam maps
    the kappa-hyperboloid to the (kappa/lam)-hyperboloid with the same
    Moutard coefficient, so the step is computed at unit size.
    """
    base = c[0]
    lam = float(max(np.max(np.linalg.norm(c - base, axis=1)), np.max(np.abs(r))))
    k = kappa / lam
    y = s_lift((c - base) / lam, r / lam, k)
    spec = QuadricSpec(MOEBIUS3, k * k)
    step = quadric_step(y[0], y[1], y[2], spec, tol)
    if step.degenerate:
        raise SingularConfigurationError("degenerate face (S_i == S_j)")
    cc, rr = s_decode(step.point, k)
    return base + lam * cc, lam * float(rr), step.coefficient


def propagate_s_isothermic(axes_centers: Sequence, axes_radii: Sequence, kappa: float = 1.0,
                           tol: float = 1e-12) -> SphereCongruence:
    """S-isothermic congruence from spheres on the coordinate axes.

    Each new sphere is the fourth vertex of a T-net face on the hyperboloid
    <xi, xi> = kappa^2, found with the quadric step.
    """
    cax = [np.asarray(a, dtype=float) for a in axes_centers]
    rax = [np.asarray(a, dtype=float) for a in axes_radii]
    m = len(cax)
    if m < 2 or len(rax) != m:
        raise ValueError("need matching center and radius data on at least two axes")
    for k in range(1, m):
        if not (np.allclose(cax[k][0], cax[0][0], rtol=0, atol=1e-12) and abs(rax[k][0] - rax[0][0]) <= 1e-12):
            raise PreconditionError("axis data must share the origin sphere")
    box = LatticeBox(tuple(len(a) for a in cax))
    centers = np.full(box.extents + (3,), np.nan)
    radii = np.full(box.extents, np.nan)
    for i in range(m):
        idx = [0] * m
        idx[i] = slice(None)
        centers[tuple(idx)] = cax[i]
        radii[tuple(idx)] = rax[i]
    if np.any(radii[~np.isnan(radii)] == 0):
        raise PreconditionError("point spheres (r = 0) have no lift")
    for u in box.vertices_by_level():
        nz = [k + 1 for k in range(m) if u[k] > 0]
        if len(nz) < 2:
            continue
        i, j = nz[0], nz[1]
        w = shifted(shifted(u, -i), -j)
        idx = [w, shifted(w, i), shifted(w, j)]
        try:
            centers[u], radii[u], _ = _local_step(
                np.array([centers[v] for v in idx]), np.array([radii[v] for v in idx]), kappa, tol)
        except (SingularConfigurationError, PreconditionError) as exc:
            raise SingularConfigurationError(str(exc), position=w) from exc
    return SphereCongruence(centers, radii, kappa)


def s_labels(net: SphereCongruence) -> EdgeLabels:
    """Edge functions alpha_i = <s^, s^_i>, evaluated by the closed inversive-distance formula."""
    m = net.radii.ndim
    vals = []
    for i in range(m):
        dc = np.diff(net.centers, axis=i)
        lo = [slice(None)] * m
        hi = [slice(None)] * m
        lo[i] = slice(0, -1)
        hi[i] = slice(1, None)
        r0, r1 = net.radii[tuple(lo)], net.radii[tuple(hi)]
        vals.append(net.kappa ** 2 * (r0 * r0 + r1 * r1 - np.sum(dc * dc, axis=-1)) / (2.0 * r0 * r1))
    return EdgeLabels(tuple(vals))


def s_tnet(net: SphereCongruence) -> TNet:
    """The lift as a :class:`TNet` with closed-form face coefficients."""
    y = net.lift()
    return TNet(y, face_coefficients(y, QuadricSpec(MOEBIUS3, net.kappa ** 2)))


def certify_s_isothermic(net: SphereCongruence, tol: float = DEFAULT_TOL) -> VerificationReport:
    """T-net test of the lift, with quadric and labelling defects in ``details``."""
    y = net.lift()
    report = certify_tnet(y, tol)
    report.check = "sisothermic"
    defect = np.abs(MOEBIUS3.norm2(y) - net.kappa ** 2) / net.kappa ** 2
    labels = check_labelling(s_labels(net), tol)
    report.details.pop("recovered_coefficients", None)
    report.details.update({
        "quadric_defect": float(np.max(defect)),
        "labelling_residual": labels.max_residual,
        "labelling_passed": labels.passed,
    })
    return report


def darboux_transform(net: SphereCongruence, seed: OrientedSphere, tol: float = 1e-12):
    """Darboux transform fixed by the transformed origin sphere ``seed``.

    Returns ``(SphereCongruence, b)`` with the edge functions b_i of the transformation.
    """
    spec = QuadricSpec(MOEBIUS3, net.kappa ** 2)
    plus, b = quadric_darboux_transform(net.lift(), sphere_lift(seed, net.kappa), spec, tol)
    c, r = s_decode(plus.vertices, net.kappa)
    return SphereCongruence(c, r, net.kappa), b


def _sphere_forms(centers, radii):
    """delta_i c / (r r_i) and delta_i (|c|^2 - r^2) / (r r_i) for every direction."""
    m = radii.ndim
    w = np.sum(centers * centers, axis=-1) - radii * radii
    dc, dw = [], []
    for i in range(m):
        lo = [slice(None)] * m
        hi = [slice(None)] * m
        lo[i] = slice(0, -1)
        hi[i] = slice(1, None)
        rr = radii[tuple(lo)] * radii[tuple(hi)]
        dc.append(np.diff(centers, axis=i) / rr[..., None])
        dw.append((np.diff(w, axis=i) / rr)[..., None])
    return dc, dw


def dual_closure_defects(net: SphereCongruence) -> dict[str, float]:
    """Largest relative face defects of the forms delta c*, delta w (and delta w* of the dual)."""
    dc, dw = _sphere_forms(net.centers, net.radii)
    out = {
        "c_star": max((float(np.max(v)) for v in closure_defects(dc).values() if v.size), default=0.0),
        "w": max((float(np.max(v)) for v in closure_defects(dw).values() if v.size), default=0.0),
    }
    cstar = integrate_one_form(dc)
    _, dws = _sphere_forms(cstar, 1.0 / net.radii)
    out["w_star"] = max((float(np.max(v)) for v in closure_defects(dws).values() if v.size), default=0.0)
    return out


def dualize_s_isothermic(net: SphereCongruence, tol: float = DEFAULT_TOL) -> SphereCongruence:
    """Dual congruence: delta_i c* = delta_i c / (r r_i), c*(0) = 0, r* = 1 / r.

    Raises ``ClosureError`` if delta c* or delta w fails to close within
    ``tol`` (relative to the mean edge of the form).
    """
    dc, dw = _sphere_forms(net.centers, net.radii)
    for name, forms in (("delta c*", dc), ("delta w", dw)):
        for key, defect in closure_defects(forms).items():
            if defect.size and float(np.max(defect)) > tol:
                pos = np.unravel_index(np.argmax(defect), defect.shape)
                raise ClosureError(f"{name} is not closed on faces {key} (defect {float(np.max(defect)):.2e})",
                                   position=pos)
    return SphereCongruence(integrate_one_form(dc), 1.0 / net.radii, net.kappa)


def _touching_check(s, s1, s2, tol):
    for v in (s, s1, s2):
        if abs(MOEBIUS3.norm2(v) - 1.0) > tol:
            raise TouchingConfigurationError("touching completion needs unit lifts (kappa = 1)")
    if abs(MOEBIUS3.inner(s, s1) + 1.0) > tol:
        raise TouchingConfigurationError("<s, s_1> must be -1")
    if abs(MOEBIUS3.inner(s, s2) - 1.0) > tol:
        raise TouchingConfigurationError("<s, s_2> must be +1")
    g = float(MOEBIUS3.inner(s1, s2))
    if abs(abs(g) - 1.0) <= tol:
        raise TouchingConfigurationError("spheres S_1 and S_2 touch; the completion is undefined")
    return g


def complete_touching_face(s, s1, s2, tol: float = DEFAULT_TOL):
    """Fourth sphere of a touching face: s_12 = s + a (s_2 - s_1) with a = -2 / (1 - <s_1, s_2>).

    Inputs are unit lifts with <s, s_1> = -1 and <s, s_2> = +1.
    Returns ``(s_12, a)``.
    """
    s, s1, s2 = (MOEBIUS3.check(v) for v in (s, s1, s2))
    g = _touching_check(s, s1, s2, tol)
    a = -2.0 / (1.0 - g)
    return s + a * (s2 - s1), a


def touching_decomposition(s, s1, s2, s12):
    """Least-squares (lambda, mu, nu) with s_12 = lambda s + mu s_1 + nu s_2."""
    a = np.stack([s, s1, s2], axis=1)
    coef, *_ = np.linalg.lstsq(a, np.asarray(s12, dtype=float), rcond=None)
    return tuple(float(x) for x in coef)


def certify_touching(net: SphereCongruence, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check the touching pattern on every face of a kappa = 1 congruence.

    <s, s_1> = <s_2, s_12> = -1 and <s, s_2> = <s_1, s_12> = +1.  ``details``
    also reports the metric defect ||c_i - c| - |r_i +- r|| and flags nets whose
    labels agree in both directions (such nets are trivial).
    """
    if abs(net.kappa - 1.0) > 1e-12:
        raise PreconditionError("the touching certifier needs kappa = 1")
    if net.radii.ndim != 2:
        raise DimensionError("certify_touching expects a 2D congruence")
    lab = s_labels(net)
    a1, a2 = lab[1], lab[2]
    # a1 has shape (n1-1, n2), a2 (n1, n2-1)
    res = np.maximum.reduce([
        np.abs(a1[:, :-1] + 1.0),   # <s, s_1>
        np.abs(a1[:, 1:] + 1.0),    # <s_2, s_12>
        np.abs(a2[:-1, :] - 1.0),   # <s, s_2>
        np.abs(a2[1:, :] - 1.0),    # <s_1, s_12>
    ])
    residuals = {tuple(int(i) for i in u): float(res[u]) for u in np.ndindex(*res.shape)}
    dist = [np.linalg.norm(np.diff(net.centers, axis=i), axis=-1) for i in range(2)]
    r = net.radii
    geo1 = np.abs(dist[0] - np.abs(r[1:, :] + r[:-1, :]))
    geo2 = np.abs(dist[1] - np.abs(r[:, 1:] - r[:, :-1]))
    trivial = bool(a1.size and a2.size and np.allclose(a1, a1.flat[0]) and np.allclose(a2, a1.flat[0]))
    return VerificationReport.from_residuals(
        "touching", residuals, tol,
        details={
            "metric_defect": float(max(geo1.max(initial=0.0), geo2.max(initial=0.0))),
            "trivial_labels": trivial,
        })


def touching_coefficients(net: SphereCongruence) -> tuple[np.ndarray, np.ndarray]:
    """Per face: least-squares Moutard coefficient of the lift and the touching value -2 / (1 - <s_1, s_2>)."""
    y = net.lift()
    s, s1, s12, s2 = face_corners(y, 1, 2)
    a_ls = recover_coefficient(s, s1, s12, s2)
    g = MOEBIUS3.inner(s1, s2)
    with np.errstate(divide="ignore"):
        a_touch = -2.0 / (1.0 - g)
    return a_ls, a_touch


def grid_touching_congruence(n1: int, n2: int) -> SphereCongruence:
    """Unit spheres centred at 2 (u_1, u_2) with radius (-1)^{u_2}: a touching S-isothermic net."""
    u1, u2 = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    centers = np.stack([2.0 * u1, 2.0 * u2, np.zeros_like(u1, dtype=float)], axis=-1)
    return SphereCongruence(centers, (-1.0) ** u2, 1.0)


@dataclass
class KappaLimitStudy:
    kappas: np.ndarray
    errors: np.ndarray
    order: float


def kappa_limit_study(net, s, kappas: Sequence[float]) -> KappaLimitStudy:
    """Shrink spheres r = kappa s around an isothermic net ``net`` with metric ``s``.

    For each kappa the congruence is propagated from the axis spheres and the
    largest distance between its centers and ``net`` is recorded.  ``order`` is
    the least-squares slope of log(error) against log(kappa).
    """
    f = np.asarray(net, dtype=float)
    s = np.asarray(s, dtype=float)
    if f.ndim != 3 or f.shape[-1] != 3:
        raise DimensionError("expected a 2D net in R^3")
    ks = np.asarray(sorted(kappas, reverse=True), dtype=float)
    if ks.size < 2:
        raise ValueError("need at least two kappa values")
    errors = []
    for k in ks:
        cong = propagate_s_isothermic([f[:, 0], f[0, :]], [k * s[:, 0], k * s[0, :]], k)
        errors.append(float(np.max(np.linalg.norm(cong.centers - f, axis=-1))))
    errors = np.array(errors)
    order = float(np.polyfit(np.log(ks), np.log(errors), 1)[0])
    return KappaLimitStudy(ks, errors, order)


__all__ = [name for name in dir() if not name.startswith("_") and name not in {
    "annotations", "itertools", "dataclass", "Sequence", "np"}]
