"""Dispatch of named certifiers over net documents (the ``verify`` subcommand)."""

from __future__ import annotations

import numpy as np

from .errors import MoutardError, NetFormatError, PreconditionError
from .lattice import LatticeBox, check_labelling, interior_vertices
from .laguerre import certify_gauss_equivalence, certify_L_isothermic
from .lie import certify_s_isothermic, certify_touching, s_labels
from .menelaus import eight_ratio_product
from .moebius import (
    _STAR,
    certify_cross_ratio_factorization,
    certify_isothermic_fivepoint,
    closure_defects,
    dual_one_form,
    extract_moutard_lift,
    isothermic_labels,
    moebius_lift,
)
from .moutard_core import certify_tnet
from .netio import NetDocument, plane_net, sphere_congruence
from .pseudo_euclidean import Space
from .quadric import QuadricSpec, extract_labelling
from .report import VerificationReport

CHECKS = ("tnet", "labelling", "fivepoint", "crossratio", "duality", "laguerre", "gauss", "touching", "menelaus")
APPLICABLE = {
    "euclidean": {"tnet", "labelling", "fivepoint", "crossratio", "duality", "menelaus"},
    "projective": {"tnet"},
    "quadric": {"tnet", "labelling"},
    "plane": {"laguerre", "gauss"},
    "sphere": {"tnet", "labelling", "touching", "duality"},
}


class CheckNotApplicable(NetFormatError):
    """The requested check does not apply to the document kind."""


def parse_checks(text: str) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECKS]
    if unknown or not names:
        raise ValueError(f"unknown check(s) {unknown}; choose from {', '.join(CHECKS)}")
    return names


def _error_report(name, exc, tol) -> VerificationReport:
    pos = getattr(exc, "position", None)
    failures = [pos] if pos is not None else [(-1,)]
    return VerificationReport.from_residuals(name, {}, tol, failures=failures,
                                             details={"error": f"{type(exc).__name__}: {exc}"})


def _metric(doc: NetDocument, tol):
    if "s" in doc.payload:
        return doc.array("s")
    s, _ = extract_moutard_lift(doc.array("vertices"), tol)
    return s


def _face_report(name, defects: dict, tol, m) -> VerificationReport:
    residuals = {}
    for key, arr in defects.items():
        for u in np.ndindex(*arr.shape):
            residuals[u if m == 2 else u + key] = float(arr[u])
    return VerificationReport.from_residuals(name, residuals, tol)


def _menelaus_report(f, tol) -> VerificationReport:
    if f.ndim != 3:
        raise PreconditionError("the Menelaus check runs on 2D nets")
    residuals, failures = {}, []
    for u in interior_vertices(LatticeBox(tuple(f.shape[:2]))):
        star = np.array([f[u[0] + a, u[1] + b] for a, b in _STAR])
        try:
            residuals[u] = abs(eight_ratio_product(star, tol) - 1.0)
        except MoutardError:
            failures.append(u)
    return VerificationReport.from_residuals("menelaus", residuals, tol, failures=failures)


def run_check(doc: NetDocument, name: str, tol: float) -> VerificationReport:
    """Run one certifier; computation errors become failing reports that name the cell."""
    if name not in APPLICABLE[doc.kind]:
        raise CheckNotApplicable(f"check {name!r} does not apply to {doc.kind!r} documents")
    try:
        return _run(doc, name, tol)
    except MoutardError as exc:
        if isinstance(exc, NetFormatError):
            raise
        return _error_report(name, exc, tol)


def _run(doc: NetDocument, name: str, tol: float) -> VerificationReport:
    kind = doc.kind
    if kind == "euclidean":
        f = doc.array("vertices")
        if name == "fivepoint":
            return certify_isothermic_fivepoint(f, tol)
        if name == "crossratio":
            return certify_cross_ratio_factorization(f, tol)[0]
        if name == "menelaus":
            return _menelaus_report(f, tol)
        s = _metric(doc, tol)
        if name == "tnet":
            return certify_tnet(moebius_lift(f, s), tol)
        if name == "labelling":
            return check_labelling(isothermic_labels(f, s), tol)
        if name == "duality":
            return _face_report("duality", closure_defects(dual_one_form(f, s)), tol, f.ndim - 1)
    if kind == "projective":
        return certify_tnet(doc.array("vertices"), tol, doc.coefficients())
    if kind == "quadric":
        v = doc.array("vertices")
        if name == "tnet":
            return certify_tnet(v, tol)
        p, q = doc.signature
        spec = QuadricSpec(Space.diagonal(p, q), float(doc.payload["kappa0"]))
        return check_labelling(extract_labelling(v, spec), tol)
    if kind == "plane":
        net = plane_net(doc)
        return certify_L_isothermic(net, tol) if name == "laguerre" else certify_gauss_equivalence(net, tol)
    if kind == "sphere":
        net = sphere_congruence(doc)
        if name == "tnet":
            return certify_s_isothermic(net, tol)
        if name == "labelling":
            return check_labelling(s_labels(net), tol)
        if name == "touching":
            return certify_touching(net, tol)
        if name == "duality":
            from .lie import _sphere_forms
            dc, dw = _sphere_forms(net.centers, net.radii)
            defects = closure_defects(dc)
            for key, arr in closure_defects(dw).items():
                defects[key] = np.maximum(defects[key], arr)
            return _face_report("duality", defects, tol, net.radii.ndim)
    raise CheckNotApplicable(f"check {name!r} does not apply to {kind!r} documents")


def compare_translated(doc: NetDocument, other: NetDocument, tol: float) -> VerificationReport:
    """Vertex-wise agreement up to a translation (fitted as the mean difference)."""
    if doc.kind != other.kind or doc.box != other.box:
        return VerificationReport.from_residuals("against", {}, tol, failures=[(-1,)],
                                                 details={"error": "documents differ in kind or box"})
    key = "centers" if doc.kind == "sphere" else "vertices"
    if key not in doc.payload:
        raise CheckNotApplicable(f"--against is not supported for {doc.kind!r} documents")
    a, b = doc.array(key), other.array(key)
    d = a - b
    d = d - d.reshape(-1, d.shape[-1]).mean(axis=0)
    res = np.linalg.norm(d, axis=-1)
    if doc.kind == "sphere":
        res = np.maximum(res, np.abs(doc.array("radii") - other.array("radii")))
    residuals = {u: float(res[u]) for u in np.ndindex(*res.shape)}
    return VerificationReport.from_residuals("against", residuals, tol)
