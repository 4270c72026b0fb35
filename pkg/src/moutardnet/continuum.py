"""Plus-sign Moutard equation, its transformation, and convergence to the smooth Moutard equation.

The plus form y_12 + y = a (y_1 + y_2) is the minus form after the gauge
y(n) -> (-1)^{n_2} y(n).  With lattice spacing eps and a = 1 + O(eps^2 q) it
approximates d_1 d_2 y = q y.
"""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, SingularConfigurationError
from .lattice import face_corners
from .moebius import (
    cross_ratios,
    dual_one_form,
    extract_moutard_lift,
    isothermic_labels,
)
from .moutard_core import TNet, moutard_transform
from .report import VerificationReport

SINGULAR_TOL = 1e-12


def gauge_flip(net, direction: int = 2) -> np.ndarray:
    """Multiply every vertex by (-1)^{n_d}; ``direction`` is 1-based."""
    y = np.asarray(net.vertices if isinstance(net, TNet) else net, dtype=float)
    m = y.ndim - 1
    if not 1 <= direction <= m:
        raise DimensionError(f"direction {direction} outside 1..{m}")
    shape = [1] * y.ndim
    shape[direction - 1] = y.shape[direction - 1]
    sign = (-1.0) ** np.arange(y.shape[direction - 1])
    return y * sign.reshape(shape)


def minus_residuals(vertices, a) -> np.ndarray:
    """|y_12 - y - a (y_2 - y_1)| on every face of a 2D net."""
    y, y1, y12, y2 = face_corners(np.asarray(vertices, dtype=float), 1, 2)
    return np.linalg.norm(y12 - y - np.asarray(a)[..., None] * (y2 - y1), axis=-1)


def plus_residuals(vertices, a) -> np.ndarray:
    """|y_12 + y - a (y_1 + y_2)| on every face of a 2D net."""
    y, y1, y12, y2 = face_corners(np.asarray(vertices, dtype=float), 1, 2)
    return np.linalg.norm(y12 + y - np.asarray(a)[..., None] * (y1 + y2), axis=-1)


def _goursat(axes):
    a1, a2 = (np.asarray(a, dtype=float) for a in axes)
    if a1.ndim == 1:
        a1, a2 = a1[:, None], a2[:, None]
    if a1.shape[1:] != a2.shape[1:]:
        raise DimensionError("axis data must share the ambient dimension")
    if not np.allclose(a1[0], a2[0], rtol=0, atol=1e-12):
        raise PreconditionError("axis data must share the origin value")
    return a1, a2


def propagate_plus_moutard(axes: Sequence, a) -> np.ndarray:
    """Solve y_12 = a (y_1 + y_2) - y face by face from values on the two axes.

    ``a`` is a scalar or an (n1-1, n2-1) array.  Scalar axis data give a
    scalar net of shape (n1, n2); vector data give (n1, n2, N).
    """
    a1, a2 = _goursat(axes)
    scalar = np.asarray(axes[0]).ndim == 1
    n1, n2 = len(a1), len(a2)
    coef = np.broadcast_to(np.asarray(a, dtype=float), (n1 - 1, n2 - 1))
    y = np.empty((n1, n2, a1.shape[1]))
    y[:, 0] = a1
    y[0, :] = a2
    for j in range(1, n2):
        # whole row at once along direction 1 is sequential, so loop in i
        for i in range(1, n1):
            y[i, j] = coef[i - 1, j - 1] * (y[i - 1, j] + y[i, j - 1]) - y[i - 1, j - 1]
    return y[..., 0] if scalar else y


@dataclass
class PlusTransform:
    """Transformed net y+ with the edge functions b_1 (n1-1, n2) and b_2 (n1, n2-1)."""

    vertices: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    consistency: float


def plus_moutard_transform(net, seed, b1_axis, b2_axis, tol: float = SINGULAR_TOL) -> PlusTransform:
    """Transform of a plus-form net: y+_1 - y = b_1 (y+ - y_1), y+_2 + y = b_2 (y+ + y_2).

    ``b1_axis`` (length n1-1) and ``b2_axis`` (length n2-1) give the edge
    functions on the axes.  Inside, each face fixes b_1 on its top edge and
    b_2 on its right edge by solving the two closing equations for y+_12 in
    the least-squares sense; ``consistency`` is the largest relative
    disagreement.  A rank-deficient face raises ``SingularConfigurationError``.
    """
    y = np.asarray(net, dtype=float)
    if y.ndim != 3:
        raise DimensionError("plus_moutard_transform expects a 2D vector net")
    n1, n2 = y.shape[:2]
    b1 = np.full((n1 - 1, n2), np.nan)
    b2 = np.full((n1, n2 - 1), np.nan)
    b1[:, 0] = np.broadcast_to(np.asarray(b1_axis, dtype=float), (n1 - 1,))
    b2[0, :] = np.broadcast_to(np.asarray(b2_axis, dtype=float), (n2 - 1,))
    yp = np.full_like(y, np.nan)
    yp[0, 0] = np.asarray(seed, dtype=float)
    for i in range(1, n1):
        yp[i, 0] = y[i - 1, 0] + b1[i - 1, 0] * (yp[i - 1, 0] - y[i, 0])
    for j in range(1, n2):
        yp[0, j] = -y[0, j - 1] + b2[0, j - 1] * (yp[0, j - 1] + y[0, j])
    worst = 0.0
    for j in range(1, n2):
        for i in range(1, n1):
            # from (i, j-1) along 1: y+ = y[i-1,j] + b1' (yp[i-1,j] - y[i,j])
            # from (i-1, j) along 2: y+ = -y[i,j-1] + b2' (yp[i,j-1] + y[i,j])
            A = yp[i - 1, j] - y[i, j]
            B = yp[i, j - 1] + y[i, j]
            rhs = -y[i, j - 1] - y[i - 1, j]
            M = np.stack([A, -B], axis=1)
            sv = np.linalg.svd(M, compute_uv=False)
            if not sv[-1] > tol * max(sv[0], 1.0):
                raise SingularConfigurationError("transformation denominator vanishes", position=(i - 1, j - 1))
            (c1, c2), *_ = np.linalg.lstsq(M, rhs, rcond=None)
            b1[i - 1, j] = c1
            b2[i, j - 1] = c2
            p = y[i - 1, j] + c1 * A
            q = -y[i, j - 1] + c2 * B
            worst = max(worst, float(np.linalg.norm(p - q) / max(1.0, np.linalg.norm(p))))
            yp[i, j] = 0.5 * (p + q)
    return PlusTransform(yp, b1, b2, worst)


def conjugated_transform(net, coefficients, seed, b1_axis, b2_axis) -> np.ndarray:
    """gauge_flip o moutard_transform o gauge_flip, with b_2 negated to match the plus form."""
    minus = TNet(gauge_flip(net, 2), {(1, 2): np.asarray(coefficients, dtype=float)})
    out, _ = moutard_transform(minus, seed, [np.asarray(b1_axis, dtype=float), -np.asarray(b2_axis, dtype=float)])
    return gauge_flip(out.vertices, 2)


def plus_coefficient(q, eps: float, form: str = "symmetric"):
    """Face coefficient for d_1 d_2 y = q y at spacing eps.

    ``symmetric``: a = (1 + eps^2 q/4) / (1 - eps^2 q/4), the coefficient for which
    (y_12 - y_1 - y_2 + y) / eps^2 = q/4 (y_12 + y_1 + y_2 + y) holds exactly.
    ``linear``: a = 1 + eps^2 q/4, whose limit is d_1 d_2 y = (q/2) y.
    """
    x = eps * eps * np.asarray(q, dtype=float) / 4.0
    if form == "symmetric":
        return (1.0 + x) / (1.0 - x)
    if form == "linear":
        return 1.0 + x
    raise ValueError(f"unknown coefficient form {form!r}")


@dataclass
class ConvergenceTable:
    eps: np.ndarray
    errors: np.ndarray
    local_orders: np.ndarray
    order: float
    q: float
    lam: float
    target: tuple[float, float]
    form: str = "symmetric"
    notes: dict = field(default_factory=dict)

    def rows(self):
        return [(float(e), float(err), float(o)) for e, err, o in zip(self.eps, self.errors, self.local_orders)]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "error", "local_order"])
            for e, err, o in self.rows():
                w.writerow([repr(e), repr(err), "" if np.isnan(o) else repr(o)])


def exact_exponential(q: float, lam: float):
    """y(u_1, u_2) = exp(lam u_1 + (q / lam) u_2), a solution of d_1 d_2 y = q y."""
    if lam == 0:
        raise PreconditionError("lambda must be nonzero")
    return lambda u1, u2: np.exp(lam * np.asarray(u1) + (q / lam) * np.asarray(u2))


def _steps(length: float, eps: float) -> int:
    n = length / eps
    k = int(round(n))
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
        raise PreconditionError(f"target coordinate {length} is not a multiple of eps = {eps}")
    return k


def _study_error(q, exact, target, eps, form):
    n1, n2 = _steps(target[0], eps), _steps(target[1], eps)
    u1 = np.arange(n1 + 1) * eps
    u2 = np.arange(n2 + 1) * eps
    y = propagate_plus_moutard([exact(u1, 0.0), exact(0.0, u2)], plus_coefficient(q, eps, form))
    return float(abs(y[-1, -1] - exact(target[0], target[1])))


def fitted_order(eps, errors, discard_coarsest: bool = True) -> float:
    """Least-squares slope of log(error) over log(eps), skipping the coarsest point if asked."""
    eps = np.asarray(eps, dtype=float)
    err = np.asarray(errors, dtype=float)
    idx = np.argsort(-eps)
    if discard_coarsest:
        idx = idx[1:]
    if np.any(err[idx] <= 0):
        return float("inf")
    return float(np.polyfit(np.log(eps[idx]), np.log(err[idx]), 1)[0])


def convergence_study(q: float, target=(1.0, 1.0), eps_list: Sequence[float] = (1 / 8, 1 / 16, 1 / 32, 1 / 64),
                      lam: float = 1.0, form: str = "symmetric", exact=None, threads: int = 1) -> ConvergenceTable:
    """Error of the plus-form scheme against an exact solution at ``target``.

    Goursat data are sampled from ``exact`` (default exp(lam u_1 + (q/lam) u_2)).
    The fitted order discards the coarsest eps.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("convergence_study needs at least three eps values")
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    eps = np.array(sorted(eps_list, reverse=True))
    exact = exact or exact_exponential(q, lam)
    target = (float(target[0]), float(target[1]))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = list(pool.map(lambda e: _study_error(q, exact, target, e, form), eps))
    else:
        errors = [_study_error(q, exact, target, e, form) for e in eps]
    errors = np.array(errors)
    local = np.full(len(eps), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        local[1:] = np.log(errors[:-1] / errors[1:]) / np.log(eps[:-1] / eps[1:])
    return ConvergenceTable(eps, errors, local, fitted_order(eps, errors), float(q), float(lam), target, form)


def smooth_dual_check(net, tol: float = 1e-9) -> VerificationReport:
    """Compare the positive-label duality formulas with the Moebius dual one-form.

    With q = -alpha_1 / alpha_2 (alpha_i > 0) and s re-gauged to (-1)^{u_2} s > 0:
    delta_1 f* = alpha_1 delta_1 f / |delta_1 f|^2 = delta_1 f / (s s_1) and
    delta_2 f* = -alpha_2 delta_2 f / |delta_2 f|^2 = -delta_2 f / (s s_2).
    Nets with non-negative cross-ratios are reported as not applicable.
    """
    f = np.asarray(net, dtype=float)
    q, _ = cross_ratios(f, tol)
    if np.any(np.isnan(q)) or np.any(q >= 0):
        bad = np.argwhere(np.isnan(q) | (q >= 0))
        return VerificationReport.from_residuals(
            "smooth_dual", {}, tol, failures=[tuple(int(i) for i in b) for b in bad[:16]],
            details={"applicable": False, "reason": "cross-ratios are not all negative"})
    s, _ = extract_moutard_lift(f, tol)
    labels = isothermic_labels(f, s)
    if np.any(labels[1] <= 0):
        return VerificationReport.from_residuals(
            "smooth_dual", {}, tol, failures=[("labels",)],
            details={"applicable": False, "reason": "alpha_1 is not positive; transpose the net"})
    alpha1 = labels[1]
    alpha2 = -labels[2]
    splus = s * ((-1.0) ** np.arange(f.shape[1]))[None, :]
    if splus[0, 0] < 0:
        splus = -splus
    d1, d2 = np.diff(f, axis=0), np.diff(f, axis=1)
    n1 = np.sum(d1 * d1, axis=-1)[..., None]
    n2 = np.sum(d2 * d2, axis=-1)[..., None]
    pos1 = alpha1[..., None] * d1 / n1
    pos2 = -alpha2[..., None] * d2 / n2
    gs1 = d1 / (splus[1:, :] * splus[:-1, :])[..., None]
    gs2 = -d2 / (splus[:, 1:] * splus[:, :-1])[..., None]
    ref1, ref2 = dual_one_form(f, s)
    scale = float(np.mean(np.concatenate([np.linalg.norm(ref1, axis=-1).ravel(), np.linalg.norm(ref2, axis=-1).ravel()])))
    residuals = {}
    for u in itertools.product(range(f.shape[0] - 1), range(f.shape[1] - 1)):
        e = [pos1[u], gs1[u], pos1[u[0], u[1] + 1], gs1[u[0], u[1] + 1]]
        r1 = max(np.linalg.norm(v - ref1[u if k < 2 else (u[0], u[1] + 1)]) for k, v in enumerate(e))
        e2 = [pos2[u], gs2[u], pos2[u[0] + 1, u[1]], gs2[u[0] + 1, u[1]]]
        r2 = max(np.linalg.norm(v - ref2[u if k < 2 else (u[0] + 1, u[1])]) for k, v in enumerate(e2))
        residuals[u] = max(r1, r2) / scale
    failures = []
    if np.any(splus <= 0):
        failures = [tuple(int(i) for i in b) for b in np.argwhere(splus <= 0)[:16]]
    if np.any(alpha1 <= 0) or np.any(alpha2 <= 0):
        failures.append(("labels",))
    return VerificationReport.from_residuals(
        "smooth_dual", residuals, tol, failures=failures,
        details={"applicable": True, "min_s": float(splus.min()),
                 "min_alpha": float(min(alpha1.min(), alpha2.min()))})


def label_ratio_feasibility(ratios: Mapping[tuple[int, int], float], tol: float = 1e-12):
    """Can constant labels alpha_i satisfy alpha_i / alpha_j = ratios[(i, j)] for every listed pair?

    The pairs form a graph on the directions; a solution exists iff the
    product of ratios around every cycle is 1.  Returns ``(feasible, witness)``
    where ``witness`` is ``None`` or ``(cycle, product)`` for a violated triangle
    or the first inconsistent edge of a spanning tree.
    """
    nodes = sorted({k for pair in ratios for k in pair})
    value = {nodes[0]: 1.0} if nodes else {}
    edges = dict(ratios)
    for (i, j), r in list(ratios.items()):
        if r == 0:
            raise PreconditionError("labels must be nonzero")
        edges.setdefault((j, i), 1.0 / r)
    # spread labels by breadth-first search, then test every constraint
    frontier = list(value)
    while frontier:
        i = frontier.pop()
        for (a, b), r in edges.items():
            if a == i and b not in value:
                value[b] = value[i] / r
                frontier.append(b)
    for (i, j), r in ratios.items():
        if i in value and j in value and abs(value[i] / value[j] - r) > tol * max(1.0, abs(r)):
            cycle = _cycle_product(edges, i, j)
            return False, cycle
    return True, None


def _cycle_product(edges, i, j):
    for k in sorted({a for a, _ in edges}):
        if k in (i, j):
            continue
        if (j, k) in edges and (k, i) in edges:
            p = edges[(i, j)] * edges[(j, k)] * edges[(k, i)]
            return (i, j, k), p
    return (i, j), edges[(i, j)]


def conformal_square_obstruction(m: int = 3):
    """Check whether q = -1 on every coordinate face of Z^m admits constant labels.

    On the (i, j) faces q = alpha_i / alpha_j, so q = -1 asks alpha_i / alpha_j = -1
    for all pairs.  Returns ``(feasible, witness)`` from :func:`label_ratio_feasibility`.
    """
    ratios = {(i, j): -1.0 for i, j in itertools.combinations(range(1, m + 1), 2)}
    return label_ratio_feasibility(ratios)


__all__ = [
    "gauge_flip", "minus_residuals", "plus_residuals", "propagate_plus_moutard", "PlusTransform",
    "plus_moutard_transform", "conjugated_transform", "plus_coefficient", "ConvergenceTable",
    "exact_exponential", "fitted_order", "convergence_study", "smooth_dual_check",
    "label_ratio_feasibility", "conformal_square_obstruction",
]
