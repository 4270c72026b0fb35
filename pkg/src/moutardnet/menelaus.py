"""Generalized Menelaus theorem, planar Desargues concurrency and the eight-ratio product.

For base points P_0..P_n of R^n in general position and division points
P_{i,i+1} = (1 - xi_i) P_i + xi_i P_{i+1} (indices mod n+1), the division
points lie in a hyperplane iff  prod xi_i / (1 - xi_i) = (-1)^(n+1).
Directed ratios are always taken from the division parameters xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, DimensionError, GeometryError, PreconditionError

GENERAL_POSITION_TOL = 1e-8


@dataclass(frozen=True)
class AffinePointChain:
    """Base points ``points`` (shape (n+1, n)) and division parameters ``xi`` (length n+1)."""

    points: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        xi = np.array(self.xi, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] + 1:
            raise DimensionError(f"need n+1 points in R^n, got shape {p.shape}")
        if xi.shape != (p.shape[0],):
            raise DimensionError(f"need {p.shape[0]} division parameters, got {xi.shape}")
        if np.any(xi == 0) or np.any(xi == 1):
            raise DegenerateConfigurationError("a division point coincides with a base point")
        diam = float(np.max(np.linalg.norm(p[:, None] - p[None], axis=-1)))
        smin = np.linalg.svd(p[1:] - p[0], compute_uv=False)[-1]
        if not smin >= GENERAL_POSITION_TOL * diam:
            raise PreconditionError("base points are not in general position")
        p.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def division_points(self) -> np.ndarray:
        nxt = np.roll(self.points, -1, axis=0)
        return (1.0 - self.xi)[:, None] * self.points + self.xi[:, None] * nxt


def directed_ratio_product(chain: AffinePointChain) -> float:
    """prod |P_i P_{i,i+1}| / |P_{i,i+1} P_{i+1}| as signed ratios xi_i / (1 - xi_i)."""
    return float(np.prod(chain.xi / (1.0 - chain.xi)))


def affine_rank_residual(points) -> float:
    """Smallest over largest singular value of the centred points (0 for a degenerate set)."""
    p = np.asarray(points, dtype=float)
    s = np.linalg.svd(p - p.mean(axis=0), compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def menelaus_predicate(chain: AffinePointChain, tol: float = 1e-8) -> bool:
    """True iff the n+1 division points span an affine subspace of dimension <= n-1."""
    return affine_rank_residual(chain.division_points()) <= tol


def menelaus_product_criterion(chain: AffinePointChain, tol: float = 1e-8) -> bool:
    """True iff the directed-ratio product equals (-1)^(n+1) within ``tol``."""
    return abs(directed_ratio_product(chain) - (-1.0) ** (chain.n + 1)) <= tol


def close_chain(points, xi_head) -> AffinePointChain:
    """Chain whose last parameter is solved from the product condition, so the predicate holds."""
    xi_head = np.asarray(xi_head, dtype=float)
    n = np.asarray(points).shape[1]
    r = (-1.0) ** (n + 1) / np.prod(xi_head / (1.0 - xi_head))
    return AffinePointChain(points, np.append(xi_head, r / (1.0 + r)))


@dataclass(frozen=True)
class Concurrency:
    """Outcome of a three-line concurrency test in the projective plane."""

    concurrent: bool
    at_infinity: bool
    residual: float
    point: np.ndarray | None


def _homogeneous_line(p, q, scale):
    a = np.append(np.asarray(p, dtype=float) / scale, 1.0)
    b = np.append(np.asarray(q, dtype=float) / scale, 1.0)
    ln = np.cross(a, b)
    n = np.linalg.norm(ln)
    if n == 0:
        raise DegenerateConfigurationError("a line is defined by two coincident points")
    return ln / n


def lines_concurrency(pairs, tol: float = 1e-9) -> Concurrency:
    """Do the three lines through the given point pairs meet (possibly at infinity)?

    Coordinates are scaled by the spread of all six points; the residual is
    the determinant of the three unit line vectors.
    """
    pts = np.asarray(pairs, dtype=float).reshape(6, 2)
    center = pts.mean(axis=0)
    scale = float(np.max(np.linalg.norm(pts - center, axis=1))) or 1.0
    lines = np.array([_homogeneous_line(pts[2 * k] - center, pts[2 * k + 1] - center, scale) for k in range(3)])
    residual = abs(float(np.linalg.det(lines)))
    concurrent = residual <= tol
    point = None
    at_inf = False
    if concurrent:
        # common point: null vector of the line matrix
        x = np.linalg.svd(lines)[2][-1]
        if abs(x[2]) <= tol * np.linalg.norm(x):
            at_inf = True
        else:
            point = center + scale * x[:2] / x[2]
    return Concurrency(concurrent, at_inf, residual, point)


def _star_points(star):
    s = np.asarray(star, dtype=float)
    if s.shape == (9, 2):
        s = s[1:]
    if s.shape != (8, 2):
        raise DimensionError("expected the eight planar neighbours f_{+-1,+-2}, f_{+-1}, f_{+-2}")
    return s


def desargues_concurrency(star, tol: float = 1e-9, second: bool = False) -> bool:
    """Concurrency of (f_12, f_-1,2), (f_1,-2, f_-1,-2), (f_1, f_-1) in the plane.

    ``star`` lists f_12, f_-1,2, f_1,-2, f_-1,-2, f_1, f_-1, f_2, f_-2 (optionally
    preceded by f).  With ``second=True`` the triple (f_-1,2, f_-1,-2),
    (f_12, f_1,-2), (f_2, f_-2) is tested instead.  Parallel lines count as
    meeting at infinity; :func:`lines_concurrency` tells the cases apart.
    """
    return desargues_lines(star, tol, second).concurrent


def desargues_lines(star, tol: float = 1e-9, second: bool = False) -> Concurrency:
    f12, fm12, f1m2, fm1m2, f1, fm1, f2, fm2 = _star_points(star)
    if second:
        pairs = [fm12, fm1m2, f12, f1m2, f2, fm2]
    else:
        pairs = [f12, fm12, f1m2, fm1m2, f1, fm1]
    return lines_concurrency(pairs, tol)


def _division_parameter(a, b, x, tol):
    """xi with x = (1 - xi) a + xi b; raises if x is not on the line ab."""
    d = b - a
    dd = float(d @ d)
    if dd == 0:
        raise DegenerateConfigurationError("coincident points on a line")
    xi = float((x - a) @ d) / dd
    off = np.linalg.norm(x - a - xi * d) / max(np.sqrt(dd), np.linalg.norm(x - a))
    if off > tol:
        raise GeometryError(f"point is not on the line (relative distance {off:.2e})")
    return xi


def eight_ratio_product(star, tol: float = 1e-9) -> float:
    """Directed-ratio product around the vertex star after sending f to infinity.

    ``star`` is the nine points f, f_12, f_-1,2, f_1,-2, f_-1,-2, f_1, f_-1, f_2, f_-2
    in R^N.  After inversion in f every face circle becomes a line f_i f_j
    through f_ij, and the product of the four ratios
    |f_2 f_12| / |f_12 f_1| ... |f_-1 f_-1,2| / |f_-1,2 f_2| is returned.  It is 1
    exactly when the cross-ratios factorize at this vertex.
    """
    s = np.asarray(star, dtype=float)
    if s.shape[0] != 9:
        raise DimensionError("expected the nine points of a vertex star")
    d = s[1:] - s[0]
    d2 = np.sum(d * d, axis=1)
    if np.any(d2 == 0):
        raise DegenerateConfigurationError("a neighbour coincides with the centre")
    g = d / d2[:, None]
    g12, gm12, g1m2, gm1m2, g1, gm1, g2, gm2 = g
    chain = [(g2, g1, g12), (g1, gm2, g1m2), (gm2, gm1, gm1m2), (gm1, g2, gm12)]
    prod = 1.0
    for a, b, x in chain:
        xi = _division_parameter(a, b, x, tol)
        prod *= xi / (1.0 - xi)
    return prod
