"""Oriented spheres and planes in R^3 (or R^N) as plain value types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class OrientedSphere:
    """Sphere with center ``center`` and signed radius ``radius``.

    The sign of the radius encodes the orientation (outward normal for r > 0).
    A radius of zero is a point sphere.
    """

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    def distance_residual(self, points) -> np.ndarray:
        """Unsigned distance of points from the sphere, | |p - c| - |r| |."""
        p = np.asarray(points, dtype=float)
        return np.abs(np.linalg.norm(p - self.center, axis=-1) - abs(self.radius))

    def flipped(self) -> "OrientedSphere":
        return OrientedSphere(self.center, -self.radius)


@dataclass(frozen=True)
class OrientedPlane:
    """Plane <v, x> = d with unit normal v; the orientation is the direction of v."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        v = np.array(self.normal, dtype=float)
        n = float(np.linalg.norm(v))
        if not abs(n - 1.0) <= UNIT_TOL:
            raise PreconditionError(f"plane normal must be a unit vector (|v| = {n:.6g})")
        v.setflags(write=False)
        object.__setattr__(self, "normal", v)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, normal, point) -> "OrientedPlane":
        v = np.asarray(normal, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(v, float(v @ np.asarray(point, dtype=float)))

    def distance_residual(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return np.abs(p @ self.normal - self.offset)

    def signed_distance(self, point) -> float:
        """Signed distance of a sphere center from the plane, <v, c> - d."""
        return float(np.asarray(point, dtype=float) @ self.normal - self.offset)
