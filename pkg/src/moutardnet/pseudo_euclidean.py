"""Pseudo-Euclidean inner product spaces R^{p,q}.

Coordinates are always stored Euclidean slots first, then the ``e0`` and
``einf`` slots (Moebius and Lie spaces), then ``e6`` (Lie space only).  The
Moebius pair is normalised so that

    <e0, e0> = <einf, einf> = 0,    <e0, einf> = -1/2,

which gives <f^, g^> = -|f - g|^2 / 2 for light-cone lifts of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError

DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class Signature:
    positive: int
    negative: int = 0

    def __post_init__(self):
        if self.positive < 1 or self.negative < 0:
            raise ValueError(f"invalid signature ({self.positive}, {self.negative})")
        if self.positive + self.negative < 2:
            raise ValueError("total dimension must be at least 2")

    @property
    def dim(self) -> int:
        return self.positive + self.negative


class Space:
    """A coordinate space with a fixed non-degenerate symmetric bilinear form.

    Use the constructors :meth:`euclidean`, :meth:`diagonal`, :meth:`moebius`
    and :meth:`lie` rather than calling ``Space`` directly.  Vectors are plain
    numpy arrays whose last axis has length :attr:`dim`; all methods broadcast
    over leading axes.
    """

    def __init__(self, gram, kind, euclidean_dim, signature):
        gram = np.array(gram, dtype=float)
        gram.setflags(write=False)
        self.gram = gram
        self.kind = kind
        self.euclidean_dim = euclidean_dim
        self.signature = signature

    @classmethod
    def euclidean(cls, n: int) -> "Space":
        return cls(np.eye(n), "euclidean", n, Signature(n, 0))

    @classmethod
    def diagonal(cls, p: int, q: int) -> "Space":
        sig = Signature(p, q)
        return cls(np.diag([1.0] * p + [-1.0] * q), "diagonal", p, sig)

    @classmethod
    def moebius(cls, n: int) -> "Space":
        """R^{n+1,1} with coordinates (x_1..x_n, e0, einf)."""
        g = np.zeros((n + 2, n + 2))
        g[:n, :n] = np.eye(n)
        g[n, n + 1] = g[n + 1, n] = -0.5
        return cls(g, "moebius", n, Signature(n + 1, 1))

    @classmethod
    def lie(cls, n: int = 3) -> "Space":
        """R^{n+1,2} with coordinates (x_1..x_n, e0, einf, e6)."""
        g = np.zeros((n + 3, n + 3))
        g[:n, :n] = np.eye(n)
        g[n, n + 1] = g[n + 1, n] = -0.5
        g[n + 2, n + 2] = -1.0
        return cls(g, "lie", n, Signature(n + 1, 2))

    @classmethod
    def from_spec(cls, kind: str, signature) -> "Space":
        p, q = signature
        if kind == "euclidean":
            return cls.euclidean(p)
        if kind == "diagonal":
            return cls.diagonal(p, q)
        if kind == "moebius":
            return cls.moebius(p - 1)
        if kind == "lie":
            return cls.lie(p - 1)
        raise ValueError(f"unknown basis kind {kind!r}")

    def __repr__(self):
        return f"Space({self.kind}, signature=({self.signature.positive},{self.signature.negative}))"

    def __eq__(self, other):
        return (
            isinstance(other, Space)
            and self.kind == other.kind
            and self.gram.shape == other.gram.shape
            and np.array_equal(self.gram, other.gram)
        )

    def __hash__(self):
        return hash((self.kind, self.gram.shape))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def e0_slot(self) -> int:
        self._require_moebius()
        return self.euclidean_dim

    @property
    def einf_slot(self) -> int:
        self._require_moebius()
        return self.euclidean_dim + 1

    @property
    def e6_slot(self) -> int:
        if self.kind != "lie":
            raise AttributeError("only Lie spaces carry an e6 slot")
        return self.euclidean_dim + 2

    def _require_moebius(self):
        if self.kind not in ("moebius", "lie"):
            raise AttributeError(f"{self.kind} space has no e0/einf slots")

    @cached_property
    def e0(self) -> np.ndarray:
        return self.basis_vector(self.e0_slot)

    @cached_property
    def einf(self) -> np.ndarray:
        return self.basis_vector(self.einf_slot)

    @cached_property
    def e6(self) -> np.ndarray:
        return self.basis_vector(self.e6_slot)

    def basis_vector(self, slot: int) -> np.ndarray:
        v = np.zeros(self.dim)
        v[slot] = 1.0
        v.setflags(write=False)
        return v

    def check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.ndim == 0 or v.shape[-1] != self.dim:
            raise DimensionError(f"expected vectors of length {self.dim}, got shape {v.shape}")
        return v

    def inner(self, u, v):
        """Bilinear form <u, v>, broadcasting over leading axes."""
        u = self.check(u)
        v = self.check(v)
        return np.einsum("...i,ij,...j->...", u, self.gram, v)

    def norm2(self, u):
        return self.inner(u, u)

    def lower(self, v) -> np.ndarray:
        """Covector G v, so that <u, v> = u . lower(v)."""
        return self.check(v) @ self.gram


def numerical_rank(vectors, tol: float = DEFAULT_RANK_TOL) -> int:
    """Rank of the matrix with the given rows.

    Singular values below ``tol`` times the largest one are treated as zero.
    """
    m = np.atleast_2d(np.asarray(vectors, dtype=float))
    if m.size == 0:
        raise ValueError("numerical_rank needs at least one vector")
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol * s[0]))


def singular_values(vectors) -> np.ndarray:
    """Singular values of the row matrix after scaling every row to unit length.

    Zero rows are left as they are.  Row scaling does not change the rank but
    removes the dependence of relative thresholds on arbitrary representative
    scales, so certifiers use this rather than the raw spectrum.
    """
    m = np.atleast_2d(np.asarray(vectors, dtype=float))
    norms = np.linalg.norm(m, axis=1)
    norms[norms == 0] = 1.0
    return np.linalg.svd(m / norms[:, None], compute_uv=False)


def orthogonal_complement(vectors, space: Space, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Basis (as rows) of {b : <b, v> = 0 for every given v}.

    The complement is taken with respect to the bilinear form of ``space``, so
    it may contain some of the input vectors when they are isotropic.
    """
    vecs = np.asarray(vectors, dtype=float)
    if vecs.size == 0:
        return np.eye(space.dim)
    vecs = space.check(np.atleast_2d(vecs))
    covectors = vecs @ space.gram
    norms = np.linalg.norm(covectors, axis=1)
    norms[norms == 0] = 1.0
    _, s, vt = np.linalg.svd(covectors / norms[:, None])
    rank = 0 if s.size == 0 or s[0] == 0 else int(np.count_nonzero(s >= tol * s[0]))
    return vt[rank:].copy()
