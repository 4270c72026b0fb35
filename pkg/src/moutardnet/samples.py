"""Seeded sample configurations used by the CLI generators and the test suite."""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 1729


def _rng(seed):
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def smooth_axes(n1: int, n2: int, seed=None, dim: int = 3, step: float = 0.1):
    """Two smooth random curves through a common origin point, roughly orthogonal."""
    rng = _rng(seed)
    t1 = np.arange(n1) * step
    t2 = np.arange(n2) * step
    c1 = rng.normal(scale=0.3, size=(3, dim))
    c2 = rng.normal(scale=0.3, size=(3, dim))
    e1 = np.zeros(dim)
    e2 = np.zeros(dim)
    e1[0], e2[1] = 1.0, 1.0
    ax1 = np.outer(t1, e1) + np.outer(t1 ** 2, c1[0]) + np.outer(np.sin(2 * t1), 0.2 * c1[1])
    ax2 = np.outer(t2, e2) + np.outer(t2 ** 2, c2[0]) + np.outer(np.sin(2 * t2), 0.2 * c2[1])
    return ax1, ax2


def isothermic_labels_for(axes, seed=None, spread: float = 0.1):
    """Labels close to (|delta_1 f|^2, -|delta_2 f|^2), which give embedded faces with a tame metric."""
    rng = _rng(seed)
    out = []
    for k, ax in enumerate(axes):
        e2 = np.sum(np.diff(ax, axis=0) ** 2, axis=1)
        wobble = 1.0 + spread * np.sin(np.arange(len(e2)) * rng.uniform(0.5, 1.5) + rng.uniform(0, 6))
        out.append((1.0 if k == 0 else -1.0) * e2 * wobble)
    return out


def isothermic_sample(n1: int = 15, n2: int = 15, seed=None, dim: int = 3):
    """``(axes, labels)`` for a generic discrete isothermic net."""
    axes = smooth_axes(n1, n2, seed, dim)
    return list(axes), isothermic_labels_for(axes, seed)


def sphere_axes(n1: int, n2: int, seed=None, step: float = 0.08):
    """Two curves on the unit sphere S^2 through a common point."""
    rng = _rng(seed)
    t1 = np.arange(n1) * step
    t2 = np.arange(n2) * step
    w = rng.uniform(-0.3, 0.3, size=2)
    th1, ph1 = 1.2 + t1, 0.3 + w[0] * t1 ** 2
    th2, ph2 = 1.2 + w[1] * t2 ** 2, 0.3 + t2

    def pt(th, ph):
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    return pt(th1, ph1), pt(th2, ph2)


def lisothermic_sample(n1: int = 10, n2: int = 10, seed=None):
    """``(gauss_axes, labels, offset_axes)`` for a generic L-isothermic net."""
    rng = _rng(seed)
    gauss = sphere_axes(n1, n2, seed)
    labels = isothermic_labels_for(gauss, seed)
    d0 = rng.uniform(0.5, 1.5)
    d1 = d0 + 0.1 * np.cumsum(np.r_[0.0, rng.uniform(-1, 1, n1 - 1)])
    d2 = d0 + 0.1 * np.cumsum(np.r_[0.0, rng.uniform(-1, 1, n2 - 1)])
    return list(gauss), labels, (d1, d2)


def tnet_sample(n1: int = 6, n2: int = 6, seed=None, dim: int = 4):
    """Random axes in R^dim and face coefficients for a 2D T-net."""
    rng = _rng(seed)
    origin = rng.normal(size=dim)
    ax1 = origin + np.cumsum(np.r_[np.zeros((1, dim)), rng.normal(size=(n1 - 1, dim))], axis=0)
    ax2 = origin + np.cumsum(np.r_[np.zeros((1, dim)), rng.normal(size=(n2 - 1, dim))], axis=0)
    a = rng.uniform(0.5, 1.5, size=(n1 - 1, n2 - 1)) * rng.choice([-1.0, 1.0], size=(n1 - 1, n2 - 1))
    return [ax1, ax2], {(1, 2): a}


def quadric_axes(n1: int = 20, n2: int = 20, seed=None):
    """Axes on the unit sphere S^2 in Euclidean R^3 (a quadric with kappa0 = 1)."""
    return list(sphere_axes(n1, n2, seed, step=0.06))


def moebius_grid(n1: int = 6, n2: int = 6, h: float = 0.1, scale: float = 4.0,
                 shift=(1.0, 0.5, 0.8)) -> np.ndarray:
    """Inversion x / |x|^2 of the square grid x = shift + h (u_1, u_2, 0), scaled by scale / h.

    Every face is a conformal square (q = -1), so the net is isothermic with a
    slowly varying metric; no randomness is involved.
    """
    u1, u2 = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    x = np.stack([h * u1, h * u2, np.zeros(u1.shape)], axis=-1) + np.asarray(shift, dtype=float)
    return x / np.sum(x * x, axis=-1)[..., None] * (scale / h)
