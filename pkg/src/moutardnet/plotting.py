"""Matplotlib figures written to files (Agg backend, no display needed)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_convergence(table, path) -> None:
    """Log-log plot of error against eps with a reference slope-2 line."""
    fig, ax = plt.subplots(figsize=(5, 4))
    eps, err = np.asarray(table.eps), np.asarray(table.errors)
    positive = err > 0
    ax.loglog(eps[positive], err[positive], "o-", label=f"error (fitted order {table.order:.3f})")
    if positive.any():
        k = np.argmax(positive)
        ax.loglog(eps, err[k] * (eps / eps[k]) ** 2, "k--", lw=0.8, label="slope 2")
    ax.set_xlabel("eps")
    ax.set_ylabel(f"|y - y_exact| at {table.target}")
    ax.set_title(f"plus-form Moutard scheme, q = {table.q:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_nets(named_nets, path) -> None:
    """Wireframes of 2D nets in R^3 (or R^2), one panel per ``(name, vertices)`` pair.

    Separate panels keep nets of very different size (a net and its dual) readable.
    """
    named_nets = [(name, np.asarray(v, dtype=float)) for name, v in named_nets]
    k = len(named_nets)
    fig = plt.figure(figsize=(4.5 * k, 4.5))
    for n, (name, f) in enumerate(named_nets):
        three = f.shape[-1] >= 3
        ax = fig.add_subplot(1, k, n + 1, projection="3d" if three else None)
        for lines in (f, np.swapaxes(f, 0, 1)):
            for row in lines:
                ax.plot(*(row[:, c] for c in range(3 if three else 2)), color=f"C{n}", lw=0.7)
        ax.set_title(name)
        if not three:
            ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
