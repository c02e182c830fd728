"""PNG figures of runs, functional histories and slenderness studies.

Uses the non-interactive Agg backend, so figures can be written on machines
without a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .diagnostics import FunctionalReport  # noqa: E402
from .glimm import ApproxSolution  # noqa: E402


def plot_density(sol: ApproxSolution, path: str | Path) -> Path:
    """Density of the sampled cells in the physical ``(x, y)`` plane.

    Each column ``k`` is drawn over ``[x_k, x_{k+1})`` with the cell values
    sampled at ``x_k``; the wedge surface is overlaid.
    """
    mesh = sol.mesh
    n_col = max(sol.rho.shape[0] - 1, 1)
    k = np.arange(n_col + 1)
    i = np.arange(mesh.y_depth + 1)
    xx = np.repeat((k * mesh.dx)[:, None], i.size, axis=1)
    yy = mesh.b0 * xx - 2.0 * mesh.dy * i[None, :]
    values = sol.rho[:n_col]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh_plot = ax.pcolormesh(xx, yy, values, shading="flat", cmap="viridis")
    ax.plot(k * mesh.dx, mesh.b0 * k * mesh.dx, color="k", lw=1.0, label="wedge surface")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="lower left")
    fig.colorbar(mesh_plot, ax=ax, label="density")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_functional(report: FunctionalReport, path: str | Path) -> Path:
    """History of the functional, its linear part and the per-column total variation."""
    ks = [e.k for e in report.entries]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ks, [e.F for e in report.entries], label="F")
    ax.plot(ks, [e.L for e in report.entries], label="L", ls="--")
    ax.plot(ks, [e.tv for e in report.entries], label="total variation", ls=":")
    ax.set_xlabel("column k")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_distances(distances: list[dict], path: str | Path) -> Path:
    """L1 distance to the ``tau = 0`` run against ``tau`` on log axes."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    if distances:
        taus = [row["tau"] for row in distances]
        ax.loglog(taus, [row["distance"] for row in distances], marker="o")
    ax.set_xlabel("tau")
    ax.set_ylabel("L1 distance to tau = 0")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
