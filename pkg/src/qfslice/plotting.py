"""Matplotlib figures written next to the raw rasters and tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

from .raster import CELL_NAMES, ComponentReport, PixelGrid  # noqa: E402

FIG_WIDTH = 5.0

params = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 7,
    "mathtext.fontset": "stix",
    "savefig.dpi": 150,
}

# black discrete locus as in the published pictures
_CELL_COLORS = ["#000000", "#ffffff", "#9a9a9a", "#d8d8e8"]


def _figure(width=FIG_WIDTH, height=None) -> Figure:
    matplotlib.rcParams.update(params)
    return Figure(figsize=(width, height or width))


def plot_slice(grid: PixelGrid, path, components: list[ComponentReport] | None = None,
               title: str | None = None, mark_components: int = 12) -> Path:
    """Annotated view of a rendered slice with Tr B axes."""
    spec = grid.spec
    half = spec.width / 2
    extent = (spec.center.real - half, spec.center.real + half,
              spec.center.imag - half, spec.center.imag + half)
    fig = _figure()
    ax = fig.add_subplot(111)
    ax.imshow(grid.cells, cmap=ListedColormap(_CELL_COLORS), vmin=0, vmax=3,
              extent=extent, interpolation="nearest", origin="upper")
    ax.set_xlabel(r"$\mathrm{Re}\,\mathrm{Tr}\,B$")
    ax.set_ylabel(r"$\mathrm{Im}\,\mathrm{Tr}\,B$")
    if title is None:
        title = f"Tr A = {spec.trA:g}, width {spec.width:g}"
    ax.set_title(title)
    if components:
        for rep in components[:mark_components]:
            c = rep.centroid
            color = "tab:red" if rep.is_standard else "tab:orange"
            ax.plot([c.real], [c.imag], marker="+", color=color, ms=6)
            ax.annotate(str(rep.label), (c.real, c.imag), color=color, fontsize=6,
                        xytext=(3, 3), textcoords="offset points")
    handles = [Patch(facecolor=_CELL_COLORS[k], edgecolor="k", lw=0.3, label=CELL_NAMES[k])
               for k in range(4)]
    ax.legend(handles=handles, loc="lower left", framealpha=0.85)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    return path


def plot_scaling(report, path) -> Path:
    """|ratio_n - limit| against n on a log scale."""
    fig = _figure(FIG_WIDTH, FIG_WIDTH * 0.62)
    ax = fig.add_subplot(111)
    n = np.arange(1, len(report.ratios) + 1)
    err = np.array([abs(z - report.limit) for z in report.ratios])
    err = np.where(err > 0, err, np.nan)
    ax.semilogy(n, err, "o-", ms=3, lw=1)
    ax.axhline(1e-6, color="0.5", ls="--", lw=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel(r"$|\mathrm{Tr}A^nB/\mathrm{Tr}A^{n-1}B - k|$")
    ax.set_title(f"Tr A = {report.trA:g}, k = {report.limit:.6f}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    return path


def plot_figure_panel(grids: list[PixelGrid], path, title: str) -> Path:
    """Side-by-side panels, one per window, like the published figures."""
    k = len(grids)
    fig = _figure(FIG_WIDTH * k * 0.7, FIG_WIDTH * 0.8)
    for i, grid in enumerate(grids):
        spec = grid.spec
        half = spec.width / 2
        ax = fig.add_subplot(1, k, i + 1)
        ax.imshow(grid.cells, cmap=ListedColormap(_CELL_COLORS), vmin=0, vmax=3,
                  extent=(spec.center.real - half, spec.center.real + half,
                          spec.center.imag - half, spec.center.imag + half),
                  interpolation="nearest")
        ax.set_title(f"width {spec.width:g}")
        ax.set_xlabel(r"$\mathrm{Re}\,\mathrm{Tr}\,B$")
        if i == 0:
            ax.set_ylabel(r"$\mathrm{Im}\,\mathrm{Tr}\,B$")
    fig.suptitle(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    return path
