"""Figure rendering for sampled curves and verification reports.

Plots are presentation only: the renderer reads curves or report data and
writes SVG (or any matplotlib-supported) files; nothing downstream consumes
them.  Output is made byte-reproducible by fixing the SVG hash salt and
stripping the creation date.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import Curve, Loop
from .hull import fill_hull

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _deterministic_save(fig, path: str) -> None:
    with plt.rc_context({"svg.hashsalt": "loopsoup"}):
        fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)


def render_curves(
    curves,
    path: str,
    shade_hulls: bool = False,
    hull_step: float = 0.02,
    title: str | None = None,
) -> None:
    """Draw curves as polylines, optionally shading the filled loops."""
    fig, ax = plt.subplots(figsize=(7, 7))
    for k, c in enumerate(curves):
        color = _COLORS[k % len(_COLORS)]
        pts = c.points
        if shade_hulls and isinstance(c, Loop):
            try:
                hull = fill_hull(c, hull_step)
                ny, nx = hull.occupied.shape
                ax.imshow(
                    hull.occupied,
                    extent=(hull.x0, hull.x0 + nx * hull.h, hull.y0, hull.y0 + ny * hull.h),
                    origin="lower",
                    cmap="Greys",
                    alpha=0.25,
                    vmin=0,
                    vmax=1,
                    interpolation="nearest",
                )
            except Exception:
                pass
        ax.plot(pts.real, pts.imag, lw=0.7, color=color)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    _deterministic_save(fig, path)


def render_histogram(
    samples,
    path: str,
    bins: int = 60,
    density_curve=None,
    title: str | None = None,
    xlabel: str = "",
) -> None:
    """Histogram of a sampled statistic with an optional theory overlay."""
    samples = np.asarray(samples)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(samples, bins=bins, density=True, alpha=0.6, color=_COLORS[0])
    if density_curve is not None:
        xs = np.linspace(samples.min(), samples.max(), 400)
        ax.plot(xs, density_curve(xs), color=_COLORS[1], lw=1.5, label="theory")
        ax.legend()
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    _deterministic_save(fig, path)


def render_counts(counts, path: str, mean_line: float | None = None, title=None) -> None:
    counts = np.asarray(counts, dtype=int)
    hi = max(counts.max(), 1)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(counts, bins=np.arange(hi + 2) - 0.5, density=True, alpha=0.7, color=_COLORS[0])
    if mean_line is not None:
        ax.axvline(mean_line, color=_COLORS[3], lw=1.5, label=f"mean target {mean_line:g}")
        ax.legend()
    ax.set_xlabel("count")
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title)
    _deterministic_save(fig, path)
