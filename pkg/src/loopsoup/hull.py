"""Filled-loop hulls on a pixel grid.

The hull of a loop is the complement of the unbounded component of the
loop's complement.  It is computed by rasterizing the loop conservatively
onto a grid of step ``h`` and flood-filling from the bounding-box boundary;
cells never reached, plus the curve cells themselves, form the hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .curves import Loop
from .errors import DegenerateGrid

__all__ = ["Hull", "fill_hull"]


@dataclass(frozen=True)
class Hull:
    """Occupancy grid of a filled loop."""

    h: float
    x0: float
    y0: float
    occupied: np.ndarray  # bool, shape (ny, nx)

    @property
    def area(self) -> float:
        return float(np.count_nonzero(self.occupied)) * self.h * self.h

    def contains_point(self, z: complex) -> bool:
        ix = int(np.floor((z.real - self.x0) / self.h))
        iy = int(np.floor((z.imag - self.y0) / self.h))
        ny, nx = self.occupied.shape
        if 0 <= iy < ny and 0 <= ix < nx:
            return bool(self.occupied[iy, ix])
        return False


def _rasterize(points: np.ndarray, h: float, x0: float, y0: float, shape):
    """Mark every cell visited by the polyline, sampling at h/4 spacing."""
    grid = np.zeros(shape, dtype=bool)
    a = points[:-1]
    b = points[1:]
    lengths = np.abs(b - a)
    nsub = np.maximum(1, np.ceil(lengths / (h / 4.0)).astype(int))
    for start, stop, n in zip(a, b, nsub):
        frac = np.linspace(0.0, 1.0, n + 1)
        zs = start + frac * (stop - start)
        ix = np.floor((zs.real - x0) / h).astype(int)
        iy = np.floor((zs.imag - y0) / h).astype(int)
        grid[iy, ix] = True
    return grid


def fill_hull(loop: Loop, h: float) -> Hull:
    """Occupancy grid of the filled loop at grid step ``h``."""
    if not h > 0:
        raise ValueError("grid step must be positive")
    pts = loop.points
    xmin, xmax = float(np.min(pts.real)), float(np.max(pts.real))
    ymin, ymax = float(np.min(pts.imag)), float(np.max(pts.imag))
    diam = max(xmax - xmin, ymax - ymin)
    if h >= diam:
        raise DegenerateGrid(f"grid step {h} is not below the loop extent {diam}")
    # one-cell margin so the outside is connected around the loop
    x0 = xmin - 2.0 * h
    y0 = ymin - 2.0 * h
    nx = int(np.ceil((xmax - x0) / h)) + 2
    ny = int(np.ceil((ymax - y0) / h)) + 2
    curve = _rasterize(pts, h, x0, y0, (ny, nx))
    labels, _ = ndimage.label(~curve)
    border = np.unique(
        np.concatenate(
            [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
        )
    )
    border = border[border != 0]
    outside = np.isin(labels, border)
    occupied = ~outside
    return Hull(h=h, x0=x0, y0=y0, occupied=occupied)
