"""Planar segment geometry on complex coordinates.

All functions are vectorized over numpy complex arrays; a segment is the
pair of its endpoints.
"""

from __future__ import annotations

import numpy as np


def _cross(u, v):
    return (np.conj(u) * v).imag


def point_segment_distance(p, a, b):
    """Distance from points ``p`` to segments ``[a, b]`` (broadcasting)."""
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((np.conj(ab) * (p - a)).real) / denom
    t = np.where(denom == 0.0, 0.0, np.clip(t, 0.0, 1.0))
    return np.abs(p - (a + t * ab))


def segments_intersect(a0, a1, b0, b1):
    """Boolean mask: does segment [a0,a1] properly touch segment [b0,b1]?

    Collinear overlaps and endpoint touches count as intersections; the test
    is conservative for crossing detection.
    """
    d1 = _cross(b1 - b0, a0 - b0)
    d2 = _cross(b1 - b0, a1 - b0)
    d3 = _cross(a1 - a0, b0 - a0)
    d4 = _cross(a1 - a0, b1 - a0)
    straddle = (d1 * d2 <= 0.0) & (d3 * d4 <= 0.0)
    # rule out the collinear-but-disjoint case via a distance check
    degenerate = (d1 == 0.0) & (d2 == 0.0) & (d3 == 0.0) & (d4 == 0.0)
    if np.any(degenerate):
        near = np.minimum(
            np.minimum(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
            np.minimum(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)),
        )
        straddle = np.where(degenerate, near == 0.0, straddle)
    return straddle


def segment_segment_distance(a0, a1, b0, b1):
    """Euclidean distance between segments; zero when they intersect."""
    d = np.minimum(
        np.minimum(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
        np.minimum(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)),
    )
    return np.where(segments_intersect(a0, a1, b0, b1), 0.0, d)


def polyline_min_distance(points, b0, b1):
    """Minimum distance from the polyline through ``points`` to segment [b0,b1]."""
    a0 = points[:-1]
    a1 = points[1:]
    return float(np.min(segment_segment_distance(a0, a1, b0, b1)))


def vertical_segment_distance(a0, a1, height):
    """Distance from segments [a0, a1] to the vertical segment [0, i*height].

    Exact and specialized for speed: endpoint-to-segment distances both ways
    plus a crossing test of the vertical line within the height range.
    """
    y0 = np.minimum(np.maximum(a0.imag, 0.0), height)
    d = np.hypot(a0.real, a0.imag - y0)
    y1 = np.minimum(np.maximum(a1.imag, 0.0), height)
    d = np.minimum(d, np.hypot(a1.real, a1.imag - y1))
    d = np.minimum(d, point_segment_distance(np.complex128(0.0), a0, a1))
    d = np.minimum(d, point_segment_distance(np.complex128(1j * height), a0, a1))
    denom = a0.real - a1.real
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = a0.real / denom
    ycross = a0.imag + frac * (a1.imag - a0.imag)
    crossing = (a0.real * a1.real < 0.0) & (ycross >= 0.0) & (ycross <= height)
    return np.where(crossing, 0.0, d)
