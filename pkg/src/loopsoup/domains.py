"""Subdomains of the upper half-plane with conservative path containment.

Each domain answers two questions: is a point inside, and does a straight
sample segment stay inside.  Segment tests are conservative in the sense
that a segment is only declared inside when that is certain from its
endpoints and exact convexity/distance arguments, so "crossing"
classifications err on the safe side.  Membership is total on the
half-plane: any finite point gets an answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import point_segment_distance, segment_segment_distance

__all__ = [
    "Domain",
    "Halfplane",
    "HalfDisk",
    "AnnularHalfDisk",
    "ExteriorHalfDisk",
    "SlitHalfplane",
    "RectWindow",
]


class Domain:
    """Region of the upper half-plane."""

    def contains(self, z):
        raise NotImplementedError

    def segment_inside(self, a, b):
        """Conservative mask: segments [a, b] certainly inside the domain."""
        raise NotImplementedError

    def path_inside(self, points) -> bool:
        """Whether the whole sampled path stays inside (conservatively)."""
        pts = np.asarray(points, dtype=np.complex128)
        if not np.all(self.contains(pts)):
            return False
        return bool(np.all(self.segment_inside(pts[:-1], pts[1:])))


@dataclass(frozen=True)
class Halfplane(Domain):
    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return z.imag > 0.0

    def segment_inside(self, a, bseg):
        a = np.asarray(a, dtype=np.complex128)
        bseg = np.asarray(bseg, dtype=np.complex128)
        return (a.imag > 0.0) & (bseg.imag > 0.0)


@dataclass(frozen=True)
class HalfDisk(Domain):
    """{z : Im z > 0, |z| < radius}; convex, so endpoint checks suffice."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (z.imag > 0.0) & (np.abs(z) < self.radius)

    def segment_inside(self, a, b):
        return self.contains(a) & self.contains(b)


@dataclass(frozen=True)
class ExteriorHalfDisk(Domain):
    """{z : Im z > 0, |z| > radius}."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (z.imag > 0.0) & (np.abs(z) > self.radius)

    def segment_inside(self, a, b):
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        clear = point_segment_distance(np.complex128(0.0), a, b) > self.radius
        return (a.imag > 0.0) & (b.imag > 0.0) & clear


@dataclass(frozen=True)
class AnnularHalfDisk(Domain):
    """{z in half-plane : inner < |z| < 1}."""

    inner: float

    def __post_init__(self):
        if not 0 < self.inner < 1:
            raise ValueError("inner radius must lie in (0, 1)")

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        r = np.abs(z)
        return (z.imag > 0.0) & (r > self.inner) & (r < 1.0)

    def segment_inside(self, a, b):
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        clear = point_segment_distance(np.complex128(0.0), a, b) > self.inner
        return self.contains(a) & self.contains(b) & clear


@dataclass(frozen=True)
class SlitHalfplane(Domain):
    """Half-plane minus the vertical slit of capacity time ``t`` at the origin."""

    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("capacity time must be positive")

    @property
    def height(self) -> float:
        return 2.0 * np.sqrt(self.t)

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        on_slit = (z.real == 0.0) & (z.imag <= self.height)
        return (z.imag > 0.0) & ~on_slit

    def segment_inside(self, a, b):
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        tip = 1j * self.height
        clear = segment_segment_distance(a, b, np.complex128(0.0), tip) > 0.0
        return (a.imag > 0.0) & (b.imag > 0.0) & clear


@dataclass(frozen=True)
class RectWindow(Domain):
    """Open axis-aligned rectangle in the half-plane; convex."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and 0 <= self.y0 < self.y1):
            raise ValueError("rectangle must be nonempty and in the half-plane")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (
            (z.real > self.x0)
            & (z.real < self.x1)
            & (z.imag > self.y0)
            & (z.imag < self.y1)
        )

    def segment_inside(self, a, b):
        return self.contains(a) & self.contains(b)
