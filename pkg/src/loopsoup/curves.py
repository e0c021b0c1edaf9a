"""Discretized parametrized planar curves and loops.

A :class:`Curve` is a pair of equal-length arrays: strictly increasing
Brownian times starting at 0, and complex sample points.  Curves are
immutable after construction (the arrays are frozen), so they can be shared
freely between workers.  A :class:`Loop` is a curve whose first and last
points coincide bit-exactly; an :class:`UnrootedLoop` is the equivalence
class of a loop under circular time shift, stored through the canonical
representative rooted at the sample of least imaginary part.

``curve_distance`` approximates the reparametrization metric

    inf over increasing theta of sup_s ( |s - theta(s)| + |gamma(s) - gamma'(theta(s))| )

by a monotone-matching dynamic program on the sample grids.  The DP value is
an upper bound that converges as the grids refine and is itself a metric on
discretized curves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .conformal import ConformalMap
from .errors import EndpointMismatch, NonIntegrable, OutOfDomain, PointNotOnLoop

__all__ = [
    "Curve",
    "Loop",
    "UnrootedLoop",
    "concat",
    "reverse",
    "conformal_image",
    "curve_distance",
    "unrooted_distance",
    "reroot",
    "radius",
    "write_ndjson",
    "read_ndjson",
]


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Curve:
    """Time-parametrized discretized planar path."""

    times: np.ndarray
    points: np.ndarray
    kind: str = "bridge"

    def __post_init__(self):
        times = _frozen(self.times, np.float64)
        points = _frozen(self.points, np.complex128)
        if times.ndim != 1 or points.shape != times.shape or len(times) < 2:
            raise ValueError("need matching 1-d arrays with at least two samples")
        if times[0] != 0.0:
            raise ValueError("time axis must start at zero")
        if not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class Loop(Curve):
    """Closed curve: first and last samples equal bit-exactly."""

    kind: str = "loop"

    def __post_init__(self):
        super().__post_init__()
        if self.points[0] != self.points[-1]:
            raise ValueError("loop must close exactly")


@dataclass(frozen=True)
class UnrootedLoop:
    """Circular-shift equivalence class, held via its canonical representative.

    The canonical root is the sample of minimal imaginary part, ties broken
    by smallest index, so canonicalizing twice is the same as once.
    """

    rep: Loop = field()

    @classmethod
    def from_loop(cls, loop: Loop) -> "UnrootedLoop":
        return cls(reroot(loop, "lowest-imag"))

    @property
    def duration(self) -> float:
        return self.rep.duration


def concat(a: Curve, b: Curve, kind: str | None = None) -> Curve:
    """Concatenation; requires ``a`` to end exactly where ``b`` starts."""
    if a.points[-1] != b.points[0]:
        raise EndpointMismatch(
            f"curves meet at {a.points[-1]} vs {b.points[0]}"
        )
    times = np.concatenate([a.times, a.duration + b.times[1:]])
    points = np.concatenate([a.points, b.points[1:]])
    kind = kind if kind is not None else a.kind
    if points[0] == points[-1]:
        return Loop(times, points, kind=kind)
    return Curve(times, points, kind=kind)


def reverse(c: Curve) -> Curve:
    """Time reversal; an involution that swaps the endpoints."""
    times = c.duration - c.times[::-1]
    times = times - times[0]  # clear negative zero
    cls = Loop if isinstance(c, Loop) else Curve
    return cls(times, c.points[::-1], kind=c.kind)


def conformal_image(
    m: ConformalMap, c: Curve, blowup_tol: float = 1e12
) -> Curve:
    """Image of a curve with the Brownian time change.

    New sample times are the trapezoidal cumulative integral of
    ``|m'(gamma(s))|**2``.  Endpoint samples where the derivative is
    singular (boundary points of the map) borrow the neighboring speed; a
    blow-up at an interior sample raises :class:`NonIntegrable`.
    """
    pts = c.points
    inside = m.contains(pts)
    if not np.all(inside):
        raise OutOfDomain("curve sample outside the validity region of the map")
    img = m.apply(pts)
    speed = np.abs(m.derivative(pts)) ** 2
    bad = ~np.isfinite(speed) | (speed > blowup_tol)
    if bad.ndim == 0:
        bad = bad[None]
    if np.any(bad[1:-1]):
        raise NonIntegrable("derivative blow-up at an interior sample")
    if bad[0]:
        speed[0] = speed[1]
    if bad[-1]:
        speed[-1] = speed[-2]
    dt = np.diff(c.times)
    seg = 0.5 * (speed[1:] + speed[:-1]) * dt
    if np.any(seg <= 0.0) or not np.all(np.isfinite(seg)):
        raise NonIntegrable("degenerate time change on a segment")
    times = np.concatenate([[0.0], np.cumsum(seg)])
    if isinstance(c, Loop) and img[0] == img[-1]:
        return Loop(times, img, kind=c.kind)
    return Curve(times, img, kind=c.kind)


def curve_distance(a: Curve, b: Curve) -> float:
    """Monotone-matching upper bound for the reparametrization metric.

    Dynamic program over lattice paths in the sample-index grid; the ground
    cost of matching sample i of ``a`` to sample j of ``b`` is
    ``|t_i - u_j| + |a_i - b_j|`` and a matching's cost is the maximum over
    its pairs.
    """
    cost = np.abs(a.times[:, None] - b.times[None, :]) + np.abs(
        a.points[:, None] - b.points[None, :]
    )
    n, m = cost.shape
    d = np.empty_like(cost)
    d[0, 0] = cost[0, 0]
    for j in range(1, m):
        d[0, j] = max(d[0, j - 1], cost[0, j])
    for i in range(1, n):
        d[i, 0] = max(d[i - 1, 0], cost[i, 0])
        prev = d[i - 1]
        row = d[i]
        best = np.minimum(prev[1:], prev[:-1])
        # running minimum over d[i, j-1] forces a sequential pass
        acc = d[i, 0]
        for j in range(1, m):
            acc = min(best[j - 1], acc)
            row[j] = acc = max(acc, cost[i, j])
    return float(d[-1, -1])


def _rotations(loop: Loop):
    for k in range(len(loop) - 1):
        yield _rotate(loop, k)


def _rotate(loop: Loop, k: int) -> Loop:
    """Representative rooted at sample ``k`` (loop has a duplicate endpoint)."""
    if k == 0:
        return loop
    pts = loop.points[:-1]
    dts = np.diff(loop.times)
    new_pts = np.concatenate([np.roll(pts, -k), [pts[k]]])
    new_dts = np.roll(dts, -k)
    times = np.concatenate([[0.0], np.cumsum(new_dts)])
    return Loop(times, new_pts, kind=loop.kind)


def unrooted_distance(a: UnrootedLoop, b: UnrootedLoop) -> float:
    """Minimum of ``curve_distance`` over circular shifts of ``a``'s grid."""
    return min(curve_distance(rot, b.rep) for rot in _rotations(a.rep))


def reroot(
    loop: Loop,
    convention: str,
    at_point: complex | None = None,
    tol: float | None = None,
) -> Loop:
    """Circular shift of a loop so the root satisfies a convention.

    ``lowest-imag`` roots at the sample of minimal imaginary part (ties by
    smallest index), ``max-abs`` at the sample of maximal modulus, and
    ``at-point`` at the sample nearest ``at_point`` provided it lies within
    ``tol``.
    """
    pts = loop.points[:-1]
    if convention == "lowest-imag":
        k = int(np.argmin(pts.imag))
    elif convention == "max-abs":
        k = int(np.argmax(np.abs(pts)))
    elif convention == "at-point":
        if at_point is None:
            raise ValueError("at-point rooting needs a point")
        dist = np.abs(pts - at_point)
        k = int(np.argmin(dist))
        limit = tol if tol is not None else 0.0
        if dist[k] > limit:
            raise PointNotOnLoop(
                f"nearest sample is {dist[k]:.3g} away, tolerance {limit:.3g}"
            )
    else:
        raise ValueError(f"unknown rooting convention {convention!r}")
    return _rotate(loop, k)


def radius(c: Curve) -> float:
    """Largest modulus over the samples."""
    return float(np.max(np.abs(c.points)))


def curve_to_obj(c: Curve) -> dict:
    return {
        "t": c.times.tolist(),
        "x": c.points.real.tolist(),
        "y": c.points.imag.tolist(),
        "kind": c.kind,
    }


def curve_from_obj(obj: dict) -> Curve:
    t = np.asarray(obj["t"], dtype=np.float64)
    pts = np.asarray(obj["x"], dtype=np.float64) + 1j * np.asarray(
        obj["y"], dtype=np.float64
    )
    kind = obj.get("kind", "bridge")
    if pts[0] == pts[-1]:
        return Loop(t, pts, kind=kind)
    return Curve(t, pts, kind=kind)


def write_ndjson(curves, fh) -> None:
    """One JSON object per line; float round trip is bit-exact."""
    for c in curves:
        fh.write(json.dumps(curve_to_obj(c)))
        fh.write("\n")


def read_ndjson(fh):
    out = []
    for line in fh:
        line = line.strip()
        if line:
            out.append(curve_from_obj(json.loads(line)))
    return out
