"""Samplers for the bridge, excursion, bubble and windowed loop measures.

Every sampler is a pure function of its parameters and an
:class:`~loopsoup.rng.RngStream`; the sigma-finite measures are only ever
sampled through explicit truncation windows (a duration cutoff and spatial
box for the loop measure, a least-radius cutoff for bubbles), and each
sample records the total mass of the window it was drawn from so masses
compose across runs.

Laws implemented
----------------
* Brownian bridge between fixed endpoints in fixed duration, with exact
  Gaussian endpoints and the exact bridge marginals on a uniform grid.
* Half-plane excursion from the origin: real part a Brownian motion,
  imaginary part a three-dimensional Bessel process simulated exactly at
  the grid times by embedding into a 3-d Brownian norm, run until the first
  exit of a disk of given radius.
* Half-disk excursion from 0 to a boundary arc point, obtained as the
  conformal image (with the Brownian time change) of a half-plane excursion
  under the inverse Joukowski branch; the inward direction is the reversal.
* Bubble at the origin of the half-plane, restricted to radius at least
  ``r_min`` and normalized: the apex radius is Pareto with tail
  ``(r_min / a)**2``, the apex angle has density ``2 sin^2(theta) / pi``,
  and the bubble is the concatenation of an outward and an inward half-disk
  excursion scaled to the apex radius.
* Windowed loop measure: root uniform in a box, duration with density
  proportional to ``1 / t**2`` on the window, loop a rooted Brownian bridge
  returned as an unrooted equivalence class.

Vectorized batch helpers back the statistical acceptance suite; they stream
summary statistics (occupation times, maxima, exit angles) without storing
whole paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import inverse_joukowski, scaling
from .curves import Curve, Loop, UnrootedLoop, concat, conformal_image, reverse
from .domains import Domain, RectWindow
from .errors import BudgetExceeded, WindowUnbounded
from .rng import RngStream

__all__ = [
    "Window",
    "MeasureSample",
    "bridge_mass",
    "sample_bridge",
    "sample_loop_rooted",
    "sample_excursion_halfplane",
    "sample_excursion_halfdisk",
    "sample_bubble",
    "window_mass",
    "sample_loop_measure_window",
    "bridge_paths",
    "draw_window_marks",
    "pareto_radius",
    "sin2_angles",
    "BoxGrid",
    "BoxList",
    "excursion_occupation_batch",
    "halfdisk_excursion_image_batch",
    "bubble_statistics_batch",
    "brownian_paths_1d",
    "segment_minima",
    "min_decomposition_batch",
    "halfplane_stay_probability",
]


@dataclass(frozen=True)
class Window:
    """Truncation window for the loop measure: spatial box times duration range."""

    box: RectWindow
    t_min: float
    t_max: float = math.inf

    def __post_init__(self):
        if not (0.0 < self.t_min < self.t_max):
            raise ValueError("need 0 < t_min < t_max")


@dataclass(frozen=True)
class MeasureSample:
    """A draw from a normalized, windowed measure.

    ``weight`` is an importance weight (1.0 for plain normalized draws) and
    ``mass_of_window`` the total measure of the truncation window the draw
    came from, before any domain restriction; restriction accounting is done
    by the soup layer, which keeps acceptance counts.
    """

    curve: object
    weight: float
    mass_of_window: float

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError("weight must be positive")


# ---------------------------------------------------------------------------
# bridges and rooted loops


def bridge_mass(z: complex, w: complex, t: float) -> float:
    """Total mass of the bridge measure: ``exp(-|z-w|^2 / 2t) / (2 pi t)``."""
    if not t > 0:
        raise ValueError("duration must be positive")
    return math.exp(-abs(z - w) ** 2 / (2.0 * t)) / (2.0 * math.pi * t)


def bridge_paths(z, w, t, n, size, gen) -> np.ndarray:
    """Complex bridge paths from ``z`` to ``w``, shape (size, n+1), exact endpoints."""
    dt = t / n
    steps = gen.standard_normal((size, n, 2)) * math.sqrt(dt)
    walk = np.cumsum(steps[..., 0] + 1j * steps[..., 1], axis=1)
    walk = np.concatenate([np.zeros((size, 1), dtype=np.complex128), walk], axis=1)
    frac = np.linspace(0.0, 1.0, n + 1)
    path = z + walk - (walk[:, -1:] - (w - z)) * frac
    path[:, 0] = z
    path[:, -1] = w
    return path


def sample_bridge(z: complex, w: complex, t: float, n: int, rng: RngStream) -> Curve:
    """Brownian bridge from ``z`` to ``w`` in duration ``t`` on a uniform grid."""
    if not (t > 0 and n >= 2):
        raise ValueError("need t > 0 and at least two steps")
    gen = rng.generator()
    pts = bridge_paths(complex(z), complex(w), t, n, 1, gen)[0]
    times = np.linspace(0.0, t, n + 1)
    return Curve(times, pts, kind="bridge")


def sample_loop_rooted(z: complex, t: float, n: int, rng: RngStream) -> Loop:
    """Rooted Brownian loop: bridge from ``z`` back to ``z``, closed exactly."""
    c = sample_bridge(z, z, t, n, rng)
    return Loop(c.times, c.points, kind="loop")


# ---------------------------------------------------------------------------
# half-plane excursion


def _bessel3_step(y: float, sdt: float, g1: float, g2: float, g3: float) -> float:
    # exact transition of the 3-d Bessel process over one step
    return math.sqrt((y + sdt * g1) ** 2 + (g2 * g2 + g3 * g3) * sdt * sdt)


def sample_excursion_halfplane(
    stop_radius: float,
    n: int,
    rng: RngStream,
    far_radius: float = 4.0,
    far_power: float = 2.0,
    max_steps: int = 10_000_000,
) -> Curve:
    """Half-plane excursion from 0 run to its first exit of ``stop_radius``.

    ``n`` sets the base resolution: the step is ``1/n`` near the origin and
    grows like ``(|z| / far_radius)**far_power`` far away, where the exact
    Bessel transitions keep the law intact at any step size.  The crossing
    of the stopping circle is located by interpolating the final step.
    """
    if not stop_radius > 0:
        raise ValueError("stop radius must be positive")
    gen = rng.generator()
    dt0 = 1.0 / n
    xs = [0.0]
    ys = [0.0]
    ts = [0.0]
    x = 0.0
    y = 0.0
    t = 0.0
    for _ in range(max_steps):
        r = math.hypot(x, y)
        dt = dt0 * max(1.0, (r / far_radius) ** far_power)
        sdt = math.sqrt(dt)
        g = gen.standard_normal(4)
        xn = x + sdt * g[0]
        yn = _bessel3_step(y, sdt, g[1], g[2], g[3])
        if math.hypot(xn, yn) >= stop_radius:
            s = _circle_crossing(x, y, xn - x, yn - y, stop_radius)
            xs.append(x + s * (xn - x))
            ys.append(y + s * (yn - y))
            ts.append(t + s * dt)
            return Curve(np.asarray(ts), np.asarray(xs) + 1j * np.asarray(ys), kind="excursion")
        x, y, t = xn, yn, t + dt
        xs.append(x)
        ys.append(y)
        ts.append(t)
    raise BudgetExceeded("excursion did not reach the stopping radius")


def _circle_crossing(x, y, dx, dy, radius):
    # smallest s in (0, 1] with |(x,y) + s (dx,dy)| = radius
    a = dx * dx + dy * dy
    b = 2.0 * (x * dx + y * dy)
    c = x * x + y * y - radius * radius
    disc = max(b * b - 4.0 * a * c, 0.0)
    return min(max((-b + math.sqrt(disc)) / (2.0 * a), 1e-12), 1.0)


# ---------------------------------------------------------------------------
# half-disk excursion and bubbles


def _exact_arc_point(theta: float) -> complex:
    return complex(math.cos(theta), math.sin(theta))


def sample_excursion_halfdisk(
    theta: float,
    direction: str,
    n: int,
    rng: RngStream,
    stop_radius: float = 40.0,
) -> Curve:
    """Excursion of the unit half-disk between 0 and the arc point e^{i theta}.

    Sampled as the conformal image of a half-plane excursion: the half-disk
    maps onto the half-plane by ``-z - 1/z`` sending 0 to infinity and
    e^{i theta} to ``-2 cos(theta)``, so the inverse branch applied to a
    half-plane excursion started at ``-2 cos(theta)`` (reversed) is the
    outward law.  ``direction="in"`` returns the reversal, which carries the
    law with swapped endpoints.  Endpoints are snapped to the exact values,
    moving them by at most roughly ``1/stop_radius``.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("arc angle must lie in (0, pi)")
    if direction not in ("out", "in"):
        raise ValueError("direction must be 'out' or 'in'")
    hp = sample_excursion_halfplane(stop_radius, n, rng)
    x0 = -2.0 * math.cos(theta)
    shifted = Curve(hp.times, hp.points + x0, kind="excursion")
    img = conformal_image(inverse_joukowski(), reverse(shifted))
    pts = np.array(img.points)
    pts[0] = 0.0
    pts[-1] = _exact_arc_point(theta)
    out = Curve(img.times, pts, kind="excursion")
    return reverse(out) if direction == "in" else out


def pareto_radius(r_min: float, size: int, gen) -> np.ndarray:
    """Apex radii with tail probability ``(r_min / a)**2`` on [r_min, inf)."""
    return r_min / np.sqrt(gen.uniform(size=size))


def sin2_angles(size: int, gen) -> np.ndarray:
    """Angles with density ``2 sin^2(theta) / pi`` on (0, pi), by rejection."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = max(2 * (size - filled), 64)
        cand = gen.uniform(0.0, np.pi, size=m)
        keep = gen.uniform(size=m) < np.sin(cand) ** 2
        got = cand[keep][: size - filled]
        out[filled : filled + got.size] = got
        filled += got.size
    return out


def sample_bubble(
    r_min: float, n: int, rng: RngStream, stop_radius: float = 40.0
) -> Loop:
    """Normalized bubble at the origin restricted to radius at least ``r_min``.

    Splits at the point of maximal modulus: an outward and an independent
    inward half-disk excursion meet at the apex ``r e^{i theta}``, with
    apex radius Pareto(2) above ``r_min`` and apex angle distributed like
    ``sin^2``.
    """
    if not r_min > 0:
        raise ValueError("least radius must be positive")
    gen = rng.generator()
    r = float(pareto_radius(r_min, 1, gen)[0])
    theta = float(sin2_angles(1, gen)[0])
    out = sample_excursion_halfdisk(theta, "out", n, rng.substream(1), stop_radius)
    inward = sample_excursion_halfdisk(theta, "in", n, rng.substream(2), stop_radius)
    unit = concat(out, inward, kind="bubble")
    bubble = conformal_image(scaling(r), unit)
    return Loop(bubble.times, bubble.points, kind="bubble")


# ---------------------------------------------------------------------------
# windowed loop measure


def window_mass(w: Window) -> float:
    """Loop-measure mass of rooted representatives in the window.

    ``area(box) * (1/t_min - 1/t_max) / (2 pi)``; finite ``t_max`` is not
    required here, only for sampling.
    """
    inv_hi = 0.0 if math.isinf(w.t_max) else 1.0 / w.t_max
    return w.box.area * (1.0 / w.t_min - inv_hi) / (2.0 * math.pi)


def draw_window_marks(w: Window, size: int, gen):
    """Root positions (uniform in the box) and durations (density 1/t^2)."""
    if math.isinf(w.t_max):
        raise WindowUnbounded("sampling requires a finite duration cutoff")
    x = gen.uniform(w.box.x0, w.box.x1, size=size)
    y = gen.uniform(w.box.y0, w.box.y1, size=size)
    u = gen.uniform(size=size)
    inv = 1.0 / w.t_min - u * (1.0 / w.t_min - 1.0 / w.t_max)
    return x + 1j * y, 1.0 / inv


def sample_loop_measure_window(
    w: Window,
    n: int,
    rng: RngStream,
    restrict_to: Domain | None = None,
    max_tries: int = 100_000,
) -> MeasureSample:
    """One loop from the normalized windowed loop measure, canonically unrooted.

    With ``restrict_to`` given, loops leaving the domain are rejected, so the
    draw follows the restricted normalized law; the recorded window mass is
    the pre-restriction mass (soups keep the acceptance counts that estimate
    the restricted mass).
    """
    mass = window_mass(w)
    gen = rng.generator()
    for _ in range(max_tries):
        z, t = draw_window_marks(w, 1, gen)
        pts = bridge_paths(complex(z[0]), complex(z[0]), float(t[0]), n, 1, gen)[0]
        if restrict_to is not None and not restrict_to.path_inside(pts):
            continue
        loop = Loop(np.linspace(0.0, float(t[0]), n + 1), pts, kind="loop")
        return MeasureSample(
            curve=UnrootedLoop.from_loop(loop), weight=1.0, mass_of_window=mass
        )
    raise BudgetExceeded("restriction rejected every candidate loop")


# ---------------------------------------------------------------------------
# batch engines for the statistical suite


class BoxGrid:
    """Uniform grid of disjoint boxes with an integer index per point."""

    def __init__(self, x0, x1, y0, y1, nx, ny):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.nx, self.ny = nx, ny
        self.count = nx * ny

    def index(self, x, y):
        ix = np.floor((x - self.x0) / (self.x1 - self.x0) * self.nx).astype(int)
        iy = np.floor((y - self.y0) / (self.y1 - self.y0) * self.ny).astype(int)
        ok = (ix >= 0) & (ix < self.nx) & (iy >= 0) & (iy < self.ny)
        return np.where(ok, iy * self.nx + ix, -1)

    @property
    def box_area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0) / self.count


class BoxList:
    """Small list of explicit, pairwise disjoint boxes (x0, x1, y0, y1)."""

    def __init__(self, boxes):
        self.boxes = [tuple(map(float, b)) for b in boxes]
        self.count = len(self.boxes)

    def index(self, x, y):
        out = np.full(x.shape, -1, dtype=int)
        for k, (x0, x1, y0, y1) in enumerate(self.boxes):
            hit = (x >= x0) & (x < x1) & (y >= y0) & (y < y1)
            out[hit] = k
        return out

    def areas(self):
        return np.array([(x1 - x0) * (y1 - y0) for x0, x1, y0, y1 in self.boxes])


def excursion_occupation_batch(
    stop_radius: float,
    size: int,
    rng: RngStream,
    n: int = 256,
    box_index=None,
    nbox: int = 0,
    far_radius: float = 4.0,
    far_power: float = 2.0,
    max_steps: int = 200_000,
):
    """Occupation times and exit angles for a batch of half-plane excursions.

    Streams ``size`` excursions to their first exit of ``stop_radius``,
    accumulating per-path time spent in each box (the step is attributed to
    the box of its endpoint) and the exit angle on the stopping circle.
    Returns ``(occupation, exit_angle, lifetime)``.
    """
    gen = rng.generator()
    dt0 = 1.0 / n
    x = np.zeros(size)
    y = np.zeros(size)
    t = np.zeros(size)
    idx = np.arange(size)
    occ = np.zeros((size, nbox)) if nbox else None
    exit_angle = np.full(size, np.nan)
    lifetime = np.full(size, np.nan)
    for _ in range(max_steps):
        if idx.size == 0:
            return occ, exit_angle, lifetime
        m = idx.size
        r = np.hypot(x, y)
        dt = dt0 * np.maximum(1.0, (r / far_radius) ** far_power)
        sdt = np.sqrt(dt)
        g = gen.standard_normal((4, m))
        xn = x + sdt * g[0]
        yn = np.sqrt((y + sdt * g[1]) ** 2 + (g[2] ** 2 + g[3] ** 2) * dt)
        out = np.hypot(xn, yn) >= stop_radius
        if nbox:
            alive = ~out
            bi = box_index(xn[alive], yn[alive])
            has = bi >= 0
            if np.any(has):
                occ[idx[alive][has], bi[has]] += dt[alive][has]
        if np.any(out):
            dx = xn[out] - x[out]
            dy = yn[out] - y[out]
            a = dx * dx + dy * dy
            b = 2.0 * (x[out] * dx + y[out] * dy)
            c = x[out] ** 2 + y[out] ** 2 - stop_radius**2
            disc = np.maximum(b * b - 4.0 * a * c, 0.0)
            s = np.clip((-b + np.sqrt(disc)) / (2.0 * a), 0.0, 1.0)
            cx = x[out] + s * dx
            cy = y[out] + s * dy
            exit_angle[idx[out]] = np.arctan2(cy, cx)
            lifetime[idx[out]] = t[out] + s * dt[out]
        keep = ~out
        x, y = xn[keep], yn[keep]
        t = t[keep] + dt[keep]
        idx = idx[keep]
    raise BudgetExceeded("excursion batch exceeded the step budget")


def halfdisk_excursion_image_batch(
    theta: np.ndarray,
    gen,
    n: int = 256,
    stop_radius: float = 40.0,
    box_index=None,
    nbox: int = 0,
    far_radius: float = 2.0,
    far_power: float = 3.0,
    max_steps: int = 400_000,
):
    """Streamed image statistics of half-disk excursions 0 -> e^{i theta}.

    Runs half-plane excursions from ``-2 cos(theta)`` and pushes each step
    through the inverse Joukowski branch, accumulating the image duration
    (Brownian time change), the maximal interior modulus, and optional
    per-box image occupation.  Statistics are invariant under the reversal
    that orients the excursion outward.
    """
    theta = np.asarray(theta, dtype=np.float64)
    size = theta.size
    x0 = -2.0 * np.cos(theta)
    prim = inverse_joukowski().chain[0]

    def image_and_speed(wx, wy):
        w = wx + 1j * wy
        z = prim.apply(w)
        speed = np.abs(prim.d1(w)) ** 2
        return z, speed

    x = x0.copy()
    y = np.zeros(size)
    idx = np.arange(size)
    dur = np.zeros(size)
    interior_max = np.zeros(size)
    occ = np.zeros((size, nbox)) if nbox else None
    _, speed_prev = image_and_speed(x, y)
    dt0 = 1.0 / n
    for _ in range(max_steps):
        if idx.size == 0:
            return {"duration": dur, "interior_max": interior_max, "occupation": occ}
        m = idx.size
        rho = np.hypot(x - x0[idx], y)
        dt = dt0 * np.maximum(1.0, (rho / far_radius) ** far_power)
        sdt = np.sqrt(dt)
        g = gen.standard_normal((4, m))
        xn = x + sdt * g[0]
        yn = np.sqrt((y + sdt * g[1]) ** 2 + (g[2] ** 2 + g[3] ** 2) * dt)
        z, speed = image_and_speed(xn, yn)
        dt_img = 0.5 * (speed_prev + speed) * dt
        dur[idx] += dt_img
        az = np.abs(z)
        interior_max[idx] = np.maximum(interior_max[idx], az)
        if nbox:
            bi = box_index(z.real, z.imag)
            has = bi >= 0
            if np.any(has):
                occ[idx[has], bi[has]] += dt_img[has]
        out = np.hypot(xn - x0[idx], yn) >= stop_radius
        keep = ~out
        x, y = xn[keep], yn[keep]
        idx = idx[keep]
        speed_prev = speed[keep]
    raise BudgetExceeded("half-disk excursion batch exceeded the step budget")


def bubble_statistics_batch(
    r_min: float,
    size: int,
    rng: RngStream,
    n: int = 256,
    stop_radius: float = 40.0,
):
    """Radius, apex angle, duration and interior-max for a batch of bubbles.

    The apex sample attains the drawn radius exactly (the two half-disk
    excursions stay strictly inside the unit disk), so the realized radius
    is the drawn Pareto radius; ``interior_max`` lets callers verify that.
    """
    gen = rng.generator()
    r = pareto_radius(r_min, size, gen)
    theta = sin2_angles(size, gen)
    a = halfdisk_excursion_image_batch(theta, gen, n=n, stop_radius=stop_radius)
    b = halfdisk_excursion_image_batch(theta, gen, n=n, stop_radius=stop_radius)
    duration = (a["duration"] + b["duration"]) * r**2
    interior_max = np.maximum(a["interior_max"], b["interior_max"])
    return {
        "radius": r,
        "angle": theta,
        "duration": duration,
        "interior_max": interior_max,
    }


def halfplane_stay_probability(times: np.ndarray, points: np.ndarray) -> float:
    """Probability that the continuum path behind a skeleton stays above the axis.

    Given the sampled values, the in-between pieces are independent Brownian
    bridges, and a bridge between heights a, b > 0 over a step dt dips below
    zero with probability ``exp(-2 a b / dt)``; the product over segments is
    therefore the exact conditional probability that the continuum path
    stays in the half-plane.  Zero when any sample lies on or below the axis.
    """
    y = np.asarray(points).imag
    if np.any(y <= 0.0):
        return 0.0
    dt = np.diff(np.asarray(times))
    log_keep = np.log1p(-np.exp(-2.0 * y[:-1] * y[1:] / dt))
    return float(np.exp(np.sum(log_keep)))


def brownian_paths_1d(t: float, n: int, size: int, gen) -> np.ndarray:
    """One-dimensional Brownian paths from 0, shape (size, n+1)."""
    steps = gen.standard_normal((size, n)) * math.sqrt(t / n)
    walk = np.cumsum(steps, axis=1)
    return np.concatenate([np.zeros((size, 1)), walk], axis=1)


def segment_minima(paths: np.ndarray, dt: float, gen) -> np.ndarray:
    """Exact conditional minima of each grid segment of 1-d Brownian paths.

    Given consecutive values a, b over a step of length dt, the segment
    minimum is ``(a + b - sqrt((a - b)^2 - 2 dt log U)) / 2`` with U uniform,
    which is the exact inverse of the reflection tail formula.
    """
    a = paths[:, :-1]
    b = paths[:, 1:]
    u = gen.uniform(size=a.shape)
    return 0.5 * (a + b - np.sqrt((a - b) ** 2 - 2.0 * dt * np.log(u)))


def min_decomposition_batch(
    n: int, size: int, gen, pinned: bool = False
) -> dict:
    """Minimum decomposition statistics for 1-d paths on [0, 1].

    With ``pinned=False`` the path is a free Brownian motion (argmin is
    arcsine distributed, the pre/post pieces are meanders); with
    ``pinned=True`` it is a bridge back to 0.  Returns the exact path
    minimum ``M`` (via exact segment minima), a bin-smoothed argmin time,
    the terminal value, and ``psi = (Y0 - M)(Y1 - M)``.
    """
    paths = brownian_paths_1d(1.0, n, size, gen)
    if pinned:
        frac = np.linspace(0.0, 1.0, n + 1)
        paths = paths - paths[:, -1:] * frac
        paths[:, -1] = 0.0
    dt = 1.0 / n
    mins = segment_minima(paths, dt, gen)
    k = np.argmin(mins, axis=1)
    m = mins[np.arange(size), k]
    tstar = (k + gen.uniform(size=size)) * dt
    y1 = paths[:, -1]
    psi = (0.0 - m) * (y1 - m)
    return {"min": m, "tstar": tstar, "terminal": y1, "psi": psi}
