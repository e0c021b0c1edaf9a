"""Chronological discovery of soup loops along a capacity-parametrized curve.

Travelling along a simple curve parametrized by half-plane capacity, each
soup loop becomes visible at the first capacity time its trace touches the
loop.  Re-rooting the loop at the contact point and mapping it through the
normalized complement map ``g_t`` (tip to the origin, Brownian time change)
turns it into a bubble at the origin; the stream of mapped bubbles indexed
by discovery time is a Poisson point process with intensity equal to the
soup intensity times the bubble measure.  This module implements the
discovery scan, the loop-added process with its jump clock, the total loop
time, and a Monte Carlo driver that samples soups tightly around the curve
so the Poisson statistics of discoveries can be measured at scale.

Hit detection on discretized paths is tolerance-defined: a loop is deemed
hit when the trace comes within ``delta_hit`` of a sampled segment, located
by bisection on the capacity time.  The driver refines candidate loops by
exact Brownian-bridge midpoint insertion until every segment near the trace
has step below ``(delta_hit / 2)**2``, so the spatial resolution near the
trace matches the hit tolerance.  Near-coincident discovery times (possible
at finite resolution, vanishing in the continuum) are logged, and ties are
broken by loop id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import VerticalSlit
from .conformal import ConformalMap
from .curves import Curve, Loop, conformal_image, radius, reroot
from .domains import Domain, RectWindow
from .errors import WindowTooSmall
from .geometry import (
    point_segment_distance,
    segment_segment_distance,
    vertical_segment_distance,
)
from .rng import RngStream
from .samplers import (
    Window,
    bridge_paths,
    draw_window_marks,
    halfplane_stay_probability,
    window_mass,
)
from .soups import LoopSoup

__all__ = [
    "Discovery",
    "LoopAddedPath",
    "first_hit_time",
    "discover",
    "non_escape_check",
    "predicted_non_escape_probability",
    "build_loop_added_path",
    "total_loop_time",
    "DiscoveryRun",
    "run_chronological_discovery",
    "validate_discovery_window",
    "DEFAULT_DISCOVERY_WINDOW",
]

DEFAULT_DISCOVERY_WINDOW = Window(
    box=RectWindow(-12.0, 0.0, 12.0, 13.0), t_min=0.02, t_max=150.0
)


@dataclass(frozen=True)
class Discovery:
    """One discovered loop: hit time, re-rooted loop, and its mapped bubble."""

    r: float
    loop: Loop
    bubble: Loop
    loop_id: int

    @property
    def t_loop(self) -> float:
        return self.loop.duration

    @property
    def rad_bubble(self) -> float:
        return radius(self.bubble)


@dataclass(frozen=True)
class LoopAddedPath:
    """The curve with its discovered loops traversed in chronological order.

    The clock uses capacity time for the stretches along the curve (the
    construction fixes only the jump structure; any strictly increasing
    curve clock yields the same trace) and jumps by the loop duration at
    each discovery.
    """

    trace: Curve
    jumps: tuple[tuple[float, float, float], ...]  # (r, S(r-), S(r+))
    horizon: float
    eta_clock: str = "capacity"

    @property
    def total_loop_time(self) -> float:
        return sum(splus - sminus for _, sminus, splus in self.jumps)

    def clock(self, r: float) -> tuple[float, float]:
        """Left and right limits of the time-change at capacity time ``r``."""
        before = sum(sp - sm for rj, sm, sp in self.jumps if rj < r)
        at = sum(sp - sm for rj, sm, sp in self.jumps if rj == r)
        return r + before, r + before + at


def first_hit_time(eta, horizon: float, loop: Loop, delta_hit: float) -> float | None:
    """Earliest capacity time at which the trace touches the loop, or None.

    Touch means segment-to-segment distance at most ``delta_hit``; the time
    is refined by bisection (see the curve's ``first_contact``).
    """
    pts = loop.points
    return eta.first_contact(pts[:-1], pts[1:], horizon, delta_hit)


def _snap_loop_ends(loop: Loop, value: complex) -> Loop:
    pts = np.array(loop.points)
    pts[0] = value
    pts[-1] = value
    return Loop(loop.times, pts, kind=loop.kind)


def _make_discovery(eta, r: float, loop: Loop, loop_id: int, delta_hit: float) -> Discovery:
    hit_point = eta.point(r)
    gaps = np.abs(np.diff(loop.points))
    tol = 2.0 * delta_hit + float(np.max(gaps))
    rooted = reroot(loop, "at-point", at_point=hit_point, tol=tol)
    gmap = eta.gmap(r) if r > 0 else None
    if gmap is None:
        bubble = rooted
    else:
        bubble = conformal_image(gmap, rooted)
    # the root maps next to the origin; in the continuum it lands exactly there
    bubble = _snap_loop_ends(bubble, 0j)
    bubble = Loop(bubble.times, bubble.points, kind="bubble")
    return Discovery(r=r, loop=rooted, bubble=bubble, loop_id=loop_id)


def discover(
    eta, horizon: float, soup: LoopSoup, delta_hit: float
) -> tuple[list[Discovery], list[tuple[int, int]]]:
    """Chronological discoveries of the soup loops along the curve.

    Returns the discoveries sorted by hit time (ties broken by loop id) and
    a log of near-coincident hit-time pairs, which the continuum forbids but
    finite resolution can produce.
    """
    found = []
    for loop_id, ul in enumerate(soup.loops):
        r = first_hit_time(eta, horizon, ul.rep, delta_hit)
        if r is not None and r <= horizon:
            found.append((r, loop_id, ul.rep))
    found.sort(key=lambda item: (item[0], item[1]))
    near_doubles = [
        (found[i][1], found[i + 1][1])
        for i in range(len(found) - 1)
        if found[i + 1][0] - found[i][0] < delta_hit**2
    ]
    discoveries = [
        _make_discovery(eta, r, loop, loop_id, delta_hit)
        for r, loop_id, loop in found
    ]
    return discoveries, near_doubles


def predicted_non_escape_probability(
    intensity: float, horizon: float, domain_map: ConformalMap
) -> float:
    """Probability that no discovered loop leaves the domain, to first order.

    The escaping-bubble rate is ``-S(0)/6`` per unit half-plane capacity of
    the trace, with S the Schwarzian of the domain's origin-fixing map onto
    the half-plane, frozen at time zero; the trace up to Loewner time
    ``horizon`` has capacity ``2 * horizon``.  The frozen integrand is exact
    in the limit of a short horizon or a large domain.
    """
    s0 = domain_map.schwarzian(0j)
    capacity = 2.0 * horizon
    return math.exp(intensity * capacity * s0.real / 6.0)


def non_escape_check(
    eta, horizon: float, domain: Domain, soups, delta_hit: float
) -> float:
    """Fraction of soups whose discovered loops all stay inside the domain."""
    soups = list(soups)
    ok = 0
    for soup in soups:
        discoveries, _ = discover(eta, horizon, soup, delta_hit)
        if all(domain.path_inside(d.loop.points) for d in discoveries):
            ok += 1
    return ok / len(soups)


def build_loop_added_path(
    eta, horizon: float, discoveries, eta_steps: int = 256
) -> LoopAddedPath:
    """Interleave the curve with full traversals of its discovered loops.

    With no discoveries the result is the curve on the capacity clock; each
    discovery splices the full loop traversal at its hit time, after which
    the curve resumes where the loop closed (within the hit tolerance).
    """
    events = sorted(discoveries, key=lambda d: (d.r, d.loop_id))
    grid = np.linspace(0.0, horizon, eta_steps + 1)
    times = [0.0]
    points = [eta.point(0.0)]
    jumps = []
    offset = 0.0  # accumulated loop time so far

    def append_eta(r: float) -> None:
        s = r + offset
        if s > times[-1]:
            times.append(s)
            points.append(eta.point(r))

    prev_r = 0.0
    for d in events:
        for r in grid[(grid > prev_r) & (grid < d.r)]:
            append_eta(float(r))
        append_eta(d.r)
        s_minus = times[-1]
        loop = d.loop
        times.extend((s_minus + loop.times[1:]).tolist())
        points.extend(loop.points[1:].tolist())
        jumps.append((d.r, s_minus, s_minus + loop.duration))
        offset += loop.duration
        prev_r = d.r
    for r in grid[grid > prev_r]:
        append_eta(float(r))
    trace = Curve(
        np.asarray(times), np.asarray(points, dtype=np.complex128), kind="loop-added"
    )
    return LoopAddedPath(trace=trace, jumps=tuple(jumps), horizon=horizon)


def total_loop_time(eta, horizon: float, soup: LoopSoup, delta_hit: float) -> float:
    """Sum of the durations of the loops discovered along the curve."""
    discoveries, _ = discover(eta, horizon, soup, delta_hit)
    return sum(d.t_loop for d in discoveries)


# ---------------------------------------------------------------------------
# scalable Monte Carlo driver


def refine_near_slit(
    times: np.ndarray,
    points: np.ndarray,
    height: float,
    gen,
    dt_target: float,
    delta_hit: float,
    margin: float = 4.0,
):
    """Brownian-bridge midpoint refinement of the samples near the slit.

    A sampled segment is split (exactly in law, by the conditional Gaussian
    midpoint) while its distance to the vertical segment ``[0, i height]``
    is within ``delta_hit + margin * sqrt(dt)`` and its step exceeds
    ``dt_target``.  The margin makes missed excursions of the true path
    beyond the refined neighborhood exponentially unlikely
    (``exp(-2 margin**2)`` per segment).
    """
    while True:
        dt = np.diff(times)
        a0 = points[:-1]
        a1 = points[1:]
        d = vertical_segment_distance(a0, a1, height)
        need = (d <= delta_hit + margin * np.sqrt(dt)) & (dt > dt_target)
        if not np.any(need):
            return times, points
        pos = np.flatnonzero(need)
        mid_t = 0.5 * (times[pos] + times[pos + 1])
        half = dt[pos] / 4.0
        noise = gen.standard_normal((2, pos.size)) * np.sqrt(half)
        mid_p = 0.5 * (points[pos] + points[pos + 1]) + noise[0] + 1j * noise[1]
        times = np.insert(times, pos + 1, mid_t)
        points = np.insert(points, pos + 1, mid_p)


@dataclass
class DiscoveryRun:
    """Aggregate statistics of repeated discovery scans over fresh soups."""

    intensity: float
    horizon: float
    threshold: float
    counts: np.ndarray  # discoveries with bubble radius >= threshold, per soup
    hit_times: list  # per soup, sorted hit times (thresholded)
    bubble_radius: np.ndarray
    bubble_duration: np.ndarray
    bubble_angle: np.ndarray  # argument of the bubble sample of maximal modulus
    loop_duration: np.ndarray
    near_double_hits: int = 0
    config: dict = field(default_factory=dict)

    @property
    def mean_count(self) -> float:
        return float(np.mean(self.counts))

    @property
    def dispersion(self) -> float:
        m = np.mean(self.counts)
        return float(np.var(self.counts, ddof=1) / m) if m > 0 else float("nan")

    def pooled_arrival_times(self) -> np.ndarray:
        """Hit times concatenated across soups with unit offsets per soup.

        Independent rate-constant Poisson processes on consecutive unit
        capacity intervals concatenate to one Poisson process, so the gaps
        of the pooled sequence are exponential.
        """
        out = []
        for k, ts in enumerate(self.hit_times):
            out.extend(k * self.horizon + t for t in ts)
        return np.asarray(out)


def _scan_one_soup(soup_idx, rng, eta, window, mass, intensity, horizon,
                   threshold, base_steps, delta_hit, reach, collect_bubbles):
    """One soup: sample candidates near the trace, refine, discover, map."""
    gen = rng.substream(soup_idx).generator()
    tip = 1j * eta.tip_height(horizon)
    dt_target = (delta_hit / 2.0) ** 2
    n_loops = int(gen.poisson(intensity * mass))
    found = []
    if n_loops:
        z, t = draw_window_marks(window, n_loops, gen)
        d_root = point_segment_distance(z, 0j, tip)
        keep = d_root <= reach * np.sqrt(t) + delta_hit
        z, t = z[keep], t[keep]
        if z.size:
            # batched coarse bridges, one duration per row
            steps = gen.standard_normal((z.size, base_steps, 2))
            steps *= np.sqrt(t / base_steps)[:, None, None]
            walk = np.cumsum(steps[..., 0] + 1j * steps[..., 1], axis=1)
            walk = np.concatenate(
                [np.zeros((z.size, 1), dtype=np.complex128), walk], axis=1
            )
            frac = np.linspace(0.0, 1.0, base_steps + 1)
            paths = z[:, None] + walk - walk[:, -1:] * frac
            paths[:, 0] = z
            paths[:, -1] = z
            # one vectorized coarse distance pass over every candidate segment
            d_all = vertical_segment_distance(
                paths[:, :-1].ravel(), paths[:, 1:].ravel(), tip.imag
            ).reshape(z.size, base_steps)
            margin = delta_hit + 4.0 * np.sqrt(t / base_steps)
            near = np.flatnonzero((d_all.min(axis=1) <= margin))
            for k in near:
                pts = paths[k]
                ti = float(t[k])
                times = np.linspace(0.0, ti, base_steps + 1)
                times, pts = refine_near_slit(
                    times, pts, tip.imag, gen, dt_target, delta_hit
                )
                r = eta.first_contact(pts[:-1], pts[1:], horizon, delta_hit)
                if r is None or r > horizon:
                    continue
                # exact restriction to the half-plane soup: accept with the
                # conditional probability that the continuum loop stays
                # above the axis given the refined skeleton
                if gen.uniform() >= halfplane_stay_probability(times, pts):
                    continue
                found.append((r, Loop(times, pts, kind="loop")))
    found.sort(key=lambda item: item[0])
    near_doubles = sum(
        1
        for i in range(len(found) - 1)
        if found[i + 1][0] - found[i][0] < delta_hit**2
    )
    count = 0
    soup_times = []
    stats = []
    for loop_id, (r, loop) in enumerate(found):
        disc = _make_discovery(eta, r, loop, loop_id, delta_hit)
        rad = disc.rad_bubble
        if rad < threshold:
            continue
        count += 1
        soup_times.append(r)
        if collect_bubbles:
            bpts = disc.bubble.points
            angle = float(np.angle(bpts[np.argmax(np.abs(bpts))]))
            stats.append((rad, disc.bubble.duration, angle, disc.t_loop))
    return count, soup_times, stats, near_doubles


def _discovery_chunk(args):
    lo, hi, kwargs = args
    out = [_scan_one_soup(i, **kwargs) for i in range(lo, hi)]
    return out


def run_chronological_discovery(
    intensity: float,
    horizon: float,
    threshold: float,
    n_soups: int,
    rng: RngStream,
    window: Window | None = None,
    base_steps: int = 64,
    delta_hit: float = 0.005,
    reach: float = 5.0,
    eta: VerticalSlit | None = None,
    collect_bubbles: bool = True,
    workers: int = 1,
) -> DiscoveryRun:
    """Discovery statistics over many independent soups along the slit.

    Each soup is sampled only where it can matter: candidate loops whose
    root lies farther than ``reach`` standard deviations from the trace are
    dropped up front (the probability that such a loop reaches the trace is
    below ``exp(-2 reach**2)``, negligible at the default), survivors are
    sampled coarsely and refined near the trace by exact bridge midpoints
    down to step ``(delta_hit / 2)**2``, restricted to the half-plane by the
    exact skeleton-conditional thinning, and hits are mapped through the
    slit maps.  Only discoveries with bubble radius at least ``threshold``
    enter the counts.

    The discovered bubble stream runs at intensity ``intensity`` times the
    bubble measure per unit half-plane capacity of the trace; the trace has
    capacity ``2 * horizon``, so the expected thresholded count per soup is
    ``intensity * 2 * horizon / threshold**2`` up to truncation effects
    (see the window-doubling validator).

    Randomness derives from ``rng.substream(soup_index)``, so results are
    independent of ``workers`` and of scheduling order.
    """
    eta = eta or VerticalSlit()
    window = window or DEFAULT_DISCOVERY_WINDOW
    mass = window_mass(window)
    kwargs = dict(
        rng=rng,
        eta=eta,
        window=window,
        mass=mass,
        intensity=intensity,
        horizon=horizon,
        threshold=threshold,
        base_steps=base_steps,
        delta_hit=delta_hit,
        reach=reach,
        collect_bubbles=collect_bubbles,
    )
    results = []
    if workers > 1 and n_soups > 1:
        from concurrent.futures import ProcessPoolExecutor

        edges = np.linspace(0, n_soups, 4 * workers + 1).astype(int)
        chunks = [(int(a), int(b), kwargs) for a, b in zip(edges[:-1], edges[1:]) if a < b]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_discovery_chunk, chunks):
                results.extend(part)
    else:
        results = _discovery_chunk((0, n_soups, kwargs))
    counts = np.array([r[0] for r in results], dtype=int)
    hit_times = [r[1] for r in results]
    stats = [s for r in results for s in r[2]]
    near_doubles = sum(r[3] for r in results)
    arr = np.asarray(stats, dtype=float).reshape(-1, 4)
    return DiscoveryRun(
        intensity=intensity,
        horizon=horizon,
        threshold=threshold,
        counts=counts,
        hit_times=hit_times,
        bubble_radius=arr[:, 0],
        bubble_duration=arr[:, 1],
        bubble_angle=arr[:, 2],
        loop_duration=arr[:, 3],
        near_double_hits=near_doubles,
        config={
            "window": {
                "box": [window.box.x0, window.box.y0, window.box.x1, window.box.y1],
                "t_min": window.t_min,
                "t_max": window.t_max,
            },
            "base_steps": base_steps,
            "delta_hit": delta_hit,
            "reach": reach,
            "seed": rng.seed,
            "stream": rng.stream,
        },
    )


def validate_discovery_window(
    intensity: float,
    horizon: float,
    threshold: float,
    n_soups: int,
    rng: RngStream,
    window: Window | None = None,
    tolerance_sigma: float = 3.0,
    **kwargs,
) -> tuple[float, float]:
    """Doubling check for the truncation window.

    Reruns the discovery scan with the spatial box doubled and the duration
    range widened (half the lower, double the upper cutoff) and raises
    :class:`WindowTooSmall` when the mean thresholded count shifts by more
    than ``tolerance_sigma`` combined standard errors.  Returns both means.
    """
    window = window or DEFAULT_DISCOVERY_WINDOW
    b = window.box
    cx = 0.5 * (b.x0 + b.x1)
    big_box = RectWindow(
        cx + 2.0 * (b.x0 - cx), b.y0, cx + 2.0 * (b.x1 - cx), b.y0 + 2.0 * (b.y1 - b.y0)
    )
    big = Window(box=big_box, t_min=window.t_min / 2.0, t_max=window.t_max * 2.0)
    base = run_chronological_discovery(
        intensity, horizon, threshold, n_soups, rng.substream(0), window=window, **kwargs
    )
    wide = run_chronological_discovery(
        intensity, horizon, threshold, n_soups, rng.substream(1), window=big, **kwargs
    )
    se = math.sqrt(
        np.var(base.counts, ddof=1) / n_soups + np.var(wide.counts, ddof=1) / n_soups
    )
    if abs(base.mean_count - wide.mean_count) > tolerance_sigma * se:
        raise WindowTooSmall(
            f"doubling shifted the mean count from {base.mean_count:.4f} "
            f"to {wide.mean_count:.4f} (se {se:.4f})"
        )
    return base.mean_count, wide.mean_count
