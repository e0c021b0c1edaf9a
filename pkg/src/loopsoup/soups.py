"""Poisson collections of loops and bubbles.

A loop soup over a window is a Poisson number of independent windowed loop
draws; restriction to a domain is realized by thinning, which keeps the
count law exactly Poisson with the restricted mass.  Soups are materialized
lists (not lazy streams): the truncation window is declared up front, every
soup carries its configuration, and a fixed stream reproduces the soup
bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import Loop, UnrootedLoop, curve_from_obj, curve_to_obj
from .domains import Domain
from .errors import WindowUnbounded
from .rng import RngStream
from .samplers import (
    Window,
    bridge_paths,
    draw_window_marks,
    sample_bubble,
    window_mass,
)

__all__ = [
    "LoopSoup",
    "BubbleSoup",
    "sample_loop_soup",
    "split_restriction",
    "sample_bubble_soup",
    "write_soup",
    "read_soup",
]


@dataclass(frozen=True)
class LoopSoup:
    """Poisson collection of unrooted loops over a truncation window."""

    intensity: float
    window: Window
    loops: tuple[UnrootedLoop, ...]
    restricted_to: Domain | None = None
    candidates: int = 0
    config: dict = field(default_factory=dict)

    @property
    def restricted_mass(self) -> float:
        """Window mass times the empirical acceptance of the restriction."""
        mass = window_mass(self.window)
        if self.restricted_to is None or self.candidates == 0:
            return mass
        return mass * len(self.loops) / self.candidates

    def __len__(self) -> int:
        return len(self.loops)


@dataclass(frozen=True)
class BubbleSoup:
    """Time-stamped Poisson collection of bubbles at the origin."""

    intensity: float
    horizon: float
    r_min: float
    items: tuple[tuple[float, Loop], ...]
    config: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.items)


def sample_loop_soup(
    intensity: float,
    window: Window,
    rng: RngStream,
    restrict_to: Domain | None = None,
    n_steps: int = 128,
) -> LoopSoup:
    """Loop soup over the window, optionally restricted to a domain by thinning."""
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    if math.isinf(window.t_max):
        raise WindowUnbounded("soup sampling requires a finite duration cutoff")
    gen = rng.generator()
    mass = window_mass(window)
    count = int(gen.poisson(intensity * mass))
    loops = []
    if count:
        z, t = draw_window_marks(window, count, gen)
        for k in range(count):
            pts = bridge_paths(complex(z[k]), complex(z[k]), float(t[k]), n_steps, 1, gen)[0]
            if restrict_to is not None and not restrict_to.path_inside(pts):
                continue
            times = np.linspace(0.0, float(t[k]), n_steps + 1)
            loops.append(UnrootedLoop.from_loop(Loop(times, pts, kind="loop")))
    cfg = {"n_steps": n_steps, "seed": rng.seed, "stream": rng.stream}
    return LoopSoup(
        intensity=intensity,
        window=window,
        loops=tuple(loops),
        restricted_to=restrict_to,
        candidates=count,
        config=cfg,
    )


def split_restriction(soup: LoopSoup, domain: Domain):
    """Partition a soup into the loops inside a domain and the crossing rest.

    The inside part is itself a soup for the restricted measure, independent
    of the crossing family.
    """
    inside = []
    crossing = []
    for ul in soup.loops:
        if domain.path_inside(ul.rep.points):
            inside.append(ul)
        else:
            crossing.append(ul)
    inner = LoopSoup(
        intensity=soup.intensity,
        window=soup.window,
        loops=tuple(inside),
        restricted_to=domain,
        candidates=len(soup.loops),
        config=dict(soup.config),
    )
    return inner, crossing


def sample_bubble_soup(
    intensity: float,
    horizon: float,
    r_min: float,
    rng: RngStream,
    n_steps: int = 128,
) -> BubbleSoup:
    """Bubble soup: Poisson(intensity * horizon / r_min**2) time-stamped bubbles."""
    if not (intensity > 0 and horizon > 0 and r_min > 0):
        raise ValueError("intensity, horizon and least radius must be positive")
    gen = rng.generator()
    count = int(gen.poisson(intensity * horizon / r_min**2))
    stamps = np.sort(gen.uniform(0.0, horizon, size=count))
    items = tuple(
        (float(stamps[k]), sample_bubble(r_min, n_steps, rng.substream(k + 1)))
        for k in range(count)
    )
    cfg = {"n_steps": n_steps, "seed": rng.seed, "stream": rng.stream}
    return BubbleSoup(
        intensity=intensity, horizon=horizon, r_min=r_min, items=items, config=cfg
    )


def write_soup(soup: LoopSoup, fh) -> None:
    """JSON header line with the soup parameters, then one loop per line."""
    w = soup.window
    header = {
        "lambda": soup.intensity,
        "window": {
            "box": [w.box.x0, w.box.y0, w.box.x1, w.box.y1],
            "t_min": w.t_min,
            "t_max": w.t_max,
        },
        "config": soup.config,
        "version": 1,
    }
    fh.write(json.dumps(header))
    fh.write("\n")
    for ul in soup.loops:
        fh.write(json.dumps(curve_to_obj(ul.rep)))
        fh.write("\n")


def read_soup(fh):
    """Header dict and loops from a soup stream written by :func:`write_soup`."""
    header = json.loads(fh.readline())
    loops = []
    for line in fh:
        line = line.strip()
        if line:
            loops.append(UnrootedLoop.from_loop(curve_from_obj(json.loads(line))))
    return header, loops
