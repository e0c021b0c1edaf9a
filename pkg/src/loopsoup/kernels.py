"""Explicit Poisson kernels and the excursion Green's function.

Normalizations: interior-to-boundary kernels integrate to one over the
boundary arclength.  Boundary-to-boundary (excursion) kernels use the
normal-derivative normalization, under which the half-plane kernel from the
origin to a real point x is ``1 / (pi x**2)``.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergent, OutOfDomain

__all__ = [
    "poisson_kernel_halfplane",
    "poisson_kernel_halfdisk",
    "poisson_kernel_annular_halfdisk",
    "green_excursion",
    "halfdisk_excursion_mass",
    "HALFDISK_ASYMPTOTIC_CONSTANT",
    "ANNULAR_ASYMPTOTIC_CONSTANT",
]

# Calibrated bounds for the small-radius kernel expansions: the residual of
# the half-disk kernel against (2/pi) r sin(theta) sin(phi) stays below
# HALFDISK_ASYMPTOTIC_CONSTANT * r**2 sin(theta) sin(phi) for r <= 1/2, and
# the annular kernel residual against (4/pi) sinh(s) sin(theta) sin(phi)
# stays below ANNULAR_ASYMPTOTIC_CONSTANT * r * s * sin(theta) sin(phi) for
# r < 1/2, exp(-s) in (3/4, 1).  Values were fit on a dense parameter grid
# (see tests) and rounded up.
HALFDISK_ASYMPTOTIC_CONSTANT = 16.0
ANNULAR_ASYMPTOTIC_CONSTANT = 6.0


def poisson_kernel_halfplane(z: complex, x: float):
    """Poisson kernel of the upper half-plane at boundary point ``x``.

    For interior ``z`` this is ``Im z / (pi |z - x|**2)``, the exit density
    of Brownian motion.  For real ``z`` the boundary-to-boundary limit
    ``1 / (pi (x - z)**2)`` is returned (excursion normalization).
    """
    z = np.asarray(z, dtype=np.complex128)
    x = np.asarray(x, dtype=np.float64)
    if np.any(z.imag < 0.0):
        raise OutOfDomain("half-plane kernel requires Im z >= 0")
    dx2 = (z.real - x) ** 2
    interior = z.imag > 0.0
    with np.errstate(divide="ignore"):
        out = np.where(
            interior,
            z.imag / (np.pi * (dx2 + z.imag**2)),
            1.0 / (np.pi * dx2),
        )
    if out.ndim == 0:
        return float(out)
    return out


def poisson_kernel_halfdisk(z: complex, phi: float):
    """Poisson kernel of the upper unit half-disk at the arc point e^{i phi}.

    Computed exactly by conjugating with ``f(z) = -z - 1/z``:
    ``H(z, e^{i phi}) = 2 sin(phi) H_halfplane(f(z), -2 cos(phi))``.
    ``z = 0`` returns the boundary-to-boundary mass density
    ``2 sin(phi) / pi``.
    """
    z = np.asarray(z, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.float64)
    if np.any((z.imag < 0.0) | (np.abs(z) >= 1.0)):
        raise OutOfDomain("half-disk kernel requires z in the open half-disk")
    if np.any((phi <= 0.0) | (phi >= np.pi)):
        raise OutOfDomain("arc angle must lie in (0, pi)")
    origin = z == 0
    zsafe = np.where(origin, 0.5j, z)
    fz = -zsafe - 1.0 / zsafe
    fw = -2.0 * np.cos(phi)
    interior = 2.0 * np.sin(phi) * poisson_kernel_halfplane(fz, fw)
    out = np.where(origin, 2.0 * np.sin(phi) / np.pi, interior)
    if out.ndim == 0:
        return float(out)
    return out


def halfdisk_excursion_mass(theta: float, radius: float = 1.0) -> float:
    """Total mass of the excursion measure of ``radius * D+`` from 0 to the arc.

    Equals ``2 sin(theta) / (pi radius**2)``.
    """
    if not 0.0 < theta < np.pi:
        raise OutOfDomain("arc angle must lie in (0, pi)")
    return 2.0 * np.sin(theta) / (np.pi * radius**2)


def poisson_kernel_annular_halfdisk(
    s: float, theta: float, r: float, phi: float, rtol: float = 1e-12
) -> float:
    """Poisson kernel of {r < |z| < 1} in the half-plane, inner-circle boundary.

    Interior point ``exp(-s + i theta)``, boundary point ``r exp(i phi)``.
    Separation of variables gives the exact series

        (4 / (pi r)) sum_n sin(n theta) sin(n phi) sinh(n s) r**n / (1 + r**2n)

    summed until the geometric tail bound drops below ``rtol`` of the partial
    sum.  Requires ``exp(-s) in (r, 1)`` so the series converges.
    """
    if not (0.0 < r < 1.0):
        raise NonConvergent("inner radius must lie in (0, 1)")
    if not (0.0 <= theta <= np.pi and 0.0 <= phi <= np.pi):
        raise OutOfDomain("angles must lie in [0, pi]")
    if theta in (0.0, np.pi) or phi in (0.0, np.pi):
        return 0.0
    q = r * np.exp(s)
    if not (s > 0.0 and q < 1.0):
        raise NonConvergent("requires exp(-s) strictly between r and 1")
    total = 0.0
    n = 1
    while True:
        term = (
            np.sin(n * theta)
            * np.sin(n * phi)
            * np.sinh(n * s)
            * r**n
            / (1.0 + r ** (2 * n))
        )
        total += term
        # |term_m| <= q**m for m > n, so the tail is below q**(n+1)/(1-q)
        tail = q ** (n + 1) / (1.0 - q)
        if tail <= rtol * max(abs(total), 1e-300):
            break
        n += 1
        if n > 100000:
            raise NonConvergent("series did not reach tolerance")
    return 4.0 / (np.pi * r) * total


def green_excursion(z: complex):
    """Green's function of the normalized half-plane excursion from 0 to infinity.

    ``2 Im(z)**2 / |z|**2``, bounded by 2; occupation density of the
    excursion is this divided by pi.
    """
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.imag < 0.0):
        raise OutOfDomain("requires Im z >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(z == 0, 0.0, 2.0 * z.imag**2 / np.abs(z) ** 2)
    if out.ndim == 0:
        return float(out)
    return out
