"""Composable conformal maps with exact derivatives and Schwarzians.

Points are plain ``complex`` scalars or numpy ``complex128`` arrays; there is
no wrapper point type.  A :class:`ConformalMap` is a chain of primitive
analytic maps applied left to right.  Each primitive carries

* its validity region (evaluation outside raises :class:`OutOfDomain`),
* exact first, second and third derivatives,
* an exact Schwarzian derivative (closed form where the generic ratio
  ``f'''/f' - 1.5 (f''/f')**2`` is numerically fragile, e.g. at the
  Joukowski pole).

Chains compute values and derivatives by the chain rule and Schwarzians by
the cocycle rule ``S(f o g) = S(f)(g) * g'**2 + S(g)``.  Moebius-type
primitives (translation, scaling, moebius, inversion) have Schwarzian
identically zero and are skipped in the accumulation, which keeps chains
finite across intermediate poles: the moebius family is evaluated
projectively, so e.g. the Joukowski map sends 0 to complex infinity and a
following inversion brings it back.

Branch conventions
------------------
``slit_map(t)`` is ``z -> sqrt(z**2 + 4 t)`` on the upper half-plane minus
the vertical slit ``(0, 2 i sqrt(t)]``, taking the square root with
nonnegative imaginary part, which is the branch that behaves like ``z`` at
infinity.  ``inverse_slit_map(t)`` inverts it on the closed half-plane.
``inverse_joukowski`` picks the preimage inside the closed upper unit
half-disk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDerivative, OutOfDomain

__all__ = [
    "ConformalMap",
    "translation",
    "scaling",
    "moebius",
    "joukowski",
    "inverse_joukowski",
    "inversion",
    "slit_map",
    "inverse_slit_map",
    "exp_map",
    "log_map",
    "identity",
    "halfdisk_to_halfplane",
]


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def _sqrt_upper(u):
    """Square root with Im >= 0 (both roots real positive -> +sqrt)."""
    s = np.sqrt(_as_complex(u))
    return np.where(s.imag < 0.0, -s, s)


class _Primitive:
    """One analytic map in a chain."""

    name = "primitive"
    is_moebius = False  # Schwarzian identically zero

    def apply(self, z):
        raise NotImplementedError

    def d1(self, z):
        raise NotImplementedError

    def d2(self, z):
        raise NotImplementedError

    def d3(self, z):
        raise NotImplementedError

    def contains(self, z):
        """Boolean mask of points inside the validity region."""
        z = _as_complex(z)
        return np.ones(z.shape, dtype=bool)

    def schwarzian(self, z):
        d1 = self.d1(z)
        return self.d3(z) / d1 - 1.5 * (self.d2(z) / d1) ** 2


@dataclass(frozen=True)
class _Translation(_Primitive):
    c: complex
    name = "translation"
    is_moebius = True

    def apply(self, z):
        return _as_complex(z) + self.c

    def d1(self, z):
        return np.ones_like(_as_complex(z))

    def d2(self, z):
        return np.zeros_like(_as_complex(z))

    d3 = d2


@dataclass(frozen=True)
class _Scaling(_Primitive):
    r: float
    name = "scaling"
    is_moebius = True

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("scaling factor must be positive")

    def apply(self, z):
        return _as_complex(z) * self.r

    def d1(self, z):
        return np.full_like(_as_complex(z), self.r)

    def d2(self, z):
        return np.zeros_like(_as_complex(z))

    d3 = d2


@dataclass(frozen=True)
class _Moebius(_Primitive):
    a: complex
    b: complex
    c: complex
    d: complex
    name = "moebius"
    is_moebius = True

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("moebius determinant ad - bc must be nonzero")

    def apply(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a * z + self.b) / (self.c * z + self.d)
        if self.c != 0:
            out = np.where(np.isinf(z), self.a / self.c, out)
            pole = z == (-self.d / self.c)
            out = np.where(pole, np.complex128(np.inf), out)
        return out

    def d1(self, z):
        z = _as_complex(z)
        det = self.a * self.d - self.b * self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            return det / (self.c * z + self.d) ** 2

    def d2(self, z):
        z = _as_complex(z)
        det = self.a * self.d - self.b * self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            return -2 * self.c * det / (self.c * z + self.d) ** 3

    def d3(self, z):
        z = _as_complex(z)
        det = self.a * self.d - self.b * self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            return 6 * self.c**2 * det / (self.c * z + self.d) ** 4


@dataclass(frozen=True)
class _Inversion(_Primitive):
    """z -> -1/z, projective at 0 and infinity."""

    name = "inversion"
    is_moebius = True

    def apply(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -1.0 / z
        out = np.where(z == 0, np.complex128(np.inf), out)
        out = np.where(np.isinf(z), np.complex128(0.0), out)
        return out

    def d1(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / z**2

    def d2(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -2.0 / z**3

    def d3(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 6.0 / z**4


@dataclass(frozen=True)
class _Joukowski(_Primitive):
    """z -> -z - 1/z, the upper half-disk onto the upper half-plane."""

    name = "joukowski"

    def apply(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -z - 1.0 / z
        out = np.where(z == 0, np.complex128(np.inf), out)
        out = np.where(np.isinf(z), np.complex128(np.inf), out)
        return out

    def d1(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -1.0 + 1.0 / z**2

    def d2(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -2.0 / z**3

    def d3(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 6.0 / z**4

    def schwarzian(self, z):
        # closed form; the generic ratio is 0/0 at the pole z = 0
        z = _as_complex(z)
        return -6.0 / (1.0 - z**2) ** 2


@dataclass(frozen=True)
class _InverseJoukowski(_Primitive):
    """Inverse of -z - 1/z, branch inside the closed unit half-disk."""

    name = "inverse-joukowski"

    def _z(self, w):
        w = _as_complex(w)
        s = np.sqrt(w**2 - 4.0)
        r1 = 0.5 * (-w + s)
        r2 = 0.5 * (-w - s)
        # roots multiply to 1; keep the one inside the closed disk,
        # on ties (|w| real in [-2,2]) keep the upper root r1
        return np.where(np.abs(r1) <= np.abs(r2), r1, r2)

    @staticmethod
    def _fwd123(z):
        # derivatives of the forward map -z - 1/z at z
        with np.errstate(divide="ignore", invalid="ignore"):
            f1 = -1.0 + 1.0 / z**2
            f2 = -2.0 / z**3
            f3 = 6.0 / z**4
        return f1, f2, f3

    def apply(self, w):
        return self._z(w)

    def contains(self, w):
        w = _as_complex(w)
        return w.imag >= 0.0

    def d1(self, w):
        f1, _, _ = self._fwd123(self._z(w))
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / f1

    def d2(self, w):
        f1, f2, _ = self._fwd123(self._z(w))
        with np.errstate(divide="ignore", invalid="ignore"):
            return -f2 / f1**3

    def d3(self, w):
        f1, f2, f3 = self._fwd123(self._z(w))
        with np.errstate(divide="ignore", invalid="ignore"):
            return (3.0 * f2**2 - f1 * f3) / f1**5

    def schwarzian(self, w):
        # S of an inverse map: -S_f(z) * g'(w)**2 with f the forward map
        z = self._z(w)
        f1, _, _ = self._fwd123(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 6.0 / ((1.0 - z**2) ** 2 * f1**2)


@dataclass(frozen=True)
class _SlitMap(_Primitive):
    """z -> sqrt(z**2 + 4 t), half-plane minus a vertical slit onto half-plane."""

    t: float
    name = "slit-map"

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("slit capacity time must be positive")

    def apply(self, z):
        z = _as_complex(z)
        u = z * z + 4.0 * self.t
        w = _sqrt_upper(u)
        on_real = z.imag == 0.0
        if np.any(on_real):
            xr = np.sign(z.real) * np.sqrt(z.real**2 + 4.0 * self.t)
            w = np.where(on_real, xr.astype(np.complex128), w)
        return w

    def contains(self, z):
        z = _as_complex(z)
        height = 2.0 * np.sqrt(self.t)
        on_slit = (z.real == 0.0) & (z.imag >= 0.0) & (z.imag < height)
        return (z.imag >= 0.0) & ~on_slit

    def d1(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return z / self.apply(z)

    def d2(self, z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 4.0 * self.t / self.apply(z) ** 3

    def d3(self, z):
        z = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -12.0 * self.t * z / self.apply(z) ** 5

    def schwarzian(self, z):
        z = _as_complex(z)
        w4 = (z * z + 4.0 * self.t) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return -12.0 * self.t * (z * z + 2.0 * self.t) / (w4 * z * z)


@dataclass(frozen=True)
class _InverseSlitMap(_Primitive):
    """w -> sqrt(w**2 - 4 t), half-plane onto half-plane minus the slit."""

    t: float
    name = "inverse-slit-map"

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("slit capacity time must be positive")

    def apply(self, w):
        w = _as_complex(w)
        u = w * w - 4.0 * self.t
        v = _sqrt_upper(u)
        on_real = w.imag == 0.0
        if np.any(on_real):
            x = w.real
            outside = np.abs(x) >= 2.0 * np.sqrt(self.t)
            xr = np.where(
                outside,
                (np.sign(x) * np.sqrt(np.maximum(x * x - 4.0 * self.t, 0.0))).astype(
                    np.complex128
                ),
                1j * np.sqrt(np.maximum(4.0 * self.t - x * x, 0.0)),
            )
            v = np.where(on_real, xr, v)
        return v

    def contains(self, w):
        w = _as_complex(w)
        return w.imag >= 0.0

    def d1(self, w):
        w = _as_complex(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            return w / self.apply(w)

    def d2(self, w):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -4.0 * self.t / self.apply(w) ** 3

    def d3(self, w):
        w = _as_complex(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 12.0 * self.t * w / self.apply(w) ** 5

    def schwarzian(self, w):
        w = _as_complex(w)
        v4 = (w * w - 4.0 * self.t) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return 12.0 * self.t * (w * w - 2.0 * self.t) / (v4 * w * w)


@dataclass(frozen=True)
class _Exp(_Primitive):
    """Strip {0 < Im < pi} onto the upper half-plane."""

    name = "exp"

    def apply(self, z):
        return np.exp(_as_complex(z))

    d1 = apply
    d2 = apply
    d3 = apply

    def schwarzian(self, z):
        z = _as_complex(z)
        return np.full_like(z, -0.5)


@dataclass(frozen=True)
class _Log(_Primitive):
    """Upper half-plane onto the strip {0 < Im < pi}, arg in [0, pi]."""

    name = "log"

    def apply(self, z):
        z = _as_complex(z)
        return np.log(np.abs(z)) + 1j * np.angle(z)

    def contains(self, z):
        z = _as_complex(z)
        return (z.imag >= 0.0) & (z != 0)

    def d1(self, z):
        return 1.0 / _as_complex(z)

    def d2(self, z):
        return -1.0 / _as_complex(z) ** 2

    def d3(self, z):
        return 2.0 / _as_complex(z) ** 3

    def schwarzian(self, z):
        return 0.5 / _as_complex(z) ** 2


@dataclass(frozen=True)
class ConformalMap:
    """Chain of primitives applied left to right."""

    chain: tuple[_Primitive, ...]

    def then(self, other: "ConformalMap") -> "ConformalMap":
        """Composition: apply ``self`` first, then ``other``."""
        return ConformalMap(self.chain + other.chain)

    def _check(self, prim, z):
        inside = prim.contains(z)
        if not np.all(inside):
            bad = _as_complex(z)[~np.asarray(inside)]
            raise OutOfDomain(
                f"{prim.name}: point {bad.flat[0]} outside validity region"
            )

    def apply(self, z):
        """Image of ``z`` (scalar or array) under the composed map."""
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        cur = _as_complex(z)
        for prim in self.chain:
            self._check(prim, cur)
            cur = prim.apply(cur)
        return complex(cur) if scalar else cur

    def derivative(self, z):
        """Complex derivative of the chain at ``z`` (product of stage derivatives)."""
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        cur = _as_complex(z)
        deriv = np.ones_like(cur)
        for prim in self.chain:
            self._check(prim, cur)
            deriv = deriv * prim.d1(cur)
            cur = prim.apply(cur)
        return complex(deriv) if scalar else deriv

    def schwarzian(self, z, derivative_tol: float = 1e-12):
        """Schwarzian derivative of the chain at ``z`` via the cocycle rule.

        Raises :class:`DegenerateDerivative` when any non-moebius stage is
        evaluated where the running derivative has collapsed below
        ``derivative_tol`` (the composite would not be conformal there).
        """
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        cur = _as_complex(z)
        total = np.zeros_like(cur)
        deriv = np.ones_like(cur)
        with np.errstate(invalid="ignore", divide="ignore"):
            for prim in self.chain:
                self._check(prim, cur)
                if not prim.is_moebius:
                    bad = ~(np.abs(deriv) > derivative_tol) | ~np.isfinite(cur)
                    if np.any(bad):
                        raise DegenerateDerivative(
                            f"chain derivative degenerate entering {prim.name}"
                        )
                    total = total + prim.schwarzian(cur) * deriv**2
                deriv = deriv * prim.d1(cur)
                cur = prim.apply(cur)
        return complex(total) if scalar else total

    def contains(self, z):
        """Mask of points whose whole chain evaluation stays in-domain."""
        cur = _as_complex(z)
        ok = np.ones(cur.shape, dtype=bool)
        for prim in self.chain:
            ok = ok & np.asarray(prim.contains(cur))
            cur = prim.apply(cur)
        return ok

    def describe(self) -> str:
        return " . ".join(p.name for p in reversed(self.chain))


def identity() -> ConformalMap:
    return ConformalMap(())


def translation(c: complex) -> ConformalMap:
    return ConformalMap((_Translation(complex(c)),))


def scaling(r: float) -> ConformalMap:
    return ConformalMap((_Scaling(float(r)),))


def moebius(a: complex, b: complex, c: complex, d: complex) -> ConformalMap:
    return ConformalMap((_Moebius(complex(a), complex(b), complex(c), complex(d)),))


def joukowski() -> ConformalMap:
    return ConformalMap((_Joukowski(),))


def inverse_joukowski() -> ConformalMap:
    return ConformalMap((_InverseJoukowski(),))


def inversion() -> ConformalMap:
    return ConformalMap((_Inversion(),))


def slit_map(t: float) -> ConformalMap:
    return ConformalMap((_SlitMap(float(t)),))


def inverse_slit_map(t: float) -> ConformalMap:
    return ConformalMap((_InverseSlitMap(float(t)),))


def exp_map() -> ConformalMap:
    return ConformalMap((_Exp(),))


def log_map() -> ConformalMap:
    return ConformalMap((_Log(),))


def halfdisk_to_halfplane(radius: float = 1.0) -> ConformalMap:
    """Map of ``radius * D+`` onto the half-plane fixing the origin.

    The composite is ``z -> radius z / (z**2 + radius**2)``; its Schwarzian at
    the origin is ``-6 / radius**2``.
    """
    return scaling(1.0 / radius).then(joukowski()).then(inversion())
