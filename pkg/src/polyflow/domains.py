"""Domain geometry: points of the poly-half-plane/polydisk, real Mobius
transformations, the Cayley transform, and hyperbolic distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .expr import FracLin

__all__ = [
    "Domain", "INFINITY", "Infinity", "PolyPoint", "Mobius",
    "cayley", "cayley_inv", "poincare_dist", "polyplane_dist",
]


class Domain(Enum):
    """Source/target model tag; a map of arity n lives on the n-fold product."""

    HALF_PLANE = "halfplane"
    DISK = "disk"
    PLANE = "plane"


class Infinity:
    """The boundary point at infinity of the half-plane model.

    A singleton used only in boundary arithmetic (Mobius action, family
    parameters); it never enters map evaluation as a float sentinel.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()


def _is_infinite(x):
    if isinstance(x, Infinity):
        return True
    if isinstance(x, complex):
        return math.isinf(x.real) or math.isinf(x.imag)
    if isinstance(x, (int, float)):
        return math.isinf(x)
    return False


def interior(value, domain):
    """True when a complex value is interior to the one-dimensional model."""
    if domain is Domain.HALF_PLANE:
        return value.imag > 0.0
    if domain is Domain.DISK:
        return abs(value) < 1.0
    return True


@dataclass(frozen=True)
class PolyPoint:
    """A point of the n-fold product domain, validated at construction."""

    coords: tuple
    domain: Domain

    def __init__(self, coords, domain=Domain.HALF_PLANE):
        coords = tuple(complex(c) for c in coords)
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        for c in coords:
            if not interior(c, domain):
                raise ValueError(f"coordinate {c} is not interior to {domain.value}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "domain", domain)

    @property
    def arity(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def diagonal(value, arity, domain=Domain.HALF_PLANE):
    """The diagonal point (value, ..., value)."""
    return PolyPoint((value,) * arity, domain)


@dataclass(frozen=True)
class Mobius:
    """Orientation-preserving real fractional-linear map (az+b)/(cz+d).

    Stored normalized to determinant 1, so equal group elements compare
    equal up to overall sign of the coefficient row.
    """

    a: float
    b: float
    c: float
    d: float

    def __init__(self, a, b, c, d):
        a, b, c, d = float(a), float(b), float(c), float(d)
        det = a * d - b * c
        if det <= 0.0:
            raise ValueError("requires ad - bc > 0")
        s = math.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)
        object.__setattr__(self, "c", c / s)
        object.__setattr__(self, "d", d / s)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t):
        return cls(1.0, float(t), 0.0, 1.0)

    @classmethod
    def dilation(cls, s):
        if s <= 0:
            raise ValueError("dilation factor must be positive")
        return cls(float(s), 0.0, 0.0, 1.0)

    @classmethod
    def rotation_about_i(cls, theta):
        """Elliptic element fixing i; acts on the disk model as w -> e^{2i theta} w."""
        return cls(math.cos(theta), math.sin(theta), -math.sin(theta), math.cos(theta))

    def inverse(self):
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, other):
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, z):
        """Apply to an interior point or a boundary point of R u {oo}."""
        if _is_infinite(z):
            if self.c == 0.0:
                return INFINITY
            return complex(self.a / self.c)
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        return (self.a * z + self.b) / den

    def fixed_boundary_points(self):
        """Fixed points on R u {oo}; a unipotent element has exactly one."""
        if self.c == 0.0:
            if self.a == self.d:
                return (INFINITY,)  # pure translation (or identity)
            return (self.b / (self.d - self.a), INFINITY)
        # c z^2 + (d - a) z - b = 0
        disc = (self.d - self.a) ** 2 + 4.0 * self.b * self.c
        if disc < 0.0:
            return ()
        root = math.sqrt(disc)
        z1 = ((self.a - self.d) - root) / (2.0 * self.c)
        z2 = ((self.a - self.d) + root) / (2.0 * self.c)
        return (z1,) if disc == 0.0 else (z1, z2)

    def is_unipotent(self, tol=1e-12):
        if self.b == 0.0 and self.c == 0.0 and abs(self.a - self.d) <= tol:
            return False  # identity
        return abs(abs(self.a + self.d) - 2.0) <= tol

    def as_fraclin(self, child):
        return FracLin(complex(self.a), complex(self.b),
                       complex(self.c), complex(self.d), child)


# Cayley transform between the half-plane and disk models.

def cayley(z):
    """z -> (i - z)/(i + z); maps the half-plane onto the disk, oo -> -1."""
    if _is_infinite(z):
        return -1.0 + 0.0j
    z = complex(z)
    if z == -1j:
        raise ZeroDivisionError("Cayley transform has its pole at -i")
    return (1j - z) / (1j + z)


def cayley_inv(w):
    """w -> i(1 - w)/(1 + w); inverse Cayley, -1 -> the boundary point oo."""
    w = complex(w)
    if w == -1.0:
        return INFINITY
    return 1j * (1.0 - w) / (1.0 + w)


def cayley_fraclin(child):
    return FracLin(-1.0 + 0.0j, 1j, 1.0 + 0.0j, 1j, child)


def cayley_inv_fraclin(child):
    return FracLin(-1j, 1j, 1.0 + 0.0j, 1.0 + 0.0j, child)


# Hyperbolic metric, curvature -1 normalization: d(ai, bi) = |log(b/a)|.

def poincare_dist(z, w):
    """Poincare distance on the half-plane (vectorized over ndarrays)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(z.imag <= 0.0) or np.any(w.imag <= 0.0):
        raise ValueError("poincare_dist needs interior points of the half-plane")
    ratio = np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    out = np.arccosh(1.0 + ratio)
    return float(out) if out.ndim == 0 else out


def polyplane_dist(z, w):
    """Product metric on the poly-half-plane: max of coordinate distances."""
    if isinstance(z, PolyPoint):
        if z.domain is not Domain.HALF_PLANE or w.domain is not Domain.HALF_PLANE:
            raise ValueError("polyplane_dist is defined in the half-plane model")
        if z.arity != w.arity:
            raise ValueError("arity mismatch")
        zc, wc = z.coords, w.coords
    else:
        zc, wc = tuple(z), tuple(w)
    return max(poincare_dist(a, b) for a, b in zip(zc, wc))
