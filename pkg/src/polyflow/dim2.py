"""Closed-form two-variable content: the extremal families on the bidisk and
the poly-half-plane, the Schur-class parameterization of the uniform class,
its translation-flow form, automorphism equivariance, and the partly-extremal
convex blends."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .domains import Domain, INFINITY, Infinity, cayley, cayley_inv
from .maps import HoloMap, cayley_conjugate, conjugate_action, eval_many, mean_map, tree_map

__all__ = [
    "ExtremalParam", "SchurParam", "extremal_disk", "extremal_halfplane",
    "from_schur_disk", "from_schur_halfplane", "schur_flow",
    "blend", "blend_slope", "equivariance_residual", "disk_boundary_image",
    "DISK_GRID", "halfplane_mobius_to_disk_value",
]


def _is_inf(r):
    return isinstance(r, Infinity) or (isinstance(r, (int, float)) and math.isinf(r))


@dataclass(frozen=True)
class ExtremalParam:
    """Parameter of the two-variable extremal family: a boundary point.

    Disk model: a unimodular number stored as an angle, so the modulus is
    exactly 1 under parameter transport.  Half-plane model: r in R u {oo}.
    """

    model: Domain
    angle: float = 0.0
    r: object = None

    @classmethod
    def disk(cls, nu):
        if isinstance(nu, (int, float)) and not isinstance(nu, bool):
            angle = float(nu)
        else:
            nu = complex(nu)
            if abs(abs(nu) - 1.0) > 1e-12:
                raise ValueError("disk parameter must be unimodular")
            angle = math.atan2(nu.imag, nu.real)
        return cls(Domain.DISK, angle=angle)

    @classmethod
    def halfplane(cls, r):
        if not _is_inf(r):
            r = float(r)
            if math.isnan(r):
                raise ValueError("half-plane parameter must be real or infinity")
        else:
            r = INFINITY
        return cls(Domain.HALF_PLANE, r=r)

    @property
    def nu(self):
        if self.model is not Domain.DISK:
            raise ValueError("not a disk-model parameter")
        return cmath.exp(1j * self.angle)


def extremal_disk(nu):
    """The everywhere-extremal bidisk map with boundary parameter nu.

    f(z, w) = (nu (z/2 + w/2) - z w) / (nu - (z/2 + w/2)), |nu| = 1.
    Fixes the diagonal and has both diagonal partials equal to 1/2.
    """
    p = nu if isinstance(nu, ExtremalParam) else ExtremalParam.disk(nu)
    nu_c = p.nu
    z, w = ex.Coord(0), ex.Coord(1)
    half_sum = ex.Mul(ex.Const(0.5 + 0j), ex.Add(z, w))
    num = ex.Sub(ex.Mul(ex.Const(nu_c), half_sum), ex.Mul(z, w))
    den = ex.Sub(ex.Const(nu_c), half_sum)
    return tree_map(ex.Div(num, den), 2, Domain.DISK)


def extremal_halfplane(r):
    """The everywhere-extremal half-plane map with boundary parameter r.

    f(z, w) = (r (z/2 + w/2) - z w) / (r - (z/2 + w/2)) for real r;
    r = oo gives the mean (z + w)/2.
    """
    p = r if isinstance(r, ExtremalParam) else ExtremalParam.halfplane(r)
    if _is_inf(p.r):
        return mean_map(2)
    r_c = complex(p.r)
    z, w = ex.Coord(0), ex.Coord(1)
    half_sum = ex.Mul(ex.Const(0.5 + 0j), ex.Add(z, w))
    num = ex.Sub(ex.Mul(ex.Const(r_c), half_sum), ex.Mul(z, w))
    den = ex.Sub(ex.Const(r_c), half_sum)
    return tree_map(ex.Div(num, den), 2, Domain.HALF_PLANE)


# Low-discrepancy sample plan for certifying Schur-class membership.
_VALIDATION_POINTS = 1000
_PLASTIC = 1.324717957244746  # real root of x^3 = x + 1


def _kronecker_lattice(count, dims):
    alphas = np.array([(1.0 / _PLASTIC) ** (k + 1) for k in range(dims)])
    idx = np.arange(1, count + 1)[:, None]
    return np.mod(idx * alphas[None, :], 1.0)


def _disk_samples(count, max_radius=0.999):
    u = _kronecker_lattice(count, 4)
    r1 = max_radius * np.sqrt(u[:, 0])
    r2 = max_radius * np.sqrt(u[:, 1])
    z = r1 * np.exp(2j * np.pi * u[:, 2])
    w = r2 * np.exp(2j * np.pi * u[:, 3])
    return z, w


def _halfplane_samples(count, re_span=20.0, im_lo=1e-3, im_hi=50.0):
    u = _kronecker_lattice(count, 4)
    z = re_span * (u[:, 0] - 0.5) + 1j * im_lo * (im_hi / im_lo) ** u[:, 1]
    w = re_span * (u[:, 2] - 0.5) + 1j * im_lo * (im_hi / im_lo) ** u[:, 3]
    return z, w


@dataclass(frozen=True)
class SchurParam:
    """A two-variable Schur-class datum: into the closed disk or closed
    half-plane (with the constant oo allowed in the half-plane model).

    Validity is certified by sampling on a low-discrepancy plan unless the
    caller vouches for a closed form with ``trusted=True``.
    """

    func: object  # HoloMap, or INFINITY for the constant-infinity parameter
    model: Domain

    def __init__(self, func, model, trusted=False, tol=1e-12):
        if isinstance(func, Infinity):
            if model is not Domain.HALF_PLANE:
                raise ValueError("the constant-infinity parameter is a half-plane datum")
        else:
            if not isinstance(func, HoloMap) or func.arity != 2:
                raise TypeError("Schur parameter must be a two-variable map")
            if func.domain is not model:
                raise ValueError("Schur parameter model mismatch")
            if not trusted:
                _validate_schur(func, model, tol)
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "model", model)

    @classmethod
    def disk(cls, func, trusted=False):
        if isinstance(func, (int, float, complex)):
            c = complex(func)
            if abs(c) > 1.0 + 1e-12:
                raise ValueError("constant is outside the closed disk")
            func = tree_map(ex.Const(c), 2, Domain.DISK)
            trusted = True
        return cls(func, Domain.DISK, trusted=trusted)

    @classmethod
    def halfplane(cls, func, trusted=False):
        if isinstance(func, Infinity) or (isinstance(func, float) and math.isinf(func)):
            return cls(INFINITY, Domain.HALF_PLANE)
        if isinstance(func, (int, float, complex)):
            c = complex(func)
            if c.imag < -1e-12:
                raise ValueError("constant is outside the closed half-plane")
            func = tree_map(ex.Const(c), 2, Domain.HALF_PLANE)
            trusted = True
        return cls(func, Domain.HALF_PLANE, trusted=trusted)

    @property
    def is_infinity(self):
        return isinstance(self.func, Infinity)


def _validate_schur(func, model, tol):
    if model is Domain.DISK:
        z, w = _disk_samples(_VALIDATION_POINTS)
        vals = eval_many(func, (z, w))
        worst = float(np.max(np.abs(vals)))
        if worst > 1.0 + tol:
            raise ValueError(f"not a map into the closed disk: |value| = {worst:.6g}")
    else:
        z, w = _halfplane_samples(_VALIDATION_POINTS)
        vals = eval_many(func, (z, w))
        worst = float(np.min(np.asarray(vals).imag))
        if worst < -tol:
            raise ValueError(f"not a map into the closed half-plane: Im = {worst:.6g}")


def from_schur_disk(theta):
    """Uniform-class bidisk map built from a disk Schur parameter.

    f(z, w) = (z+w)/2 + ((z-w)^2/4) * Theta / (1 - ((z+w)/2) Theta);
    Theta = 0 gives the mean, unimodular constants give the extremal family.
    """
    theta = theta if isinstance(theta, SchurParam) else SchurParam.disk(theta)
    if theta.model is not Domain.DISK:
        raise ValueError("expected a disk-model Schur parameter")
    t = theta.func.tree
    z, w = ex.Coord(0), ex.Coord(1)
    half_sum = ex.Mul(ex.Const(0.5 + 0j), ex.Add(z, w))
    quarter_sq = ex.Mul(ex.Const(0.25 + 0j), ex.Pow(ex.Sub(z, w), 2))
    series = ex.Div(t, ex.Sub(ex.Const(1.0 + 0j), ex.Mul(half_sum, t)))
    return tree_map(ex.Add(half_sum, ex.Mul(quarter_sq, series)), 2, Domain.DISK)


def from_schur_halfplane(phi):
    """Uniform-class half-plane map built from a half-plane Schur parameter.

    f(z, w) = ((z+w)/2 * Phi + z w) / (Phi + (z+w)/2); the constant -r gives
    the extremal map with parameter r, and the constant oo gives the mean.
    """
    phi = phi if isinstance(phi, SchurParam) else SchurParam.halfplane(phi)
    if phi.model is not Domain.HALF_PLANE:
        raise ValueError("expected a half-plane-model Schur parameter")
    if phi.is_infinity:
        # Algebraic limit of the formula, never a float overflow.
        return mean_map(2)
    t = phi.func.tree
    z, w = ex.Coord(0), ex.Coord(1)
    half_sum = ex.Mul(ex.Const(0.5 + 0j), ex.Add(z, w))
    num = ex.Add(ex.Mul(half_sum, t), ex.Mul(z, w))
    den = ex.Add(t, half_sum)
    return tree_map(ex.Div(num, den), 2, Domain.HALF_PLANE)


def schur_flow(phi, t):
    """Time-t translation flow in Schur-parameter form.

    Replaces Phi by Phi(z - t, w - t) - t in the half-plane formula; agrees
    pointwise with translating the assembled map.
    """
    phi = phi if isinstance(phi, SchurParam) else SchurParam.halfplane(phi)
    if phi.model is not Domain.HALF_PLANE:
        raise ValueError("the flow form needs a half-plane Schur parameter")
    t = float(t)
    if phi.is_infinity:
        return mean_map(2)
    shifted = ex.Sub(ex.shift_coords(phi.func.tree, 2, t), ex.Const(complex(t)))
    moved = SchurParam(tree_map(shifted, 2, Domain.HALF_PLANE),
                       Domain.HALF_PLANE, trusted=True)
    return from_schur_halfplane(moved)


def blend(t):
    """Convex blend of the two distinguished extremal maps.

    t * (z+w)/2 + (1-t) * 2zw/(z+w): extremal on every ray disk
    {(z, a z) : a > 0} yet not everywhere extremal for t in (0, 1).
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("blend weight must lie in [0, 1]")
    hi = mean_map(2).tree
    lo = extremal_halfplane(0.0).tree
    mixed = ex.Add(ex.Mul(ex.Const(t + 0j), hi), ex.Mul(ex.Const(1.0 - t + 0j), lo))
    return tree_map(mixed, 2, Domain.HALF_PLANE)


def blend_slope(a, t):
    """Multiplier m with blend(t)(z, a z) = m z on the ray disk of slope a > 0.

    The second term is 2a/(1+a): the slope of 2zw/(z+w) restricted to w = a z.
    """
    a = float(a)
    if a <= 0:
        raise ValueError("ray slope must be positive")
    t = float(t)
    return t * (1.0 + a) / 2.0 + (1.0 - t) * 2.0 * a / (1.0 + a)


def halfplane_mobius_to_disk_value(gamma, nu):
    """Boundary transport of a unimodular parameter by a Cayley-conjugated Mobius."""
    return cayley(gamma(cayley_inv(complex(nu))))


def _mobius_on_disk_map(gamma, disk_map):
    hp = cayley_conjugate(disk_map)
    return cayley_conjugate(conjugate_action(gamma, hp))


_DISK_RADII = (0.0, 0.3, 0.6, 0.85)
_DISK_ANGLES = 8


def _disk_grid():
    ring = np.exp(2j * np.pi * np.arange(_DISK_ANGLES) / _DISK_ANGLES)
    pts = np.concatenate([[0j] if r == 0.0 else r * ring for r in _DISK_RADII])
    z = np.repeat(pts, len(pts))
    w = np.tile(pts, len(pts))
    return z, w


DISK_GRID = _disk_grid()


def equivariance_residual(gamma, nu):
    """Max grid residual between acting on the extremal map and moving its
    boundary parameter.

    ``gamma`` is a half-plane Mobius element; it acts on the bidisk through
    Cayley conjugation, and on the boundary parameter by the same transport.
    """
    p = nu if isinstance(nu, ExtremalParam) else ExtremalParam.disk(nu)
    lhs = _mobius_on_disk_map(gamma, extremal_disk(p))
    rhs = extremal_disk(halfplane_mobius_to_disk_value(gamma, p.nu))
    z, w = DISK_GRID
    diff = eval_many(lhs, (z, w)) - eval_many(rhs, (z, w))
    return float(np.max(np.abs(diff)))


def disk_boundary_image(gamma, nu):
    """Image of a unimodular parameter under the disk action of ``gamma``."""
    return halfplane_mobius_to_disk_value(gamma, nu)
