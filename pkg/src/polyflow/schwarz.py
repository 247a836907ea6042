"""Schwarz-lemma defects on the product domain and extreme-disk checks.

Half-plane model:  defect(z) = Im f(z) - sum_j Im(z_j) |df/dz_j(z)|.
Disk model:        defect(z) = (1 - |f(z)|^2) - sum_j (1 - |z_j|^2) |df/dz_j(z)|.

Both are nonnegative for holomorphic maps into the respective target, and
vanish exactly on the extreme disks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import (Domain, Mobius, PolyPoint, cayley_fraclin,
                      cayley_inv_fraclin)
from .expr import Coord
from .maps import HoloMap, eval_many, partials_many, tree_map

__all__ = [
    "DefectSample", "BalancedDisk", "schwarz_defect", "defect_many",
    "disk_defect", "is_extreme_disk", "restrict_to_disk",
    "HALFPLANE_CHECK_POINTS", "DISK_CHECK_POINTS",
]


@dataclass(frozen=True)
class DefectSample:
    point: PolyPoint
    defect: float
    gradient_terms: tuple


def defect_many(f, coords, method="auto"):
    """Vectorized defect over raw coordinate arrays; returns an ndarray."""
    coords = tuple(np.asarray(c, dtype=complex) for c in coords)
    values = eval_many(f, coords)
    grads = partials_many(f, coords, method=method)
    if f.domain is Domain.HALF_PLANE:
        total = np.zeros_like(np.asarray(values).real)
        for c, g in zip(coords, grads):
            total = total + c.imag * np.abs(g)
        return np.asarray(values).imag - total
    if f.domain is Domain.DISK:
        total = np.zeros_like(np.asarray(values).real)
        for c, g in zip(coords, grads):
            total = total + (1.0 - np.abs(c) ** 2) * np.abs(g)
        return (1.0 - np.abs(values) ** 2) - total
    raise ValueError("defects are defined for half-plane or disk model maps")


def schwarz_defect(f, z, method="auto"):
    """Defect sample at one interior point."""
    if not isinstance(z, PolyPoint):
        z = PolyPoint(z, f.domain)
    if z.arity != f.arity or z.domain is not f.domain:
        raise ValueError("point does not match the map's domain")
    coords = z.coords
    value = complex(eval_many(f, coords))
    grads = partials_many(f, coords, method=method)
    if f.domain is Domain.HALF_PLANE:
        terms = tuple(c.imag * abs(complex(g)) for c, g in zip(coords, grads))
        defect = value.imag - sum(terms)
    elif f.domain is Domain.DISK:
        terms = tuple((1.0 - abs(c) ** 2) * abs(complex(g)) for c, g in zip(coords, grads))
        defect = (1.0 - abs(value) ** 2) - sum(terms)
    else:
        raise ValueError("defects are defined for half-plane or disk model maps")
    return DefectSample(z, float(defect), terms)


def disk_defect(f, z, method="auto"):
    """One-variable Schwarz-Pick defect (1-|f|^2) - (1-|z|^2)|f'| at z.

    Implemented with the classical 1 - |z|^2 factor.  Zero at one interior
    point exactly when f is a disk automorphism.
    """
    if f.arity != 1 or f.domain is not Domain.DISK:
        raise ValueError("disk_defect applies to one-variable disk-model maps")
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("point must be interior to the disk")
    value = complex(eval_many(f, (z,)))
    (deriv,) = partials_many(f, (z,), method=method)
    return float((1.0 - abs(value) ** 2) - (1.0 - abs(z) ** 2) * abs(complex(deriv)))


@dataclass(frozen=True)
class BalancedDisk:
    """An embedded disk z -> (phi_1(z), ..., phi_n(z)) with automorphism slots.

    Components are stored as half-plane Mobius elements; in a disk-model
    ambient they act through Cayley conjugation.
    """

    components: tuple

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("a balanced disk needs at least one component")
        for m in components:
            if not isinstance(m, Mobius):
                raise TypeError("components must be Mobius elements")
        object.__setattr__(self, "components", components)

    @property
    def arity(self):
        return len(self.components)


# Fixed interior sample sets for the automorphism certification.
HALFPLANE_CHECK_POINTS = (
    1j, 2j, 0.5j, 1.0 + 1j, -1.0 + 2j, 2.0 + 0.5j, -0.5 + 1.5j, 3.0 + 3j,
)
DISK_CHECK_POINTS = (
    0j, 0.3 + 0j, -0.4 + 0.2j, 0.1 - 0.5j, 0.6 + 0.3j, -0.2 - 0.6j,
    0.45 - 0.1j, -0.7 + 0.1j,
)


def restrict_to_disk(f, disk):
    """The one-variable restriction of ``f`` to a balanced disk."""
    if disk.arity != f.arity:
        raise ValueError("balanced disk arity does not match the map")
    tree = f.tree
    if tree is None:
        raise TypeError("restriction needs an expression-backed map")
    zeta = Coord(0)
    if f.domain is Domain.HALF_PLANE:
        legs = tuple(m.as_fraclin(zeta) for m in disk.components)
    elif f.domain is Domain.DISK:
        # Half-plane Mobius conjugated into the disk model, coordinate-wise.
        legs = tuple(cayley_fraclin(m.as_fraclin(cayley_inv_fraclin(zeta)))
                     for m in disk.components)
    else:
        raise ValueError("balanced disks live in the half-plane or disk model")
    return tree_map(tree.subst(legs), 1, f.domain)


def is_extreme_disk(f, disk, tol=1e-9, deriv_floor=1e-8):
    """Certify that the restriction of ``f`` to a balanced disk is an automorphism.

    Uses the equality case of the one-variable Schwarz-Pick inequality at a
    fixed set of interior samples plus a nonzero-derivative check at the
    base point; equality at interior points characterizes automorphisms.
    """
    restriction = restrict_to_disk(f, disk)
    if f.domain is Domain.HALF_PLANE:
        points = HALFPLANE_CHECK_POINTS
        base = 1j
        for p in points:
            s = schwarz_defect(restriction, PolyPoint((p,), Domain.HALF_PLANE))
            if abs(s.defect) > tol:
                return False
    else:
        points = DISK_CHECK_POINTS
        base = 0j
        for p in points:
            if abs(disk_defect(restriction, p)) > tol:
                return False
    (deriv,) = partials_many(restriction, (complex(base),))
    return abs(complex(deriv)) > deriv_floor
