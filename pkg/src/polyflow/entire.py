"""Translation flow on entire maps fixing the diagonal.

Any entire function of n variables produces a diagonal-fixing map through
f = phi(z) - phi(mean(z) * 1) + mean(z); this surjection intertwines the
coordinate shift with the time-one flow, has an explicit right inverse, and
yields explicit periodic points.  Unlike the half-plane flow, orbits here do
not concentrate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex

__all__ = [
    "EntireMap", "entire_from_text", "mean_entire", "fix_diagonal",
    "free_part", "shift_arguments", "translate_entire", "time_one",
    "periodic_map", "entire_grid", "sup_grid_residual", "second_partial",
]


@dataclass(frozen=True)
class EntireMap:
    """Entire map C^arity -> C backed by a division-free expression tree."""

    arity: int
    tree: ex.Expr

    def __post_init__(self):
        if self.tree.has_division():
            raise ValueError("entire maps must be division-free")

    def ev(self, coords):
        coords = tuple(np.asarray(c, dtype=complex) for c in coords)
        if len(coords) != self.arity:
            raise ValueError("coordinate count does not match arity")
        return self.tree.ev(coords)

    def __call__(self, *coords):
        return complex(self.ev(tuple(complex(c) for c in coords)))


def entire_from_text(text, arity):
    return EntireMap(arity, ex.parse_expr(text, arity))


def _mean_tree(arity):
    return ex.linear_combination([1.0 / arity] * arity)


def mean_entire(arity):
    return EntireMap(arity, _mean_tree(arity))


def fix_diagonal(phi):
    """phi(z) - phi(mean(z) * 1) + mean(z): the diagonal-fixing surjection."""
    n = phi.arity
    mean = _mean_tree(n)
    on_diag = phi.tree.subst((mean,) * n)
    out = ex.Add(ex.Sub(phi.tree, on_diag), mean)
    return EntireMap(n, out)


_DIAG_CHECK = np.array([0j, 1.0 + 0j, -2.0 + 1j, 0.5 - 0.5j, 3j, -1.5 - 2j,
                        2.0 + 2j, -3.0 + 0.25j])


def free_part(f, tol=1e-9):
    """phi = f - mean: the right inverse of the diagonal-fixing construction.

    Requires f to fix the diagonal; sampled to ``tol`` before building.
    """
    n = f.arity
    coords = (_DIAG_CHECK,) * n
    resid = float(np.max(np.abs(f.ev(coords) - _DIAG_CHECK)))
    if resid > tol:
        raise ValueError(f"map does not fix the diagonal: residual {resid:.3e}")
    return EntireMap(n, ex.Sub(f.tree, _mean_tree(n)))


def shift_arguments(phi, t=1.0):
    """phi(z_1 - t, ..., z_n - t): the argument shift operator."""
    return EntireMap(phi.arity, ex.shift_coords(phi.tree, phi.arity, float(t)))


def translate_entire(f, t):
    """f(z - t * 1) + t: the translation flow on entire maps."""
    t = float(t)
    shifted = ex.shift_coords(f.tree, f.arity, t)
    return EntireMap(f.arity, ex.Add(shifted, ex.Const(complex(t))))


def time_one(f):
    """The time-one flow map."""
    return translate_entire(f, 1.0)


def periodic_map(k, arity=2):
    """An explicit period-k point of the flow: the diagonal fix of
    exp(2 pi i z_1 / k).  Nonlinear, hence impossible inside the half-plane
    class, where periodic points are exactly the invariant linear maps."""
    if k < 1:
        raise ValueError("period must be a positive integer")
    phi = EntireMap(arity, ex.Exp(ex.Mul(ex.Const(2j * math.pi / k), ex.Coord(0))))
    return fix_diagonal(phi)


def entire_grid(arity, half_width=2.0, points_per_axis=9, cap=10_000):
    """Deterministic product grid on |Re z_j|, |Im z_j| <= half_width."""
    res = np.linspace(-half_width, half_width, points_per_axis)
    values = (res[:, None] + 1j * res[None, :]).ravel()
    per = len(values)
    total = per ** arity
    stride = max(1, -(-total // cap))
    idx = np.arange(0, total, stride, dtype=np.int64)
    coords = np.empty((arity, idx.size), dtype=complex)
    rem = idx.copy()
    for pos in range(arity - 1, -1, -1):
        coords[pos] = values[rem % per]
        rem //= per
    coords.flags.writeable = False
    return coords


def sup_grid_residual(f, g, grid=None):
    """Max absolute difference of two entire maps over a grid."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")
    coords = tuple(grid if grid is not None else entire_grid(f.arity))
    return float(np.max(np.abs(f.ev(coords) - g.ev(coords))))


def second_partial(f, z, j=0, radius=1.0, nodes=32):
    """Cauchy quadrature for the second derivative in coordinate j."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * theta)
    coords = [np.full(nodes, complex(c)) for c in z]
    coords[j] = coords[j] + ring
    vals = f.ev(tuple(coords))
    return complex(2.0 * np.sum(vals * np.exp(-2j * theta)) / (nodes * radius ** 2))
