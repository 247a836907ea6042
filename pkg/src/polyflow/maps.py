"""Holomorphic maps from a product domain into the plane.

A :class:`HoloMap` wraps one of two evaluation cores: an expression tree
(closed-form families, linear maps, conjugates, translates) or a lazy
flow-average quadrature wrapper.  Tree-backed maps carry exact symbolic
derivatives; every map supports Cauchy-integral quadrature derivatives,
which is the independent second route the tests compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import expr as ex
from .domains import (Domain, Mobius, PolyPoint, cayley_fraclin,
                      cayley_inv_fraclin)

__all__ = [
    "HoloMap", "ClassReport", "MapClass", "ClassCheckError",
    "tree_map", "mean_map", "linear_map", "coordinate_map",
    "eval_map", "eval_many", "partials", "partials_many",
    "cayley_conjugate", "conjugate_action", "check_class",
    "normalize_to_uniform", "DEFAULT_CLASS_SAMPLES",
]

CAUCHY_NODES = 32  # nodes of the derivative quadrature circle


class ClassCheckError(ValueError):
    """A map failed a required membership check; carries the report."""

    def __init__(self, report):
        super().__init__(
            "class check failed: diag residual "
            f"{report.max_diag_residual:.3e}, deriv residual "
            f"{report.max_deriv_residual:.3e} at tol {report.tol:.1e}")
        self.report = report


class _ExprCore:
    __slots__ = ("tree",)

    def __init__(self, tree):
        self.tree = tree

    def ev(self, coords):
        return self.tree.ev(coords)


class _AverageCore:
    """(1/2r) integral of the translated map over [-r, r], composite trapezoid.

    Lazy: each evaluation runs the quadrature at the requested points.
    ``n_panels`` subintervals means n_panels + 1 equispaced samples.
    """

    __slots__ = ("base", "r", "n_panels", "_ts", "_ws")

    def __init__(self, base, r, n_panels):
        self.base = base
        self.r = float(r)
        self.n_panels = int(n_panels)
        ts = np.linspace(-self.r, self.r, self.n_panels + 1)
        ws = np.full(self.n_panels + 1, 1.0 / self.n_panels)
        ws[0] *= 0.5
        ws[-1] *= 0.5
        self._ts = ts
        self._ws = ws

    def ev(self, coords):
        acc = None
        core = self.base._core
        for t, w in zip(self._ts, self._ws):
            shifted = tuple(c - t for c in coords)
            term = w * (core.ev(shifted) + t)
            acc = term if acc is None else acc + term
        return acc


@dataclass(frozen=True)
class HoloMap:
    """Immutable holomorphic map of ``arity`` variables on ``domain``^arity."""

    arity: int
    domain: Domain
    _core: object

    @property
    def tree(self):
        """The expression tree, or None for quadrature-average wrappers."""
        core = self._core
        return core.tree if isinstance(core, _ExprCore) else None

    @property
    def is_average(self):
        return isinstance(self._core, _AverageCore)

    @property
    def average_parts(self):
        core = self._core
        if not isinstance(core, _AverageCore):
            raise TypeError("not an average wrapper")
        return core.base, core.r, core.n_panels

    def __call__(self, *args):
        if len(args) == 1 and isinstance(args[0], PolyPoint):
            return eval_map(self, args[0])
        return eval_map(self, PolyPoint(args, self.domain))


def tree_map(tree, arity, domain=Domain.HALF_PLANE):
    return HoloMap(arity, domain, _ExprCore(tree))


def average_map(base, r, n_panels):
    if n_panels < 2:
        raise ValueError("need at least 2 quadrature panels")
    if r <= 0:
        raise ValueError("averaging radius must be positive")
    if base.domain is not Domain.HALF_PLANE:
        raise ValueError("flow averages live in the half-plane model")
    return HoloMap(base.arity, base.domain, _AverageCore(base, r, n_panels))


def mean_map(arity, domain=Domain.HALF_PLANE):
    """The arithmetic mean of the coordinates; the flow-invariant map."""
    return linear_map([1.0 / arity] * arity, domain)


def linear_map(coeffs, domain=Domain.HALF_PLANE):
    """Sum of coeffs[j] * z_j."""
    coeffs = [complex(c) for c in coeffs]
    return tree_map(ex.linear_combination(coeffs), len(coeffs), domain)


def coordinate_map(j, arity, domain=Domain.HALF_PLANE):
    return tree_map(ex.Coord(j), arity, domain)


def _as_coord_arrays(point_or_coords):
    if isinstance(point_or_coords, PolyPoint):
        return point_or_coords.coords
    return tuple(point_or_coords)


def eval_map(f, z):
    """Value of ``f`` at an interior point ``z`` (a PolyPoint)."""
    if not isinstance(z, PolyPoint):
        raise TypeError("eval_map expects a PolyPoint; use eval_many for raw grids")
    if z.arity != f.arity:
        raise ValueError(f"arity mismatch: map has {f.arity}, point has {z.arity}")
    if z.domain is not f.domain:
        raise ValueError(f"domain mismatch: map on {f.domain.value}, point in {z.domain.value}")
    return complex(f._core.ev(z.coords))


def eval_many(f, coords):
    """Vectorized evaluation; ``coords`` is a sequence of ndarrays/scalars.

    No interiority checks: callers own the sampling.
    """
    coords = tuple(np.asarray(c, dtype=complex) for c in coords)
    if len(coords) != f.arity:
        raise ValueError("coordinate count does not match arity")
    return f._core.ev(coords)


def _cauchy_radii(coords, domain):
    if domain is Domain.HALF_PLANE:
        radii = [np.minimum(1.0, 0.5 * np.asarray(c).imag) for c in coords]
    elif domain is Domain.DISK:
        radii = [0.5 * (1.0 - np.abs(np.asarray(c))) for c in coords]
    else:
        radii = [np.ones_like(np.asarray(c, dtype=float).real) for c in coords]
    for rho in radii:
        if np.any(rho <= 0.0):
            raise ValueError("quadrature radius degenerates: point too close to the boundary")
    return radii


def _cauchy_partial(f, coords, j, radii, order=1):
    """Cauchy-integral derivative in coordinate j on the circle of radius radii[j].

    order!/(2 pi i) * contour integral of f / w^{order+1} via K equispaced
    nodes; spectrally accurate for holomorphic integrands.
    """
    K = CAUCHY_NODES
    theta = 2.0 * np.pi * np.arange(K) / K
    ring = np.exp(1j * theta)
    rho = np.asarray(radii[j], dtype=float)
    acc = None
    for k in range(K):
        shifted = list(coords)
        shifted[j] = coords[j] + rho * ring[k]
        term = f._core.ev(tuple(shifted)) * np.exp(-1j * order * theta[k])
        acc = term if acc is None else acc + term
    scale = math.factorial(order) / (K * rho ** order)
    return acc * scale


def partials_many(f, coords, method="auto"):
    """All first partials on a coordinate grid; returns a list of arrays.

    method 'exact' differentiates the expression tree, 'cauchy' uses the
    integral quadrature, 'auto' prefers exact when a tree is available.
    """
    coords = tuple(np.asarray(c, dtype=complex) for c in coords)
    if method not in ("auto", "exact", "cauchy"):
        raise ValueError(f"unknown method {method!r}")
    tree = f.tree
    if method == "exact" and tree is None:
        raise ValueError("exact derivatives need an expression tree")
    if tree is not None and method in ("auto", "exact"):
        return [tree.diff(j).ev(coords) for j in range(f.arity)]
    radii = _cauchy_radii(coords, f.domain)
    return [_cauchy_partial(f, coords, j, radii) for j in range(f.arity)]


def partials(f, z, method="auto"):
    """Gradient of ``f`` at the interior point ``z``."""
    if isinstance(z, PolyPoint):
        if z.arity != f.arity or z.domain is not f.domain:
            raise ValueError("point does not match the map's domain")
        coords = z.coords
    else:
        coords = _as_coord_arrays(z)
    return tuple(complex(v) for v in partials_many(f, coords, method=method))


def _precompose_coordwise(tree, arity, maker):
    return tree.subst(tuple(maker(ex.Coord(j)) for j in range(arity)))


def cayley_conjugate(f):
    """Conjugate by the Cayley transform, switching half-plane <-> disk models.

    Membership in the diagonal classes is preserved either way.
    """
    tree = f.tree
    if tree is None:
        raise TypeError("cayley_conjugate needs an expression-backed map")
    if f.domain is Domain.HALF_PLANE:
        inner = _precompose_coordwise(tree, f.arity, cayley_inv_fraclin)
        return tree_map(cayley_fraclin(inner), f.arity, Domain.DISK)
    if f.domain is Domain.DISK:
        inner = _precompose_coordwise(tree, f.arity, cayley_fraclin)
        return tree_map(cayley_inv_fraclin(inner), f.arity, Domain.HALF_PLANE)
    raise ValueError("no Cayley model for plane-domain maps")


def conjugate_action(gamma, f):
    """The conjugation action: z -> gamma(f(gamma^{-1} z_1, ..., gamma^{-1} z_n)).

    Preserves both diagonal classes; the first partials at the base point
    are unchanged.
    """
    if f.domain is not Domain.HALF_PLANE:
        raise ValueError("conjugation acts on half-plane-model maps")
    tree = f.tree
    inv = gamma.inverse()
    if tree is not None:
        inner = _precompose_coordwise(tree, f.arity, inv.as_fraclin)
        return tree_map(gamma.as_fraclin(inner), f.arity, Domain.HALF_PLANE)
    # Lazy wrapper for quadrature-average cores.
    return HoloMap(f.arity, f.domain, _ConjCore(gamma, inv, f))


class _ConjCore:
    __slots__ = ("gamma", "inv", "base")

    def __init__(self, gamma, inv, base):
        self.gamma = gamma
        self.inv = inv
        self.base = base

    def _apply(self, m, values):
        num = m.a * values + m.b
        if m.c == 0.0:
            return num / m.d
        return num / (m.c * values + m.d)

    def ev(self, coords):
        pulled = tuple(self._apply(self.inv, np.asarray(c, dtype=complex)) for c in coords)
        return self._apply(self.gamma, self.base._core.ev(pulled))


class MapClass(Enum):
    """Membership families for maps of the product domain into its factor.

    DIAGONAL: restricts to the identity on the diagonal.
    UNIFORM:  diagonal maps whose diagonal partials all equal 1/n.
    """

    DIAGONAL = "diagonal"
    UNIFORM = "uniform"


DEFAULT_CLASS_SAMPLES = (1j, 2j, 1.0 + 1j, -3.0 + 0.5j)


@dataclass(frozen=True)
class ClassReport:
    """Evidence record from a membership check at a stated tolerance."""

    alpha: tuple
    max_diag_residual: float
    max_deriv_residual: float
    samples: tuple
    passed: bool
    tol: float
    family: MapClass


def check_class(f, family=MapClass.UNIFORM, samples=None, tol=1e-9, method="auto"):
    """Test diagonal-identity membership, reporting residuals rather than raising.

    The diagonal identity and constancy of the diagonal partials hold
    everywhere iff they hold at one point, so the extra sample points are a
    redundancy check on the representation.  ``alpha`` is extracted at the
    base point i.

    Parameters
    ----------
    f : HoloMap
        Half-plane-model map; disk-model maps are Cayley-conjugated first.
    family : MapClass
        DIAGONAL checks (identity on diagonal, alpha >= 0, sum alpha = 1);
        UNIFORM additionally requires every alpha_j = 1/n.
    samples : iterable of complex, optional
        Half-plane points at which the identities are sampled.
    tol : float
        Absolute residual tolerance for the pass flag.
    """
    if isinstance(family, str):
        family = MapClass(family)
    if f.domain is Domain.DISK:
        f = cayley_conjugate(f)
    elif f.domain is not Domain.HALF_PLANE:
        raise ValueError("class checks apply to half-plane or disk model maps")
    lam = tuple(complex(s) for s in (samples if samples is not None else DEFAULT_CLASS_SAMPLES))
    if any(s.imag <= 0 for s in lam):
        raise ValueError("sample points must be interior to the half-plane")
    if 1j not in lam:
        lam = (1j,) + lam

    n = f.arity
    lam_arr = np.asarray(lam, dtype=complex)
    coords = (lam_arr,) * n
    values = np.atleast_1d(eval_many(f, coords))
    diag_resid = float(np.max(np.abs(values - lam_arr)))

    grads = partials_many(f, coords, method=method)
    grads = [np.atleast_1d(g) for g in grads]
    base = lam.index(1j)
    alpha_c = [g[base] for g in grads]
    alpha = tuple(float(a.real) for a in alpha_c)

    deriv_resid = max(abs(a.imag) for a in alpha_c)
    for j, g in enumerate(grads):
        deriv_resid = max(deriv_resid, float(np.max(np.abs(g - alpha[j]))))

    ok = diag_resid <= tol and deriv_resid <= tol
    if family is MapClass.DIAGONAL:
        ok = ok and all(a >= -tol for a in alpha) and abs(sum(alpha) - 1.0) <= n * tol
    else:
        ok = ok and all(abs(a - 1.0 / n) <= tol for a in alpha)
    return ClassReport(alpha, diag_resid, deriv_resid, lam, ok, float(tol), family)


def normalize_to_uniform(f, alpha=None, tol=1e-9):
    """Blend a diagonal-class map with a linear map to equalize its partials.

    Returns (1/n) f + ((n-1)/n) g with g = sum_j ((1 - alpha_j)/(n - 1)) z_j;
    the result has every diagonal partial equal to 1/n.  Not idempotent away
    from the mean map, and not claimed to be.
    """
    n = f.arity
    if n == 1:
        raise ValueError("normalization is undefined in one variable")
    if alpha is None:
        report = check_class(f, MapClass.DIAGONAL, tol=tol)
        if not report.passed:
            raise ClassCheckError(report)
        alpha = report.alpha
    alpha = tuple(float(a) for a in alpha)
    tree = f.tree
    if tree is None:
        raise TypeError("normalization needs an expression-backed map")
    g = ex.linear_combination([(1.0 - a) / (n - 1) for a in alpha])
    blended = ex.Add(ex.Mul(ex.Const(1.0 / n + 0j), tree),
                     ex.Mul(ex.Const((n - 1.0) / n + 0j), g))
    return tree_map(blended, n, f.domain)
