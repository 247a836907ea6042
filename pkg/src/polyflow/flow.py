"""Translation and unipotent flows on map families, the flow average, a
computable compact-open metric, orbit statistics, and the periodicity
diagnostic.

The metric follows the classical compact-exhaustion construction with the
sup over each compact replaced by a max over a fixed deterministic grid, so
every distance in the artifact is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .domains import Domain, Infinity, Mobius
from .maps import (HoloMap, MapClass, ClassCheckError, average_map, check_class,
                   conjugate_action, eval_many, linear_map, tree_map)

__all__ = [
    "Exhaustion", "default_exhaustion", "translate", "unipotent_subgroup",
    "unipotent_flow", "average", "co_metric", "OrbitStats", "orbit_stats",
    "invariant_target", "periodicity_residual", "PeriodicityResult",
]


@dataclass(frozen=True)
class Exhaustion:
    """Nested deterministic grids standing in for a compact exhaustion.

    Level j samples the box |Re z_i| <= j, 1/j <= Im z_i <= j.  Grids are
    full coordinate products, subsampled by a deterministic index stride
    when the product exceeds the per-level cap.
    """

    depth: int
    grids: tuple          # one (arity, m_j) complex ndarray per level
    spacing: tuple        # (re_step, im_step) per level

    def level_points(self, j):
        """Grid of level j (1-based)."""
        return self.grids[j - 1]


def _product_grid(axes_values, arity, cap):
    per = len(axes_values)
    total = per ** arity
    stride = max(1, -(-total // cap))  # ceil division
    idx = np.arange(0, total, stride, dtype=np.int64)
    coords = np.empty((arity, idx.size), dtype=complex)
    rem = idx.copy()
    for pos in range(arity - 1, -1, -1):
        coords[pos] = axes_values[rem % per]
        rem //= per
    return coords


def default_exhaustion(arity, depth=6, points_per_axis=5, cap=2000):
    """The default grid family: 5 points per real/imaginary axis per
    coordinate, capped at ``cap`` points per level."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    grids = []
    spacing = []
    for j in range(1, depth + 1):
        res = np.linspace(-j, j, points_per_axis)
        ims = np.linspace(1.0 / j, j, points_per_axis)
        values = (res[:, None] + 1j * ims[None, :]).ravel()
        grid = _product_grid(values, arity, cap)
        grid.flags.writeable = False
        grids.append(grid)
        re_step = res[1] - res[0] if points_per_axis > 1 else 0.0
        im_step = ims[1] - ims[0] if points_per_axis > 1 else 0.0
        spacing.append((float(re_step), float(im_step)))
    return Exhaustion(depth, tuple(grids), tuple(spacing))


_DEFAULT_EXHAUSTIONS = {}


def _default_for(arity):
    if arity not in _DEFAULT_EXHAUSTIONS:
        _DEFAULT_EXHAUSTIONS[arity] = default_exhaustion(arity)
    return _DEFAULT_EXHAUSTIONS[arity]


def translate(f, t):
    """Time-t translation flow: f_t(z) = f(z_1 - t, ..., z_n - t) + t."""
    if f.domain is not Domain.HALF_PLANE:
        raise ValueError("the translation flow lives in the half-plane model")
    t = float(t)
    tree = f.tree
    if tree is not None:
        shifted = ex.shift_coords(tree, f.arity, t)
        return tree_map(ex.Add(shifted, ex.Const(complex(t))), f.arity, f.domain)
    if f.is_average:
        base, r, n_panels = f.average_parts
        return average_map(translate(base, t), r, n_panels)
    return conjugate_action(Mobius.translation(t), f)


def unipotent_subgroup(p, t):
    """The element at time t of the unipotent one-parameter subgroup fixing p.

    p = oo gives the translations; a real p gives its conjugate subgroup.
    """
    t = float(t)
    if isinstance(p, Infinity):
        return Mobius.translation(t)
    p = float(p)
    return Mobius(1.0 + p * t, -p * p * t, t, 1.0 - p * t)


def unipotent_flow(f, p, t):
    """Conjugation by the unipotent subgroup fixing boundary point p."""
    gamma = unipotent_subgroup(p, t)
    if isinstance(p, Infinity):
        return translate(f, t)
    return conjugate_action(gamma, f)


def average(f, r, n_panels=512):
    """Lazy flow average (1/2r) integral_{-r}^{r} f_t dt, composite trapezoid.

    ``f`` should belong to the uniform class (the average then stays in it
    up to quadrature error); n_panels subintervals, n_panels + 1 samples.
    """
    if n_panels < 2:
        raise ValueError("need at least 2 quadrature panels")
    return average_map(f, r, n_panels)


def _level_values(f, ex_obj):
    return [eval_many(f, tuple(grid)) for grid in ex_obj.grids]


def _metric_from_levels(vals_f, vals_g):
    total = 0.0
    for j, (a, b) in enumerate(zip(vals_f, vals_g), start=1):
        d = float(np.max(np.abs(a - b)))
        total += 2.0 ** (-j) * d / (1.0 + d)
    return total


def co_metric(f, g, exhaustion=None):
    """Grid compact-open distance: sum_j 2^-j d_j / (1 + d_j) with d_j the
    max difference over level j.  Symmetric, bounded by 1, zero iff the maps
    agree on every grid."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")
    if f.domain is not g.domain:
        raise ValueError("model mismatch")
    ex_obj = exhaustion if exhaustion is not None else _default_for(f.arity)
    return _metric_from_levels(_level_values(f, ex_obj), _level_values(g, ex_obj))


@dataclass(frozen=True)
class OrbitStats:
    """Sampled orbit distances and the time-fraction statistic."""

    r: float
    epsilon: float
    samples: tuple            # (t, distance) pairs
    fraction_within: float

    def distances(self):
        return np.array([d for _, d in self.samples])


def orbit_stats(f, target, r, epsilon, n_samples=2001, exhaustion=None,
                sampler="grid", seed=None):
    """Fraction of flow times t in [-r/2, r/2] with the translate within
    ``epsilon`` of ``target`` in the grid compact-open metric.

    The default sampler is a deterministic equispaced grid of ``n_samples``
    times: the time fraction is then a Riemann-sum estimate of the measure
    in the concentration statement.  A seeded uniform sampler is available
    behind ``sampler="uniform"``.
    """
    if r <= 0 or epsilon <= 0:
        raise ValueError("r and epsilon must be positive")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    ex_obj = exhaustion if exhaustion is not None else _default_for(f.arity)
    if sampler == "grid":
        ts = np.linspace(-r / 2.0, r / 2.0, n_samples)
    elif sampler == "uniform":
        rng = np.random.default_rng(seed)
        ts = np.sort(rng.uniform(-r / 2.0, r / 2.0, n_samples))
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    target_vals = _level_values(target, ex_obj)
    samples = []
    hits = 0
    for t in ts:
        ft = translate(f, float(t))
        d = _metric_from_levels(_level_values(ft, ex_obj), target_vals)
        samples.append((float(t), d))
        if d <= epsilon:
            hits += 1
    return OrbitStats(float(r), float(epsilon), tuple(samples), hits / len(ts))


def invariant_target(f, tol=1e-9):
    """The translation-invariant linear map sharing f's base-point partials."""
    report = check_class(f, MapClass.DIAGONAL, tol=tol)
    if not report.passed:
        raise ClassCheckError(report)
    return linear_map(report.alpha, f.domain)


@dataclass(frozen=True)
class PeriodicityResult:
    residual: float
    distance_to_target: float

    def inconsistent(self, residual_tol=1e-9, distance_floor=1e-3):
        """A periodic point far from its invariant target contradicts the
        rigidity of the flow and signals an implementation bug."""
        return self.residual <= residual_tol and self.distance_to_target >= distance_floor

    def __iter__(self):
        return iter((self.residual, self.distance_to_target))


def periodicity_residual(f, period, exhaustion=None, tol=1e-9):
    """Max grid residual of f against its time-``period`` translate, paired
    with the distance from f to its invariant target."""
    if period <= 0:
        raise ValueError("period must be positive")
    ex_obj = exhaustion if exhaustion is not None else _default_for(f.arity)
    ft = translate(f, float(period))
    residual = 0.0
    for grid in ex_obj.grids:
        diff = eval_many(ft, tuple(grid)) - eval_many(f, tuple(grid))
        residual = max(residual, float(np.max(np.abs(diff))))
    dist = co_metric(f, invariant_target(f, tol=tol), ex_obj)
    return PeriodicityResult(residual, dist)
