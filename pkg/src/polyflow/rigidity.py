"""Numerical rigidity machinery: Poisson-kernel reconstruction on circles,
the mean/gap coordinate change on the poly-half-plane, translation-rigidity
residuals, and polarization-style vanishing checks on a totally real slice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import Domain, PolyPoint
from .maps import eval_many, mean_map

__all__ = [
    "CircleSamples", "poisson_eval", "abs_identity_residual",
    "MeanGapCoords", "to_mean_gaps", "from_mean_gaps", "gap_domain_contains",
    "default_gap_grid", "rigidity_residual", "Rectangle", "PolarizationReport",
    "polarization_check",
]


@dataclass(frozen=True)
class CircleSamples:
    """Equispaced samples of a function on the circle of a given radius.

    values[k] is the sample at radius * exp(2 pi i k / N).
    """

    radius: float
    values: tuple

    def __init__(self, radius, values):
        radius = float(radius)
        values = tuple(complex(v) for v in values)
        if radius <= 0:
            raise ValueError("radius must be positive")
        if len(values) < 8:
            raise ValueError("need at least 8 equispaced samples")
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, radius, n_nodes):
        theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
        pts = radius * np.exp(1j * theta)
        return cls(radius, [func(p) for p in pts])

    def nodes(self):
        n = len(self.values)
        return self.radius * np.exp(2j * np.pi * np.arange(n) / n)


def poisson_eval(samples, z):
    """Poisson-integral reconstruction at an interior point of the circle.

    Standard kernel (r^2 - |z|^2)/|r e^{i theta} - z|^2 with equispaced
    trapezoid quadrature; exact for trigonometric content below the node
    count, and exactly the circle average at z = 0.
    """
    z = complex(z)
    r = samples.radius
    if abs(z) >= r:
        raise ValueError("evaluation point must be interior to the circle")
    vals = np.asarray(samples.values)
    if z == 0:
        mean = np.mean(vals)
    else:
        ring = samples.nodes()
        kernel = (r * r - abs(z) ** 2) / np.abs(ring - z) ** 2
        mean = np.mean(kernel * vals)
    if np.max(np.abs(vals.imag)) == 0.0:
        return float(mean.real)
    return complex(mean)


def abs_identity_residual(samples, center_tol=1e-6):
    """Residual of the identity  integral |phi| = 2 integral phi_-  on the circle.

    Valid for harmonic samples with phi(0) = 0 (the two sides differ by the
    circle mean); the mean-value check guards against uncentered input.
    """
    vals = np.asarray([complex(v).real for v in samples.values])
    mean = float(np.mean(vals))
    if abs(mean) > center_tol:
        raise ValueError(f"samples are not centered: circle mean {mean:.3e}")
    total_abs = float(np.mean(np.abs(vals)))
    total_neg = float(np.mean(np.maximum(0.0, -vals)))
    return abs(total_abs - 2.0 * total_neg)


@dataclass(frozen=True)
class MeanGapCoords:
    """Coordinates (a, d): a the coordinate mean, d the consecutive gaps."""

    a: complex
    gaps: tuple

    def __init__(self, a, gaps):
        a = complex(a)
        gaps = tuple(complex(d) for d in gaps)
        if a.imag <= 0:
            raise ValueError("the mean coordinate must lie in the half-plane")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gaps", gaps)

    @property
    def arity(self):
        return len(self.gaps) + 1


def to_mean_gaps(z):
    """Forward coordinate change on the poly-half-plane."""
    if isinstance(z, PolyPoint):
        if z.domain is not Domain.HALF_PLANE:
            raise ValueError("the coordinate change is a half-plane construction")
        coords = z.coords
    else:
        coords = tuple(complex(c) for c in z)
    n = len(coords)
    a = sum(coords) / n
    gaps = tuple(coords[j + 1] - coords[j] for j in range(n - 1))
    return MeanGapCoords(a, gaps)


def _reconstruct(a, gaps):
    n = len(gaps) + 1
    a = complex(a)
    gaps = [complex(d) for d in gaps]
    z1 = a - sum((n - 1 - j) * gaps[j] for j in range(n - 1)) / n
    coords = [z1]
    for d in gaps:
        coords.append(coords[-1] + d)
    return tuple(coords)


def from_mean_gaps(c):
    """Inverse coordinate change; raises if the image leaves the poly-half-plane."""
    coords = _reconstruct(c.a, c.gaps)
    return PolyPoint(coords, Domain.HALF_PLANE)


def gap_domain_contains(a, gaps):
    """Whether (a, gaps) reconstructs to a point of the poly-half-plane."""
    coords = _reconstruct(a, gaps)
    return all(z.imag > 0 for z in coords)


def default_gap_grid(arity=2, half_width=0.25, points_per_axis=5):
    """Deterministic gap grid: each gap on a square grid of side 2*half_width.

    Small enough that membership holds at both default mean values i and 2i.
    """
    axis = np.linspace(-half_width, half_width, points_per_axis)
    values = (axis[:, None] + 1j * axis[None, :]).ravel()
    if arity == 2:
        return [(v,) for v in values]
    grids = [values] * (arity - 1)
    mesh = np.meshgrid(*grids, indexing="ij")
    flat = [m.ravel() for m in mesh]
    return list(zip(*flat))


def rigidity_residual(f, a_pair=(1j, 2j), gap_grid=None):
    """Dependence of the centered map on the mean coordinate.

    With g = f - mean and h(a, d) = g evaluated at the reconstructed point:
    returns (a_dependence, sup_h) where a_dependence is the max over the gap
    grid of |h(a1, d) - h(a2, d)| and sup_h = max |h(a1, d)|.  Both vanish
    identically only for the mean map among translation-invariant members of
    the uniform class; that is the rigidity statement this diagnoses.
    """
    if f.domain is not Domain.HALF_PLANE:
        raise ValueError("rigidity residuals are half-plane diagnostics")
    a1, a2 = (complex(a) for a in a_pair)
    grid = gap_grid if gap_grid is not None else default_gap_grid(f.arity)
    for gaps in grid:
        for a in (a1, a2):
            if not gap_domain_contains(a, gaps):
                raise ValueError(f"gap point {gaps} falls outside the domain slice at a = {a}")
    mean = mean_map(f.arity)

    def h(a, gaps):
        coords = _reconstruct(a, gaps)
        arrays = tuple(np.asarray([c]) for c in coords)
        return complex(eval_many(f, arrays)[0] - eval_many(mean, arrays)[0])

    a_dep = 0.0
    sup_h = 0.0
    for gaps in grid:
        h1 = h(a1, gaps)
        h2 = h(a2, gaps)
        a_dep = max(a_dep, abs(h1 - h2))
        sup_h = max(sup_h, abs(h1))
    return a_dep, sup_h


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle in one complex coordinate."""

    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def contains(self, v, margin=0.0):
        return (self.re_lo + margin <= v.real <= self.re_hi - margin
                and self.im_lo + margin <= v.imag <= self.im_hi - margin)


@dataclass(frozen=True)
class PolarizationReport:
    vanishes_on_slice: bool
    max_on_slice: float
    witness: tuple | None
    max_on_region: float | None
    slice_samples: int


_SLICE_REAL_PARTS = (-1.0, 0.0, 1.0)


def _slice_samples(rects, points_per_axis=5, scale_margin=0.9):
    """Deterministic samples of the totally real slice inside the region.

    Slice points have every coordinate with a common real part and purely
    imaginary offsets summing to zero.
    """
    n = len(rects)
    rs = [r for r in _SLICE_REAL_PARTS
          if all(rect.re_lo <= r <= rect.re_hi for rect in rects)]
    im_cap = min(min(-rect.im_lo, rect.im_hi) for rect in rects)
    if not rs or im_cap <= 0:
        return []
    axis = np.linspace(-1.0, 1.0, points_per_axis)
    # basis e_k - e_{k+1} of the zero-sum hyperplane
    if n == 1:
        offsets = [np.zeros(1)]
    else:
        mesh = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
        coeffs = np.stack([m.ravel() for m in mesh])  # (n-1, m)
        offsets = np.zeros((n, coeffs.shape[1]))
        for k in range(n - 1):
            offsets[k] += coeffs[k]
            offsets[k + 1] -= coeffs[k]
        peak = np.max(np.abs(offsets))
        if peak > 0:
            offsets *= scale_margin * im_cap / peak
        offsets = list(offsets.T)
    samples = []
    for r in rs:
        for t in offsets:
            samples.append(tuple(r + 1j * tj for tj in t))
    return samples


def _region_samples(rects, count=1000):
    from .dim2 import _kronecker_lattice
    n = len(rects)
    u = _kronecker_lattice(count, 2 * n)
    pts = []
    for j, rect in enumerate(rects):
        re = rect.re_lo + (rect.re_hi - rect.re_lo) * u[:, 2 * j]
        im = rect.im_lo + (rect.im_hi - rect.im_lo) * u[:, 2 * j + 1]
        pts.append(re + 1j * im)
    return tuple(pts)


def polarization_check(h, rects, tol=1e-9, region_count=1000):
    """Vanishing-propagation check on a product-of-rectangles region.

    Samples the totally real zero-sum slice; if |h| stays below ``tol``
    there, also samples the full region (a holomorphic function vanishing on
    the slice vanishes on the region, so the region max is expected to be a
    small multiple of tol).  Otherwise reports the witness point.
    """
    rects = tuple(rects)
    if h.arity != len(rects):
        raise ValueError("one rectangle per coordinate is required")
    samples = _slice_samples(rects)
    if not samples:
        raise ValueError("the region does not meet the totally real slice")
    max_on_slice = 0.0
    witness = None
    for pt in samples:
        arrays = tuple(np.asarray([c]) for c in pt)
        val = abs(complex(eval_many(h, arrays)[0]))
        if val > max_on_slice:
            max_on_slice = val
            witness = pt
    if max_on_slice > tol:
        return PolarizationReport(False, max_on_slice, witness, None, len(samples))
    region = _region_samples(rects, region_count)
    vals = np.abs(eval_many(h, region))
    return PolarizationReport(True, max_on_slice, None, float(np.max(vals)), len(samples))
