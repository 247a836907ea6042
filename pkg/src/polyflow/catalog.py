"""The shipped family catalog used by the CLI experiments and the
acceptance suite, plus seeded interior-point samplers."""

from __future__ import annotations

import math

import numpy as np

from .domains import Domain, INFINITY
from .dim2 import (SchurParam, blend, extremal_disk, extremal_halfplane,
                   from_schur_disk, from_schur_halfplane)
from .expr import parse_expr
from .flow import translate
from .maps import cayley_conjugate, linear_map, mean_map, tree_map

__all__ = [
    "disk_extremal_parameters", "halfplane_extremal_parameters",
    "schur_disk_parameters", "schur_halfplane_parameters", "blend_weights",
    "shipped_families", "family_from_spec", "sample_interior",
]

# Deterministic parameter ladders for the shipped families.
DISK_ANGLES = tuple(2.0 * math.pi * k / 8.0 for k in range(8))
HALFPLANE_PARAMS = (0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0, INFINITY)
SCHUR_DISK_TEXTS = ("0", "1", "i", "(z+w)/2")
SCHUR_HALFPLANE_TEXTS = ("-1", "3i", "z+w", "(z+w)/4+5i")
BLEND_WEIGHTS = (0.1, 0.25, 0.5, 0.75, 0.9)


def disk_extremal_parameters():
    return DISK_ANGLES


def halfplane_extremal_parameters():
    return HALFPLANE_PARAMS


def schur_disk_parameters():
    return tuple(SchurParam.disk(tree_map(parse_expr(t, 2), 2, Domain.DISK))
                 for t in SCHUR_DISK_TEXTS)


def schur_halfplane_parameters():
    return tuple(SchurParam.halfplane(tree_map(parse_expr(t, 2), 2, Domain.HALF_PLANE))
                 for t in SCHUR_HALFPLANE_TEXTS)


def blend_weights():
    return BLEND_WEIGHTS


def shipped_families(include_translates=True, translate_times=(-10.0, -1.0, 1.0, 10.0)):
    """All (name, map) pairs of the catalog.

    Disk-model families appear as themselves; when translates are requested
    the disk families are carried to the half-plane model first, since the
    translation flow lives there.
    """
    out = []
    out.append(("mean", mean_map(2)))
    for angle in DISK_ANGLES:
        out.append((f"extremal_disk({angle:.4f})", extremal_disk(angle)))
    for r in HALFPLANE_PARAMS:
        label = "inf" if r is INFINITY else f"{r:g}"
        out.append((f"extremal({label})", extremal_halfplane(r)))
    for text in SCHUR_DISK_TEXTS:
        theta = SchurParam.disk(tree_map(parse_expr(text, 2), 2, Domain.DISK))
        out.append((f"schur_disk({text})", from_schur_disk(theta)))
    for text in SCHUR_HALFPLANE_TEXTS:
        phi = SchurParam.halfplane(tree_map(parse_expr(text, 2), 2, Domain.HALF_PLANE))
        out.append((f"schur_hp({text})", from_schur_halfplane(phi)))
    for t in BLEND_WEIGHTS:
        out.append((f"blend({t:g})", blend(t)))
    if include_translates:
        translated = []
        for name, f in out:
            g = cayley_conjugate(f) if f.domain is Domain.DISK else f
            for t in translate_times:
                translated.append((f"{name}@t={t:g}", translate(g, t)))
        out.extend(translated)
    return out


def family_from_spec(name, args=""):
    """Build a catalog family from its config spelling.

    Supported: mean, extremal(r|inf), extremal_disk(angle), schur_disk(expr),
    schur_hp(expr), blend(t), linear(a1,a2,...).
    """
    name = name.strip()
    args = args.strip()
    if name == "mean":
        return mean_map(2)
    if name == "extremal":
        r = INFINITY if args in ("inf", "oo") else float(args)
        return extremal_halfplane(r)
    if name == "extremal_disk":
        return extremal_disk(float(args))
    if name == "schur_disk":
        theta = SchurParam.disk(tree_map(parse_expr(args, 2), 2, Domain.DISK))
        return from_schur_disk(theta)
    if name == "schur_hp":
        if args in ("inf", "oo"):
            return from_schur_halfplane(SchurParam.halfplane(INFINITY))
        phi = SchurParam.halfplane(tree_map(parse_expr(args, 2), 2, Domain.HALF_PLANE))
        return from_schur_halfplane(phi)
    if name == "blend":
        return blend(float(args))
    if name == "linear":
        coeffs = [float(a) for a in args.split(",") if a.strip()]
        return linear_map(coeffs)
    raise ValueError(f"unknown family {name!r}")


def sample_interior(domain, arity, count, seed=0, re_span=10.0,
                    im_lo=0.05, im_hi=5.0, max_radius=0.9):
    """Seeded pseudo-random interior points, away from the boundary.

    Half-plane: Re uniform on [-re_span/2, re_span/2], Im log-uniform on
    [im_lo, im_hi].  Disk: area-uniform inside radius ``max_radius``.
    Returns an (arity, count) complex array.
    """
    rng = np.random.default_rng(seed)
    if domain is Domain.HALF_PLANE:
        re = rng.uniform(-re_span / 2.0, re_span / 2.0, (arity, count))
        im = np.exp(rng.uniform(math.log(im_lo), math.log(im_hi), (arity, count)))
        return re + 1j * im
    if domain is Domain.DISK:
        radius = max_radius * np.sqrt(rng.uniform(0.0, 1.0, (arity, count)))
        angle = rng.uniform(0.0, 2.0 * math.pi, (arity, count))
        return radius * np.exp(1j * angle)
    re = rng.uniform(-re_span / 2.0, re_span / 2.0, (arity, count))
    im = rng.uniform(-re_span / 2.0, re_span / 2.0, (arity, count))
    return re + 1j * im
