import cmath

import numpy as np
import pytest

from polyflow.catalog import sample_interior
from polyflow.dim2 import (DISK_GRID, ExtremalParam, SchurParam, blend,
                           blend_slope, equivariance_residual, extremal_disk,
                           extremal_halfplane, from_schur_disk,
                           from_schur_halfplane, schur_flow)
from polyflow.domains import Domain, INFINITY, Mobius, PolyPoint, cayley, cayley_inv
from polyflow.expr import parse_expr
from polyflow.flow import translate
from polyflow.maps import check_class, eval_many, eval_map, mean_map, tree_map
from polyflow.schwarz import defect_many


def schur_hp(text, trusted=False):
    return SchurParam.halfplane(tree_map(parse_expr(text, 2), 2, Domain.HALF_PLANE),
                                trusted=trusted)


def schur_disk(text, trusted=False):
    return SchurParam.disk(tree_map(parse_expr(text, 2), 2, Domain.DISK),
                           trusted=trusted)


def grid_residual(f, g, domain=Domain.HALF_PLANE, seed=41):
    pts = sample_interior(domain, 2, 400, seed=seed)
    return float(np.max(np.abs(eval_many(f, tuple(pts)) - eval_many(g, tuple(pts)))))


class TestExtremalFamilies:
    def test_disk_family_fixes_diagonal(self):
        for angle in (0.0, 1.0, 2.5):
            f = extremal_disk(angle)
            for lam in (0j, 0.3 + 0.1j, -0.5j):
                assert eval_map(f, PolyPoint((lam, lam), Domain.DISK)) == pytest.approx(lam)

    def test_harmonic_mean_form(self):
        f = extremal_halfplane(0.0)
        direct = tree_map(parse_expr("2*z*w/(z+w)", 2), 2, Domain.HALF_PLANE)
        assert grid_residual(f, direct) <= 1e-13

    def test_parameter_infinity_is_the_mean(self):
        assert grid_residual(extremal_halfplane(INFINITY), mean_map(2)) == 0.0
        assert grid_residual(extremal_halfplane(float("inf")), mean_map(2)) == 0.0

    def test_all_parameters_in_uniform_class(self):
        for r in (0.0, 1.0, -1.0, 10.0, -100.0, INFINITY):
            assert check_class(extremal_halfplane(r)).passed
        for angle in (0.0, 0.8, 3.9, 5.5):
            assert check_class(extremal_disk(angle)).passed

    def test_unimodular_parameter_enforced(self):
        with pytest.raises(ValueError):
            ExtremalParam.disk(0.5 + 0j)
        with pytest.raises(ValueError):
            ExtremalParam.halfplane(float("nan"))


class TestSchurDiskConstruction:
    def test_zero_parameter_gives_mean(self):
        f = from_schur_disk(SchurParam.disk(0))
        assert grid_residual(f, mean_map(2, Domain.DISK), Domain.DISK) == 0.0

    def test_unimodular_constant_matches_extremal_family(self):
        tau = cmath.exp(0.7j)
        f = from_schur_disk(SchurParam.disk(tau))
        # solve g(z0,w0) = f(z0,w0) for the boundary parameter, then compare
        z0, w0 = 0.3 + 0.1j, -0.2 + 0.25j
        s, p = (z0 + w0) / 2, z0 * w0
        val = eval_map(f, PolyPoint((z0, w0), Domain.DISK))
        nu = (val * s - p) / (val - s)
        assert abs(abs(nu) - 1.0) <= 1e-12
        g = extremal_disk(nu)
        zz, ww = DISK_GRID
        assert float(np.max(np.abs(eval_many(f, (zz, ww)) - eval_many(g, (zz, ww))))) <= 1e-12
        pts = sample_interior(Domain.DISK, 2, 1000, seed=43)
        assert float(np.max(np.abs(defect_many(f, tuple(pts))))) <= 1e-9

    def test_coordinate_parameter_passes_class_but_not_extremal(self):
        f = from_schur_disk(schur_disk("z"))
        assert check_class(f).passed
        pts = sample_interior(Domain.DISK, 2, 1000, seed=44)
        d = defect_many(f, tuple(pts))
        assert float(np.min(d)) >= -1e-9
        assert float(np.max(d)) > 0.01

    def test_validation_rejects_outside_closed_disk(self):
        with pytest.raises(ValueError, match="closed disk"):
            schur_disk("2*z")
        # trusted flag skips sampling
        schur_disk("2*z", trusted=True)


class TestSchurHalfplaneConstruction:
    def test_infinity_gives_mean(self):
        f = from_schur_halfplane(SchurParam.halfplane(INFINITY))
        assert grid_residual(f, mean_map(2)) == 0.0

    def test_constant_recovers_extremal_family(self):
        f = from_schur_halfplane(SchurParam.halfplane(-1.0))
        assert grid_residual(f, extremal_halfplane(1.0)) <= 1e-13

    def test_expression_parameter_in_class(self):
        f = from_schur_halfplane(schur_hp("z+w"))
        report = check_class(f)
        assert report.passed
        assert report.alpha == pytest.approx((0.5, 0.5))

    def test_validation_rejects_nonpositive_imaginary_part(self):
        with pytest.raises(ValueError, match="closed half-plane"):
            schur_hp("z*w")


class TestSchurFlow:
    def test_time_zero_is_identity(self):
        phi = schur_hp("z+w")
        assert grid_residual(schur_flow(phi, 0.0), from_schur_halfplane(phi)) <= 1e-14

    def test_constant_parameter_shifts_family(self):
        for r, t in ((1.0, 2.0), (-3.0, 5.0)):
            f = schur_flow(SchurParam.halfplane(-r), t)
            assert grid_residual(f, extremal_halfplane(r + t)) <= 1e-12

    @pytest.mark.parametrize("text", ["0", "-1", "3i", "z", "w", "z+w",
                                      "(z+w)/2", "(z+w)/4+5i"])
    @pytest.mark.parametrize("t", [3.0, -7.0])
    def test_two_code_paths_agree(self, text, t):
        phi = schur_hp(text)
        lhs = schur_flow(phi, t)
        rhs = translate(from_schur_halfplane(phi), t)
        assert grid_residual(lhs, rhs) <= 1e-12

    def test_nonlinear_parameter_survives_flow(self):
        # -1/(z+w) maps into the closed half-plane; its flow stays in class
        phi = schur_hp("-1/(z+w)")
        f = schur_flow(phi, 4.0)
        assert check_class(f).passed


class TestBlend:
    def test_endpoints(self):
        assert grid_residual(blend(1.0), mean_map(2)) == 0.0
        assert grid_residual(blend(0.0), extremal_halfplane(0.0)) <= 1e-14

    def test_diagonal_slope_is_one(self):
        for t in (0.0, 0.3, 1.0):
            assert blend_slope(1.0, t) == pytest.approx(1.0)

    def test_slope_against_direct_evaluation(self):
        # blend(1/2) at (i, 2i) = (17/12) i, the slope on the a=2 ray
        assert blend_slope(2.0, 0.5) == pytest.approx(17 / 12)
        val = eval_map(blend(0.5), PolyPoint((1j, 2j)))
        assert val == pytest.approx(17j / 12)

    def test_slope_formula_general(self):
        rng = np.random.default_rng(45)
        for _ in range(20):
            a = float(rng.uniform(0.2, 4.0))
            t = float(rng.uniform(0.0, 1.0))
            z = complex(rng.uniform(-2, 2), rng.uniform(0.5, 3))
            val = eval_map(blend(t), PolyPoint((z, a * z)))
            assert val == pytest.approx(blend_slope(a, t) * z)

    def test_weight_validated(self):
        with pytest.raises(ValueError):
            blend(1.5)


class TestEquivariance:
    def test_identity(self):
        assert equivariance_residual(Mobius.identity(), 1.0 + 0j) <= 1e-15

    def test_rotation(self):
        # half-plane elliptic with angle pi/6 acts on the disk as w -> e^{i pi/3} w
        gamma = Mobius.rotation_about_i(np.pi / 6)
        assert equivariance_residual(gamma, 1.0 + 0j) <= 1e-12

    def test_blaschke_example(self):
        # the half-plane element whose disk action is w -> (w - 1/2)/(1 - w/2)
        C = np.array([[-1.0, 1j], [1.0, 1j]])
        mu = np.array([[1.0, -0.5], [-0.5, 1.0]])
        M = np.linalg.inv(C) @ mu @ C
        M = M / M[1, 1]
        assert np.max(np.abs(M.imag)) <= 1e-12
        gamma = Mobius(M[0, 0].real, M[0, 1].real, M[1, 0].real, M[1, 1].real)
        assert equivariance_residual(gamma, 1j) <= 1e-12

    def test_boundary_transport_related_to_cayley(self):
        gamma = Mobius.translation(2.0)
        nu = cayley(cayley_inv(cmath.exp(0.4j)) if False else 0.5)  # nu = cayley(0.5)
        moved = cayley(gamma(0.5))
        from polyflow.dim2 import halfplane_mobius_to_disk_value
        assert halfplane_mobius_to_disk_value(gamma, nu) == pytest.approx(moved)

    def test_deterministic_pair_sweep(self):
        rng = np.random.default_rng(46)
        worst = 0.0
        for _ in range(30):
            a = 1.0 + rng.uniform(0, 2)
            b = rng.uniform(-2, 2)
            c = rng.uniform(-0.4, 0.4)
            gamma = Mobius(a, b, c, (1.0 + b * c) / a)
            angle = float(rng.uniform(0, 2 * np.pi))
            worst = max(worst, equivariance_residual(gamma, angle))
        assert worst <= 1e-12
