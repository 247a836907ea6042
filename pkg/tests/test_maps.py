import numpy as np
import pytest

from polyflow.catalog import sample_interior, shipped_families
from polyflow.domains import Domain, Mobius, PolyPoint, cayley, poincare_dist
from polyflow.dim2 import extremal_disk, extremal_halfplane
from polyflow.expr import parse_expr
from polyflow.maps import (ClassCheckError, MapClass, cayley_conjugate,
                           check_class, conjugate_action, coordinate_map,
                           eval_many, eval_map, linear_map, mean_map,
                           normalize_to_uniform, partials, partials_many,
                           tree_map)


def h0():
    return extremal_halfplane(0.0)


class TestEval:
    def test_mean_is_linear(self):
        assert eval_map(mean_map(2), PolyPoint((1j, 3j))) == 2j

    def test_harmonic_mean_value(self):
        # 2zw/(z+w) at (i, 2i): 2*i*2i/(3i) = -4/(3i) = 4i/3
        assert eval_map(h0(), PolyPoint((1j, 2j))) == pytest.approx(4j / 3)

    def test_disk_extremal_fixes_origin(self):
        f = extremal_disk(0.0)
        assert eval_map(f, PolyPoint((0j, 0j), Domain.DISK)) == 0

    def test_domain_and_arity_mismatch(self):
        f = mean_map(2)
        with pytest.raises(ValueError, match="arity"):
            eval_map(f, PolyPoint((1j,)))
        with pytest.raises(ValueError, match="domain"):
            eval_map(f, PolyPoint((0.1j, 0.2j), Domain.DISK))


class TestPartials:
    def test_linear_map_gradient(self):
        f = mean_map(3)
        assert partials(f, PolyPoint((1j, 2j, 5 + 1j))) == pytest.approx((1 / 3,) * 3)

    def test_base_point_partials_are_uniform(self):
        assert partials(h0(), PolyPoint((1j, 1j))) == pytest.approx((0.5, 0.5))

    def test_off_diagonal_partials_symbolic_oracle(self):
        # d/dz [2zw/(z+w)] = 2w^2/(z+w)^2, d/dw = 2z^2/(z+w)^2
        z0, w0 = 1j, 2j
        expect = (2 * w0 ** 2 / (z0 + w0) ** 2, 2 * z0 ** 2 / (z0 + w0) ** 2)
        assert expect == (pytest.approx(8 / 9), pytest.approx(2 / 9))
        got = partials(h0(), PolyPoint((z0, w0)))
        assert got == pytest.approx(expect)

    def test_quadrature_matches_exact(self):
        pts = sample_interior(Domain.HALF_PLANE, 2, 300, seed=7, im_lo=0.2)
        f = extremal_halfplane(1.0)
        exact = partials_many(f, tuple(pts), method="exact")
        quad = partials_many(f, tuple(pts), method="cauchy")
        for a, b in zip(exact, quad):
            rel = np.abs(a - b) / np.abs(a)
            assert float(np.max(rel)) <= 1e-10

    def test_quadrature_radius_degenerates_on_boundary(self):
        f = mean_map(1)
        with pytest.raises(ValueError, match="radius"):
            partials_many(f, (np.array([1.0 + 0j]),), method="cauchy")

    def test_average_wrapper_uses_quadrature_route(self):
        from polyflow.flow import average
        a = average(h0(), 5.0, 64)
        with pytest.raises(ValueError, match="tree"):
            partials_many(a, (np.array([1j]), np.array([2j])), method="exact")
        g = partials(a, PolyPoint((1j, 1j)))
        assert g == pytest.approx((0.5, 0.5), abs=1e-9)


class TestImPositivity:
    @pytest.mark.parametrize("r", [0.0, 1.0, -10.0, 100.0])
    def test_halfplane_families_stay_inside(self, r):
        f = extremal_halfplane(r)
        pts = sample_interior(Domain.HALF_PLANE, 2, 10_000, seed=int(abs(r)) + 1)
        vals = eval_many(f, tuple(pts))
        assert float(np.min(vals.imag)) > 0.0


class TestDistanceDecreasing:
    def test_uniform_class_members_contract_to_base(self):
        pts = sample_interior(Domain.HALF_PLANE, 2, 2000, seed=9)
        bound = np.maximum(poincare_dist(pts[0], 1j), poincare_dist(pts[1], 1j))
        for name, f in [("h0", h0()), ("h5", extremal_halfplane(5.0)),
                        ("mean", mean_map(2))]:
            vals = eval_many(f, tuple(pts))
            lhs = poincare_dist(vals, 1j)
            assert float(np.max(lhs - bound)) <= 1e-9, name


class TestCayleyConjugate:
    def test_pointwise_conjugation_identity(self):
        f = extremal_disk(1.3)
        g = cayley_conjugate(f)  # half-plane model
        assert g.domain is Domain.HALF_PLANE
        rng = np.random.default_rng(11)
        zs = rng.uniform(-3, 3, 200) + 1j * np.exp(rng.uniform(-2, 1.5, 200))
        ws = rng.uniform(-3, 3, 200) + 1j * np.exp(rng.uniform(-2, 1.5, 200))
        lhs = eval_many(g, (zs, ws))
        inner = eval_many(f, (np.array([cayley(complex(z)) for z in zs]),
                              np.array([cayley(complex(w)) for w in ws])))
        from polyflow.domains import cayley_inv
        rhs = np.array([cayley_inv(complex(v)) for v in inner])
        assert float(np.max(np.abs(lhs - rhs))) <= 1e-12

    def test_preserves_class_membership(self):
        f = extremal_disk(0.7)
        assert check_class(f).passed
        assert check_class(cayley_conjugate(f)).passed
        back = cayley_conjugate(cayley_conjugate(f))
        assert back.domain is Domain.DISK
        assert check_class(back).passed


class TestConjugateAction:
    def test_identity_acts_trivially(self):
        f = h0()
        g = conjugate_action(Mobius.identity(), f)
        pts = sample_interior(Domain.HALF_PLANE, 2, 100, seed=2)
        assert np.max(np.abs(eval_many(f, tuple(pts)) - eval_many(g, tuple(pts)))) <= 1e-12

    def test_translation_shifts_family_parameter(self):
        g = conjugate_action(Mobius.translation(2.0), extremal_halfplane(1.0))
        target = extremal_halfplane(3.0)
        pts = sample_interior(Domain.HALF_PLANE, 2, 500, seed=3)
        assert np.max(np.abs(eval_many(g, tuple(pts)) - eval_many(target, tuple(pts)))) <= 1e-12

    def test_preserves_uniform_class_on_random_pairs(self):
        rng = np.random.default_rng(17)
        families = [f for _, f in shipped_families(include_translates=False)
                    if f.domain is Domain.HALF_PLANE]
        for k in range(100):
            a = 1.0 + rng.uniform(0, 2)
            b = rng.uniform(-2, 2)
            c = rng.uniform(-0.5, 0.5)
            gamma = Mobius(a, b, c, (1.0 + b * c) / a)
            f = families[int(rng.integers(len(families)))]
            if not check_class(f).passed:  # diagonal-only members
                continue
            assert check_class(conjugate_action(gamma, f)).passed, k


class TestCheckClass:
    def test_linear_with_nonnegative_weights_in_diagonal_class(self):
        f = linear_map([0.2, 0.3, 0.5])
        report = check_class(f, MapClass.DIAGONAL)
        assert report.passed
        assert report.alpha == pytest.approx((0.2, 0.3, 0.5))
        assert not check_class(f, MapClass.UNIFORM).passed

    def test_extremal_family_in_uniform_class(self):
        for r in (0.0, -3.0, 7.5):
            report = check_class(extremal_halfplane(r))
            assert report.passed
            assert report.alpha == pytest.approx((0.5, 0.5))
            assert report.max_diag_residual <= 1e-9
            assert report.max_deriv_residual <= 1e-9

    def test_coordinate_projection(self):
        report = check_class(coordinate_map(0, 2), MapClass.DIAGONAL)
        assert report.passed
        assert report.alpha == pytest.approx((1.0, 0.0))

    def test_disk_model_is_conjugated_first(self):
        assert check_class(extremal_disk(2.2)).passed

    def test_failure_is_a_report_not_an_error(self):
        f = tree_map(parse_expr("(z+w)/2 + 1", 2), 2, Domain.HALF_PLANE)
        report = check_class(f)
        assert not report.passed
        assert report.max_diag_residual == pytest.approx(1.0)

    def test_invariants_of_passing_diagonal_report(self):
        for _, f in shipped_families(include_translates=False):
            report = check_class(f, MapClass.DIAGONAL)
            assert report.passed
            assert all(a >= -report.tol for a in report.alpha)
            assert abs(sum(report.alpha) - 1.0) <= f.arity * report.tol


class TestNormalize:
    def test_mean_is_fixed(self):
        f = normalize_to_uniform(mean_map(3))
        pts = sample_interior(Domain.HALF_PLANE, 3, 50, seed=21)
        diff = np.abs(eval_many(f, tuple(pts)) - eval_many(mean_map(3), tuple(pts)))
        assert float(np.max(diff)) <= 1e-14

    def test_projection_becomes_mean(self):
        f = normalize_to_uniform(coordinate_map(0, 2))
        target = mean_map(2)
        pts = sample_interior(Domain.HALF_PLANE, 2, 100, seed=22)
        assert np.max(np.abs(eval_many(f, tuple(pts)) - eval_many(target, tuple(pts)))) <= 1e-12
        assert check_class(f).passed

    def test_formula_on_already_uniform_member(self):
        # blending an already-uniform map still applies the formula: the
        # result is (1/2) f + (1/2) mean, not f itself.
        f = h0()
        out = normalize_to_uniform(f)
        pts = sample_interior(Domain.HALF_PLANE, 2, 200, seed=23)
        expect = 0.5 * eval_many(f, tuple(pts)) + 0.5 * eval_many(mean_map(2), tuple(pts))
        assert np.max(np.abs(eval_many(out, tuple(pts)) - expect)) <= 1e-12
        assert check_class(out).passed

    def test_one_variable_rejected(self):
        with pytest.raises(ValueError):
            normalize_to_uniform(coordinate_map(0, 1))

    def test_requires_diagonal_class(self):
        f = tree_map(parse_expr("(z+w)/2 + 1", 2), 2, Domain.HALF_PLANE)
        with pytest.raises(ClassCheckError):
            normalize_to_uniform(f)
