import math

import numpy as np
import pytest

from superquad.functions import (CONVEX, INCREASING, POSITIVE, SUBQUADRATIC,
                                 SUPERQUADRATIC, FunctionModel,
                                 SupportConstantPolicy, by_spec, catalog,
                                 certification_grid,
                                 check_monotone_convex_positive,
                                 check_subquadratic, check_superquadratic,
                                 eval_many, support_constant, zero_model)

GRID = 129  # smaller than the default for unit-test speed


def analytic(f):
    return SupportConstantPolicy("analytic_derivative")


class TestSupportConstant:
    def test_square_interior(self):
        f = by_spec("pow:2")
        assert support_constant(f, analytic(f), 0.3) == pytest.approx(0.6, abs=1e-14)

    def test_cube_interior(self):
        f = by_spec("pow:3")
        assert support_constant(f, analytic(f), 0.5) == pytest.approx(0.75, abs=1e-14)

    def test_square_at_zero(self):
        f = by_spec("pow:2")
        assert support_constant(f, analytic(f), 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_numeric_matches_analytic(self):
        f = by_spec("pow:3")
        num = SupportConstantPolicy("numeric_derivative", step=1e-6)
        assert support_constant(f, num, 0.5) == pytest.approx(0.75, rel=1e-8)

    def test_numeric_forward_at_zero(self):
        f = by_spec("pow:2")
        num = SupportConstantPolicy("numeric_derivative", step=1e-6)
        # forward difference of x^2 at 0 is the step itself
        assert support_constant(f, num, 0.0) == pytest.approx(1e-6, rel=1e-6)

    def test_user_supplied(self):
        f = by_spec("pow:2")
        pol = SupportConstantPolicy("user_supplied", c_func=lambda x: 42.0)
        assert support_constant(f, pol, 0.5) == 42.0

    def test_domain_violation(self):
        f = by_spec("pow:2")
        with pytest.raises(ValueError):
            support_constant(f, analytic(f), 1.5)

    def test_step_too_large(self):
        f = by_spec("pow:2")
        with pytest.raises(ValueError, match="step"):
            support_constant(f, SupportConstantPolicy("numeric_derivative", step=0.3), 0.5)

    def test_analytic_without_derivative(self):
        bare = FunctionModel("bare", 1.0, lambda x: x * x)
        with pytest.raises(ValueError):
            support_constant(bare, SupportConstantPolicy("analytic_derivative"), 0.5)


class TestSuperquadraticCheck:
    def test_square_exact_equality(self):
        cert = check_superquadratic(by_spec("pow:2"), grid_size=GRID)
        assert cert.passed
        assert abs(cert.worst_margin) <= 1e-14

    def test_cube_passes(self):
        cert = check_superquadratic(by_spec("pow:3"), grid_size=GRID)
        assert cert.passed
        assert cert.worst_margin >= -1e-14

    def test_pow15_fails_with_witness(self):
        cert = check_superquadratic(by_spec("pow:1.5"), grid_size=GRID)
        assert not cert.passed
        assert cert.worst_margin < -1e-3
        assert cert.witness
        x, y = cert.witness[0]
        assert x > 0.0

    def test_grid_size_validation(self):
        with pytest.raises(ValueError):
            check_superquadratic(by_spec("pow:2"), grid_size=2)

    def test_failure_persists_under_refinement(self):
        # grids are nested, so a found violation can only get worse
        f = by_spec("pow:1.5")
        coarse = check_superquadratic(f, grid_size=65)
        fine = check_superquadratic(f, grid_size=129)
        assert not coarse.passed and not fine.passed
        assert fine.worst_margin <= coarse.worst_margin + 1e-15

    def test_numeric_policy_is_noted(self):
        bare = FunctionModel("bare", 1.0, lambda x: np.asarray(x, dtype=float) ** 2)
        cert = check_superquadratic(bare, grid_size=17)
        assert cert.notes


class TestSubquadraticCheck:
    def test_pow15_passes(self):
        assert check_subquadratic(by_spec("pow:1.5"), grid_size=GRID).passed

    def test_square_is_both(self):
        cert = check_subquadratic(by_spec("pow:2"), grid_size=GRID)
        assert cert.passed
        assert abs(cert.worst_margin) <= 1e-14

    def test_cube_fails_with_witness(self):
        cert = check_subquadratic(by_spec("pow:3"), grid_size=GRID)
        assert not cert.passed
        assert cert.witness

    def test_matches_negated_superquadratic(self):
        f = by_spec("pow:3")
        sub = check_subquadratic(f, grid_size=65)
        sup = check_superquadratic(f.negated(), grid_size=65)
        assert sub.worst_margin == sup.worst_margin
        assert sub.witness == sup.witness


class TestShapeChecks:
    def test_square_all_pass(self):
        certs = check_monotone_convex_positive(by_spec("pow:2"), grid_size=GRID)
        assert all(certs[k].passed for k in (INCREASING, CONVEX, POSITIVE))

    def test_xlog_not_convex(self):
        certs = check_monotone_convex_positive(by_spec("xlog"), grid_size=GRID)
        assert certs[INCREASING].passed
        assert not certs[CONVEX].passed
        assert certs[CONVEX].witness

    def test_xlog3_convex(self):
        certs = check_monotone_convex_positive(by_spec("xlog3"), grid_size=GRID)
        assert certs[CONVEX].passed


class TestCatalog:
    def test_square_flags(self):
        f = by_spec("pow:2")
        assert f.declared_flags == {POSITIVE, INCREASING, CONVEX,
                                    SUPERQUADRATIC, SUBQUADRATIC}

    def test_xlog3_flags(self):
        f = by_spec("xlog3")
        assert {SUBQUADRATIC, INCREASING, CONVEX} <= f.declared_flags

    def test_xlog_flags(self):
        f = by_spec("xlog")
        assert {SUBQUADRATIC, INCREASING} <= f.declared_flags
        assert CONVEX not in f.declared_flags

    def test_required_members(self):
        names = {f.name for f in catalog()}
        expected = {f"pow:{m:g}" for m in (1, 1.5, 2, 2.5, 3, 4)}
        expected |= {"pnorm:1", "pnorm:2", "pnorm:3", "pnorm_m1:1", "pnorm_m1:2",
                     "xlog", "xlog3"}
        assert expected <= names

    def test_log_models_vanish_at_zero(self):
        assert by_spec("xlog")(0.0) == 0.0
        assert by_spec("xlog3")(0.0) == 0.0

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            by_spec("sin:1")

    def test_flagged_superquadratic_members_certify(self):
        for f in catalog():
            if {SUPERQUADRATIC, POSITIVE} <= f.declared_flags:
                assert check_superquadratic(f, grid_size=GRID).passed, f.name
                certs = check_monotone_convex_positive(f, grid_size=GRID)
                assert all(c.passed for c in certs.values()), f.name

    def test_declared_derivatives_match_finite_differences(self):
        h = 1e-6
        for f in catalog():
            xs = np.linspace(0.05, 0.95, 19)
            fd = (eval_many(f, xs + h) - eval_many(f, xs - h)) / (2 * h)
            exact = np.array([f.derivative(x) for x in xs])
            assert np.allclose(fd, exact, rtol=1e-5, atol=1e-8), f.name

    def test_zero_model_degenerate(self):
        z = zero_model()
        assert check_superquadratic(z, grid_size=17).worst_margin == 0.0
        assert check_subquadratic(z, grid_size=17).worst_margin == 0.0


class TestGrid:
    def test_nested_grids(self):
        small = certification_grid(1.0, 65)
        large = certification_grid(1.0, 129)
        assert set(small[:65]) <= set(large[:129])       # uniform part nests
        assert np.array_equal(small[65:], large[129:129 + 65])  # random prefix

    def test_eval_many_scalar_fallback(self):
        scalar_only = FunctionModel("scalar", 1.0, lambda x: float(x) ** 2)
        out = eval_many(scalar_only, np.array([[0.0, 0.5], [1.0, 0.25]]))
        assert out.shape == (2, 2)
        assert out[1][0] == 1.0


class TestModelValidation:
    def test_bad_flags(self):
        with pytest.raises(ValueError):
            FunctionModel("f", 1.0, lambda x: x, declared_flags=frozenset({"smooth"}))

    def test_bad_domain(self):
        with pytest.raises(ValueError):
            FunctionModel("f", -1.0, lambda x: x)

    def test_negated_flips_values(self):
        f = by_spec("pow:2").negated()
        assert f(0.5) == -0.25
        assert f.derivative(0.5) == -1.0
