"""Tests for Gagliardo seminorms, refinement ladders and limit scans."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsob.catalog import Constant, Gaussian, Indicator, Linear
from fracsob.core import dilate
from fracsob.gagliardo import (
    cross_term_p,
    embedding_check,
    gagliardo_seminorm_p,
    gradient_embedding_check,
    limit_scan,
    limit_target,
    refinement_ladder,
    resolve_policy,
)
from fracsob.models.domain import DomainSpec
from fracsob.models.params import DiagPolicy, LimitMode
from fracsob.models.results import Relation
from fracsob.models.validation import InvalidArgumentError
from tests.helpers.model_factories import (
    create_test_config,
    create_test_function,
    create_test_params,
)


def linear_seminorm(s: float) -> float:
    """[x]^2 over [0,1] for order s: 2 / ((2 - 2s)(3 - 2s))."""
    return 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))


def indicator_whole_space(length: float, sp: float) -> float:
    """[chi_[0,L]]^p over R: 4 L^(1-sp) / (sp (1 - sp))."""
    return 4.0 * length ** (1.0 - sp) / (sp * (1.0 - sp))


class TestSeminorm:
    """Test suite for gagliardo_seminorm_p."""

    def test_indicator_whole_space(self, unit_indicator, params_1d):
        """Test the zero extension of chi_[0,1] against its closed form."""
        result = gagliardo_seminorm_p(unit_indicator, params_1d, whole_space=True)

        # Verify
        assert result.diag_policy == DiagPolicy.JUMP
        assert result.seminorm_p == pytest.approx(indicator_whole_space(1.0, params_1d.sp), rel=1e-9)
        assert result.lp_norm_p == pytest.approx(1.0)
        assert result.whole_space is True
        assert result.warnings == []

    def test_constant_has_zero_interior_seminorm(self, unit_indicator, params_1d):
        """Test that a constant function has no interior energy."""
        result = gagliardo_seminorm_p(unit_indicator, params_1d)

        assert result.seminorm_p == 0.0
        assert result.full_norm_p == pytest.approx(1.0)

    def test_step_inside_box(self, params_1d):
        """Test a jump inside the box against the exact cell-model value."""
        u = create_test_function(Indicator(a=0.0, b=0.5), 0.0, 1.0, 5)
        sp = params_1d.sp
        c = 0.625  # the jump sits at the cell boundary after x = 0.5
        expected = 2.0 / (sp * (1.0 - sp)) * (c ** (1.0 - sp) + (1.0 - c) ** (1.0 - sp) - 1.0)

        result = gagliardo_seminorm_p(u, params_1d)

        assert result.seminorm_p == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_linear_is_exact(self, unit_linear, s):
        """Test that frozen difference quotients are exact for affine functions."""
        result = gagliardo_seminorm_p(unit_linear, create_test_params(1, s, 2.0))

        assert result.diag_policy == DiagPolicy.SMOOTH
        assert result.seminorm_p == pytest.approx(linear_seminorm(s), rel=1e-9)

    def test_symmetric_and_full_sums_agree(self, unit_linear, params_1d):
        """Test that summing each pair once and doubling equals the full sum."""
        half = gagliardo_seminorm_p(unit_linear, params_1d, symmetric=True)
        full = gagliardo_seminorm_p(unit_linear, params_1d, symmetric=False)

        assert half.seminorm_p == pytest.approx(full.seminorm_p, rel=1e-12)

    def test_dilation_scaling(self, unit_indicator, params_1d):
        """Test [u(x/lam)]^p = lam^(n-sp) [u]^p on the dilated grid."""
        base = gagliardo_seminorm_p(unit_indicator, params_1d, whole_space=True)
        scaled = gagliardo_seminorm_p(dilate(unit_indicator, 2.0), params_1d, whole_space=True)

        assert scaled.seminorm_p == pytest.approx(2.0 ** (1.0 - params_1d.sp) * base.seminorm_p, rel=1e-9)

    def test_divergent_jump(self, unit_indicator):
        """Test that a jump with sp >= 1 gives an infinite seminorm and a warning."""
        result = gagliardo_seminorm_p(unit_indicator, create_test_params(1, 0.5, 2.0), whole_space=True)

        assert math.isinf(result.seminorm_p)
        assert "divergence-suspected" in result.warnings

    def test_dimension_mismatch(self, unit_linear):
        """Test that params.n must match the grid dimension."""
        with pytest.raises(InvalidArgumentError):
            gagliardo_seminorm_p(unit_linear, create_test_params(2, 0.5, 2.0))

    def test_domain_restriction(self, params_1d):
        """Test that a domain smaller than the grid restricts the integral."""
        u = create_test_function(Linear(), -1.0, 2.0, 385)

        result = gagliardo_seminorm_p(u, params_1d, domain=DomainSpec.interval(0.0, 1.0))

        assert result.seminorm_p == pytest.approx(linear_seminorm(params_1d.s), rel=1e-9)

    def test_two_dimensional_constant(self):
        """Test that a constant has no interior energy in 2-D."""
        u = create_test_function(Constant(value=3.0), (0.0, 0.0), (1.0, 1.0), 9)

        result = gagliardo_seminorm_p(u, create_test_params(2, 0.5, 2.0))

        assert result.seminorm_p == 0.0
        assert result.lp_norm_p == pytest.approx(9.0)

    def test_two_dimensional_gaussian(self):
        """Test that a 2-D gaussian has finite positive energy and no warnings."""
        u = create_test_function(Gaussian(), (-3.0, -3.0), (3.0, 3.0), 17)

        result = gagliardo_seminorm_p(u, create_test_params(2, 0.5, 2.0))

        assert 0.0 < result.seminorm_p < math.inf
        assert result.warnings == []

    @given(s=st.floats(min_value=0.1, max_value=0.9, allow_nan=False, allow_infinity=False))
    @settings(max_examples=10, deadline=None)
    def test_linear_property(self, s):
        """Test exactness for affine functions across orders."""
        u = create_test_function(Linear(slope=2.0), 0.0, 1.0, 33)

        result = gagliardo_seminorm_p(u, create_test_params(1, s, 2.0))

        assert result.seminorm_p == pytest.approx(4.0 * linear_seminorm(s), rel=1e-9)


class TestPolicyAndLadder:
    """Test suite for policy resolution and refinement ladders."""

    def test_resolve_policy(self, unit_indicator, gaussian_1d):
        """Test that AUTO picks jump for few levels and smooth otherwise."""
        assert resolve_policy(unit_indicator) == DiagPolicy.JUMP
        assert resolve_policy(gaussian_1d) == DiagPolicy.SMOOTH
        assert resolve_policy(gaussian_1d, policy=DiagPolicy.JUMP) == DiagPolicy.JUMP

    def test_ladder_linear(self, unit_linear, params_1d):
        """Test that an exact integrand gives a flat ladder."""
        ladder = refinement_ladder(unit_linear, params_1d, cfg=create_test_config(refine=2))

        assert ladder.levels == [2, 1, 0]
        assert max(ladder.differences) == pytest.approx(0.0, abs=1e-10)
        assert ladder.divergence_suspected is False

    def test_refine_sets_error_estimate(self, gaussian_1d, params_1d):
        """Test that refine >= 1 fills in a non-negative error estimate."""
        result = gagliardo_seminorm_p(gaussian_1d, params_1d, cfg=create_test_config(refine=1))

        assert 0.0 <= result.est_error < 5e-2 * result.seminorm_p


class TestCrossTermAndLimits:
    """Test suite for cross terms, limit scans and embeddings."""

    def test_cross_term_closes_gap(self, unit_indicator, params_1d):
        """Test whole-space minus interior seminorm equals the cross term."""
        whole = gagliardo_seminorm_p(unit_indicator, params_1d, whole_space=True).seminorm_p
        inner = gagliardo_seminorm_p(unit_indicator, params_1d).seminorm_p

        assert cross_term_p(unit_indicator, params_1d) == pytest.approx(whole - inner, rel=1e-12)

    def test_bbm_scan(self, unit_linear):
        """Test (1 - s)[x]^2 = 1/(3 - 2s) and the s -> 1 target."""
        points = limit_scan(unit_linear, 2.0, LimitMode.BBM, [0.5, 0.9])

        for point in points:
            assert point.scaled_value == pytest.approx(1.0 / (3.0 - 2.0 * point.s), rel=1e-9)
        assert limit_target(unit_linear, 2.0, LimitMode.BBM) == pytest.approx(1.0)

    def test_ms_scan(self, unit_indicator):
        """Test s[chi]^2 = 2/(1 - 2s) and the s -> 0 target."""
        points = limit_scan(unit_indicator, 2.0, "ms", [0.01, 0.1])

        for point in points:
            assert point.scaled_value == pytest.approx(2.0 / (1.0 - 2.0 * point.s), rel=1e-9)
        assert limit_target(unit_indicator, 2.0, LimitMode.MS) == pytest.approx(2.0)

    def test_empty_scan(self, unit_linear):
        """Test that an empty sweep is rejected."""
        with pytest.raises(InvalidArgumentError):
            limit_scan(unit_linear, 2.0, LimitMode.BBM, [])

    def test_embedding_on_unit_interval(self, unit_linear):
        """Test the pointwise kernel comparison on a domain of diameter 1."""
        report = embedding_check(unit_linear, 2.0, 0.25, 0.75)

        assert report.pointwise is True
        assert report.ok is True
        assert report.seminorm_lo == pytest.approx(linear_seminorm(0.25), rel=1e-9)

    def test_embedding_order(self, unit_linear):
        """Test that s must not exceed s_hi."""
        with pytest.raises(InvalidArgumentError):
            embedding_check(unit_linear, 2.0, 0.75, 0.25)

    def test_gradient_embedding(self, unit_linear):
        """Test the explicit W^{1,p} bound for x on [0,1]."""
        report = gradient_embedding_check(unit_linear, create_test_params(1, 0.5, 2.0))

        # Verify: lhs = 1, rhs = 2 + 8/3
        assert report.relation == Relation.LE
        assert report.lhs == pytest.approx(1.0, rel=1e-9)
        assert report.rhs == pytest.approx(2.0 + 8.0 / 3.0, rel=1e-2)
        assert report.ok is True
