"""Tests for extension operators and the trace/lift pair."""

import math

import numpy as np
import pytest

from fracsob.catalog import Gaussian, Indicator, Linear
from fracsob.exttrace import (
    bump_profile,
    cutoff_constant,
    cutoff_multiply,
    lift_norm_factor,
    reflect_extend,
    sobolev_norm_sq,
    trace_constant,
    trace_inequality_check,
    trace_lift,
    trace_restrict,
    zero_extend,
)
from fracsob.models.domain import DomainSpec
from fracsob.models.results import ExtensionOp, Relation
from fracsob.models.validation import (
    InvalidArgumentError,
    PreconditionViolationError,
    TraceUndefinedError,
)
from tests.helpers.model_factories import (
    create_test_function,
    create_test_gaussian,
    create_test_params,
)


@pytest.fixture
def centered_indicator():
    """chi_[1/4, 3/4] on [0, 1] with 203 points."""
    return create_test_function(Indicator(a=0.25, b=0.75), 0.0, 1.0, 203)


@pytest.fixture
def lifted():
    """Lift of the standard gaussian on [-8, 8] for s = 3/4."""
    return trace_lift(create_test_gaussian(1, 8.0, 129), 0.75)


class TestZeroExtension:
    """Test suite for zero_extend."""

    def test_decomposition(self, centered_indicator, params_1d):
        """Test out = in + cross with a norm that can only grow."""
        report = zero_extend(centered_indicator, DomainSpec.interval(0.2, 0.8), params_1d)

        # Verify
        assert report.op == ExtensionOp.ZERO_EXTEND
        assert report.cross_term > 0.0
        assert report.residual == pytest.approx(0.0, abs=1e-9 * report.seminorm_power_out)
        assert report.ratio >= 1.0
        assert report.ok is True
        assert report.warnings == []

    def test_set_touching_boundary(self, centered_indicator, params_1d):
        """Test that K must be compactly contained in Omega."""
        with pytest.raises(PreconditionViolationError):
            zero_extend(centered_indicator, DomainSpec.interval(0.0, 0.8), params_1d)

    def test_support_outside_set(self, centered_indicator, params_1d):
        """Test that u must vanish outside K."""
        with pytest.raises(PreconditionViolationError):
            zero_extend(centered_indicator, DomainSpec.interval(0.3, 0.7), params_1d)


class TestReflection:
    """Test suite for reflect_extend."""

    def test_two_dimensional(self, params_2d):
        """Test that reflection doubles the L^p power and at most quadruples the seminorm power."""
        u = create_test_function(Gaussian(sigma=0.5, center=(0.0, 0.3)), (-1.0, -1.0), (1.0, 1.0), 33)

        report = reflect_extend(u, params_2d)

        assert report.lp_ratio == pytest.approx(2.0, rel=1e-10)
        assert report.seminorm_ratio <= 4.0
        assert report.bound == 4.0
        assert report.ok is True

    def test_one_dimensional(self, params_1d):
        """Test reflection of a 1-D field across 0."""
        u = create_test_function(Gaussian(center=0.4), -1.0, 1.0, 65)

        report = reflect_extend(u, params_1d)

        assert report.lp_ratio == pytest.approx(2.0, rel=1e-10)
        assert report.ok is True

    def test_asymmetric_grid(self, params_2d):
        """Test that the grid must be symmetric in the last coordinate."""
        u = create_test_function(Gaussian(), (0.0, 0.0), (1.0, 1.0), 9)

        with pytest.raises(InvalidArgumentError):
            reflect_extend(u, params_2d)


class TestCutoff:
    """Test suite for cutoff_multiply and its constant."""

    def test_linear_cutoff(self, params_1d):
        """Test the product estimate with a ramp cutoff."""
        u = create_test_gaussian(1, 4.0, 129)

        report = cutoff_multiply(u, Linear(slope=0.125, offset=0.5), params_1d)

        assert report.op == ExtensionOp.CUTOFF
        assert report.lp_power_out <= report.lp_power_in
        assert report.seminorm_power_out <= report.bound
        assert report.ok is True

    def test_sampled_cutoff(self, params_1d):
        """Test that the Lipschitz constant is estimated from samples."""
        u = create_test_gaussian(1, 4.0, 129)
        psi = create_test_function(Linear(slope=0.125, offset=0.5), -4.0, 4.0, 129)

        report = cutoff_multiply(u, psi, params_1d)

        assert report.ok is True

    def test_cutoff_out_of_range(self, params_1d):
        """Test that cutoffs must take values in [0, 1]."""
        u = create_test_gaussian(1, 4.0, 129)

        with pytest.raises(InvalidArgumentError):
            cutoff_multiply(u, Linear(), params_1d)

    def test_constant_values(self, params_1d, params_2d, gaussian_1d):
        """Test the cutoff constant for lam = 0 and its 2-D formula."""
        u2 = create_test_gaussian(2, 2.0, 9)
        expected = 2.0 * math.pi * 2.0 ** params_2d.sp * (1.0 / (2.0 - params_2d.sp) + 1.0 / params_2d.sp)

        assert cutoff_constant(gaussian_1d, 0.0, params_1d) == 0.0
        assert cutoff_constant(u2, 2.0, params_2d) == pytest.approx(expected)


class TestTraceConstants:
    """Test suite for the trace constant and the lifting profile."""

    def test_trace_constant_at_one(self):
        """Test integral of 1/(1 + t^2) equals pi."""
        assert trace_constant(1.0) == pytest.approx(math.pi, rel=1e-10)

    def test_trace_constant_closed_form(self):
        """Test sqrt(pi) Gamma(s - 1/2) / Gamma(s)."""
        s = 0.75
        expected = math.sqrt(math.pi) * math.gamma(s - 0.5) / math.gamma(s)

        assert trace_constant(s) == pytest.approx(expected, rel=1e-8)

    def test_trace_constant_divergent(self):
        """Test that s <= 1/2 has no trace."""
        with pytest.raises(TraceUndefinedError):
            trace_constant(0.5)

    def test_bump_unit_mass(self):
        """Test that the default profile has unit integral and compact support."""
        t = np.linspace(-1.0, 1.0, 20001)

        assert np.sum(bump_profile(t)) * (t[1] - t[0]) == pytest.approx(1.0, rel=1e-6)
        assert bump_profile(np.array([1.0, 1.5]))[0] == 0.0

    def test_lift_norm_factor_grows_with_s(self):
        """Test that the norm factor increases with the order."""
        assert lift_norm_factor(0.6) < lift_norm_factor(0.9)


class TestTraceLift:
    """Test suite for trace_lift and trace_restrict."""

    def test_round_trip(self, lifted):
        """Test that restricting the lift returns the original samples."""
        back = trace_restrict(lifted.u2d)

        # Verify
        assert lifted.s == 0.75
        assert lifted.norm_factor > 0.0
        np.testing.assert_allclose(back.v.values, lifted.v.values, atol=1e-6)
        assert back.identity_residual < 1e-10

    def test_lift_grid(self, lifted):
        """Test the lifted field lives on a square grid with a row at x_2 = 0."""
        grid = lifted.u2d.grid

        assert grid.dim == 2
        assert grid.lo == (-8.0, -8.0)
        assert grid.zero_index(1) == 64

    def test_lift_rejects_small_order(self, gaussian_1d):
        """Test that the lift needs s > 1/2."""
        with pytest.raises(TraceUndefinedError):
            trace_lift(gaussian_1d, 0.5)

    def test_lift_rejects_even_grid(self):
        """Test that an even number of points is rejected."""
        with pytest.raises(InvalidArgumentError):
            trace_lift(create_test_gaussian(1, 8.0, 128), 0.75)

    def test_lift_rejects_bad_profile(self, gaussian_1d):
        """Test that a profile without unit mass is rejected."""
        def box(t):
            return np.where(np.abs(np.asarray(t)) < 1.0, 1.0, 0.0)

        with pytest.raises(InvalidArgumentError):
            trace_lift(gaussian_1d, 0.75, bump=box)

    def test_restrict_needs_two_dimensions(self, gaussian_1d):
        """Test that only 2-D fields have a trace here."""
        with pytest.raises(InvalidArgumentError):
            trace_restrict(gaussian_1d)

    def test_restrict_needs_zero_row(self):
        """Test that the grid must contain the line x_2 = 0."""
        u = create_test_function(Gaussian(), (-1.0, 0.1), (1.0, 1.0), 9)

        with pytest.raises(InvalidArgumentError):
            trace_restrict(u)


class TestTraceInequality:
    """Test suite for the trace inequality and discrete H^s norms."""

    def test_inequality_holds(self, lifted):
        """Test the trace inequality on a lifted field."""
        report = trace_inequality_check(lifted.u2d, 0.75)

        assert report.relation == Relation.LE
        assert report.lhs > 0.0
        assert report.ok is True
        assert report.note.startswith("discrete constant")

    def test_order_zero_is_parseval(self, gaussian_1d):
        """Test that the H^0 norm is the discrete L^2 sum."""
        direct = float(np.sum(gaussian_1d.values ** 2)) * gaussian_1d.grid.spacing[0]

        assert sobolev_norm_sq(gaussian_1d, 0.0) == pytest.approx(direct, rel=1e-10)
