"""Tests for the normalization constants."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsob.constants import (
    a_const,
    b_const,
    ball_volume,
    ball_volume_chain,
    bbm_constant,
    c_const,
    c_const_direct,
    constant_bundle,
    constant_sweep,
    e_integral,
    limit_targets,
    ms_constant,
    sphere,
    sphere_measure,
)
from fracsob.models.validation import DivergentIntegralError, InvalidArgumentError


def closed_form_c(n: int, s: float) -> float:
    """s 4^s Gamma(n/2 + s) / (pi^(n/2) Gamma(1 - s))."""
    return s * 4.0 ** s * math.gamma(0.5 * n + s) / (math.pi ** (0.5 * n) * math.gamma(1.0 - s))


class TestSphereMeasures:
    """Test suite for sphere measures and ball volumes."""

    @pytest.mark.parametrize("d,expected", [(0, 2.0), (1, 2.0 * math.pi), (2, 4.0 * math.pi), (3, 2.0 * math.pi ** 2)])
    def test_sphere_measure(self, d, expected):
        """Test the first sphere measures."""
        assert sphere_measure(d) == pytest.approx(expected)

    def test_negative_dimension(self):
        """Test that negative sphere dimensions are rejected."""
        with pytest.raises(InvalidArgumentError):
            sphere_measure(-1)

    def test_varpi(self):
        """Test the ball volume carried by a sphere measure."""
        assert sphere(1).varpi == pytest.approx(math.pi)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_ball_volume_recursions_agree(self, n):
        """Test that both ball volume routes agree."""
        assert ball_volume(n) == pytest.approx(ball_volume_chain(n))

    def test_ball_volume_values(self):
        """Test the unit ball volumes in dimensions 2 and 3."""
        assert ball_volume(2) == pytest.approx(math.pi)
        assert ball_volume_chain(3) == pytest.approx(4.0 * math.pi / 3.0)


class TestRadialIntegral:
    """Test suite for E_n(theta)."""

    @pytest.mark.parametrize(
        "n,theta,expected",
        [(2, 2.0, math.pi / 2.0), (2, 4.0, math.pi / 4.0), (3, 3.0, 1.0), (3, 5.0, 1.0 / 3.0)],
    )
    def test_closed_forms(self, n, theta, expected):
        """Test E_n against elementary closed forms."""
        assert e_integral(n, theta) == pytest.approx(expected, rel=1e-10)

    def test_divergent(self):
        """Test that theta <= n - 1 diverges."""
        with pytest.raises(DivergentIntegralError):
            e_integral(2, 1.0)

    def test_dimension_one(self):
        """Test that E_n needs n >= 2."""
        with pytest.raises(InvalidArgumentError):
            e_integral(1, 2.0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_recursion(self, n):
        """Test E_n(theta + 2) = (theta - n + 1) / theta * E_n(theta)."""
        theta = n + 0.5
        assert e_integral(n, theta + 2.0) == pytest.approx((theta - n + 1.0) / theta * e_integral(n, theta), rel=1e-9)


class TestConstants:
    """Test suite for A(n,s), B(s) and C(n,s)."""

    def test_known_values(self):
        """Test C(1, 1/2) = 1/pi and C(2, 1/2) = 1/(2 pi)."""
        assert c_const(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-8)
        assert c_const(2, 0.5) == pytest.approx(0.5 / math.pi, rel=1e-8)

    def test_a_const_one_dimension(self):
        """Test that A(1,s) = 1."""
        assert a_const(1, 0.3) == 1.0

    def test_b_const_from_one_dimensional_constant(self):
        """Test B(s) = s(1-s) / C(1,s)."""
        s = 0.3
        assert b_const(s) == pytest.approx(s * (1.0 - s) / closed_form_c(1, s), rel=1e-8)

    @pytest.mark.parametrize("s", [0.0, 1.0, -0.2])
    def test_invalid_order(self, s):
        """Test that the order must lie strictly inside (0, 1)."""
        with pytest.raises(InvalidArgumentError):
            c_const(1, s)

    @given(
        n=st.integers(min_value=1, max_value=3),
        s=st.floats(min_value=0.05, max_value=0.95, allow_nan=False, allow_infinity=False),
    )
    @settings(max_examples=25, deadline=None)
    def test_matches_closed_form(self, n, s):
        """Test C(n,s) against the gamma-function closed form."""
        assert c_const(n, s) == pytest.approx(closed_form_c(n, s), rel=1e-7)

    @pytest.mark.parametrize("n,s", [(1, 0.25), (2, 0.5), (3, 0.75)])
    def test_direct_integral(self, n, s):
        """Test that the defining integral reproduces the factored constant."""
        assert c_const_direct(n, s) == pytest.approx(c_const(n, s), rel=1e-4)

    @pytest.mark.parametrize("n", [1, 2])
    def test_endpoint_asymptotics(self, n):
        """Test C(n,s)/(s(1-s)) near both ends of (0, 1)."""
        high, low = limit_targets(n)

        # Verify
        assert c_const(n, 0.99) / (0.99 * 0.01) == pytest.approx(high, rel=0.02)
        assert c_const(n, 0.01) / (0.01 * 0.99) == pytest.approx(low, rel=0.02)

    def test_limit_targets(self):
        """Test the limiting values in dimension 1."""
        assert limit_targets(1) == pytest.approx((2.0, 1.0))


class TestBundles:
    """Test suite for constant bundles and sweeps."""

    def test_bundle_consistency(self):
        """Test that a bundle's C equals s(1-s)/(A B)."""
        bundle = constant_bundle(2, 0.4)

        assert bundle.C == pytest.approx(0.4 * 0.6 / (bundle.A * bundle.B))
        assert bundle.I0 == pytest.approx(math.pi / 2.0)
        assert bundle.I1 == pytest.approx(math.pi / 4.0)
        assert bundle.e(3.0) == pytest.approx(1.0)

    def test_bundle_one_dimension(self):
        """Test that radial integrals are absent in dimension 1."""
        bundle = constant_bundle(1, 0.4)

        assert bundle.A == 1.0
        assert bundle.I0 is None

    def test_sweep(self):
        """Test the default sweep and the empty-sweep error."""
        assert [b.s for b in constant_sweep(1)] == [0.01, 0.05, 0.5, 0.95, 0.99]
        with pytest.raises(InvalidArgumentError):
            constant_sweep(1, [])


class TestLimitConstants:
    """Test suite for the seminorm limit constants."""

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bbm_quadratic(self, n):
        """Test the p = 2 value omega_{n-1} / (2n)."""
        assert bbm_constant(n, 2.0) == pytest.approx(sphere_measure(n - 1) / (2.0 * n))

    def test_ms(self):
        """Test the p = 2 value omega_{n-1}."""
        assert ms_constant(2, 2.0) == pytest.approx(2.0 * math.pi)

    def test_bad_exponent(self):
        """Test that p < 1 is rejected."""
        with pytest.raises(InvalidArgumentError):
            bbm_constant(1, 0.5)
