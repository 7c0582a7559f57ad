"""Tests for the cusp and ball-family counterexamples."""

import math

import pytest

from fracsob.counterexamples import (
    ball_family_study,
    block_sum,
    cusp_control_study,
    cusp_divergence_study,
    cusp_regime,
    radius_sequence,
    strip_integral,
)
from fracsob.models.validation import InvalidArgumentError


class TestCuspRegime:
    """Test suite for the cusp parameter checks and strip geometry."""

    def test_regime_values(self):
        """Test the kappa threshold and alpha for p = 2, s = 0.9."""
        threshold, alpha = cusp_regime(2.0, 0.9, 5.0)

        assert threshold == pytest.approx(3.75)
        assert alpha == pytest.approx(2.0)

    def test_small_order(self):
        """Test that sp <= 1 is rejected."""
        with pytest.raises(InvalidArgumentError, match="s\\*p > 1"):
            cusp_regime(2.0, 0.5, 10.0)

    def test_blunt_cusp(self):
        """Test that kappa below the threshold is rejected."""
        with pytest.raises(InvalidArgumentError, match="kappa"):
            cusp_regime(2.0, 0.9, 3.0)

    def test_radius_sequence(self):
        """Test r_{j+1} = r_j - r_j^kappa."""
        seq = radius_sequence(0.1, 2.0, 3)

        assert seq == pytest.approx([0.1, 0.09, 0.0819])
        assert all(a > b > 0.0 for a, b in zip(seq, seq[1:]))

    def test_strip_integral_positive(self):
        """Test that a strip pair has a positive finite contribution."""
        value = strip_integral(0.05, 2.0, 0.9, 5.0)

        assert 0.0 < value < math.inf

    def test_block_sum_positive(self):
        """Test that the strips between r/2 and r add up to a positive amount."""
        value = block_sum(0.05, 2.0, 0.9, 5.0)

        assert 0.0 < value < math.inf


class TestCuspStudy:
    """Test suite for cusp_divergence_study and the half-disc control."""

    def test_invalid_radius(self):
        """Test that the starting radius must lie in (0, 0.1]."""
        with pytest.raises(InvalidArgumentError):
            cusp_divergence_study(2.0, 0.9, 5.0, r=0.2)

    def test_invalid_strip_count(self):
        """Test that at least one strip is required."""
        with pytest.raises(InvalidArgumentError):
            cusp_divergence_study(2.0, 0.9, 5.0, j_max=0)

    @pytest.mark.slow
    def test_growth_law(self):
        """Test the block sums grow like r^(1 - alpha) and the gradient stays bounded."""
        study = cusp_divergence_study(2.0, 0.9, 5.0, r=0.1, j_max=3)

        # Verify
        assert study.expected_slope == pytest.approx(-1.0)
        assert abs(study.growth_slope - study.expected_slope) <= 0.15 * abs(study.expected_slope)
        assert len(study.strip_contribs) == 4
        assert all(c > 0.0 for c in study.strip_constants)
        assert study.grad_sup <= math.pi ** 2 + 1.0
        assert study.grad_identity_error <= 1e-10

    @pytest.mark.slow
    def test_control_is_finite(self):
        """Test that rho * theta away from the cusp has a finite seminorm."""
        ladder = cusp_control_study(2.0, 0.9)

        assert all(math.isfinite(v) for v in ladder.values)
        assert ladder.divergence_suspected is False


class TestBallFamily:
    """Test suite for ball_family_study."""

    @pytest.fixture
    def study(self):
        return ball_family_study(16.0, 0.5, 4)

    def test_centers(self, study):
        """Test a_n = C^-n for the kept balls."""
        assert study.a_seq[:2] == pytest.approx([1.0 / 16.0, 1.0 / 256.0])
        assert len(study.a_seq) == 8

    def test_orthonormal_family(self, study):
        """Test unit norms and pairwise distances sqrt(2)."""
        assert all(v == pytest.approx(1.0, abs=1e-12) for v in study.f_norms_L2)
        assert len(study.pair_dists) == 6
        assert study.min_pair_distance == pytest.approx(math.sqrt(2.0))

    def test_uniform_seminorm_bound(self, study):
        """Test that every seminorm stays below the bound uniform in n."""
        assert all(0.0 < h <= study.analytic_bound for h in study.hs_seminorms)
        assert study.min_separation_ratio > 1.0

    @pytest.mark.parametrize("C_ratio,n_funcs", [(10.0, 4), (16.0, 2)])
    def test_invalid(self, C_ratio, n_funcs):
        """Test that C <= 10 and fewer than three functions are rejected."""
        with pytest.raises(InvalidArgumentError):
            ball_family_study(C_ratio, 0.5, n_funcs)
