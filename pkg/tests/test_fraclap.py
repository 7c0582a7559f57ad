"""Tests for the fractional Laplacian and its frequency-side identities."""

import math

import numpy as np
import pytest

from fracsob.catalog import Constant, Cosine, Gaussian, Linear
from fracsob.constants import c_const
from fracsob.core import make_grid, sample
from fracsob.fraclap import (
    flap_pv,
    flap_quotient,
    flap_spectral,
    gaussian_flap_origin,
    half_laplacian_norm,
    operator_limit_scan,
    plancherel_seminorm,
    symbol_integral,
)
from fracsob.gagliardo import gagliardo_seminorm_p
from fracsob.models.params import DiagPolicy, TailMode
from fracsob.models.results import FlapMethod
from fracsob.models.validation import InvalidArgumentError, PVInstabilityError
from tests.helpers.model_factories import (
    create_test_config,
    create_test_gaussian,
    create_test_params,
)

PV_CONFIG = dict(eps_pv=1e-4, tol=1e-6)


class TestClosedForm:
    """Test suite for the gaussian reference values."""

    def test_half_order(self):
        """Test (-Laplacian)^(1/2) of the gaussian at 0 in 1-D."""
        assert gaussian_flap_origin(1, 0.5) == pytest.approx(math.sqrt(2.0 / math.pi))

    def test_classical_laplacian(self):
        """Test that s = 1 gives -Laplacian at 0, which is n."""
        assert gaussian_flap_origin(1, 1.0) == pytest.approx(1.0)
        assert gaussian_flap_origin(2, 1.0) == pytest.approx(2.0)


class TestPointwise:
    """Test suite for the quotient and principal-value forms."""

    @pytest.mark.parametrize("n,s", [(1, 0.25), (1, 0.5), (2, 0.5), (2, 0.75)])
    def test_quotient_gaussian(self, standard_gaussian, n, s):
        """Test the quotient form at the origin."""
        result = flap_quotient(standard_gaussian, [(0.0,) * n], s)

        # Verify
        assert result.method == FlapMethod.QUOTIENT
        assert result.values[0] == pytest.approx(gaussian_flap_origin(n, s), rel=1e-5)
        assert result.warnings == []

    def test_pv_gaussian(self, standard_gaussian):
        """Test the principal-value form at the origin."""
        result = flap_pv(standard_gaussian, [0.0], 0.5, create_test_config(**PV_CONFIG))

        assert result.method == FlapMethod.PV
        assert abs(result.values[0] - math.sqrt(2.0 / math.pi)) <= 1e-4

    def test_pv_one_sided(self, standard_gaussian):
        """Test the principal value without pairing y with -y."""
        result = flap_pv(standard_gaussian, [0.0], 0.5, create_test_config(**PV_CONFIG), symmetrize=False)

        assert abs(result.values[0] - math.sqrt(2.0 / math.pi)) <= 1e-4

    def test_pv_and_quotient_agree_off_center(self, standard_gaussian):
        """Test the two pointwise forms away from the origin."""
        cfg = create_test_config(**PV_CONFIG)
        pv = flap_pv(standard_gaussian, [0.3, 0.7], 0.5, cfg).values
        quotient = flap_quotient(standard_gaussian, [0.3, 0.7], 0.5, cfg).values

        np.testing.assert_allclose(pv, quotient, rtol=1e-4, atol=1e-6)

    def test_pv_instability(self, standard_gaussian):
        """Test that a coarse cutoff with a tight tolerance is reported as unstable."""
        with pytest.raises(PVInstabilityError):
            flap_pv(standard_gaussian, [0.0], 0.5, create_test_config(eps_pv=0.5, tol=1e-12))

    def test_constant_has_zero_laplacian(self):
        """Test that constants are annihilated with no tail warning."""
        result = flap_quotient(Constant(value=2.0), [0.3], 0.5)

        assert result.values[0] == pytest.approx(0.0, abs=1e-12)
        assert result.warnings == []

    def test_tail_assumption_violated(self):
        """Test that growth beyond the truncation radius is flagged."""
        result = flap_quotient(Linear(), [0.0], 0.5)

        assert "tail-assumption-violated" in result.warnings
        assert result.est_error > 0.0

    def test_bound_only_tail(self, standard_gaussian):
        """Test that bound-only mode drops the tail and reports a band."""
        cfg = create_test_config(tail_mode=TailMode.BOUND_ONLY)
        result = flap_quotient(standard_gaussian, [0.0], 0.5, cfg)

        assert result.tail_correction[0] == 0.0
        assert result.est_error > 0.0

    @pytest.mark.slow
    def test_grid_samples_are_interpolated(self):
        """Test the quotient form on sampled data."""
        u = create_test_gaussian(1, 16.0, 2049)
        result = flap_quotient(u, [0.0], 0.5)

        assert result.values[0] == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-3)

    def test_grid_dimension_mismatch(self, gaussian_1d):
        """Test that 2-D points cannot be evaluated on 1-D samples."""
        with pytest.raises(InvalidArgumentError):
            flap_quotient(gaussian_1d, [(0.0, 0.0)], 0.5)

    def test_invalid_order(self, standard_gaussian):
        """Test that s = 1 is rejected by the pointwise forms."""
        with pytest.raises(InvalidArgumentError):
            flap_quotient(standard_gaussian, [0.0], 1.0)


class TestSpectral:
    """Test suite for the Fourier multiplier form."""

    def test_half_order_at_origin(self):
        """Test the multiplier against the closed form on a wide box."""
        u = create_test_gaussian(1, 512.0, 16385)
        result = flap_spectral(u, 0.5)

        assert result.method == FlapMethod.SPECTRAL
        assert result.field.value_at(0.0) == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-3)
        assert result.warnings == []

    def test_classical_laplacian(self):
        """Test that s = 1 reproduces -u'' of the gaussian."""
        u = create_test_gaussian(1, 16.0, 1025)
        result = flap_spectral(u, 1.0)
        x = u.grid.axes[0]

        np.testing.assert_allclose(result.field.values, (1.0 - x ** 2) * np.exp(-0.5 * x ** 2), atol=1e-8)

    @pytest.mark.parametrize("k", [1.0, 3.0])
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_cosine_eigenfunction(self, k, s):
        """Test that cos(kx) on a periodic grid is mapped to |k|^(2s) cos(kx)."""
        n_pts = 64
        grid = make_grid(0.0, 2.0 * math.pi * (n_pts - 1) / n_pts, n_pts)
        u = sample(Cosine(k=k), grid)

        result = flap_spectral(u, s)

        np.testing.assert_allclose(result.field.values, k ** (2.0 * s) * u.values, atol=1e-10)

    def test_periodization_warning(self, unit_linear):
        """Test that data not decaying to the boundary is flagged."""
        result = flap_spectral(unit_linear, 0.5)

        assert "periodization" in result.warnings


class TestFrequencySide:
    """Test suite for symbols and Plancherel forms."""

    def test_symbol_one_dimension(self):
        """Test the symbol integral equals |xi|^(2s)/C(1,s)."""
        assert symbol_integral([2.0], 1, 0.5) == pytest.approx(2.0 / c_const(1, 0.5), rel=1e-5)

    def test_symbol_two_dimensions(self):
        """Test the symbol integral in 2-D along a diagonal direction."""
        xi = (1.0, 1.0)
        expected = math.sqrt(2.0) ** 1.5 / c_const(2, 0.75)

        assert symbol_integral(xi, 2, 0.75) == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("lam", [2.0, 3.0])
    @pytest.mark.parametrize("xi,n,s", [((0.7,), 1, 0.3), ((0.6, -0.4), 2, 0.6)])
    def test_symbol_homogeneity(self, lam, xi, n, s):
        """Test m(lam xi) = lam^(2s) m(xi)."""
        scaled = tuple(lam * c for c in xi)

        assert symbol_integral(scaled, n, s) == pytest.approx(lam ** (2.0 * s) * symbol_integral(xi, n, s), rel=1e-4)

    def test_symbol_rotation_invariance(self):
        """Test that the 2-D symbol depends on |xi| only, over eight rotations."""
        expected = 1.5 ** 1.2 / c_const(2, 0.6)
        angles = 0.3 + 2.0 * math.pi * np.arange(8) / 8

        values = [symbol_integral((1.5 * math.cos(a), 1.5 * math.sin(a)), 2, 0.6) for a in angles]

        assert values == pytest.approx([expected] * 8, rel=1e-4)

    def test_symbol_at_zero(self):
        """Test the symbol vanishes at xi = 0."""
        assert symbol_integral([0.0], 1, 0.3) == 0.0

    def test_symbol_length(self):
        """Test that xi must have n components."""
        with pytest.raises(InvalidArgumentError):
            symbol_integral([1.0, 2.0], 1, 0.5)

    def test_plancherel_forms_agree(self):
        """Test that both frequency-side forms are the same discrete sum."""
        u = create_test_gaussian(1, 16.0, 513)

        assert half_laplacian_norm(u, 0.4) == pytest.approx(plancherel_seminorm(u, 0.4), rel=1e-10)

    def test_plancherel_closed_form(self):
        """Test the gaussian's H^s seminorm 2 Gamma(s + 1/2) / C(1,s)."""
        u = create_test_gaussian(1, 128.0, 16385)
        expected = 2.0 * math.gamma(1.0) / c_const(1, 0.5)

        assert plancherel_seminorm(u, 0.5) == pytest.approx(expected, rel=1e-3)

    @pytest.mark.slow
    def test_double_sum_matches_frequency_side(self):
        """Test the Gagliardo double sum against the frequency side."""
        physical = create_test_gaussian(1, 8.0, 1025)
        spectral = create_test_gaussian(1, 256.0, 32769)
        double_sum = gagliardo_seminorm_p(
            physical, create_test_params(1, 0.5, 2.0), whole_space=True, policy=DiagPolicy.SMOOTH
        ).seminorm_p

        assert double_sum == pytest.approx(plancherel_seminorm(spectral, 0.5), rel=1e-3)


class TestOperatorLimits:
    """Test suite for the s -> 0 and s -> 1 operator limits."""

    def test_two_dimensional_gaussian(self, standard_gaussian):
        """Test both endpoint limits at the origin."""
        low, high = operator_limit_scan(standard_gaussian, (0.0, 0.0), [0.01, 0.99])

        # Verify
        assert low.target_low == pytest.approx(1.0)
        assert high.target_high == pytest.approx(2.0)
        assert low.value == pytest.approx(low.target_low, rel=0.03)
        assert high.value == pytest.approx(high.target_high, rel=0.03)
        assert low.flags == []

    def test_one_dimension_is_flagged(self, standard_gaussian):
        """Test that 1-D scans carry the extrapolation flag."""
        (point,) = operator_limit_scan(standard_gaussian, 0.0, [0.5])

        assert "extrapolation-beyond-statement" in point.flags

    def test_constant_requires_compact_support(self):
        """Test that a function not vanishing at infinity is flagged."""
        (point,) = operator_limit_scan(Constant(), (0.0, 0.0), [0.5])

        assert "requires-compact-support" in point.flags

    def test_grid_function_rejected(self, gaussian_1d):
        """Test that sampled data has no Laplacian to compare against."""
        with pytest.raises(InvalidArgumentError):
            operator_limit_scan(gaussian_1d, 0.0, [0.5])

    def test_empty_sweep(self, standard_gaussian):
        """Test that an empty sweep is rejected."""
        with pytest.raises(InvalidArgumentError):
            operator_limit_scan(standard_gaussian, 0.0, [])

    def test_quotient_accepts_gaussian_spec_string(self):
        """Test that spec strings resolve through the catalog."""
        result = flap_quotient("gaussian:sigma=1", [0.0], 0.5)

        assert result.values[0] == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-5)


class TestLinearity:
    """Test suite for L(a u + b v) = a L u + b L v in all three forms."""

    A, B = 2.0, -3.0

    @pytest.fixture
    def pair(self):
        grid = make_grid(-8.0, 8.0, 257)
        u = sample(Gaussian(), grid)
        v = sample(Gaussian(sigma=0.5, center=0.5), grid)
        return u, v, u.with_values(self.A * u.values + self.B * v.values)

    def test_spectral(self, pair):
        """Test the multiplier form, which is linear up to rounding."""
        u, v, w = pair
        combined = self.A * flap_spectral(u, 0.4).field.values + self.B * flap_spectral(v, 0.4).field.values

        np.testing.assert_allclose(flap_spectral(w, 0.4).field.values, combined, atol=1e-12)

    @pytest.mark.slow
    def test_quotient(self, pair):
        """Test the quotient form on interpolated samples."""
        u, v, w = pair
        pts = [0.0, 0.4]
        combined = self.A * flap_quotient(u, pts, 0.5).values + self.B * flap_quotient(v, pts, 0.5).values

        np.testing.assert_allclose(flap_quotient(w, pts, 0.5).values, combined, rtol=1e-6, atol=1e-8)

    @pytest.mark.slow
    def test_principal_value(self, pair):
        """Test the principal-value form on interpolated samples."""
        u, v, w = pair
        cfg = create_test_config(**PV_CONFIG)
        pts = [0.0, 0.4]
        combined = self.A * flap_pv(u, pts, 0.5, cfg).values + self.B * flap_pv(v, pts, 0.5, cfg).values

        np.testing.assert_allclose(flap_pv(w, pts, 0.5, cfg).values, combined, rtol=1e-6, atol=1e-8)
