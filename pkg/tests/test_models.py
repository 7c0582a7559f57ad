"""Tests for the value models, domains and argument validation."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from fracsob.core import make_grid, make_params
from fracsob.models.domain import DomainKind, DomainSpec
from fracsob.models.grid import GridFunction
from fracsob.models.params import FracParams, QuadConfig
from fracsob.models.report import ReportRecord
from fracsob.models.results import InequalityReport, Relation
from fracsob.models.validation import (
    FracsobError,
    InvalidArgumentError,
    ParamValidator,
    UnsupportedDomainError,
    WrongRegimeError,
)
from tests.helpers.model_factories import create_test_grid


class TestGrid:
    """Test suite for uniform grids."""

    def test_spacing_and_clipped_cells(self):
        """Test that boundary cells are half cells and the volumes tile the box."""
        grid = create_test_grid(0.0, 1.0, 5)

        # Verify
        assert grid.spacing[0] == pytest.approx(0.25)
        np.testing.assert_allclose(grid.cell_volumes, [0.125, 0.25, 0.25, 0.25, 0.125])
        assert grid.cell_volumes.sum() == pytest.approx(1.0)

    def test_two_dimensional_points(self):
        """Test the point layout of a 2-D grid."""
        grid = create_test_grid((0.0, 0.0), (1.0, 2.0), 3)

        assert grid.points.shape == (9, 2)
        assert grid.cardinality == 9
        assert grid.cell_volumes.sum() == pytest.approx(2.0)

    def test_zero_index(self):
        """Test locating the node at coordinate 0."""
        assert create_test_grid(-1.0, 1.0, 5).zero_index(0) == 2
        assert create_test_grid(0.1, 1.0, 5).zero_index(0) is None

    def test_coarsened(self):
        """Test coarsening keeps endpoints or refuses."""
        grid = create_test_grid(0.0, 1.0, 5)

        assert grid.coarsened(1).n_pts == 3
        assert grid.coarsened(2).n_pts == 2
        assert create_test_grid(0.0, 1.0, 4).coarsened(1) is None

    def test_degenerate_box(self):
        """Test that degenerate boxes are rejected as invalid arguments."""
        with pytest.raises(InvalidArgumentError):
            make_grid(1.0, 1.0, 5)
        with pytest.raises(InvalidArgumentError):
            make_grid(0.0, 1.0, 1)

    def test_grid_function_is_read_only(self):
        """Test that samples cannot be modified after construction."""
        grid = create_test_grid(0.0, 1.0, 5)
        u = GridFunction(grid=grid, values=np.arange(5.0))

        with pytest.raises(ValueError):
            u.values[0] = 7.0

    def test_grid_function_size_mismatch(self):
        """Test that a sample count different from the grid is rejected."""
        grid = create_test_grid(0.0, 1.0, 5)

        with pytest.raises(ValidationError):
            GridFunction(grid=grid, values=np.zeros(4))

    def test_masked_and_non_finite_nodes(self):
        """Test that masked and non-finite nodes are inactive and read as zero."""
        grid = create_test_grid(0.0, 1.0, 5)
        u = GridFunction(
            grid=grid,
            values=[1.0, np.nan, 1.0, 1.0, 1.0],
            mask=[True, True, True, True, False],
        )

        np.testing.assert_array_equal(u.active, [True, False, True, True, False])
        np.testing.assert_array_equal(u.clean_values, [1.0, 0.0, 1.0, 1.0, 0.0])
        assert u.lp_norm_p(2.0) == pytest.approx(0.125 + 0.25 + 0.25)


class TestFracParams:
    """Test suite for the (n, s, p) triple."""

    def test_derived_exponents(self):
        """Test sp, the critical exponent and the Hoelder exponent."""
        sub = make_params(1, 0.25, 2.0)
        sup = make_params(1, 0.75, 2.0)

        assert sub.sp == pytest.approx(0.5)
        assert sub.kernel_exp == pytest.approx(1.5)
        assert sub.p_star == pytest.approx(4.0)
        assert sub.alpha is None
        assert sup.p_star is None
        assert sup.alpha == pytest.approx(0.25)

    def test_with_order(self):
        """Test changing the order keeps n and p."""
        params = make_params(2, 0.3, 3.0).with_order(0.6)

        assert (params.n, params.s, params.p) == (2, 0.6, 3.0)

    @pytest.mark.parametrize("n,s,p", [(0, 0.5, 2.0), (1, 0.0, 2.0), (1, 1.0, 2.0), (1, 0.5, 0.5)])
    def test_invalid(self, n, s, p):
        """Test that out-of-range parameters are invalid arguments."""
        with pytest.raises(InvalidArgumentError):
            make_params(n, s, p)

    def test_frozen(self):
        """Test that parameters are immutable."""
        params = FracParams(n=1, s=0.5, p=2.0)

        with pytest.raises(ValidationError):
            params.s = 0.4

    def test_config_radius_order(self):
        """Test that the truncation radius must exceed the principal-value cutoff."""
        with pytest.raises(ValidationError):
            QuadConfig(trunc_radius=1e-4, eps_pv=1e-3)


class TestDomainSpec:
    """Test suite for domains."""

    def test_interval(self):
        """Test membership, measure and diameter of an interval."""
        domain = DomainSpec.interval(-1.0, 2.0)

        assert domain.dim == 1
        assert domain.measure == pytest.approx(3.0)
        np.testing.assert_array_equal(domain.contains(np.array([[-1.0], [0.0], [2.5]])), [True, True, False])

    def test_ball_measure(self):
        """Test the area of a disc."""
        disc = DomainSpec.ball((0.0, 0.0), 2.0)

        assert disc.measure == pytest.approx(4.0 * math.pi)
        assert disc.diameter == pytest.approx(4.0)

    def test_ball_union_components(self):
        """Test that a union of balls splits into its balls."""
        union = DomainSpec.ball_union([((0.0,), 0.5), ((2.0,), 0.25)])

        assert union.kind == DomainKind.BALL_UNION
        assert union.intervals_1d() == [(-0.5, 0.5), (1.75, 2.25)]
        assert union.measure == pytest.approx(1.5)
        np.testing.assert_array_equal(union.component_labels(np.array([[0.0], [2.0], [1.0]])), [0, 1, -1])

    def test_overlapping_balls_rejected(self):
        """Test that overlapping balls are rejected."""
        with pytest.raises(ValidationError):
            DomainSpec.ball_union([((0.0, 0.0), 1.0), ((1.5, 0.0), 1.0)])

    def test_cusp_heart(self):
        """Test the cusp domain excludes the cusp and has no convex pieces."""
        heart = DomainSpec.cusp_heart(3.0)
        inside = heart.contains(np.array([[0.5, 0.0], [-0.5, 0.5 ** 3 / 2.0], [-0.5, 0.5]]))

        np.testing.assert_array_equal(inside, [True, False, True])
        with pytest.raises(UnsupportedDomainError):
            heart.components()

    def test_ray_interval(self):
        """Test the exact ray intersection with a disc."""
        disc = DomainSpec.ball((0.0, 0.0), 1.0)
        t_in, t_out = disc.ray_interval(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]))

        assert t_in[0, 0] == pytest.approx(0.0)
        assert t_out[0, 0] == pytest.approx(1.0)


class TestValidation:
    """Test suite for the error hierarchy and shared checks."""

    def test_hierarchy(self):
        """Test that library errors share one base and keep builtin bases."""
        assert issubclass(InvalidArgumentError, FracsobError)
        assert issubclass(InvalidArgumentError, ValueError)
        assert issubclass(WrongRegimeError, ValueError)

    def test_order(self):
        """Test the order check with and without s = 1."""
        assert ParamValidator.require_order(0.5) == 0.5
        assert ParamValidator.require_order(1.0, allow_one=True) == 1.0
        with pytest.raises(InvalidArgumentError):
            ParamValidator.require_order(1.0)

    def test_regimes(self):
        """Test the subcritical and supercritical checks."""
        ParamValidator.require_subcritical(1, 0.5)
        ParamValidator.require_supercritical(1, 1.5)
        with pytest.raises(WrongRegimeError):
            ParamValidator.require_subcritical(1, 1.0)
        with pytest.raises(WrongRegimeError):
            ParamValidator.require_supercritical(2, 2.0)

    def test_dimension_and_lists(self):
        """Test dimension and non-empty checks."""
        with pytest.raises(InvalidArgumentError):
            ParamValidator.require_dimension(3, allowed=(1, 2))
        with pytest.raises(InvalidArgumentError):
            ParamValidator.require_non_empty([], "s_list")
        with pytest.raises(InvalidArgumentError):
            ParamValidator.require_positive(float("inf"), "R")


class TestReports:
    """Test suite for inequality and CLI report models."""

    def test_inequality_report_margin(self):
        """Test margin and ok for both relations."""
        ge = InequalityReport.build(lhs=3.0, rhs=1.0, constant=2.0, relation=Relation.GE)
        le = InequalityReport.build(lhs=3.0, rhs=1.0, constant=2.0, relation=Relation.LE)

        assert ge.margin == pytest.approx(1.0)
        assert ge.ok is True
        assert le.margin == pytest.approx(-1.0)
        assert le.ok is False

    def test_infinite_sides(self):
        """Test that an infinite left side satisfies a lower bound."""
        report = InequalityReport.build(lhs=math.inf, rhs=1.0, constant=1.0, relation=Relation.GE)

        assert report.ok is True

    def test_record_flat_order(self):
        """Test the fixed column order of a flat record."""
        record = ReportRecord(experiment="x", inputs={"s": 0.5, "n": 1}, computed=1.0, ok=True)
        row = record.flat(["n", "p", "s"])

        assert list(row) == ["experiment", "n", "p", "s", "computed", "oracle", "rel_err", "ok", "runtime_ms"]
        assert row["p"] == ""
        assert row["oracle"] == ""
