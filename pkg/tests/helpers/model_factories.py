"""
Model factories for testing.

This module provides factory functions for creating grids, parameters and
sampled functions that can be used in tests.
"""

from typing import Optional, Sequence, Union

from fracsob.catalog import AnalyticFunction, Gaussian, Indicator
from fracsob.core import make_config, make_grid, make_params, sample
from fracsob.models.domain import DomainSpec
from fracsob.models.grid import Grid, GridFunction
from fracsob.models.params import FracParams, QuadConfig

Corner = Union[float, Sequence[float]]


def create_test_grid(lo: Corner = 0.0, hi: Corner = 1.0, n_pts: int = 65) -> Grid:
    """
    Create a uniform grid for testing.

    Args:
        lo: Lower corner (scalar for 1-D)
        hi: Upper corner (scalar for 1-D)
        n_pts: Points per axis

    Returns:
        A Grid instance
    """
    return make_grid(lo, hi, n_pts)


def create_test_params(n: int = 1, s: float = 0.5, p: float = 2.0) -> FracParams:
    return make_params(n, s, p)


def create_test_config(**overrides) -> QuadConfig:
    """
    Create a QuadConfig with test-friendly defaults.

    Args:
        **overrides: Fields to override

    Returns:
        A QuadConfig instance
    """
    return make_config(**overrides)


def create_test_function(
    func: Union[AnalyticFunction, str, None] = None,
    lo: Corner = 0.0,
    hi: Corner = 1.0,
    n_pts: int = 65,
    domain: Optional[DomainSpec] = None,
) -> GridFunction:
    """
    Sample a catalog function on a fresh grid.

    Args:
        func: Catalog function or spec string; the indicator of [0, 1] by default
        lo: Lower corner
        hi: Upper corner
        n_pts: Points per axis
        domain: Optional domain mask

    Returns:
        A GridFunction instance
    """
    if func is None:
        func = Indicator(a=0.0, b=1.0)
    return sample(func, make_grid(lo, hi, n_pts), domain)


def create_test_indicator(a: float = 0.0, b: float = 1.0, n_pts: int = 257) -> GridFunction:
    """Indicator of [a, b] sampled on the grid spanning exactly [a, b]."""
    return create_test_function(Indicator(a=a, b=b), a, b, n_pts)


def create_test_gaussian(
    n: int = 1,
    half_width: float = 8.0,
    n_pts: int = 257,
    sigma: float = 1.0,
) -> GridFunction:
    """Centered gaussian sampled on the box [-half_width, half_width]^n."""
    return create_test_function(Gaussian(sigma=sigma), (-half_width,) * n, (half_width,) * n, n_pts)
