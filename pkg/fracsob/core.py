"""
Grid construction, sampling and the parameter factories shared by all modules.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from .catalog import AnalyticFunction, parse_function_spec
from .models.domain import DomainSpec
from .models.grid import Grid, GridFunction
from .models.params import FracParams, QuadConfig
from .models.validation import InvalidArgumentError

logger = logging.getLogger(__name__)

FunctionLike = Union[AnalyticFunction, str]


def make_grid(lo: Union[float, Sequence[float]], hi: Union[float, Sequence[float]], n_pts: int) -> Grid:
    """
    Build a uniform tensor grid including both endpoints.

    Args:
        lo: Lower corner (scalar for 1-D)
        hi: Upper corner (scalar for 1-D)
        n_pts: Points per axis

    Returns:
        Grid object

    Raises:
        InvalidArgumentError: Degenerate box or fewer than 2 points
    """
    lo_t = tuple(float(v) for v in np.atleast_1d(lo))
    hi_t = tuple(float(v) for v in np.atleast_1d(hi))
    try:
        return Grid(dim=len(lo_t), lo=lo_t, hi=hi_t, n_pts=n_pts)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid grid lo={lo_t} hi={hi_t} n_pts={n_pts}: {e}") from e


def make_params(n: int, s: float, p: float = 2.0) -> FracParams:
    try:
        return FracParams(n=n, s=s, p=p)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid parameters n={n} s={s} p={p}: {e}") from e


def make_config(**overrides) -> QuadConfig:
    try:
        return QuadConfig(**overrides)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid quadrature configuration {overrides}: {e}") from e


def resolve_function(func: FunctionLike) -> AnalyticFunction:
    if isinstance(func, AnalyticFunction):
        return func
    if isinstance(func, str):
        return parse_function_spec(func)
    raise InvalidArgumentError(f"Expected a catalog function or spec string, got {type(func).__name__}")


def sample(func: FunctionLike, grid: Grid, domain: Optional[DomainSpec] = None) -> GridFunction:
    """
    Sample a catalog function on a grid.

    Nodes where the function is undefined (non-finite) are masked out, as are
    nodes outside ``domain`` when one is given.
    """
    func = resolve_function(func)
    points = grid.points
    if domain is not None and domain.dim != grid.dim:
        raise InvalidArgumentError(f"Domain dimension {domain.dim} does not match grid dimension {grid.dim}")
    with np.errstate(invalid="ignore", divide="ignore"):
        values = func(points)
    finite = np.isfinite(values)
    mask = None
    if domain is not None:
        mask = domain.contains(points) & finite
    elif not finite.all():
        mask = finite
        logger.debug(f"{func.name}: masked {int((~finite).sum())} nodes where the function is undefined")
    return GridFunction(grid=grid, values=values, mask=mask)


def dilate(u: GridFunction, lam: float) -> GridFunction:
    """u_lam(x) = u(x / lam), sampled on the grid scaled by lam."""
    if not lam > 0.0:
        raise InvalidArgumentError(f"Dilation factor must be positive, got {lam}")
    return GridFunction(grid=u.grid.scaled(lam), values=u.values, mask=u.mask)


def coarsen(u: GridFunction, level: int) -> Optional[GridFunction]:
    """Every 2**level-th node of u, or None when the grid does not coarsen evenly."""
    grid = u.grid.coarsened(level)
    if grid is None:
        return None
    stride = 2 ** level
    idx = (slice(None, None, stride),) * u.grid.dim
    mask = None if u.mask is None else u.mask[idx]
    return GridFunction(grid=grid, values=u.values[idx], mask=mask)
