"""
Uniform tensor grids and sampled functions.

Every grid node owns the cell [x_i - h/2, x_i + h/2] clipped to the grid box, so
the cells tile the box exactly and boundary nodes carry half (or quarter) cells.
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, ValidationInfo, field_validator, model_validator

from .base import FracsobBaseModel, readonly_array


class Grid(FracsobBaseModel):
    """Uniform tensor grid on a box in dimension 1 or 2, endpoints included."""
    dim: int = Field(..., ge=1, le=2, description="Spatial dimension")
    lo: Tuple[float, ...] = Field(..., description="Lower box corner")
    hi: Tuple[float, ...] = Field(..., description="Upper box corner")
    n_pts: int = Field(..., ge=2, description="Points per axis")

    @model_validator(mode="after")
    def _check_box(self) -> "Grid":
        if len(self.lo) != self.dim or len(self.hi) != self.dim:
            raise ValueError(f"Box corners must have length {self.dim}")
        for a, b in zip(self.lo, self.hi):
            if not (np.isfinite(a) and np.isfinite(b) and a < b):
                raise ValueError(f"Degenerate box: lo={self.lo}, hi={self.hi}")
        return self

    @property
    def spacing(self) -> np.ndarray:
        return (np.asarray(self.hi) - np.asarray(self.lo)) / (self.n_pts - 1)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n_pts,) * self.dim

    @property
    def cardinality(self) -> int:
        return self.n_pts ** self.dim

    @property
    def axes(self) -> List[np.ndarray]:
        return [np.linspace(a, b, self.n_pts) for a, b in zip(self.lo, self.hi)]

    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @property
    def points(self) -> np.ndarray:
        """Node coordinates as an array of shape (cardinality, dim)."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    def cell_bounds(self, axis: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        x = self.axes[axis]
        h = self.spacing[axis]
        left = np.maximum(x - 0.5 * h, self.lo[axis])
        right = np.minimum(x + 0.5 * h, self.hi[axis])
        return left, right

    def cell_widths(self, axis: int = 0) -> np.ndarray:
        left, right = self.cell_bounds(axis)
        return right - left

    @property
    def cell_volumes(self) -> np.ndarray:
        vol = self.cell_widths(0)
        for axis in range(1, self.dim):
            vol = np.multiply.outer(vol, self.cell_widths(axis))
        return vol

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.asarray(self.hi) - np.asarray(self.lo)))

    def zero_index(self, axis: int) -> Optional[int]:
        """Index of the node at coordinate 0 along ``axis``, if there is one."""
        x = self.axes[axis]
        j = int(np.argmin(np.abs(x)))
        if abs(x[j]) <= 1e-9 * self.spacing[axis]:
            return j
        return None

    def nearest_index(self, point) -> Tuple[int, ...]:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        idx = np.rint((point - np.asarray(self.lo)) / self.spacing).astype(int)
        return tuple(int(i) for i in np.clip(idx, 0, self.n_pts - 1))

    def scaled(self, lam: float) -> "Grid":
        return Grid(
            dim=self.dim,
            lo=tuple(lam * a for a in self.lo),
            hi=tuple(lam * b for b in self.hi),
            n_pts=self.n_pts,
        )

    def coarsened(self, level: int) -> Optional["Grid"]:
        """Every 2**level-th node, or None when the endpoints would be lost."""
        stride = 2 ** level
        if (self.n_pts - 1) % stride or (self.n_pts - 1) // stride < 1:
            return None
        return Grid(dim=self.dim, lo=self.lo, hi=self.hi, n_pts=(self.n_pts - 1) // stride + 1)


class GridFunction(FracsobBaseModel):
    """Real samples of a function on a grid, with an optional domain mask."""
    grid: Grid
    values: np.ndarray = Field(..., description="Samples, shape grid.shape")
    mask: Optional[np.ndarray] = Field(None, description="True where the node lies in the domain")

    @field_validator("values", mode="before")
    @classmethod
    def _shape_values(cls, value, info: ValidationInfo):
        grid = info.data.get("grid")
        arr = np.asarray(value, dtype=float)
        if grid is not None:
            if arr.size != grid.cardinality:
                raise ValueError(f"Expected {grid.cardinality} samples, got {arr.size}")
            arr = arr.reshape(grid.shape)
        return readonly_array(arr)

    @field_validator("mask", mode="before")
    @classmethod
    def _shape_mask(cls, value, info: ValidationInfo):
        if value is None:
            return None
        grid = info.data.get("grid")
        arr = np.asarray(value, dtype=bool)
        if grid is not None:
            if arr.size != grid.cardinality:
                raise ValueError(f"Mask has {arr.size} entries, grid has {grid.cardinality}")
            arr = arr.reshape(grid.shape)
        return readonly_array(arr, dtype=bool)

    @property
    def active(self) -> np.ndarray:
        """Nodes that take part in integrals: inside the mask and finite."""
        act = np.isfinite(self.values)
        if self.mask is not None:
            act &= self.mask
        return act

    @property
    def clean_values(self) -> np.ndarray:
        """Values with inactive nodes replaced by 0."""
        return np.where(self.active, self.values, 0.0)

    def lp_norm_p(self, p: float) -> float:
        """Cell-weighted sum of |u|^p over active nodes."""
        weights = self.grid.cell_volumes
        return float(np.sum(weights * np.abs(self.clean_values) ** p))

    def sup_norm(self) -> float:
        vals = self.clean_values
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    def with_values(self, values, mask=None) -> "GridFunction":
        return GridFunction(grid=self.grid, values=values, mask=self.mask if mask is None else mask)

    def restricted(self, mask: np.ndarray) -> "GridFunction":
        combined = np.asarray(mask, dtype=bool).reshape(self.grid.shape)
        if self.mask is not None:
            combined = combined & self.mask
        return GridFunction(grid=self.grid, values=self.values, mask=combined)

    def is_piecewise_constant(self, max_levels: int = 4) -> bool:
        vals = self.values[self.active]
        return np.unique(vals).size <= max_levels

    def value_at(self, point) -> float:
        return float(self.values[self.grid.nearest_index(point)])
