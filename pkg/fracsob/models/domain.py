"""
Discretizable domains.

A DomainSpec answers membership queries for grid nodes and, for the convex kinds
and unions of disjoint balls, gives the exact intersection of rays with the
domain. The ray intersections drive the complement-kernel integrals used by the
whole-space seminorms and the set inequalities.
"""

import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, model_validator

from .base import FracsobBaseModel
from .validation import UnsupportedDomainError


class DomainKind(str, Enum):
    INTERVAL = "interval"
    BOX = "box"
    BALL = "ball"
    BALL_UNION = "ball_union"
    CUSP_HEART = "cusp_heart"


class Ball(FracsobBaseModel):
    center: Tuple[float, ...]
    radius: float = Field(..., gt=0.0)


class DomainSpec(FracsobBaseModel):
    """A domain of one of the supported kinds, with its parameters."""
    kind: DomainKind
    a: Optional[float] = Field(None, description="Interval left end")
    b: Optional[float] = Field(None, description="Interval right end")
    lo: Optional[Tuple[float, ...]] = Field(None, description="Box lower corner")
    hi: Optional[Tuple[float, ...]] = Field(None, description="Box upper corner")
    center: Optional[Tuple[float, ...]] = Field(None, description="Ball center")
    radius: Optional[float] = Field(None, description="Ball radius")
    balls: Optional[List[Ball]] = Field(None, description="Pairwise disjoint balls")
    kappa: Optional[float] = Field(None, description="Cusp exponent")

    @model_validator(mode="after")
    def _check_kind(self) -> "DomainSpec":
        kind = self.kind
        if kind == DomainKind.INTERVAL:
            if self.a is None or self.b is None or not self.a < self.b:
                raise ValueError(f"Interval needs a < b, got ({self.a}, {self.b})")
        elif kind == DomainKind.BOX:
            if self.lo is None or self.hi is None or len(self.lo) != len(self.hi):
                raise ValueError("Box needs lo and hi of equal length")
            if not all(x < y for x, y in zip(self.lo, self.hi)):
                raise ValueError(f"Degenerate box: lo={self.lo}, hi={self.hi}")
        elif kind == DomainKind.BALL:
            if self.center is None or self.radius is None or self.radius <= 0:
                raise ValueError("Ball needs a center and a positive radius")
        elif kind == DomainKind.BALL_UNION:
            if not self.balls:
                raise ValueError("ball_union needs at least one ball")
            dims = {len(ball.center) for ball in self.balls}
            if len(dims) != 1:
                raise ValueError("All balls must share one dimension")
            for i, first in enumerate(self.balls):
                for second in self.balls[i + 1:]:
                    gap = math.dist(first.center, second.center) - first.radius - second.radius
                    if gap <= 0.0:
                        raise ValueError(
                            f"Balls at {first.center} and {second.center} overlap (gap {gap:g})"
                        )
        elif kind == DomainKind.CUSP_HEART:
            if self.kappa is None or not self.kappa > 1.0:
                raise ValueError(f"cusp_heart requires kappa > 1, got {self.kappa}")
        return self

    @classmethod
    def interval(cls, a: float, b: float) -> "DomainSpec":
        return cls(kind=DomainKind.INTERVAL, a=a, b=b)

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "DomainSpec":
        return cls(kind=DomainKind.BOX, lo=tuple(lo), hi=tuple(hi))

    @classmethod
    def ball(cls, center: Sequence[float], radius: float) -> "DomainSpec":
        return cls(kind=DomainKind.BALL, center=tuple(np.atleast_1d(center).tolist()), radius=radius)

    @classmethod
    def ball_union(cls, balls: Sequence[Tuple[Sequence[float], float]]) -> "DomainSpec":
        return cls(
            kind=DomainKind.BALL_UNION,
            balls=[Ball(center=tuple(np.atleast_1d(c).tolist()), radius=r) for c, r in balls],
        )

    @classmethod
    def cusp_heart(cls, kappa: float) -> "DomainSpec":
        return cls(kind=DomainKind.CUSP_HEART, kappa=kappa)

    @property
    def dim(self) -> int:
        if self.kind == DomainKind.INTERVAL:
            return 1
        if self.kind == DomainKind.BOX:
            return len(self.lo)
        if self.kind == DomainKind.BALL:
            return len(self.center)
        if self.kind == DomainKind.BALL_UNION:
            return len(self.balls[0].center)
        return 2

    @property
    def bounded(self) -> bool:
        if self.kind == DomainKind.INTERVAL:
            return math.isfinite(self.a) and math.isfinite(self.b)
        if self.kind == DomainKind.BOX:
            return all(math.isfinite(v) for v in self.lo + self.hi)
        return True

    def components(self) -> List["DomainSpec"]:
        """Convex pieces of the domain (pairwise disjoint)."""
        if self.kind == DomainKind.BALL_UNION:
            return [DomainSpec.ball(ball.center, ball.radius) for ball in self.balls]
        if self.kind == DomainKind.CUSP_HEART:
            raise UnsupportedDomainError("cusp_heart has no convex decomposition")
        return [self]

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.kind == DomainKind.INTERVAL:
            return np.array([self.a]), np.array([self.b])
        if self.kind == DomainKind.BOX:
            return np.array(self.lo), np.array(self.hi)
        if self.kind == DomainKind.BALL:
            c = np.array(self.center)
            return c - self.radius, c + self.radius
        if self.kind == DomainKind.BALL_UNION:
            los, his = zip(*(piece.bounding_box() for piece in self.components()))
            return np.min(los, axis=0), np.max(his, axis=0)
        return np.array([-1.0, -1.0]), np.array([1.0, 1.0])

    @property
    def diameter(self) -> float:
        if self.kind == DomainKind.BALL:
            return 2.0 * self.radius
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    @property
    def measure(self) -> float:
        if self.kind == DomainKind.INTERVAL:
            return self.b - self.a
        if self.kind == DomainKind.BOX:
            return float(np.prod(np.subtract(self.hi, self.lo)))
        if self.kind == DomainKind.BALL:
            n = self.dim
            return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * self.radius ** n
        if self.kind == DomainKind.BALL_UNION:
            return sum(piece.measure for piece in self.components())
        raise UnsupportedDomainError("measure of cusp_heart is not tabulated")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership of points of shape (m, dim); closed sets for the convex kinds."""
        x = np.asarray(points, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.dim == 1 else x[None, :]
        if self.kind == DomainKind.INTERVAL:
            return (x[:, 0] >= self.a) & (x[:, 0] <= self.b)
        if self.kind == DomainKind.BOX:
            return np.all((x >= np.array(self.lo)) & (x <= np.array(self.hi)), axis=1)
        if self.kind == DomainKind.BALL:
            return np.linalg.norm(x - np.array(self.center), axis=1) <= self.radius
        if self.kind == DomainKind.BALL_UNION:
            inside = np.zeros(x.shape[0], dtype=bool)
            for piece in self.components():
                inside |= piece.contains(x)
            return inside
        x1, x2 = x[:, 0], x[:, 1]
        in_disc = x1 ** 2 + x2 ** 2 < 1.0
        in_cusp = (x1 <= 0.0) & (np.abs(x2) <= np.abs(x1) ** self.kappa)
        return in_disc & ~in_cusp

    def component_labels(self, points: np.ndarray) -> np.ndarray:
        """Index of the component containing each point, -1 outside."""
        x = np.asarray(points, dtype=float)
        labels = np.full(x.shape[0], -1, dtype=int)
        for k, piece in enumerate(self.components()):
            labels[piece.contains(x) & (labels < 0)] = k
        return labels

    def intervals_1d(self) -> List[Tuple[float, float]]:
        """Sorted disjoint intervals making up a 1-D domain."""
        if self.dim != 1:
            raise UnsupportedDomainError(f"{self.kind.value} domain is not one-dimensional")
        pieces = []
        for piece in self.components():
            lo, hi = piece.bounding_box()
            pieces.append((float(lo[0]), float(hi[0])))
        return sorted(pieces)

    def ray_interval(self, x: np.ndarray, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Parameter range where the ray x + t*e (t >= 0) lies in a convex domain.

        Args:
            x: Points of shape (m, dim)
            directions: Unit vectors of shape (k, dim)

        Returns:
            Arrays (t_in, t_out) of shape (m, k); empty intersections give +inf for both.
        """
        if self.kind not in (DomainKind.INTERVAL, DomainKind.BOX, DomainKind.BALL):
            raise UnsupportedDomainError(f"ray_interval needs a convex kind, got {self.kind.value}")
        x = np.asarray(x, dtype=float)[:, None, :]
        e = np.asarray(directions, dtype=float)[None, :, :]
        if self.kind == DomainKind.BALL:
            c = np.array(self.center)[None, None, :]
            rel = x - c
            b = np.sum(rel * e, axis=-1)
            q = np.sum(rel * rel, axis=-1) - self.radius ** 2
            disc = b * b - q
            root = np.sqrt(np.maximum(disc, 0.0))
            t_in = np.maximum(-b - root, 0.0)
            t_out = -b + root
            empty = (disc < 0.0) | (t_out <= 0.0)
        else:
            lo, hi = self.bounding_box()
            lo = lo[None, None, :]
            hi = hi[None, None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (lo - x) / e
                t2 = (hi - x) / e
            near = np.where(e == 0.0, np.where((x >= lo) & (x <= hi), -np.inf, np.inf), np.minimum(t1, t2))
            far = np.where(e == 0.0, np.where((x >= lo) & (x <= hi), np.inf, -np.inf), np.maximum(t1, t2))
            t_in = np.maximum(np.max(near, axis=-1), 0.0)
            t_out = np.min(far, axis=-1)
            empty = t_out <= t_in
        t_in = np.where(empty, np.inf, t_in)
        t_out = np.where(empty, np.inf, t_out)
        return t_in, t_out
