from enum import Enum
from typing import Optional

from pydantic import Field, computed_field, field_validator, model_validator

from .base import FracsobBaseModel


class TailMode(str, Enum):
    """How integrals over |y| > R are closed."""
    COMPACT_SUPPORT_EXACT = "compact-support-exact"
    BOUND_ONLY = "bound-only"


class DiagPolicy(str, Enum):
    """Treatment of the near-diagonal cell pairs of a Gagliardo double sum."""
    SMOOTH = "smooth"
    JUMP = "jump"
    AUTO = "auto"


class LimitMode(str, Enum):
    """Scaling limit of the Gagliardo seminorm: s -> 1 (bbm) or s -> 0 (ms)."""
    BBM = "bbm"
    MS = "ms"


class FracParams(FracsobBaseModel):
    """The triple (n, s, p) with its derived exponents."""
    n: int = Field(..., ge=1, description="Spatial dimension")
    s: float = Field(..., gt=0.0, lt=1.0, description="Fractional order")
    p: float = Field(2.0, ge=1.0, description="Integrability exponent")

    @field_validator("p")
    @classmethod
    def _finite_p(cls, value: float) -> float:
        if value == float("inf"):
            raise ValueError("p must be finite")
        return value

    @computed_field
    @property
    def sp(self) -> float:
        return self.s * self.p

    @computed_field
    @property
    def kernel_exp(self) -> float:
        return self.n + self.s * self.p

    @computed_field
    @property
    def p_star(self) -> Optional[float]:
        """Critical exponent np/(n - sp), only when sp < n."""
        if self.sp < self.n:
            return self.n * self.p / (self.n - self.sp)
        return None

    @computed_field
    @property
    def alpha(self) -> Optional[float]:
        """Hoelder exponent (sp - n)/p, only when sp > n."""
        if self.sp > self.n:
            return (self.sp - self.n) / self.p
        return None

    def with_order(self, s: float) -> "FracParams":
        return FracParams(n=self.n, s=s, p=self.p)


class QuadConfig(FracsobBaseModel):
    """Quadrature controls shared by all integral evaluations."""
    trunc_radius: float = Field(12.0, gt=0.0, description="Tail cutoff R for whole-space integrals")
    eps_pv: float = Field(1e-3, gt=0.0, description="Principal value exclusion radius")
    refine: int = Field(0, ge=0, description="Depth of the coarse-to-fine refinement ladder")
    tol: float = Field(1e-8, gt=0.0, description="Target relative tolerance")
    angular_nodes: int = Field(64, ge=4, description="Trapezoid nodes on the unit circle")
    tail_mode: TailMode = Field(TailMode.COMPACT_SUPPORT_EXACT)
    diag_policy: DiagPolicy = Field(DiagPolicy.AUTO)
    near_window: int = Field(2, ge=1, description="Offsets treated with exact cell-pair moments in 2-D")

    @model_validator(mode="after")
    def _radius_order(self) -> "QuadConfig":
        if not self.trunc_radius > self.eps_pv:
            raise ValueError(f"trunc_radius={self.trunc_radius} must exceed eps_pv={self.eps_pv}")
        return self
