"""
Result and report models returned by the numerical modules.
"""

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, computed_field, field_validator

from .base import FracsobBaseModel, readonly_array
from .grid import GridFunction
from .params import DiagPolicy


class SphereMeasure(FracsobBaseModel):
    """Measure of the unit sphere S^d and the volume of the unit ball it bounds."""
    d: int = Field(..., ge=0)
    omega_d: float = Field(..., gt=0.0)

    @computed_field
    @property
    def varpi(self) -> float:
        return self.omega_d / (self.d + 1)


class ConstantBundle(FracsobBaseModel):
    """A(n,s), B(s), C(n,s) and the radial integrals I_n^(0), I_n^(1)."""
    n: int
    s: float
    A: float
    B: float
    C: float
    I0: Optional[float] = Field(None, description="E_n(n); n > 1 only")
    I1: Optional[float] = Field(None, description="E_n(n+2); n > 1 only")

    def e(self, theta: float) -> float:
        from ..constants import e_integral

        return e_integral(self.n, theta)


class SeminormResult(FracsobBaseModel):
    """p-th powers of the Gagliardo seminorm and the L^p norm."""
    seminorm_p: float = Field(..., ge=0.0)
    lp_norm_p: float = Field(..., ge=0.0)
    diag_policy: DiagPolicy
    diag_note: str = ""
    est_error: float = 0.0
    whole_space: bool = False
    warnings: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def full_norm_p(self) -> float:
        return self.seminorm_p + self.lp_norm_p


class RefinementLadder(FracsobBaseModel):
    """Seminorm estimates from the coarsest to the finest grid."""
    levels: List[int]
    values: List[float]
    differences: List[float]
    divergence_suspected: bool = False


class LimitPoint(FracsobBaseModel):
    s: float
    scaled_value: float
    seminorm_p: float


class EmbeddingReport(FracsobBaseModel):
    ratio: float
    ok: bool
    seminorm_lo: float
    seminorm_hi: float
    pointwise: bool = Field(..., description="True when the kernel comparison holds pointwise (diameter <= 1)")


class FlapMethod(str, Enum):
    PV = "pv"
    QUOTIENT = "quotient"
    SPECTRAL = "spectral"


class FlapResult(FracsobBaseModel):
    """Values of the fractional Laplacian at points or on a whole grid."""
    method: FlapMethod
    points: np.ndarray
    values: np.ndarray
    field: Optional[GridFunction] = None
    tail_correction: np.ndarray
    est_error: float = 0.0
    warnings: List[str] = Field(default_factory=list)

    @field_validator("points", "values", "tail_correction", mode="before")
    @classmethod
    def _freeze(cls, value):
        return readonly_array(value)

    def value_at(self, point) -> float:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        dist = np.linalg.norm(self.points - point[None, :], axis=1)
        return float(self.values[int(np.argmin(dist))])


class OperatorLimitPoint(FracsobBaseModel):
    s: float
    value: float
    target_low: float = Field(..., description="u(x), the s -> 0 limit")
    target_high: float = Field(..., description="-Laplacian u(x), the s -> 1 limit")
    flags: List[str] = Field(default_factory=list)


class ExtensionOp(str, Enum):
    ZERO_EXTEND = "zero_extend"
    REFLECT = "reflect"
    CUTOFF = "cutoff"


class ExtensionReport(FracsobBaseModel):
    """Norms before and after an extension or cutoff."""
    op: ExtensionOp
    norm_in: float = Field(..., ge=0.0)
    norm_out: float = Field(..., ge=0.0)
    ratio: float = Field(..., ge=0.0)
    bound: Optional[float] = None
    lp_power_in: float
    lp_power_out: float
    seminorm_power_in: float
    seminorm_power_out: float
    cross_term: Optional[float] = None
    residual: Optional[float] = None
    ok: bool = True
    warnings: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def lp_ratio(self) -> Optional[float]:
        return self.lp_power_out / self.lp_power_in if self.lp_power_in > 0 else None

    @computed_field
    @property
    def seminorm_ratio(self) -> Optional[float]:
        return self.seminorm_power_out / self.seminorm_power_in if self.seminorm_power_in > 0 else None


class TracePair(FracsobBaseModel):
    """A 2-D field and its restriction to the hyperplane x_2 = 0."""
    u2d: GridFunction
    v: GridFunction
    s: Optional[float] = None
    bump: str = "exp(-1/(1-t^2)) on (-1,1), unit integral"
    identity_residual: Optional[float] = Field(None, description="Fourier restriction identity residual")
    norm_factor: Optional[float] = Field(None, description="Integral of (1+t^2)^s |phi(t)|^2")


class LevelProfile(FracsobBaseModel):
    """Measures a_k of the super-level sets {|f| > 2^k} and of the dyadic layers."""
    thresholds: List[int]
    a_k: List[float]
    d_k: List[float]
    a_units: List[int] = Field(..., description="a_k in units of unit_volume")
    unit_volume: float

    def measure(self, k: int) -> float:
        """a_k for any integer k, extended by the constant/zero tails."""
        if not self.thresholds:
            return 0.0
        if k < self.thresholds[0]:
            return self.a_k[0]
        if k > self.thresholds[-1]:
            return 0.0
        return self.a_k[k - self.thresholds[0]]


class Relation(str, Enum):
    GE = "ge"
    LE = "le"


class InequalityReport(FracsobBaseModel):
    """
    Both sides of an inequality lhs (>= or <=) constant * rhs.

    margin is positive when the inequality holds: lhs - constant*rhs for GE and
    constant*rhs - lhs for LE.
    """
    lhs: float
    rhs: float
    constant_used: Optional[float] = None
    relation: Relation = Relation.GE
    margin: float
    ok: bool
    ratio: Optional[float] = None
    note: str = ""

    @classmethod
    def build(
        cls,
        lhs: float,
        rhs: float,
        constant: Optional[float],
        relation: Relation = Relation.GE,
        tol: float = 1e-9,
        ratio: Optional[float] = None,
        note: str = "",
    ) -> "InequalityReport":
        c = 1.0 if constant is None else constant
        margin = lhs - c * rhs if relation == Relation.GE else c * rhs - lhs
        if np.isnan(margin):
            margin = 0.0 if lhs == rhs else -np.inf
        scale = max(abs(lhs), abs(c * rhs))
        if not np.isfinite(scale):
            scale = 0.0
        ok = bool(margin >= -tol * scale)
        return cls(
            lhs=lhs, rhs=rhs, constant_used=constant, relation=relation,
            margin=float(margin), ok=ok, ratio=ratio, note=note,
        )


class CampanatoProfile(FracsobBaseModel):
    """Per-radius suprema of the scaled oscillation integral."""
    radii: List[float]
    sups: List[float]
    value: float = Field(..., description="(sup over radii)^(1/p), a lower bound of the true seminorm")
    divergence_suspected: bool = False


class CuspStudy(FracsobBaseModel):
    p: float
    s: float
    kappa: float
    r: float
    alpha_con: float
    r_seq: List[float]
    strip_contribs: List[float]
    strip_constants: List[float] = Field(..., description="contribution / (2^-kappa r_j^(kappa-alpha))")
    r_sweep: List[float]
    block_sums: List[float] = Field(..., description="Strip sums over r/2 <= r_j <= r per swept r")
    growth_slope: float
    expected_slope: float
    grad_sup: float
    grad_identity_error: float

    @computed_field
    @property
    def fitted_constant(self) -> float:
        return min(self.strip_constants)


class BallStudy(FracsobBaseModel):
    C_ratio: float
    s: float
    a_seq: List[float]
    f_norms_L2: List[float]
    pair_dists: List[Tuple[int, int, float]]
    hs_seminorms: List[float]
    analytic_bound: float = Field(..., description="2^(6+4s) pi sum_k (C^(2s-2))^k, uniform in n")
    min_separation_ratio: float = Field(..., description="min |x-y| / (|a_n-a_k|/2) over sampled boundary pairs")

    @computed_field
    @property
    def min_pair_distance(self) -> float:
        return min(d for _, _, d in self.pair_dists)
