from .base import FracsobBaseModel
from .domain import Ball, DomainKind, DomainSpec
from .grid import Grid, GridFunction
from .params import DiagPolicy, FracParams, LimitMode, QuadConfig, TailMode
from .report import ReportRecord
from .results import (
    BallStudy,
    CampanatoProfile,
    ConstantBundle,
    CuspStudy,
    EmbeddingReport,
    ExtensionOp,
    ExtensionReport,
    FlapMethod,
    FlapResult,
    InequalityReport,
    LevelProfile,
    LimitPoint,
    OperatorLimitPoint,
    RefinementLadder,
    Relation,
    SeminormResult,
    SphereMeasure,
    TracePair,
)
from .validation import (
    DivergentIntegralError,
    FracsobError,
    InvalidArgumentError,
    ParamValidator,
    PreconditionViolationError,
    PVInstabilityError,
    TraceUndefinedError,
    UnsupportedDomainError,
    WrongRegimeError,
)

__all__ = [
    "FracsobBaseModel",
    "Ball",
    "DomainKind",
    "DomainSpec",
    "Grid",
    "GridFunction",
    "DiagPolicy",
    "FracParams",
    "LimitMode",
    "QuadConfig",
    "TailMode",
    "ReportRecord",
    "BallStudy",
    "CampanatoProfile",
    "ConstantBundle",
    "CuspStudy",
    "EmbeddingReport",
    "ExtensionOp",
    "ExtensionReport",
    "FlapMethod",
    "FlapResult",
    "InequalityReport",
    "LevelProfile",
    "LimitPoint",
    "OperatorLimitPoint",
    "RefinementLadder",
    "Relation",
    "SeminormResult",
    "SphereMeasure",
    "TracePair",
    "DivergentIntegralError",
    "FracsobError",
    "InvalidArgumentError",
    "ParamValidator",
    "PreconditionViolationError",
    "PVInstabilityError",
    "TraceUndefinedError",
    "UnsupportedDomainError",
    "WrongRegimeError",
]
