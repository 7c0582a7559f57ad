"""
Analytic test functions, addressable by name.

Each catalog entry is a frozen model that evaluates on an array of points of
shape (m, dim). Entries that know their own Laplacian or Lipschitz constant
expose them for the operator-limit and cutoff experiments.
"""

import logging
from typing import ClassVar, Dict, Optional, Tuple, Type, Union

import numpy as np
from pydantic import Field, field_validator

from .models.base import FracsobBaseModel
from .models.validation import InvalidArgumentError

logger = logging.getLogger(__name__)

Vector = Union[float, Tuple[float, ...]]


def as_points(x) -> np.ndarray:
    """Coerce scalars, single points or point lists to shape (m, dim)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr[:, None]
    return arr


def _broadcast(value: Vector, dim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        return np.full(dim, float(arr[0]))
    if arr.size != dim:
        raise InvalidArgumentError(f"Parameter of length {arr.size} does not match dimension {dim}")
    return arr


class AnalyticFunction(FracsobBaseModel):
    """Base class of the catalog entries."""
    name: ClassVar[str] = "function"
    compact_support: ClassVar[bool] = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(as_points(x))

    def laplacian(self, x) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no closed-form Laplacian")

    def describe(self) -> str:
        params = ",".join(f"{k}={v}" for k, v in self.model_dump().items())
        return f"{self.name}:{params}" if params else self.name


class Gaussian(AnalyticFunction):
    name: ClassVar[str] = "gaussian"
    sigma: Vector = Field(1.0, description="Standard deviation, scalar or per axis")
    center: Vector = 0.0
    amplitude: float = 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        dim = x.shape[1]
        z = (x - _broadcast(self.center, dim)) / _broadcast(self.sigma, dim)
        return self.amplitude * np.exp(-0.5 * np.sum(z * z, axis=1))

    def laplacian(self, x) -> np.ndarray:
        x = as_points(x)
        dim = x.shape[1]
        sig = _broadcast(self.sigma, dim)
        z = (x - _broadcast(self.center, dim)) / sig
        return self.evaluate(x) * np.sum((z * z - 1.0) / sig ** 2, axis=1)


class OddGaussian(AnalyticFunction):
    """x_dim * exp(-|x|^2 / (2 sigma^2)), odd in the last coordinate."""
    name: ClassVar[str] = "odd_gaussian"
    sigma: float = Field(1.0, gt=0.0)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        r2 = np.sum(x * x, axis=1)
        return x[:, -1] * np.exp(-0.5 * r2 / self.sigma ** 2)


class Indicator(AnalyticFunction):
    """Indicator of a closed interval [a, b] (1-D) or a closed ball."""
    name: ClassVar[str] = "indicator"
    compact_support: ClassVar[bool] = True
    a: Optional[float] = None
    b: Optional[float] = None
    center: Optional[Vector] = None
    radius: Optional[float] = None

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.radius is not None:
            c = _broadcast(self.center if self.center is not None else 0.0, x.shape[1])
            return (np.linalg.norm(x - c, axis=1) <= self.radius).astype(float)
        a = -np.inf if self.a is None else self.a
        b = np.inf if self.b is None else self.b
        return ((x[:, 0] >= a) & (x[:, 0] <= b)).astype(float)


class Linear(AnalyticFunction):
    name: ClassVar[str] = "linear"
    slope: Vector = 1.0
    offset: float = 0.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        slope = np.atleast_1d(np.asarray(self.slope, dtype=float))
        if slope.size == 1:
            return slope[0] * x[:, 0] + self.offset
        return x @ _broadcast(self.slope, x.shape[1]) + self.offset

    def laplacian(self, x) -> np.ndarray:
        return np.zeros(as_points(x).shape[0])

    @property
    def lipschitz(self) -> float:
        return float(np.linalg.norm(np.atleast_1d(np.asarray(self.slope, dtype=float))))


class Constant(AnalyticFunction):
    name: ClassVar[str] = "constant"
    value: float = 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[0], self.value)

    def laplacian(self, x) -> np.ndarray:
        return np.zeros(as_points(x).shape[0])

    @property
    def lipschitz(self) -> float:
        return 0.0


class Bump(AnalyticFunction):
    """exp(1 - 1/(1 - t^2)) with t = |x - center| / radius; equals 1 at the center."""
    name: ClassVar[str] = "bump"
    compact_support: ClassVar[bool] = True
    center: Vector = 0.0
    radius: float = Field(1.0, gt=0.0)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        t = np.linalg.norm(x - _broadcast(self.center, x.shape[1]), axis=1) / self.radius
        inside = t < 1.0
        out = np.zeros(x.shape[0])
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        return out


class Cosine(AnalyticFunction):
    name: ClassVar[str] = "cosine"
    k: Vector = 1.0
    phase: float = 0.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.cos(x @ _broadcast(self.k, x.shape[1]) + self.phase)

    def laplacian(self, x) -> np.ndarray:
        x = as_points(x)
        k = _broadcast(self.k, x.shape[1])
        return -float(k @ k) * self.evaluate(x)


class Step(AnalyticFunction):
    """height * 1{x_1 >= x0}."""
    name: ClassVar[str] = "step"
    x0: float = 0.0
    height: float = 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.height * (x[:, 0] >= self.x0)


class CuspRhoTheta(AnalyticFunction):
    """
    u = rho * theta in polar coordinates, theta = atan2(x2, x1) in (-pi, pi).

    Undefined (NaN) on the cut {x2 = 0, x1 < 0}, so sampling masks those nodes.
    """
    name: ClassVar[str] = "cusp_rho_theta"
    kappa: float = Field(3.0, gt=1.0, description="Cusp exponent of the host domain")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[:, 0], x[:, 1]
        out = np.hypot(x1, x2) * np.arctan2(x2, x1)
        return np.where((x2 == 0.0) & (x1 < 0.0), np.nan, out)

    def gradient(self, x) -> np.ndarray:
        x = as_points(x)
        x1, x2 = x[:, 0], x[:, 1]
        rho = np.hypot(x1, x2)
        theta = np.arctan2(x2, x1)
        return np.stack([(theta * x1 - x2) / rho, (theta * x2 + x1) / rho], axis=-1)


class BallBump(AnalyticFunction):
    """f_n = pi^(-1/2) a_n^(-2) on the disc of radius a_n^2 centered at (a_n, 0), a_n = C^(-n)."""
    name: ClassVar[str] = "ball_bump_n"
    compact_support: ClassVar[bool] = True
    C_ratio: float = Field(16.0, gt=10.0)
    index: int = Field(1, ge=1)

    @property
    def a_n(self) -> float:
        return self.C_ratio ** (-self.index)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a = self.a_n
        inside = np.hypot(x[:, 0] - a, x[:, 1]) <= a * a
        return np.where(inside, 1.0 / (np.sqrt(np.pi) * a * a), 0.0)


CATALOG: Dict[str, Type[AnalyticFunction]] = {
    cls.name: cls
    for cls in (
        Gaussian, OddGaussian, Indicator, Linear, Constant, Bump,
        Cosine, Step, CuspRhoTheta, BallBump,
    )
}


def make_function(name: str, **params) -> AnalyticFunction:
    """
    Build a catalog function by name.

    Raises:
        InvalidArgumentError: Unknown name or bad parameters
    """
    cls = CATALOG.get(name)
    if cls is None:
        raise InvalidArgumentError(f"Unknown function {name!r}; known: {sorted(CATALOG)}")
    try:
        return cls(**params)
    except ValueError as e:
        raise InvalidArgumentError(f"Bad parameters for {name}: {e}") from e


def _parse_value(text: str):
    if "|" in text:
        return tuple(float(part) for part in text.split("|"))
    try:
        number = float(text)
    except ValueError:
        return text
    return int(number) if text.lstrip("-").isdigit() else number


def parse_function_spec(spec: str) -> AnalyticFunction:
    """
    Parse ``name:key=value,key=value`` into a catalog function.

    Vectors are written with ``|`` separators, e.g. ``gaussian:center=0|1``.
    """
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidArgumentError(f"Malformed parameter {item!r} in {spec!r}")
        params[key.strip()] = _parse_value(value.strip())
    logger.debug(f"Parsed function spec {spec!r} -> {name} {params}")
    return make_function(name.strip(), **params)
