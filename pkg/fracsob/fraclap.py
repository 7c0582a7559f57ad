"""
The fractional Laplacian under its three equivalent definitions.

- second-order quotient: -(C/2) * integral (u(x+y) + u(x-y) - 2u(x)) / |y|^(n+2s) dy
- principal value: C * P.V. integral (u(x) - u(y)) / |x - y|^(n+2s) dy
- Fourier multiplier: |xi|^(2s) applied on the grid

The radial integrals are split at rho = 1 and rho = R. Beyond R the function is
replaced by its far-field average, which closes the integral exactly when u is
constant out there (compactly supported functions and constants alike).
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.interpolate import RegularGridInterpolator

from .catalog import AnalyticFunction, as_points
from .constants import c_const, sphere_measure
from .core import resolve_function
from .models.grid import GridFunction
from .models.params import QuadConfig, TailMode
from .models.results import FlapMethod, FlapResult, OperatorLimitPoint
from .models.validation import InvalidArgumentError, ParamValidator, PVInstabilityError
from .utils.fourier import apply_multiplier, frequency_norm, frequency_steps, unitary_fft
from .utils.quadrature import window_sum

logger = logging.getLogger(__name__)

FAR_RADII = (1.0, 1.25, 1.5, 2.0, 3.0)
RHO_FLOOR = 1e-4
PERIODIZATION_TOL = 1e-8
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-11, limit=400)

FunctionInput = Union[AnalyticFunction, GridFunction, str]


def _evaluator(u: FunctionInput) -> Tuple[Callable[[np.ndarray], np.ndarray], Optional[AnalyticFunction]]:
    """Vectorized point evaluator; grid samples are interpolated with cubic splines."""
    if isinstance(u, GridFunction):
        interp = RegularGridInterpolator(
            tuple(u.grid.axes), u.clean_values, method="cubic", bounds_error=False, fill_value=0.0
        )
        return (lambda x: interp(as_points(x))), None
    func = resolve_function(u)
    return func, func


def _directions(n: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unit vectors and weights integrating over the whole sphere S^(n-1)."""
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        theta = 2.0 * np.pi * np.arange(m) / m
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1), np.full(m, 2.0 * np.pi / m)
    raise InvalidArgumentError(f"Pointwise fractional Laplacian supports n in (1, 2), got {n}")


class _PointIntegrand:
    """Spherical sums of u around a fixed point x."""

    def __init__(self, f: Callable, x: np.ndarray, dirs: np.ndarray, weights: np.ndarray):
        self.f = f
        self.x = x
        self.dirs = dirs
        self.weights = weights
        self.ux = float(f(x[None, :])[0])

    def second_difference(self, rho: float) -> float:
        """M(rho) = sum_theta w (u(x + rho theta) + u(x - rho theta) - 2 u(x))."""
        plus = self.f(self.x[None, :] + rho * self.dirs)
        minus = self.f(self.x[None, :] - rho * self.dirs)
        return float(np.dot(self.weights, plus + minus - 2.0 * self.ux))

    def first_difference(self, rho: float, symmetrize: bool) -> float:
        """P(rho) = sum_theta w (u(x) - u(x + rho theta)), paired with -theta when symmetrized."""
        plus = self.f(self.x[None, :] + rho * self.dirs)
        if symmetrize:
            minus = self.f(self.x[None, :] - rho * self.dirs)
            return float(np.dot(self.weights, self.ux - 0.5 * (plus + minus)))
        return float(np.dot(self.weights, self.ux - plus))

    def far_field(self, R: float) -> Tuple[float, float, float]:
        """Mean, spread and sup of |u| on the shells R * FAR_RADII."""
        samples = np.concatenate([
            self.f(self.x[None, :] + sign * R * c * self.dirs)
            for c in FAR_RADII for sign in (1.0, -1.0)
        ])
        return float(np.mean(samples)), float(np.ptp(samples)), float(np.max(np.abs(samples)))


def _tail(ip: _PointIntegrand, C: float, omega: float, s: float, cfg: QuadConfig) -> Tuple[float, float, List[str]]:
    """Tail term, error band and warnings for the integral over |y| > R."""
    R = cfg.trunc_radius
    mean, spread, sup = ip.far_field(R)
    band = C * omega * R ** (-2.0 * s) / (2.0 * s)
    warnings: List[str] = []
    if cfg.tail_mode == TailMode.BOUND_ONLY:
        bound = 0.5 * 4.0 * max(sup, abs(ip.ux)) * band
        return 0.0, bound, warnings
    if spread > cfg.tol * max(1.0, sup):
        warnings.append("tail-assumption-violated")
        bound = 0.5 * 4.0 * max(sup, abs(ip.ux)) * band
        logger.warning(
            f"tail-assumption-violated at x={ip.x.tolist()}: far-field spread {spread:.3e}, bound {bound:.3e}"
        )
        return band * (ip.ux - mean), bound, warnings
    return band * (ip.ux - mean), 0.0, warnings


def _quotient_at(ip: _PointIntegrand, s: float, C: float, omega: float, cfg: QuadConfig):
    R = cfg.trunc_radius
    r1 = min(1.0, R)

    def near(rho):
        rho = max(rho, RHO_FLOOR)
        return ip.second_difference(rho) / (rho * rho)

    inner, err_inner = integrate.quad(near, 0.0, r1, weight="alg", wvar=(1.0 - 2.0 * s, 0.0), **_QUAD_OPTS)
    outer, err_outer = 0.0, 0.0
    if R > r1:
        outer, err_outer = integrate.quad(
            lambda rho: rho ** (-1.0 - 2.0 * s) * ip.second_difference(rho), r1, R, **_QUAD_OPTS
        )
    tail, band, warnings = _tail(ip, C, omega, s, cfg)
    value = -0.5 * C * (inner + outer) + tail
    err = 0.5 * C * (err_inner + err_outer) + band
    return value, tail, err, warnings


def _pv_integral(ip: _PointIntegrand, s: float, eps: float, R: float, symmetrize: bool) -> float:
    """integral_eps^R rho^(-1-2s) P(rho) + inner-shell estimate, on decade panels."""
    edges = [eps]
    while edges[-1] * 10.0 < min(1.0, R):
        edges.append(edges[-1] * 10.0)
    edges.append(min(1.0, R))
    if R > 1.0:
        edges.append(R)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        value, _ = integrate.quad(
            lambda rho: rho ** (-1.0 - 2.0 * s) * ip.first_difference(rho, symmetrize), a, b, **_QUAD_OPTS
        )
        total += value
    # P grows like rho^2 inside the excluded shell.
    total += ip.first_difference(eps, symmetrize) * eps ** (-2.0 * s) / (2.0 - 2.0 * s)
    return total


def _prepare(u: FunctionInput, pts, s: float, cfg: Optional[QuadConfig], allow_one: bool = False):
    ParamValidator.require_order(s, allow_one=allow_one)
    cfg = cfg or QuadConfig()
    points = as_points(pts)
    n = points.shape[1]
    if isinstance(u, GridFunction) and u.grid.dim != n:
        raise InvalidArgumentError(f"Points of dimension {n} do not match grid dimension {u.grid.dim}")
    f, func = _evaluator(u)
    dirs, weights = _directions(n, cfg.angular_nodes)
    return cfg, points, n, f, func, dirs, weights


def flap_quotient(
    u: FunctionInput,
    pts,
    s: float,
    cfg: Optional[QuadConfig] = None,
) -> FlapResult:
    """
    Fractional Laplacian at points from the weighted second-order quotient.

    Args:
        u: Catalog function, spec string, or grid samples (interpolated)
        pts: Evaluation points, shape (m, n) or scalars for n = 1
        s: Order in (0, 1)
        cfg: Quadrature controls (trunc_radius, angular_nodes, tail_mode, tol)

    Returns:
        FlapResult with values, tail corrections and an error band
    """
    cfg, points, n, f, _, dirs, weights = _prepare(u, pts, s, cfg)
    C = c_const(n, s)
    omega = sphere_measure(n - 1)
    values, tails, warnings = [], [], []
    est = 0.0
    for x in points:
        ip = _PointIntegrand(f, x, dirs, weights)
        value, tail, err, warn = _quotient_at(ip, s, C, omega, cfg)
        values.append(value)
        tails.append(tail)
        est = max(est, err)
        warnings.extend(w for w in warn if w not in warnings)
    logger.debug(f"quotient s={s} at {len(values)} points: {values[:4]}")
    return FlapResult(
        method=FlapMethod.QUOTIENT, points=points, values=values,
        tail_correction=tails, est_error=est, warnings=warnings,
    )


def flap_pv(
    u: FunctionInput,
    pts,
    s: float,
    cfg: Optional[QuadConfig] = None,
    symmetrize: bool = True,
) -> FlapResult:
    """
    Fractional Laplacian at points from the principal-value integral.

    The integral is taken over eps < |y| < R with y paired with -y, plus the
    quadratic estimate of the excluded shell and the far-field tail. The value
    at eps is compared with the value at eps/2.

    Raises:
        PVInstabilityError: Relative change above cfg.tol between eps and eps/2
    """
    cfg, points, n, f, _, dirs, weights = _prepare(u, pts, s, cfg)
    if not symmetrize:
        half = slice(0, 1) if n == 1 else slice(0, dirs.shape[0] // 2)
        dirs, weights = dirs[half], 2.0 * weights[half]
    C = c_const(n, s)
    omega = sphere_measure(n - 1)
    eps = cfg.eps_pv
    R = cfg.trunc_radius
    values, tails, warnings = [], [], []
    est = 0.0
    for x in points:
        ip = _PointIntegrand(f, x, dirs, weights)
        coarse = C * _pv_integral(ip, s, eps, R, symmetrize)
        fine = C * _pv_integral(ip, s, 0.5 * eps, R, symmetrize)
        change = abs(fine - coarse)
        if change > cfg.tol * max(abs(fine), 1e-300) and change > 1e-14:
            raise PVInstabilityError(
                f"Principal value unstable at x={x.tolist()}: {coarse:.12g} (eps={eps}) vs "
                f"{fine:.12g} (eps={0.5 * eps}); symmetrize={symmetrize}"
            )
        tail, band, warn = _tail(ip, C, omega, s, cfg)
        values.append(fine + tail)
        tails.append(tail)
        est = max(est, change + band)
        warnings.extend(w for w in warn if w not in warnings)
    return FlapResult(
        method=FlapMethod.PV, points=points, values=values,
        tail_correction=tails, est_error=est, warnings=warnings,
    )


def _boundary_max(values: np.ndarray) -> float:
    edges = []
    for axis in range(values.ndim):
        edges.append(np.take(values, [0, -1], axis=axis))
    return float(max(np.max(np.abs(e)) for e in edges))


def flap_spectral(u: GridFunction, s: float) -> FlapResult:
    """
    Fractional Laplacian on the whole grid through the multiplier |xi|^(2s).

    s = 1 is accepted and gives the classical -Laplacian. A warning is recorded
    when u does not decay to the grid boundary, since the transform periodizes it.
    """
    ParamValidator.require_order(s, allow_one=True)
    values = u.clean_values
    symbol = frequency_norm(u.grid) ** (2.0 * s)
    field = apply_multiplier(values, symbol)
    warnings = []
    peak = float(np.max(np.abs(values))) if values.size else 0.0
    if _boundary_max(values) > PERIODIZATION_TOL * peak:
        warnings.append("periodization")
        logger.warning(f"periodization: boundary values {_boundary_max(values):.3e} vs peak {peak:.3e}")
    result = GridFunction(grid=u.grid, values=field, mask=u.mask)
    return FlapResult(
        method=FlapMethod.SPECTRAL,
        points=u.grid.points,
        values=field.ravel(),
        field=result,
        tail_correction=np.zeros(u.grid.cardinality),
        warnings=warnings,
    )


def symbol_integral(xi, n: int, s: float, cfg: Optional[QuadConfig] = None) -> float:
    """
    integral over R^n of (1 - cos(xi . y)) / |y|^(n+2s) dy, which equals |xi|^(2s) / C(n,s).

    The angle is integrated with the periodic trapezoid rule around the actual
    direction set (no use of rotational invariance), the radius in three parts:
    a weighted rule near 0, period windows up to T, and an analytic tail.
    """
    ParamValidator.require_dimension(n, allowed=(1, 2))
    ParamValidator.require_order(s)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.size != n:
        raise InvalidArgumentError(f"xi has {xi.size} components, expected {n}")
    a = float(np.linalg.norm(xi))
    if a == 0.0:
        return 0.0
    period = 2.0 * math.pi / a
    r1 = min(1.0, math.pi / a)
    stop = r1 + 64 * period
    if n == 1:
        proj = np.array([xi[0], -xi[0]])
        weights = np.array([1.0, 1.0])
    else:
        m = 2 * int(math.ceil(stop * a)) + 32
        theta = 2.0 * np.pi * np.arange(m) / m
        proj = xi[0] * np.cos(theta) + xi[1] * np.sin(theta)
        weights = np.full(m, 2.0 * np.pi / m)

    def near(r):
        r = max(r, RHO_FLOOR * r1)
        return float(np.dot(weights, 2.0 * np.sin(0.5 * r * proj) ** 2)) / (r * r)

    head, _ = integrate.quad(near, 0.0, r1, weight="alg", wvar=(1.0 - 2.0 * s, 0.0), **_QUAD_OPTS)

    def body_integrand(r):
        r = np.asarray(r)
        return (weights[None, :] * (1.0 - np.cos(r[:, None] * proj[None, :]))).sum(axis=1) * r ** (-1.0 - 2.0 * s)

    body, _ = window_sum(body_integrand, r1, stop, period)

    omega = sphere_measure(n - 1)
    tail = omega * stop ** (-2.0 * s) / (2.0 * s)
    if n == 1:
        osc, _ = integrate.quad(lambda r: 2.0 * r ** (-1.0 - 2.0 * s), stop, np.inf, weight="cos", wvar=a)
    else:
        # 2 pi J_0(a r) through its Hankel expansion.
        def amp(r):
            return 2.0 * math.pi * math.sqrt(2.0 / (math.pi * a * r)) * r ** (-1.0 - 2.0 * s)

        c = math.cos(0.25 * math.pi)
        cos_part, _ = integrate.quad(
            lambda r: amp(r) * c * (1.0 - 9.0 / (128.0 * (a * r) ** 2) + 1.0 / (8.0 * a * r)),
            stop, np.inf, weight="cos", wvar=a,
        )
        sin_part, _ = integrate.quad(
            lambda r: amp(r) * c * (1.0 - 9.0 / (128.0 * (a * r) ** 2) - 1.0 / (8.0 * a * r)),
            stop, np.inf, weight="sin", wvar=a,
        )
        osc = cos_part + sin_part
    value = head + body + tail - osc
    logger.debug(f"symbol integral |xi|={a:g} n={n} s={s}: {value:.12g}")
    return value


def plancherel_seminorm(u: GridFunction, s: float) -> float:
    """[u]^2_{H^s} on the frequency side: 2/C(n,s) * sum |xi|^(2s) |u_hat|^2 (d xi)^n."""
    ParamValidator.require_order(s)
    uhat = unitary_fft(u.clean_values, u.grid)
    dxi = float(np.prod(frequency_steps(u.grid)))
    energy = float(np.sum(frequency_norm(u.grid) ** (2.0 * s) * np.abs(uhat) ** 2)) * dxi
    return 2.0 / c_const(u.grid.dim, s) * energy


def half_laplacian_norm(u: GridFunction, s: float) -> float:
    """2/C(n,s) * ||(-Laplacian)^(s/2) u||^2_{L^2}, with the half power applied as a multiplier."""
    ParamValidator.require_order(s)
    w = apply_multiplier(u.clean_values, frequency_norm(u.grid) ** s)
    h = float(np.prod(u.grid.spacing))
    return 2.0 / c_const(u.grid.dim, s) * float(np.sum(w * w)) * h


def operator_limit_scan(
    u: FunctionInput,
    x,
    s_list: Sequence[float],
    cfg: Optional[QuadConfig] = None,
) -> List[OperatorLimitPoint]:
    """
    Quotient values along a sweep of s next to the endpoint limits u(x) and -Laplacian u(x).

    Flags: "requires-compact-support" when u does not vanish far away (the s -> 0
    limit then fails), "extrapolation-beyond-statement" in one dimension.
    """
    s_list = ParamValidator.require_non_empty(s_list, "s_list")
    cfg = cfg or QuadConfig()
    # A flat sequence is one point in len(x) dimensions, not len(x) points on a line.
    point = np.atleast_2d(np.asarray(x, dtype=float))[:1]
    if isinstance(u, GridFunction):
        raise InvalidArgumentError("operator_limit_scan needs a catalog function with a known Laplacian")
    func = resolve_function(u)
    n = point.shape[1]
    u_x = float(func(point)[0])
    lap = float(-func.laplacian(point)[0])
    dirs, weights = _directions(n, cfg.angular_nodes)
    ip = _PointIntegrand(func, point[0], dirs, weights)
    far_mean, _, _ = ip.far_field(cfg.trunc_radius)
    flags = []
    if abs(far_mean) > cfg.tol * max(1.0, abs(u_x)):
        flags.append("requires-compact-support")
    if n == 1:
        flags.append("extrapolation-beyond-statement")
    for flag in flags:
        logger.warning(f"{flag}: operator limit scan of {func.name} at {point[0].tolist()}")
    out = []
    for s in s_list:
        value = flap_quotient(func, point, s, cfg).values[0]
        out.append(OperatorLimitPoint(s=s, value=float(value), target_low=u_x, target_high=lap, flags=flags))
    return out


def gaussian_flap_origin(n: int, s: float) -> float:
    """(-Laplacian)^s exp(-|x|^2/2) at x = 0: (2 pi)^(-n/2) omega_{n-1} 2^(s+n/2-1) Gamma(s+n/2)."""
    ParamValidator.require_dimension(n)
    ParamValidator.require_order(s, allow_one=True)
    return (2.0 * math.pi) ** (-0.5 * n) * sphere_measure(n - 1) * 2.0 ** (s + 0.5 * n - 1.0) * math.gamma(s + 0.5 * n)
