"""
Normalization constants of the fractional Laplacian.

C(n,s) = (integral of (1 - cos z_1) / |z|^(n+2s) over R^n)^(-1) factors as
s(1-s) / (A(n,s) B(s)), where

    A(n,s) = omega_{n-2} * E_n(n + 2s)        (A(1,s) = 1)
    B(s)   = s(1-s) * integral of (1 - cos t) / |t|^(1+2s) over R
    E_n(theta) = integral_0^inf rho^(n-2) (1 + rho^2)^(-theta/2) d rho

and omega_d is the measure of the unit sphere S^d. All functions here are pure
and cached on their scalar arguments.
"""

import logging
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from .models.results import ConstantBundle, SphereMeasure
from .models.validation import DivergentIntegralError, InvalidArgumentError, ParamValidator
from .utils.quadrature import window_sum

logger = logging.getLogger(__name__)

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=200)


@lru_cache(maxsize=None)
def sphere_measure(d: int) -> float:
    """
    Measure omega_d of the unit sphere S^d in R^(d+1).

    Uses omega_0 = 2, omega_1 = 2 pi and omega_d = 2 pi / (d - 1) * omega_{d-2}.

    Raises:
        InvalidArgumentError: d < 0
    """
    if isinstance(d, bool) or int(d) != d or d < 0:
        raise InvalidArgumentError(f"Sphere dimension must be a non-negative integer, got {d}")
    d = int(d)
    if d == 0:
        return 2.0
    if d == 1:
        return 2.0 * math.pi
    return 2.0 * math.pi / (d - 1) * sphere_measure(d - 2)


def sphere(d: int) -> SphereMeasure:
    return SphereMeasure(d=d, omega_d=sphere_measure(d))


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n, omega_{n-1} / n."""
    ParamValidator.require_dimension(n)
    return sphere_measure(n - 1) / n


@lru_cache(maxsize=None)
def ball_volume_chain(n: int) -> float:
    """Unit-ball volume from its own recursion varpi_n = 2 pi / n * varpi_{n-2}."""
    if n < 0:
        raise InvalidArgumentError(f"Ball dimension must be >= 0, got {n}")
    if n == 0:
        return 1.0
    if n == 1:
        return 2.0
    return 2.0 * math.pi / n * ball_volume_chain(n - 2)


@lru_cache(maxsize=1024)
def e_integral(n: int, theta: float) -> float:
    """
    E_n(theta) = integral_0^inf rho^(n-2) (1 + rho^2)^(-theta/2) d rho.

    The integral over [1, inf) is mapped to (0, 1] by rho -> 1/rho, where the
    integrand becomes t^(theta-n) (1 + t^2)^(-theta/2) and the algebraic factor
    is handled by a weighted rule.

    Raises:
        InvalidArgumentError: n < 2
        DivergentIntegralError: theta <= n - 1
    """
    ParamValidator.require_dimension(n)
    if n < 2:
        raise InvalidArgumentError(f"E_n is defined for n >= 2, got n={n}")
    if not theta > n - 1:
        raise DivergentIntegralError(f"E_{n}({theta}) diverges: need theta > n - 1 = {n - 1}")
    head, _ = integrate.quad(lambda r: r ** (n - 2) * (1.0 + r * r) ** (-0.5 * theta), 0.0, 1.0, **_QUAD_OPTS)
    tail, _ = integrate.quad(
        lambda t: (1.0 + t * t) ** (-0.5 * theta), 0.0, 1.0,
        weight="alg", wvar=(theta - n, 0.0), **_QUAD_OPTS,
    )
    return head + tail


def a_const(n: int, s: float) -> float:
    ParamValidator.require_dimension(n)
    ParamValidator.require_order(s)
    if n == 1:
        return 1.0
    return sphere_measure(n - 2) * e_integral(n, n + 2.0 * s)


def _cos_tail(s: float, periods: int = 64) -> float:
    """integral_1^inf cos(t) t^(-1-2s) dt by 2 pi windows plus an asymptotic tail."""
    a = 1.0 + 2.0 * s
    stop = 2.0 * math.pi * periods
    body, windows = window_sum(lambda t: np.cos(t) * t ** (-a), 1.0, stop, 2.0 * math.pi)
    # Integrating by parts from a multiple of 2 pi, where cos = 1 and sin = 0.
    tail = a * stop ** (-a - 1.0) - a * (a + 1.0) * (a + 2.0) * stop ** (-a - 3.0)
    logger.debug(f"cos tail s={s}: {len(windows)} windows, last {windows[-1]:.3e}, tail {tail:.3e}")
    return body + tail


@lru_cache(maxsize=1024)
def b_const(s: float) -> float:
    """
    B(s) = s(1-s) * integral over R of (1 - cos t) / |t|^(1+2s) dt.

    On |t| < 1 the Taylor series of 1 - cos t is integrated term by term; on
    |t| >= 1 the constant part is exact and the cosine part is summed over
    2 pi windows.
    """
    ParamValidator.require_order(s)
    inner = math.fsum(
        (-1) ** (k + 1) / (math.factorial(2 * k) * (2 * k - 2.0 * s)) for k in range(1, 12)
    )
    outer = 1.0 / (2.0 * s) - _cos_tail(s)
    return s * (1.0 - s) * 2.0 * (inner + outer)


def c_const(n: int, s: float) -> float:
    """C(n,s) = s(1-s) / (A(n,s) B(s))."""
    return s * (1.0 - s) / (a_const(n, s) * b_const(s))


def _sphere_average_cos(r: np.ndarray, n: int) -> np.ndarray:
    """Average of cos(r z_1) over the unit sphere S^(n-1)."""
    nu = 0.5 * n - 1.0
    r = np.asarray(r, dtype=float)
    return special.gamma(0.5 * n) * (2.0 / r) ** nu * special.jv(nu, r)


@lru_cache(maxsize=256)
def c_const_direct(n: int, s: float) -> float:
    """
    C(n,s) from the defining integral, in radial form.

    integral (1 - cos z_1)/|z|^(n+2s) dz = omega_{n-1} * integral_0^inf r^(-1-2s) (1 - Phi_n(r)) dr
    with Phi_n the spherical average of cos. The piece on [0,1] is a power
    series, the oscillatory piece on [1, inf) is summed over half-period windows
    and closed with the Hankel asymptotics of J_nu.
    """
    ParamValidator.require_dimension(n)
    ParamValidator.require_order(s)
    nu = 0.5 * n - 1.0
    omega = sphere_measure(n - 1)
    gamma_half = special.gamma(0.5 * n)
    series = math.fsum(
        (-1) ** (k + 1) * gamma_half / (4.0 ** k * math.factorial(k) * special.gamma(k + 0.5 * n) * (2 * k - 2.0 * s))
        for k in range(1, 20)
    )
    stop = 2.0 * math.pi * 400
    body, _ = window_sum(lambda r: r ** (-1.0 - 2.0 * s) * _sphere_average_cos(r, n), 1.0, stop, math.pi)

    mu = 4.0 * nu * nu
    phase = 0.5 * nu * math.pi + 0.25 * math.pi
    scale = gamma_half * 2.0 ** nu * math.sqrt(2.0 / math.pi)
    power = -1.0 - 2.0 * s - nu - 0.5

    def amp_p(r):
        return scale * r ** power * (1.0 - (mu - 1.0) * (mu - 9.0) / (2.0 * (8.0 * r) ** 2))

    def amp_q(r):
        return scale * r ** power * (mu - 1.0) / (8.0 * r)

    cos_part, _ = integrate.quad(
        lambda r: amp_p(r) * math.cos(phase) + amp_q(r) * math.sin(phase), stop, np.inf, weight="cos", wvar=1.0
    )
    sin_part, _ = integrate.quad(
        lambda r: amp_p(r) * math.sin(phase) - amp_q(r) * math.cos(phase), stop, np.inf, weight="sin", wvar=1.0
    )
    tail = cos_part + sin_part
    integral = omega * (series + 1.0 / (2.0 * s) - body - tail)
    logger.debug(f"direct C({n},{s}): integral {integral:.12g}")
    return 1.0 / integral


def constant_bundle(n: int, s: float) -> ConstantBundle:
    A = a_const(n, s)
    B = b_const(s)
    I0 = e_integral(n, float(n)) if n > 1 else None
    I1 = e_integral(n, n + 2.0) if n > 1 else None
    return ConstantBundle(n=n, s=s, A=A, B=B, C=s * (1.0 - s) / (A * B), I0=I0, I1=I1)


def constant_sweep(n: int, s_values: Sequence[float] = (0.01, 0.05, 0.5, 0.95, 0.99)) -> List[ConstantBundle]:
    """Constant bundles along a sweep of s, for the endpoint asymptotics."""
    s_values = ParamValidator.require_non_empty(s_values, "s_values")
    return [constant_bundle(n, s) for s in s_values]


def limit_targets(n: int) -> Tuple[float, float]:
    """Limits of C(n,s) / (s(1-s)) as s -> 1 and s -> 0: (4n / omega_{n-1}, 2 / omega_{n-1})."""
    omega = sphere_measure(n - 1)
    return 4.0 * n / omega, 2.0 / omega


def bbm_constant(n: int, p: float) -> float:
    """(1/p) * integral over S^(n-1) of |xi_1|^p; omega_{n-1} / (2n) when p = 2."""
    ParamValidator.require_dimension(n)
    p = ParamValidator.require_exponent(p)
    surface = 2.0 * math.pi ** (0.5 * (n - 1)) * math.gamma(0.5 * (p + 1)) / math.gamma(0.5 * (n + p))
    return surface / p


def ms_constant(n: int, p: float) -> float:
    """2 omega_{n-1} / p; omega_{n-1} when p = 2."""
    ParamValidator.require_dimension(n)
    p = ParamValidator.require_exponent(p)
    return 2.0 * sphere_measure(n - 1) / p
