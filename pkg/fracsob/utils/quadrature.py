"""
Quadrature building blocks for singular kernels.

- exact cell-pair integrals of |x - y|^(-gamma) in 1-D;
- cell-pair moments in 2-D, integrated in polar coordinates around the singular
  point with the radial part in closed form;
- exact complement-kernel integrals kappa(x) = int_{R^n \\ D} |x - y|^(-n - sigma) dy;
- windowed Gauss-Legendre sums for slowly decaying oscillatory integrands.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..models.domain import DomainSpec

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def window_sum(
    func: Callable[[np.ndarray], np.ndarray],
    start: float,
    stop: float,
    width: float,
    order: int = 32,
) -> Tuple[float, np.ndarray]:
    """
    Integrate a vectorized function over [start, stop] window by window.

    Args:
        func: Function evaluated on an array of abscissae
        start: Lower limit
        stop: Upper limit
        width: Target window width (one oscillation period works well)
        order: Gauss-Legendre nodes per window

    Returns:
        Tuple of the total and the per-window contributions
    """
    if stop <= start:
        return 0.0, np.zeros(0)
    n_win = max(1, int(math.ceil((stop - start) / width)))
    edges = np.linspace(start, stop, n_win + 1)
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(func(nodes.ravel()), dtype=float).reshape(nodes.shape)
    windows = (vals * w[None, :]).sum(axis=1) * half
    return math.fsum(windows), windows


def _pair_antiderivative(t: np.ndarray, gamma: float) -> np.ndarray:
    """Even G with G'' = |t|^(-gamma)."""
    a = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if abs(gamma - 1.0) < 1e-12:
            return np.where(a > 0.0, a * np.log(np.where(a > 0.0, a, 1.0)) - a, 0.0)
        if abs(gamma - 2.0) < 1e-12:
            return -np.log(a)
        return a ** (2.0 - gamma) / ((1.0 - gamma) * (2.0 - gamma))


def cell_pair_kernel_1d(
    left_a: np.ndarray,
    right_a: np.ndarray,
    left_b: np.ndarray,
    right_b: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """
    Exact int_{cell_a} int_{cell_b} |x - y|^(-gamma) dy dx for 1-D cells.

    Cells must be disjoint (possibly touching) or identical; identical cells
    need gamma < 1. Touching cells give +inf when gamma >= 2.
    """
    with np.errstate(invalid="ignore"):
        return (
            _pair_antiderivative(right_a - left_b, gamma)
            - _pair_antiderivative(left_a - left_b, gamma)
            - _pair_antiderivative(right_a - right_b, gamma)
            + _pair_antiderivative(left_a - right_b, gamma)
        )


def _power_antiderivative(t, sigma: float):
    """H with H'(t) = t^(-sigma) for t > 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(sigma - 1.0) < 1e-12:
            return np.log(t)
        return np.power(t, 1.0 - sigma) / (1.0 - sigma)


def complement_cell_integral_1d(
    left: np.ndarray,
    right: np.ndarray,
    intervals: Sequence[Tuple[float, float]],
    sigma: float,
) -> np.ndarray:
    """
    int_{cell} int_{R \\ U} |x - y|^(-1 - sigma) dy dx for cells inside U.

    Args:
        left: Left cell ends
        right: Right cell ends
        intervals: Sorted disjoint intervals whose union U contains every cell
        sigma: s*p

    Returns:
        Array of integrals, one per cell (+inf where a cell touches the complement and sigma >= 1)
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    ends = [-np.inf] + [v for pair in intervals for v in pair] + [np.inf]
    gaps = [(ends[i], ends[i + 1]) for i in range(0, len(ends), 2)]
    H = lambda t: _power_antiderivative(t, sigma)
    total = np.zeros_like(left)
    with np.errstate(invalid="ignore", divide="ignore"):
        for c, d in gaps:
            if not c < d:
                continue
            to_right = c >= right
            part_r = H(c - left) - H(c - right)
            if np.isfinite(d):
                part_r = part_r - H(d - left) + H(d - right)
            part_l = H(right - d) - H(left - d)
            if np.isfinite(c):
                part_l = part_l - H(right - c) + H(left - c)
            total = total + np.where(to_right, part_r, np.where(d <= left, part_l, 0.0))
    return total / sigma


def complement_kernel_1d(x: np.ndarray, intervals: Sequence[Tuple[float, float]], sigma: float) -> np.ndarray:
    """kappa(x) = int_{R \\ U} |x - y|^(-1 - sigma) dy for x inside U (closed form)."""
    x = np.asarray(x, dtype=float)
    ends = [-np.inf] + [v for pair in intervals for v in pair] + [np.inf]
    gaps = [(ends[i], ends[i + 1]) for i in range(0, len(ends), 2)]
    total = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        for c, d in gaps:
            if not c < d:
                continue
            right_part = np.power(c - x, -sigma) - (np.power(d - x, -sigma) if np.isfinite(d) else 0.0)
            left_part = np.power(x - d, -sigma) - (np.power(x - c, -sigma) if np.isfinite(c) else 0.0)
            total = total + np.where(c >= x, right_part, np.where(d <= x, left_part, np.inf))
    return total / sigma


def complement_kernel_2d(points: np.ndarray, domain: DomainSpec, sigma: float, n_angles: int = 512) -> np.ndarray:
    """
    kappa(x) = int_{R^2 \\ D} |x - y|^(-2 - sigma) dy, by rays from x.

    Along each ray the complement contributes in closed form; the angle is
    integrated with the periodic trapezoid rule. Points outside D give +inf.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    labels = domain.component_labels(pts)
    total = np.zeros((pts.shape[0], n_angles))
    with np.errstate(divide="ignore", invalid="ignore"):
        for k, piece in enumerate(domain.components()):
            t_in, t_out = piece.ray_interval(pts, dirs)
            p_in = np.power(t_in, -sigma)
            p_out = np.power(t_out, -sigma)
            own = (labels == k)[:, None]
            total += np.where(own, p_out, -(p_in - p_out))
    kappa = total.sum(axis=1) * (2.0 * np.pi / n_angles) / sigma
    return np.where(labels >= 0, kappa, np.inf)


def _radial_pieces(c: np.ndarray, e: np.ndarray, h: np.ndarray) -> List[Tuple[float, float]]:
    lo_t, hi_t = 0.0, np.inf
    for i in range(2):
        if abs(e[i]) < 1e-15:
            if abs(c[i]) > h[i]:
                return []
            continue
        t1 = (-h[i] - c[i]) / e[i]
        t2 = (h[i] - c[i]) / e[i]
        lo_t = max(lo_t, min(t1, t2))
        hi_t = min(hi_t, max(t1, t2))
    if not hi_t > lo_t:
        return []
    breaks = [lo_t]
    for i in range(2):
        if abs(e[i]) >= 1e-15:
            t_star = -c[i] / e[i]
            if lo_t < t_star < hi_t:
                breaks.append(t_star)
    breaks = sorted(breaks) + [hi_t]
    return list(zip(breaks[:-1], breaks[1:]))


def _moment_2d(dx: float, dy: float, hx: float, hy: float, gamma: float) -> float:
    c = np.array([-dx, -dy])
    h = np.array([hx, hy])
    m = 1.0 - gamma
    thresholds = (1e-13 * hx * hy, 1e-13 * max(hx, hy), 1e-13)

    def radial(phi: float) -> float:
        e = np.array([math.cos(phi), math.sin(phi)])
        total = 0.0
        for ra, rb in _radial_pieces(c, e, h):
            rm = 0.5 * (ra + rb)
            sgn = np.sign(c + rm * e)
            A = h - sgn * c
            B = -sgn * e
            coeffs = (A[0] * A[1], A[0] * B[1] + A[1] * B[0], B[0] * B[1])
            for k, q in enumerate(coeffs):
                if abs(q) <= thresholds[k]:
                    continue
                ex = m + k + 1.0
                if abs(ex) < 1e-14:
                    if ra == 0.0:
                        return math.inf
                    total += q * math.log(rb / ra)
                elif ra == 0.0 and ex < 0.0:
                    return math.inf
                else:
                    total += q * (rb ** ex - ra ** ex) / ex
        return total

    special = [(sx * hx, sy * hy) for sx in (-1, 0, 1) for sy in (-1, 0, 1)]
    breaks = set()
    for px, py in special:
        vx, vy = px - c[0], py - c[1]
        if math.hypot(vx, vy) > 1e-14 * max(hx, hy):
            ang = math.atan2(vy, vx) % (2.0 * math.pi)
            if 1e-12 < ang < 2.0 * math.pi - 1e-12:
                breaks.add(ang)
    value, err = integrate.quad(
        radial, 0.0, 2.0 * math.pi, points=sorted(breaks), limit=400, epsabs=0.0, epsrel=1e-11
    )
    logger.debug(f"cell moment d=({dx:g},{dy:g}) h=({hx:g},{hy:g}) gamma={gamma:g}: {value:.12g} +- {err:.1e}")
    return value


@lru_cache(maxsize=8192)
def _moment_2d_cached(i: int, j: int, hx: float, hy: float, gamma: float) -> float:
    return _moment_2d(i * hx, j * hy, hx, hy, gamma)


def cell_pair_moment_2d(i: int, j: int, hx: float, hy: float, gamma: float) -> float:
    """
    int_{Q} int_{Q + (i hx, j hy)} |x - y|^(-gamma) dy dx for the rectangle Q = [0,hx] x [0,hy].

    Equals int Lambda(w) |w + d|^(-gamma) dw with the tent density
    Lambda(w) = (hx - |w_1|)(hy - |w_2|). Returns +inf when the integral diverges.
    """
    i, j = abs(int(i)), abs(int(j))
    return _moment_2d_cached(i, j, float(hx), float(hy), round(float(gamma), 12))


def midpoint_kernel_2d(wx: np.ndarray, wy: np.ndarray, hx: float, hy: float, gamma: float) -> np.ndarray:
    """
    Cell-pair average of |x - y|^(-gamma) for well separated cells.

    Midpoint value plus the second-order correction sum_i (h_i^2/12) d_i^2 f.
    """
    r2 = wx * wx + wy * wy
    base = r2 ** (-0.5 * gamma)
    corr = gamma * r2 ** (-0.5 * gamma - 1.0) * (
        hx * hx / 12.0 * ((gamma + 2.0) * wx * wx / r2 - 1.0)
        + hy * hy / 12.0 * ((gamma + 2.0) * wy * wy / r2 - 1.0)
    )
    return base + corr
