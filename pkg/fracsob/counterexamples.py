"""
Two functions that break the Sobolev theory on irregular domains.

Cusp: u = rho * theta on the unit disc minus the cusp {x_1 <= 0, |x_2| <= |x_1|^kappa}
has a bounded gradient, but its W^{s,p} seminorm is infinite when sp > 1 and
kappa > (p + 1)/(sp - 1). The divergence is exhibited on the thin strips above
and below the cusp: for radii r_0 = r, r_{j+1} = r_j - r_j^kappa the pair of
strips at step j contributes about r_j^(kappa - alpha), alpha = kappa(sp - 1) - p,
and the strips between r/2 and r add up to a multiple of r^(1 - alpha).

Balls: on a union of disjoint balls B_k of radius a_k^2 centered at a_k = C^-k,
the normalized indicators of the balls have unit L^2 norm, are pairwise at
distance sqrt(2), and have H^s seminorms bounded uniformly in n.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate

from .catalog import BallBump, CuspRhoTheta
from .core import make_grid, make_params, sample
from .gagliardo import refinement_ladder
from .models.domain import DomainSpec
from .models.params import QuadConfig
from .models.results import BallStudy, CuspStudy, RefinementLadder
from .models.validation import InvalidArgumentError, ParamValidator
from .utils.parallel import ordered_map, ordered_sum
from .utils.quadrature import gauss_legendre

logger = logging.getLogger(__name__)

R_MAX = 0.1
R_SWEEP = (0.1, 0.05, 0.025)
STRIP_NODES = 8
BALL_RADIAL = 8
BALL_ANGULAR = 16
GRADIENT_GRID = 201


def cusp_regime(p: float, s: float, kappa: float) -> Tuple[float, float]:
    """
    Check sp > 1 and kappa > (p + 1)/(sp - 1) and return (kappa threshold, alpha).

    Raises:
        InvalidArgumentError: naming the violated inequality
    """
    ParamValidator.require_order(s)
    ParamValidator.require_exponent(p)
    sp = s * p
    if not sp > 1.0:
        raise InvalidArgumentError(f"Cusp counterexample needs s*p > 1, got s*p = {sp:g}")
    threshold = (p + 1.0) / (sp - 1.0)
    if not kappa > threshold:
        raise InvalidArgumentError(
            f"Cusp counterexample needs kappa > (p+1)/(s*p-1) = {threshold:g}, got kappa = {kappa:g}"
        )
    return threshold, kappa * (sp - 1.0) - p


def radius_sequence(r: float, kappa: float, length: int) -> List[float]:
    """r_0 = r, r_{j+1} = r_j - r_j^kappa; strictly decreasing and positive for r < 1."""
    seq = [float(r)]
    for _ in range(length - 1):
        seq.append(seq[-1] - seq[-1] ** kappa)
    return seq


def _unit_nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(order)
    return 0.5 * (x + 1.0), 0.5 * w


def strip_integral(start: float, p: float, s: float, kappa: float, order: int = STRIP_NODES) -> float:
    """
    Gagliardo contribution of the strip pair whose x_1 range is (-start, -start + start^kappa).

    x runs over the strip above the cusp (|x_1|^kappa < x_2 < 2|x_1|^kappa) and
    y over its mirror image below; both orderings of the pair are counted.
    """
    t, w = _unit_nodes(order)
    width = start ** kappa
    x1 = -start + width * t
    y1 = -start + width * t
    X1, Y1, TX, TY = np.meshgrid(x1, y1, t, t, indexing="ij")
    WX1, WY1, WTX, WTY = np.meshgrid(w, w, w, w, indexing="ij")
    hx = np.abs(X1) ** kappa
    hy = np.abs(Y1) ** kappa
    X2 = hx * (1.0 + TX)
    Y2 = -hy * (1.0 + TY)
    ux = np.hypot(X1, X2) * np.arctan2(X2, X1)
    uy = np.hypot(Y1, Y2) * np.arctan2(Y2, Y1)
    dist = np.hypot(X1 - Y1, X2 - Y2)
    vals = np.abs(ux - uy) ** p / dist ** (2.0 + s * p)
    jac = width * width * hx * hy
    return 2.0 * float(np.sum(WX1 * WY1 * WTX * WTY * jac * vals))


def block_sum(r: float, p: float, s: float, kappa: float) -> float:
    """
    Sum of the strip contributions for r/2 <= r_j <= r.

    Strips are r_j^kappa wide, so there are about r^(1-kappa) of them; the sum is
    taken as the integral of strip_integral(rho) * rho^-kappa d rho.
    """
    value, _ = integrate.quad(
        lambda rho: strip_integral(rho, p, s, kappa) * rho ** (-kappa), 0.5 * r, r, epsabs=0.0, epsrel=1e-8, limit=100
    )
    return value


def _gradient_samples(kappa: float, n_pts: int = GRADIENT_GRID) -> Tuple[float, float]:
    grid = make_grid((-1.0, -1.0), (1.0, 1.0), n_pts)
    domain = DomainSpec.cusp_heart(kappa)
    pts = grid.points
    pts = pts[domain.contains(pts) & (np.hypot(pts[:, 0], pts[:, 1]) > 0.0)]
    func = CuspRhoTheta(kappa=kappa)
    grad = func.gradient(pts)
    squared = np.sum(grad * grad, axis=1)
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    return float(squared.max()), float(np.max(np.abs(squared - (theta ** 2 + 1.0))))


def cusp_divergence_study(
    p: float,
    s: float,
    kappa: float,
    r: float = R_MAX,
    j_max: int = 8,
    cfg: Optional[QuadConfig] = None,
) -> CuspStudy:
    """
    Strip contributions, growth law and gradient bound of rho * theta on the cusp domain.

    Args:
        p: Integrability exponent
        s: Order with sp > 1
        kappa: Cusp exponent, kappa > (p + 1)/(sp - 1)
        r: Starting radius, 0 < r <= 0.1
        j_max: Last strip index
        cfg: Quadrature controls (unused beyond logging defaults)

    Returns:
        CuspStudy with the per-strip values, the fitted constants, the block sums
        over the r sweep and the fitted log-log slope against 1 - alpha

    Raises:
        InvalidArgumentError: Regime violated or r outside (0, 0.1]
    """
    _, alpha = cusp_regime(p, s, kappa)
    if not 0.0 < r <= R_MAX:
        raise InvalidArgumentError(f"Starting radius must lie in (0, {R_MAX}], got r={r}")
    if j_max < 1:
        raise InvalidArgumentError(f"j_max={j_max} must be >= 1")
    r_seq = radius_sequence(r, kappa, j_max + 2)
    contribs = ordered_map(lambda start: strip_integral(start, p, s, kappa), r_seq[: j_max + 1])
    constants = [c / (2.0 ** (-kappa) * rj ** (kappa - alpha)) for c, rj in zip(contribs, r_seq)]
    sweep = [x for x in R_SWEEP if x <= r] or [r, r / 2.0, r / 4.0]
    blocks = ordered_map(lambda radius: block_sum(radius, p, s, kappa), sweep)
    slope, _ = np.polyfit(np.log(sweep), np.log(blocks), 1)
    grad_sup, grad_err = _gradient_samples(kappa)
    logger.info(
        f"cusp p={p} s={s} kappa={kappa}: slope {slope:.4f} vs {1.0 - alpha:.4f}, "
        f"strip constants in [{min(constants):.4g}, {max(constants):.4g}]"
    )
    return CuspStudy(
        p=p, s=s, kappa=kappa, r=r, alpha_con=alpha,
        r_seq=r_seq, strip_contribs=contribs, strip_constants=constants,
        r_sweep=sweep, block_sums=blocks,
        growth_slope=float(slope), expected_slope=1.0 - alpha,
        grad_sup=grad_sup, grad_identity_error=grad_err,
    )


def cusp_control_study(
    p: float,
    s: float,
    n_pts: int = 33,
    cfg: Optional[QuadConfig] = None,
) -> RefinementLadder:
    """
    Seminorm of rho * theta on the upper half disc at two resolutions.

    Away from the cusp the same function has a finite seminorm; the ladder
    compares the grid with n_pts points per axis against 2 * n_pts - 1.
    """
    params = make_params(2, s, p)
    base = cfg or QuadConfig()
    ladder_cfg = base.model_copy(update={"refine": 1})
    grid = make_grid((-1.0, 0.0), (1.0, 1.0), 2 * n_pts - 1)
    domain = DomainSpec.ball((0.0, 0.0), 1.0)
    u = sample(CuspRhoTheta(), grid, domain)
    ladder = refinement_ladder(u, params, domain, ladder_cfg)
    logger.info(f"half-disc control p={p} s={s}: {ladder.values}")
    return ladder


def _polar_nodes(radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of a polar product rule on the disc of the given radius."""
    t, w = _unit_nodes(BALL_RADIAL)
    rho = radius * t
    theta = 2.0 * np.pi * np.arange(BALL_ANGULAR) / BALL_ANGULAR
    offsets = rho[:, None, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)[None, :, :]
    weights = (radius * w * rho)[:, None] * np.full(BALL_ANGULAR, 2.0 * np.pi / BALL_ANGULAR)[None, :]
    return offsets.reshape(-1, 2), weights.ravel()


def _pair_integral(a_n: float, a_k: float, s: float) -> float:
    """integral over B_n x B_k of |x - y|^(-2-2s), with the center difference taken first."""
    xs, wx = _polar_nodes(a_n * a_n)
    ys, wy = _polar_nodes(a_k * a_k)
    shift = a_n - a_k
    diff = (xs[:, None, :] - ys[None, :, :])
    diff[..., 0] += shift
    dist = np.hypot(diff[..., 0], diff[..., 1])
    return float(np.sum(wx[:, None] * wy[None, :] * dist ** (-2.0 - 2.0 * s)))


def _separation_ratio(a: List[float]) -> float:
    theta = 2.0 * np.pi * np.arange(BALL_ANGULAR) / BALL_ANGULAR
    ring = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    best = math.inf
    for i, a_n in enumerate(a):
        xs = np.array([a_n, 0.0])[None, :] + a_n * a_n * ring
        for a_k in a[i + 1:]:
            ys = np.array([a_k, 0.0])[None, :] + a_k * a_k * ring
            dist = np.linalg.norm(xs[:, None, :] - ys[None, :, :], axis=-1)
            best = min(best, float(dist.min()) / (0.5 * abs(a_n - a_k)))
    return best


def ball_family_study(
    C_ratio: float = 16.0,
    s: float = 0.5,
    n_funcs: int = 6,
    cfg: Optional[QuadConfig] = None,
) -> BallStudy:
    """
    Norms, distances and H^s seminorms of the normalized ball indicators f_n.

    The domain keeps n_funcs + 4 balls. [f_n]^2 over the domain is
    2 / (pi a_n^4) * sum over k != n of the B_n x B_k kernel integral.

    Raises:
        InvalidArgumentError: C_ratio <= 10, n_funcs < 3, or overlapping balls
    """
    if not C_ratio > 10.0:
        raise InvalidArgumentError(f"C_ratio={C_ratio} must exceed 10")
    ParamValidator.require_order(s)
    if n_funcs < 3:
        raise InvalidArgumentError(f"n_funcs={n_funcs} must be >= 3")
    funcs = [BallBump(C_ratio=C_ratio, index=k) for k in range(1, n_funcs + 5)]
    a = [f.a_n for f in funcs]
    for k, (left, right) in enumerate(zip(a, a[1:]), start=1):
        if not left - left * left > right + right * right:
            raise InvalidArgumentError(f"Balls {k} and {k + 1} overlap for C_ratio={C_ratio}")
    try:
        DomainSpec.ball_union([((ak, 0.0), ak * ak) for ak in a])
    except ValueError as e:
        raise InvalidArgumentError(f"Ball family is not disjoint: {e}") from e

    norms = [math.sqrt((1.0 / (math.pi * an ** 4)) * (math.pi * an ** 4)) for an in a[:n_funcs]]
    pairs = [
        (i + 1, j + 1, math.sqrt(norms[i] ** 2 + norms[j] ** 2))
        for i in range(n_funcs) for j in range(i + 1, n_funcs)
    ]

    def seminorm(n: int) -> float:
        a_n = a[n]
        terms = [_pair_integral(a_n, a_k, s) for k, a_k in enumerate(a) if k != n]
        return 2.0 / (math.pi * a_n ** 4) * ordered_sum(terms)

    hs = ordered_map(seminorm, range(n_funcs))
    q = C_ratio ** (2.0 * s - 2.0)
    bound = 2.0 ** (6.0 + 4.0 * s) * math.pi * q / (1.0 - q)
    separation = _separation_ratio(a)
    logger.info(f"ball family C={C_ratio} s={s}: max seminorm {max(hs):.6g} vs bound {bound:.6g}")
    return BallStudy(
        C_ratio=C_ratio, s=s, a_seq=a, f_norms_L2=norms, pair_dists=pairs,
        hs_seminorms=hs, analytic_bound=bound, min_separation_ratio=separation,
    )
