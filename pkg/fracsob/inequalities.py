"""
Quantitative checks of the Sobolev and Hoelder inequalities.

Inequalities with an explicit constant are asserted with it. For the level-set
bound and the Sobolev inequality the constant is implicit, so only positivity
and invariance under dilation are asserted and the empirical ratio is reported.
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from .catalog import Linear
from .constants import ball_volume, sphere_measure
from .core import dilate, sample
from .gagliardo import gagliardo_seminorm_p
from .models.domain import DomainKind, DomainSpec
from .models.grid import GridFunction
from .models.params import FracParams, QuadConfig
from .models.results import CampanatoProfile, InequalityReport, LevelProfile, Relation
from .models.validation import InvalidArgumentError, ParamValidator, UnsupportedDomainError
from .utils.parallel import ordered_map, ordered_sum
from .utils.quadrature import complement_cell_integral_1d, complement_kernel_1d, complement_kernel_2d

logger = logging.getLogger(__name__)

JACOBI_NODES = 24
SET_ANGLES = 64
KERNEL_ANGLES = 512
MAX_CENTERS = 512
MAX_HOLDER_POINTS = {1: 4096, 2: 2048}
DILATIONS = (0.5, 1.0, 2.0)
DILATION_TOL = 1e-3
DIVERGENCE_GROWTH = 0.10


def set_constant(params: FracParams) -> float:
    """omega_{n-1} * varpi_n^(sp/n) / (sp), with equality for a ball centered at x."""
    n, sp = params.n, params.sp
    return sphere_measure(n - 1) * ball_volume(n) ** (sp / n) / sp


def _check_set(E: DomainSpec, params: FracParams) -> None:
    ParamValidator.require_dimension(params.n, allowed=(1, 2))
    if E.dim != params.n:
        raise InvalidArgumentError(f"Set dimension {E.dim} does not match n={params.n}")
    if not E.bounded:
        raise InvalidArgumentError(f"Set {E.kind.value} is unbounded; its measure must be finite")


def complement_kernel(E: DomainSpec, x, sigma: float) -> np.ndarray:
    """integral over the complement of E of |x - y|^(-n-sigma) dy, for points x."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if E.dim == 1:
        return complement_kernel_1d(pts.reshape(-1), E.intervals_1d(), sigma)
    return complement_kernel_2d(pts.reshape(-1, 2), E, sigma, n_angles=KERNEL_ANGLES)


def set_lower_bound(
    E: DomainSpec,
    x,
    params: FracParams,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """
    integral over the complement of E of |x - y|^(-n-sp) dy >= C |E|^(-sp/n).

    Args:
        E: Bounded set (interval, box, ball or union of disjoint balls)
        x: Point in R^n
        params: (n, s, p); only sp enters
        cfg: Quadrature controls (tolerance)

    Returns:
        InequalityReport with lhs the kernel integral and rhs |E|^(-sp/n)

    Raises:
        InvalidArgumentError: Unbounded set or dimension mismatch
    """
    _check_set(E, params)
    cfg = cfg or QuadConfig()
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.size != params.n:
        raise InvalidArgumentError(f"Point {point.tolist()} does not have dimension {params.n}")
    lhs = float(complement_kernel(E, point[None, :], params.sp)[0])
    rhs = E.measure ** (-params.sp / params.n)
    constant = set_constant(params)
    logger.debug(f"set bound at {point.tolist()}: kernel {lhs:.12g}, ball value {constant * rhs:.12g}")
    return InequalityReport.build(
        lhs=lhs, rhs=rhs, constant=constant, relation=Relation.GE, tol=cfg.tol,
        ratio=lhs / (constant * rhs), note="equality for the ball of the same measure centered at x",
    )


def _ball_interaction(E: DomainSpec, ball: DomainSpec, sigma: float) -> float:
    """integral over one ball of the complement kernel of E, Gauss-Jacobi in the radius."""
    t, w = special.roots_jacobi(JACOBI_NODES, -sigma, 1.0)
    theta = 2.0 * np.pi * np.arange(SET_ANGLES) / SET_ANGLES
    r = ball.radius
    rho = 0.5 * r * (1.0 + t)
    center = np.asarray(ball.center, dtype=float)
    pts = center[None, None, :] + rho[:, None, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)[None, :, :]
    kappa = complement_kernel_2d(pts.reshape(-1, 2), E, sigma, n_angles=KERNEL_ANGLES).reshape(rho.size, theta.size)
    radial = np.sum(kappa, axis=1) * (2.0 * np.pi / SET_ANGLES) * (1.0 - t) ** sigma
    return 0.25 * r * r * float(np.dot(w, radial))


def set_sobolev_check(
    E: DomainSpec,
    params: FracParams,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """
    integral_E integral_{complement} |x - y|^(-n-sp) >= C |E|^((n - sp)/n).

    The pointwise set bound integrated over E. Exact in 1-D; in 2-D each ball
    component is integrated with Gauss-Jacobi nodes absorbing the boundary
    singularity. For sp >= 1 the left side is infinite.

    Raises:
        InvalidArgumentError: Unbounded set
        UnsupportedDomainError: 2-D sets other than balls or unions of balls
    """
    _check_set(E, params)
    cfg = cfg or QuadConfig()
    sp = params.sp
    if E.dim == 1:
        pieces = E.intervals_1d()
        lefts = np.array([a for a, _ in pieces])
        rights = np.array([b for _, b in pieces])
        lhs = float(np.sum(complement_cell_integral_1d(lefts, rights, pieces, sp)))
    elif sp >= 1.0:
        lhs = math.inf
    else:
        if E.kind not in (DomainKind.BALL, DomainKind.BALL_UNION):
            raise UnsupportedDomainError(f"2-D set integrals support balls and ball unions, got {E.kind.value}")
        lhs = ordered_sum(ordered_map(lambda ball: _ball_interaction(E, ball, sp), E.components()))
    rhs = E.measure ** ((params.n - sp) / params.n)
    constant = set_constant(params)
    return InequalityReport.build(
        lhs=lhs, rhs=rhs, constant=constant, relation=Relation.GE, tol=cfg.tol,
        ratio=lhs / (constant * rhs) if math.isfinite(lhs) else None,
        note="set bound integrated over E",
    )


def _check_sequence(a: Sequence[float]) -> np.ndarray:
    arr = np.asarray(list(a), dtype=float)
    if arr.size == 0:
        raise InvalidArgumentError("Sequence must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("Sequence entries must be finite")
    if np.any(arr < 0.0):
        raise InvalidArgumentError("Sequence entries must be non-negative")
    if np.any(np.diff(arr) > 0.0):
        k = int(np.argmax(np.diff(arr) > 0.0))
        raise InvalidArgumentError(f"Sequence must be non-increasing: a[{k}]={arr[k]} < a[{k + 1}]={arr[k + 1]}")
    return arr


def sequence_sums(
    a: Sequence[float],
    params: FracParams,
    T: float,
    k0: int = 0,
    left_terms: Optional[int] = None,
):
    """
    X = sum a_k^((n-sp)/n) T^k and Y = sum over a_k != 0 of a_{k+1} a_k^(-sp/n) T^k.

    a[i] is a_(k0+i); the sequence is zero after its last entry and equal to
    a[0] for k < k0, either for all such k (summed in closed form) or for
    ``left_terms`` of them.
    """
    arr = _check_sequence(a)
    ParamValidator.require_subcritical(params.n, params.sp)
    if not (T > 1.0 and math.isfinite(T)):
        raise InvalidArgumentError(f"T={T} must be finite and > 1")
    theta = (params.n - params.sp) / params.n
    sigma = params.sp / params.n
    k = k0 + np.arange(arr.size)
    powers = np.power(float(T), k.astype(float))
    x_terms = np.power(arr, theta) * powers
    nxt = np.append(arr[1:], 0.0)
    nz = arr > 0.0
    y_terms = np.where(nz, nxt * np.power(np.where(nz, arr, 1.0), -sigma), 0.0) * powers
    if left_terms is None:
        geometric = T ** k0 / (T - 1.0)
    else:
        if left_terms < 0:
            raise InvalidArgumentError(f"left_terms={left_terms} must be >= 0")
        geometric = T ** k0 * (1.0 - T ** (-left_terms)) / (T - 1.0)
    left = arr[0] ** theta * geometric
    X = math.fsum(x_terms) + left
    Y = math.fsum(y_terms) + left
    return X, Y


def sequence_inequality_check(
    a: Sequence[float],
    params: FracParams,
    T: float,
    k0: int = 0,
    left_terms: Optional[int] = None,
    tol: float = 1e-9,
) -> InequalityReport:
    """
    sum a_k^((n-sp)/n) T^k <= T^(n/(n-sp)) * sum over a_k != 0 of a_{k+1} a_k^(-sp/n) T^k.

    Raises:
        WrongRegimeError: sp >= n
        InvalidArgumentError: Negative, increasing or non-finite entries, or T <= 1
    """
    X, Y = sequence_sums(a, params, T, k0, left_terms)
    constant = T ** (params.n / (params.n - params.sp))
    note = "left extension summed in closed form" if left_terms is None else f"left extension truncated to {left_terms} terms"
    return InequalityReport.build(lhs=X, rhs=Y, constant=constant, relation=Relation.LE, tol=tol, note=note)


def level_profile(f: GridFunction) -> LevelProfile:
    """
    Measures a_k = |{|f| > 2^k}| and d_k = a_k - a_{k+1} by cell counting.

    Cell volumes are counted in integer units of prod(h)/2^n (boundary cells are
    halves or quarters), so a_k = sum over l >= k of d_l holds exactly.
    """
    grid = f.grid
    unit = float(np.prod(grid.spacing)) / 2 ** grid.dim
    units = np.rint(grid.cell_volumes / unit).astype(np.int64)
    vals = np.abs(f.clean_values)
    positive = vals[vals > 0.0]
    if positive.size == 0:
        return LevelProfile(thresholds=[], a_k=[], d_k=[], a_units=[], unit_volume=unit)
    k_min = int(math.floor(math.log2(float(positive.min())))) - 1
    k_max = int(math.floor(math.log2(float(positive.max())))) + 1
    thresholds = list(range(k_min, k_max + 1))
    a_units = [int(units[vals > 2.0 ** k].sum()) for k in thresholds]
    d_units = [a - b for a, b in zip(a_units, a_units[1:] + [0])]
    return LevelProfile(
        thresholds=thresholds,
        a_k=[a * unit for a in a_units],
        d_k=[d * unit for d in d_units],
        a_units=a_units,
        unit_volume=unit,
    )


def _level_sum(profile: LevelProfile, params: FracParams) -> float:
    """sum over a_k != 0 of a_{k+1} a_k^(-sp/n) 2^(pk), including the constant tail below the first threshold."""
    if not profile.thresholds:
        return 0.0
    sigma = params.sp / params.n
    p = params.p
    terms = []
    for k in profile.thresholds:
        a = profile.measure(k)
        if a > 0.0:
            terms.append(profile.measure(k + 1) * a ** (-sigma) * 2.0 ** (p * k))
    first = profile.a_k[0]
    if first > 0.0:
        terms.append(first ** (1.0 - sigma) * 2.0 ** (p * profile.thresholds[0]) / (2.0 ** p - 1.0))
    return math.fsum(terms)


def _positive_pair(lhs: float, rhs: float, note: str) -> InequalityReport:
    both_zero = lhs == 0.0 and rhs == 0.0
    positive = lhs > 0.0 and rhs > 0.0 and math.isfinite(lhs) and math.isfinite(rhs)
    ratio = lhs / rhs if positive else None
    return InequalityReport(
        lhs=lhs, rhs=rhs, constant_used=None, relation=Relation.GE,
        margin=min(lhs, rhs), ok=bool(both_zero or positive), ratio=ratio,
        note=note if not both_zero else "degenerate: f = 0",
    )


def levelset_seminorm_bound(
    f: GridFunction,
    params: FracParams,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """
    Whole-space seminorm power against sum a_{k+1} a_k^(-sp/n) 2^(pk).

    The constant relating the two is not explicit, so ok means both sides are
    positive and finite (or both vanish); the ratio is the empirical constant.

    Raises:
        WrongRegimeError: sp >= n
    """
    ParamValidator.require_subcritical(params.n, params.sp)
    lhs = gagliardo_seminorm_p(f, params, cfg=cfg, whole_space=True).seminorm_p
    rhs = _level_sum(level_profile(f), params)
    report = _positive_pair(lhs, rhs, "constant not explicit; ratio is the empirical constant")
    logger.info(f"level-set bound: seminorm {lhs:.6g}, level sum {rhs:.6g}, ratio {report.ratio}")
    return report


def critical_norm_p(f: GridFunction, params: FracParams) -> float:
    """||f||_{p*}^p with p* = np/(n - sp)."""
    p_star = params.p_star
    return f.lp_norm_p(p_star) ** (params.p / p_star)


def sobolev_ratio(
    f: GridFunction,
    params: FracParams,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """
    ||f||_{p*}^p against the whole-space seminorm power [f]^p.

    The ratio [f]^p / ||f||_{p*}^p is reported; it is positive and does not
    change under dilation. f = 0 is reported as degenerate and passes.

    Raises:
        WrongRegimeError: sp >= n
    """
    ParamValidator.require_subcritical(params.n, params.sp)
    lhs = critical_norm_p(f, params)
    rhs = gagliardo_seminorm_p(f, params, cfg=cfg, whole_space=True).seminorm_p
    if lhs == 0.0 and rhs == 0.0:
        return InequalityReport(
            lhs=0.0, rhs=0.0, constant_used=None, relation=Relation.LE,
            margin=0.0, ok=True, ratio=None, note="degenerate",
        )
    ratio = rhs / lhs if lhs > 0.0 else math.inf
    ok = lhs > 0.0 and rhs > 0.0 and math.isfinite(ratio)
    logger.info(f"Sobolev ratio n={params.n} s={params.s} p={params.p}: {ratio:.6g}")
    return InequalityReport(
        lhs=lhs, rhs=rhs, constant_used=None, relation=Relation.LE,
        margin=rhs, ok=bool(ok), ratio=ratio, note="seminorm power / critical norm power",
    )


def _dilation_report(
    check: Callable[[GridFunction], InequalityReport],
    f: GridFunction,
    lambdas: Sequence[float],
    label: str,
) -> InequalityReport:
    ratios = [check(dilate(f, lam)).ratio for lam in lambdas]
    if any(r is None for r in ratios):
        return InequalityReport(
            lhs=0.0, rhs=0.0, relation=Relation.LE, margin=0.0, ok=True, note=f"{label}: degenerate",
        )
    hi, lo = max(ratios), min(ratios)
    spread = (hi - lo) / hi
    return InequalityReport(
        lhs=hi, rhs=lo, constant_used=None, relation=Relation.LE,
        margin=DILATION_TOL - spread, ok=bool(spread < DILATION_TOL), ratio=spread,
        note=f"{label}: relative spread of the ratio over dilations {list(lambdas)}",
    )


def sobolev_ratio_dilation(
    f: GridFunction,
    params: FracParams,
    lambdas: Sequence[float] = DILATIONS,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """Relative spread of sobolev_ratio over the dilations f(x / lam)."""
    return _dilation_report(lambda g: sobolev_ratio(g, params, cfg), f, lambdas, "sobolev ratio")


def levelset_dilation(
    f: GridFunction,
    params: FracParams,
    lambdas: Sequence[float] = DILATIONS,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """Relative spread of the level-set ratio over the dilations f(x / lam)."""
    return _dilation_report(lambda g: levelset_seminorm_bound(g, params, cfg), f, lambdas, "level-set ratio")


def sobolev_level_chain(f: GridFunction, params: FracParams, tol: float = 1e-9) -> InequalityReport:
    """
    ||f||_{p*}^p <= 2^p * sum_k 2^(kp) a_k^((n-sp)/n).

    Bounding |f| by 2^(k+1) on each dyadic layer and using subadditivity of
    t -> t^(p/p*) gives this chain for any bounded f, so it is asserted.

    Raises:
        WrongRegimeError: sp >= n
    """
    ParamValidator.require_subcritical(params.n, params.sp)
    profile = level_profile(f)
    theta = (params.n - params.sp) / params.n
    p = params.p
    terms = [2.0 ** (k * p) * a ** theta for k, a in zip(profile.thresholds, profile.a_k) if a > 0.0]
    if profile.thresholds and profile.a_k[0] > 0.0:
        terms.append(profile.a_k[0] ** theta * 2.0 ** (p * profile.thresholds[0]) / (2.0 ** p - 1.0))
    rhs = math.fsum(terms)
    lhs = critical_norm_p(f, params)
    return InequalityReport.build(
        lhs=lhs, rhs=rhs, constant=2.0 ** p, relation=Relation.LE, tol=tol, note="dyadic layer chain",
    )


def _ladder_domain(f: GridFunction, domain: Optional[DomainSpec]) -> DomainSpec:
    grid = f.grid
    if domain is None:
        if grid.dim == 1:
            return DomainSpec.interval(grid.lo[0], grid.hi[0])
        return DomainSpec.box(grid.lo, grid.hi)
    if domain.kind in (DomainKind.CUSP_HEART, DomainKind.BALL_UNION):
        raise UnsupportedDomainError(
            f"Campanato estimates need a domain without external cusps (interval, box or ball), got {domain.kind.value}"
        )
    if domain.dim != grid.dim:
        raise InvalidArgumentError(f"Domain dimension {domain.dim} does not match grid dimension {grid.dim}")
    return domain


def _centers(points: np.ndarray, limit: int) -> np.ndarray:
    if points.shape[0] <= limit:
        return points
    idx = np.linspace(0, points.shape[0] - 1, limit).round().astype(int)
    return points[np.unique(idx)]


def campanato_profile(
    f: GridFunction,
    params: FracParams,
    domain: Optional[DomainSpec] = None,
    radii: Optional[Sequence[float]] = None,
    cfg: Optional[QuadConfig] = None,
) -> CampanatoProfile:
    """
    sup over centers x0 of rho^(-sp) * integral over B_rho(x0) cap Omega of |f - mean|^p, per radius.

    Centers are grid nodes (at most 512, evenly strided); the default radii are
    diam * 2^-j for j = 1 .. refine + 4. The divergence flag is raised when the
    per-radius supremum grows by more than 10% at each of the last two radii.

    Raises:
        UnsupportedDomainError: Domains with external cusps, or unions of balls
        InvalidArgumentError: Radii outside (0, diam)
    """
    cfg = cfg or QuadConfig()
    omega = _ladder_domain(f, domain)
    diam = omega.diameter
    if radii is None:
        radii = [diam * 2.0 ** (-j) for j in range(1, cfg.refine + 5)]
    radii = sorted((float(r) for r in ParamValidator.require_non_empty(radii, "radii")), reverse=True)
    if radii[-1] <= 0.0 or radii[0] >= diam:
        raise InvalidArgumentError(f"Radii must lie in (0, {diam:g}), got {radii}")
    points = f.grid.points
    inside = f.active.ravel() & omega.contains(points)
    pts = points[inside]
    vals = f.values.ravel()[inside]
    vol = f.grid.cell_volumes.ravel()[inside]
    centers = _centers(pts, MAX_CENTERS)
    p = params.p

    def radius_sup(rho: float) -> float:
        best = 0.0
        for x0 in centers:
            near = np.linalg.norm(pts - x0[None, :], axis=1) < rho
            w = vol[near]
            mass = float(w.sum())
            if mass <= 0.0:
                continue
            fv = vals[near]
            mean = float(np.dot(w, fv)) / mass
            best = max(best, float(np.dot(w, np.abs(fv - mean) ** p)))
        return best * rho ** (-params.sp)

    sups = ordered_map(radius_sup, radii)
    suspected = len(sups) >= 3 and all(
        b > (1.0 + DIVERGENCE_GROWTH) * a > 0.0 for a, b in zip(sups[-3:-1], sups[-2:])
    )
    if suspected:
        logger.warning(f"divergence-suspected: Campanato suprema {sups} keep growing as the radius shrinks")
    value = max(sups) ** (1.0 / p) if sups else 0.0
    return CampanatoProfile(radii=radii, sups=sups, value=value, divergence_suspected=suspected)


def campanato_seminorm(
    f: GridFunction,
    params: FracParams,
    domain: Optional[DomainSpec] = None,
    radii: Optional[Sequence[float]] = None,
    cfg: Optional[QuadConfig] = None,
) -> float:
    """Sampled Campanato seminorm; a lower bound of the supremum over all centers and radii."""
    return campanato_profile(f, params, domain, radii, cfg).value


def holder_quotient(f: GridFunction, alpha: float, domain: Optional[DomainSpec] = None) -> float:
    """sup over distinct nodes of |f_i - f_j| / |x_i - x_j|^alpha (2-D grids are subsampled)."""
    points = f.grid.points
    inside = f.active.ravel()
    if domain is not None:
        inside &= domain.contains(points)
    pts = points[inside]
    vals = f.values.ravel()[inside]
    limit = MAX_HOLDER_POINTS.get(f.grid.dim, 2048)
    if pts.shape[0] > limit:
        idx = np.unique(np.linspace(0, pts.shape[0] - 1, limit).round().astype(int))
        pts, vals = pts[idx], vals[idx]
    best = 0.0
    for i in range(pts.shape[0] - 1):
        dist = np.linalg.norm(pts[i + 1:] - pts[i][None, :], axis=1)
        quot = np.abs(vals[i + 1:] - vals[i]) / dist ** alpha
        if quot.size:
            best = max(best, float(quot.max()))
    return best


def _calibration(f: GridFunction, domain: Optional[DomainSpec]) -> GridFunction:
    slope = 1.0 if f.grid.dim == 1 else (1.0, 0.0)
    return sample(Linear(slope=slope), f.grid, domain)


def holder_check(
    f: GridFunction,
    params: FracParams,
    domain: Optional[DomainSpec] = None,
    cfg: Optional[QuadConfig] = None,
) -> InequalityReport:
    """
    |f(x) - f(y)| <= C [f]_{p,sp} |x - y|^alpha with alpha = (sp - n)/p.

    The constant depends on the domain, so it is pinned on the calibration
    function x (or x_1) on the same grid, and the check asserts the quotient
    against twice the pin. The report ratio is the Hoelder norm over the
    W^{s,p} norm.

    Raises:
        WrongRegimeError: sp <= n
        UnsupportedDomainError: Domain other than an interval or a box
    """
    ParamValidator.require_supercritical(params.n, params.sp)
    if domain is not None and domain.kind not in (DomainKind.INTERVAL, DomainKind.BOX):
        raise UnsupportedDomainError(f"holder_check samples interval and box domains, got {domain.kind.value}")
    cfg = cfg or QuadConfig()
    alpha = params.alpha
    calibration = _calibration(f, domain)
    pin = holder_quotient(calibration, alpha, domain) / campanato_seminorm(calibration, params, domain, cfg=cfg)
    lhs = holder_quotient(f, alpha, domain)
    rhs = campanato_seminorm(f, params, domain, cfg=cfg)
    sobolev = gagliardo_seminorm_p(f, params, domain, cfg)
    norm = sobolev.full_norm_p ** (1.0 / params.p)
    sup = f.sup_norm()
    ratio = (lhs + sup) / norm if norm > 0.0 else None
    logger.info(f"Hoelder alpha={alpha:.4g}: quotient {lhs:.6g}, Campanato {rhs:.6g}, pin {pin:.6g}")
    return InequalityReport.build(
        lhs=lhs, rhs=rhs, constant=2.0 * pin, relation=Relation.LE, tol=cfg.tol, ratio=ratio,
        note=f"calibration pin {pin:.6g} from the linear function; sup|f| = {sup:.6g}",
    )
