"""
Extension operators with norm-inflation measurement, and the Fourier trace/lift pair.

Extensions report the p-th powers of the L^p norm and of the Gagliardo
seminorm before and after the operation, so each component of the classical
estimates can be checked on its own:

- zero extension out of a compactly contained set, with the cross term
  between the domain and its complement;
- even reflection across x_n = 0, where the L^p power doubles and the
  seminorm power grows by at most a factor 4;
- multiplication by a Lipschitz cutoff, against 2^(p-1) ([u]^p + C ||u||^p).

The trace of a 2-D field is its row at x_2 = 0. The lift builds a 2-D field
whose transform is v_hat(xi_1) phi(xi_2 / lam) / lam with lam = sqrt(1 + xi_1^2),
so that restricting it gives back v.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from .catalog import AnalyticFunction
from .constants import sphere_measure
from .core import make_grid, resolve_function, sample
from .gagliardo import cross_term_p, gagliardo_seminorm_p, resolve_policy
from .models.domain import DomainKind, DomainSpec
from .models.grid import Grid, GridFunction
from .models.params import FracParams, QuadConfig
from .models.results import ExtensionOp, ExtensionReport, InequalityReport, Relation, TracePair
from .models.validation import (
    InvalidArgumentError,
    ParamValidator,
    PreconditionViolationError,
    TraceUndefinedError,
)
from .utils.fourier import frequency_axes, frequency_steps, unitary_fft, unitary_ifft

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-12
RESIDUAL_TOL = 1e-6
DEFAULT_BUMP = "exp(-1/(1-t^2)) on (-1,1), unit integral"

Profile = Callable[[np.ndarray], np.ndarray]


def _raw_bump(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    mass, _ = integrate.quad(lambda t: float(_raw_bump(np.array([t]))[0]), -1.0, 1.0, epsabs=0.0, epsrel=1e-13)
    return mass


def bump_profile(t) -> np.ndarray:
    """The default lifting profile exp(-1/(1-t^2)) on (-1, 1), scaled to unit integral."""
    return _raw_bump(t) / _bump_mass()


def _profile_value(bump: Profile, t: float) -> float:
    return float(np.asarray(bump(np.array([t])), dtype=float).ravel()[0])


def _check_profile(bump: Profile) -> None:
    mass, _ = integrate.quad(lambda t: _profile_value(bump, t), -1.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    outside = [_profile_value(bump, t) for t in (-1.5, -1.0, 1.0, 1.5)]
    if abs(mass - 1.0) > 1e-8 or any(v != 0.0 for v in outside):
        raise InvalidArgumentError(
            f"Lifting profile must be supported in [-1, 1] with unit integral, got mass {mass:.12g}"
        )


def lift_norm_factor(s: float, bump: Optional[Profile] = None) -> float:
    """integral (1 + t^2)^s |phi(t)|^2 dt, the H^s norm factor of the lift."""
    bump = bump or bump_profile
    value, _ = integrate.quad(
        lambda t: (1.0 + t * t) ** s * _profile_value(bump, t) ** 2, -1.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return value


def trace_constant(s: float) -> float:
    """
    integral over R of (1 + t^2)^(-s) dt, finite exactly when s > 1/2.

    Raises:
        TraceUndefinedError: s <= 1/2
    """
    if not s > 0.5:
        raise TraceUndefinedError(f"integral of (1+t^2)^(-s) diverges for s={s} <= 1/2")
    half_pi = 0.5 * math.pi

    # t = tan(theta); the endpoint singularity (pi/2 - theta)^(2s-2) goes into the weight.
    def ratio(theta):
        gap = half_pi - theta
        if gap <= 0.0:
            return 1.0
        return (math.cos(theta) / gap) ** (2.0 * s - 2.0)

    value, _ = integrate.quad(ratio, 0.0, half_pi, weight="alg", wvar=(0.0, 2.0 * s - 2.0),
                              epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * value


def _norms(u: GridFunction, params: FracParams, domain: Optional[DomainSpec], cfg: QuadConfig, policy):
    result = gagliardo_seminorm_p(u, params, domain, cfg, policy=policy)
    return result.lp_norm_p, result.seminorm_p


def _report(op: ExtensionOp, p: float, lp_in: float, semi_in: float, lp_out: float, semi_out: float,
            **extra) -> ExtensionReport:
    norm_in = (lp_in + semi_in) ** (1.0 / p)
    norm_out = (lp_out + semi_out) ** (1.0 / p)
    ratio = norm_out / norm_in if norm_in > 0.0 else 0.0
    return ExtensionReport(
        op=op, norm_in=norm_in, norm_out=norm_out, ratio=ratio,
        lp_power_in=lp_in, lp_power_out=lp_out,
        seminorm_power_in=semi_in, seminorm_power_out=semi_out,
        **extra,
    )


def _grid_domain(grid: Grid) -> DomainSpec:
    if grid.dim == 1:
        return DomainSpec.interval(grid.lo[0], grid.hi[0])
    return DomainSpec.box(grid.lo, grid.hi)


def _strictly_inside(K: DomainSpec, omega: DomainSpec) -> bool:
    klo, khi = K.bounding_box()
    olo, ohi = omega.bounding_box()
    if omega.kind in (DomainKind.INTERVAL, DomainKind.BOX):
        return bool(np.all(klo > olo) and np.all(khi < ohi))
    if omega.kind == DomainKind.BALL:
        corners = np.array(np.meshgrid(*zip(klo, khi), indexing="ij")).reshape(K.dim, -1).T
        dist = np.linalg.norm(corners - np.array(omega.center), axis=1)
        return bool(np.all(dist < omega.radius))
    return True


def zero_extend(
    u: GridFunction,
    K: DomainSpec,
    params: FracParams,
    cfg: Optional[QuadConfig] = None,
    domain: Optional[DomainSpec] = None,
) -> ExtensionReport:
    """
    Extend u from Omega to R^n by zero.

    Args:
        u: Samples on Omega
        K: Set compactly inside Omega carrying the support of u
        params: (n, s, p)
        cfg: Quadrature controls
        domain: Omega; defaults to the grid box

    Returns:
        ExtensionReport with the seminorm over Omega (in), over R^n (out), the
        cross term and the residual out - in - cross

    Raises:
        PreconditionViolationError: u does not vanish on Omega minus K, or K touches the boundary
    """
    cfg = cfg or QuadConfig()
    omega = domain or _grid_domain(u.grid)
    if not _strictly_inside(K, omega):
        raise PreconditionViolationError(f"{K.kind.value} set is not compactly contained in {omega.kind.value}")
    points = u.grid.points
    in_omega = omega.contains(points).reshape(u.grid.shape)
    in_k = K.contains(points).reshape(u.grid.shape)
    vals = np.abs(u.clean_values)
    peak = float(vals.max()) if vals.size else 0.0
    stray = vals[in_omega & ~in_k]
    if stray.size and float(stray.max()) > SUPPORT_TOL * peak:
        raise PreconditionViolationError(
            f"u is not zero outside K: max |u| = {float(stray.max()):.3e} on Omega minus K (peak {peak:.3e})"
        )
    policy = resolve_policy(u, omega, cfg.diag_policy)
    inner = gagliardo_seminorm_p(u, params, omega, cfg, policy=policy)
    outer = gagliardo_seminorm_p(u, params, omega, cfg, whole_space=True, policy=policy)
    cross = cross_term_p(u, params, omega, policy)
    residual = outer.seminorm_p - inner.seminorm_p - cross
    warnings = []
    scale = max(outer.seminorm_p, 1.0)
    if abs(residual) > RESIDUAL_TOL * scale:
        warnings.append("decomposition-residual")
        logger.warning(f"zero extension: out - in - cross = {residual:.3e} (out {outer.seminorm_p:.6g})")
    report = _report(
        ExtensionOp.ZERO_EXTEND, params.p,
        inner.lp_norm_p, inner.seminorm_p, inner.lp_norm_p, outer.seminorm_p,
        cross_term=cross, residual=residual, warnings=warnings,
    )
    ok = math.isfinite(report.norm_out) and (report.norm_in == 0.0 or report.ratio >= 1.0 - cfg.tol)
    logger.info(f"zero extension: ratio {report.ratio:.6g}, cross term {cross:.6g}")
    return report.model_copy(update={"ok": bool(ok)})


def _upper_half(grid: Grid) -> DomainSpec:
    lo = list(grid.lo)
    lo[-1] = 0.0
    if grid.dim == 1:
        return DomainSpec.interval(0.0, grid.hi[0])
    return DomainSpec.box(lo, grid.hi)


def reflect_extend(u: GridFunction, params: FracParams, cfg: Optional[QuadConfig] = None) -> ExtensionReport:
    """
    Even reflection u(x', x_n) -> u(x', |x_n|) across the hyperplane x_n = 0.

    u lives on a grid symmetric in the last coordinate; only the nodes with
    x_n >= 0 are read. The L^p power doubles exactly and the seminorm power may
    grow by at most a factor 4.

    Raises:
        InvalidArgumentError: Grid not symmetric in x_n or without a node at x_n = 0
    """
    cfg = cfg or QuadConfig()
    grid = u.grid
    axis = grid.dim - 1
    if abs(grid.lo[axis] + grid.hi[axis]) > 1e-12 * max(1.0, abs(grid.hi[axis])) or grid.zero_index(axis) is None:
        raise InvalidArgumentError(
            f"Reflection needs a grid symmetric in x_{grid.dim} with a node at 0, got "
            f"[{grid.lo[axis]}, {grid.hi[axis]}] with {grid.n_pts} points"
        )
    upper = _upper_half(grid)
    coord = grid.mesh()[axis]
    reflected_values = np.where(coord >= 0.0, u.values, np.flip(u.values, axis=axis))
    reflected_mask = None
    if u.mask is not None:
        reflected_mask = np.where(coord >= 0.0, u.mask, np.flip(u.mask, axis=axis))
    reflected = GridFunction(grid=grid, values=reflected_values, mask=reflected_mask)
    policy = resolve_policy(u, upper, cfg.diag_policy)
    lp_in, semi_in = _norms(u, params, upper, cfg, policy)
    lp_out, semi_out = _norms(reflected, params, None, cfg, policy)
    lp_ok = abs(lp_out - 2.0 * lp_in) <= 1e-10 * max(lp_out, 1e-300) or lp_out == lp_in == 0.0
    semi_ok = semi_out <= 4.0 * semi_in * (1.0 + cfg.tol) + 1e-14
    report = _report(ExtensionOp.REFLECT, params.p, lp_in, semi_in, lp_out, semi_out, bound=4.0)
    logger.info(f"reflection: L^p ratio {report.lp_ratio}, seminorm ratio {report.seminorm_ratio}")
    return report.model_copy(update={"ok": bool(lp_ok and semi_ok)})


def _lipschitz_estimate(psi: GridFunction) -> float:
    values = psi.clean_values
    best = 0.0
    for axis, h in enumerate(psi.grid.spacing):
        diff = np.abs(np.diff(values, axis=axis)) / h
        if diff.size:
            best = max(best, float(diff.max()))
    return best


def _split_kernel_1d(d: np.ndarray, lam: float, p: float, sp: float) -> np.ndarray:
    """integral_0^d min(lam t, 1)^p t^(-1-sp) dt, split at t = 1/lam."""
    knee = 1.0 / lam
    near = lam ** p * np.minimum(d, knee) ** (p - sp) / (p - sp)
    with np.errstate(divide="ignore"):
        far = np.where(d > knee, (knee ** (-sp) - np.power(np.maximum(d, knee), -sp)) / sp, 0.0)
    return near + far


def cutoff_constant(u: GridFunction, lam: float, params: FracParams, domain: Optional[DomainSpec] = None) -> float:
    """
    sup over y of integral_Omega min(lam |x - y|, 1)^p / |x - y|^(n+sp) dx.

    Exact on intervals (sup over the active nodes); in 2-D the integral over
    the whole plane, omega_1 lam^sp (1/(p - sp) + 1/sp), bounds it.
    """
    if lam <= 0.0:
        return 0.0
    p, sp = params.p, params.sp
    if params.p <= sp:
        raise InvalidArgumentError(f"Cutoff estimate needs p > s p, got p={p} sp={sp}")
    if u.grid.dim == 1:
        omega = domain or _grid_domain(u.grid)
        lo, hi = omega.bounding_box()
        y = u.grid.axes[0][u.active]
        if y.size == 0:
            return 0.0
        total = _split_kernel_1d(y - lo[0], lam, p, sp) + _split_kernel_1d(hi[0] - y, lam, p, sp)
        return float(total.max())
    return sphere_measure(params.n - 1) * lam ** sp * (1.0 / (p - sp) + 1.0 / sp)


def cutoff_multiply(
    u: GridFunction,
    psi: Union[AnalyticFunction, GridFunction, str],
    params: FracParams,
    lipschitz: Optional[float] = None,
    cfg: Optional[QuadConfig] = None,
    domain: Optional[DomainSpec] = None,
) -> ExtensionReport:
    """
    Multiply u by a cutoff psi with values in [0, 1] and Lipschitz constant lam.

    lam is taken from the argument, then from the catalog function, and is
    otherwise estimated from neighbour quotients of the samples.

    Raises:
        InvalidArgumentError: psi leaves [0, 1] or lam is not finite
    """
    cfg = cfg or QuadConfig()
    if isinstance(psi, GridFunction):
        psi_grid = psi
        func = None
    else:
        func = resolve_function(psi)
        psi_grid = sample(func, u.grid)
    weights = psi_grid.clean_values
    if weights.min() < -SUPPORT_TOL or weights.max() > 1.0 + SUPPORT_TOL:
        raise InvalidArgumentError(
            f"Cutoff must take values in [0, 1], got range [{weights.min():.6g}, {weights.max():.6g}]"
        )
    if lipschitz is not None:
        lam = float(lipschitz)
    elif func is not None and hasattr(func, "lipschitz"):
        lam = float(func.lipschitz)
    else:
        lam = _lipschitz_estimate(psi_grid)
        logger.debug(f"cutoff Lipschitz constant estimated from samples: {lam:.6g}")
    if not (math.isfinite(lam) and lam >= 0.0):
        raise InvalidArgumentError(f"Cutoff Lipschitz constant must be finite and >= 0, got {lam}")
    product = u.with_values(u.clean_values * np.clip(weights, 0.0, 1.0))
    policy = resolve_policy(u, domain, cfg.diag_policy)
    lp_in, semi_in = _norms(u, params, domain, cfg, policy)
    lp_out, semi_out = _norms(product, params, domain, cfg, policy)
    c_tilde = cutoff_constant(u, lam, params, domain)
    bound = 2.0 ** (params.p - 1.0) * (semi_in + c_tilde * lp_in)
    lp_ok = lp_out <= lp_in * (1.0 + 1e-12)
    semi_ok = semi_out <= bound * (1.0 + cfg.tol) + 1e-14
    report = _report(ExtensionOp.CUTOFF, params.p, lp_in, semi_in, lp_out, semi_out, bound=bound)
    logger.info(f"cutoff lam={lam:.6g}: seminorm power {semi_out:.6g} vs bound {bound:.6g}")
    return report.model_copy(update={"ok": bool(lp_ok and semi_ok)})


def _hyperplane_grid(grid: Grid) -> Grid:
    return make_grid(grid.lo[0], grid.hi[0], grid.n_pts)


def trace_restrict(u2d: GridFunction) -> TracePair:
    """
    Restrict a 2-D field to the line x_2 = 0 and check the Fourier restriction identity.

    Under the unitary transform, (2 pi)^(-1/2) * sum over xi_2 of u_hat * d xi_2
    reproduces v_hat; the residual is reported relative to max |v_hat|.

    Raises:
        InvalidArgumentError: Not a 2-D grid, or no grid row at x_2 = 0
    """
    grid = u2d.grid
    if grid.dim != 2:
        raise InvalidArgumentError(f"trace_restrict needs a 2-D field, got dimension {grid.dim}")
    j0 = grid.zero_index(1)
    if j0 is None:
        raise InvalidArgumentError(f"Grid has no row at x_2 = 0 (x_2 in [{grid.lo[1]}, {grid.hi[1]}])")
    values = u2d.clean_values
    line = _hyperplane_grid(grid)
    v = GridFunction(grid=line, values=values[:, j0])
    uhat = unitary_fft(values, grid)
    collapsed = uhat.sum(axis=1) * frequency_steps(grid)[1] / math.sqrt(2.0 * math.pi)
    vhat = unitary_fft(v.values, line)
    scale = float(np.max(np.abs(vhat))) if vhat.size else 0.0
    residual = float(np.max(np.abs(collapsed - vhat))) / scale if scale > 0.0 else 0.0
    logger.debug(f"trace restriction identity residual {residual:.3e}")
    return TracePair(u2d=u2d, v=v, identity_residual=residual)


def trace_lift(
    v: GridFunction,
    s: float,
    bump: Optional[Profile] = None,
    x2_half_width: Optional[float] = None,
) -> TracePair:
    """
    Lift a 1-D function to a 2-D field whose trace on x_2 = 0 is v.

    Args:
        v: Samples on a 1-D grid with an odd number of points
        s: Order of the target space H^s, s > 1/2
        bump: Profile phi supported in [-1, 1] with unit integral
        x2_half_width: Half-width L of the x_2 range [-L, L]; defaults to half the x_1 box

    Returns:
        TracePair with the lifted field, v, and the norm factor integral (1+t^2)^s phi^2

    Raises:
        TraceUndefinedError: s <= 1/2
        InvalidArgumentError: v not 1-D, or an even number of points
    """
    if not s > 0.5:
        raise TraceUndefinedError(f"H^s functions have no trace for s={s} <= 1/2")
    if v.grid.dim != 1:
        raise InvalidArgumentError(f"trace_lift needs a 1-D function, got dimension {v.grid.dim}")
    n_pts = v.grid.n_pts
    if n_pts % 2 == 0:
        raise InvalidArgumentError(f"trace_lift needs an odd number of points for a row at x_2 = 0, got {n_pts}")
    if bump is not None:
        _check_profile(bump)
    profile = bump or bump_profile
    half = x2_half_width or 0.5 * (v.grid.hi[0] - v.grid.lo[0])
    ParamValidator.require_positive(half, "x2_half_width")
    grid = make_grid((v.grid.lo[0], -half), (v.grid.hi[0], half), n_pts)

    vhat = unitary_fft(v.clean_values, v.grid)
    xi1, xi2 = frequency_axes(grid)
    dxi2 = frequency_steps(grid)[1]
    lam = np.sqrt(1.0 + xi1 ** 2)[:, None]
    shape = np.asarray(profile(np.ravel(xi2[None, :] / lam)), dtype=float).reshape(lam.shape[0], xi2.size)
    mass = shape.sum(axis=1, keepdims=True) * dxi2 / lam
    uhat = math.sqrt(2.0 * math.pi) * vhat[:, None] * shape / (lam * mass)
    field = GridFunction(grid=grid, values=np.real(unitary_ifft(uhat, grid)))
    name = DEFAULT_BUMP if bump is None else getattr(bump, "__name__", "custom profile")
    logger.info(f"trace lift s={s}: {n_pts}x{n_pts} field on x_2 in [{-half}, {half}]")
    return TracePair(
        u2d=field, v=v, s=s, bump=name,
        norm_factor=lift_norm_factor(s, profile),
    )


def sobolev_norm_sq(u: GridFunction, s: float) -> float:
    """Discrete H^s norm squared, sum (1 + |xi|^2)^s |u_hat|^2 (d xi)^n."""
    uhat = unitary_fft(u.clean_values, u.grid)
    mesh = np.meshgrid(*frequency_axes(u.grid), indexing="ij")
    weight = (1.0 + sum(k ** 2 for k in mesh)) ** s
    return float(np.sum(weight * np.abs(uhat) ** 2)) * float(np.prod(frequency_steps(u.grid)))


def _discrete_trace_constant(grid: Grid, s: float) -> float:
    xi1, xi2 = frequency_axes(grid)
    dxi2 = frequency_steps(grid)[1]
    a2 = 1.0 + xi1[:, None] ** 2
    sums = np.sum((a2 + xi2[None, :] ** 2) ** (-s), axis=1) * dxi2
    return float(np.max(sums * a2[:, 0] ** (s - 0.5)) / (2.0 * math.pi))


def trace_inequality_check(u2d: GridFunction, s: float) -> InequalityReport:
    """
    ||v||_{H^(s-1/2)} <= (C(s) / (2 pi))^(1/2) ||u||_{H^s} for the trace v of u.

    C(s) is trace_constant(s). The note carries the constant of the discrete
    Cauchy-Schwarz step on this grid, which is the sharp one for the samples.
    """
    constant_sq = trace_constant(s) / (2.0 * math.pi)
    pair = trace_restrict(u2d)
    lhs = math.sqrt(sobolev_norm_sq(pair.v, s - 0.5))
    rhs = math.sqrt(sobolev_norm_sq(u2d, s))
    discrete = _discrete_trace_constant(u2d.grid, s)
    note = f"discrete constant {math.sqrt(discrete):.6g}"
    return InequalityReport.build(
        lhs=lhs, rhs=rhs, constant=math.sqrt(constant_sq), relation=Relation.LE,
        ratio=lhs / rhs if rhs > 0.0 else None, note=note,
    )
