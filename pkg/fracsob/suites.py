"""
Acceptance bundles run by ``fracsob suite``.

Every check returns one ReportRecord. The inputs of a record carry the grid
sizes, boxes and tolerances it ran with, so a report is self-describing.
Randomized checks draw from numpy's default generator seeded with ``seed``.
"""

import logging
import math
import time
from typing import Callable, Dict, List, Sequence

import numpy as np

from .catalog import Gaussian, Indicator, Linear
from .constants import b_const, c_const, e_integral, limit_targets
from .core import make_config, make_grid, make_params, sample
from .counterexamples import ball_family_study, cusp_control_study, cusp_divergence_study
from .exttrace import reflect_extend, trace_constant, trace_lift, trace_restrict
from .fraclap import (
    flap_pv,
    flap_quotient,
    flap_spectral,
    half_laplacian_norm,
    operator_limit_scan,
    plancherel_seminorm,
)
from .gagliardo import gagliardo_seminorm_p, limit_scan
from .inequalities import (
    holder_check,
    holder_quotient,
    sequence_inequality_check,
    set_lower_bound,
    sobolev_ratio,
    sobolev_ratio_dilation,
)
from .models.domain import DomainSpec
from .models.params import DiagPolicy, LimitMode
from .models.report import ReportRecord
from .models.validation import InvalidArgumentError

logger = logging.getLogger(__name__)

Check = Callable[[int], ReportRecord]

# Settings of the three-definition comparison: (box half-width, points per axis, evaluation points).
EQUIVALENCE_GRIDS = {
    1: (512.0, 16385, ((0.0,), (1.0,))),
    2: (64.0, 513, ((0.0, 0.0), (1.25, 0.0))),
}
EQUIVALENCE_ORDERS = (0.25, 0.5, 0.75)
EQUIVALENCE_CONFIG = dict(eps_pv=1e-4, tol=1e-6)


def _rel(computed: float, oracle: float) -> float:
    if oracle == 0.0:
        return abs(computed)
    return abs(computed - oracle) / abs(oracle)


def _disagreement(values: Sequence[float]) -> float:
    """Largest relative pairwise difference."""
    worst = 0.0
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            scale = max(abs(a), abs(b))
            if scale > 0.0:
                worst = max(worst, abs(a - b) / scale)
    return worst


def check_constant_asymptotics(seed: int = 0) -> ReportRecord:
    """C(n,s) / (s(1-s)) at s = 0.99 and 0.01 against 4n/omega_{n-1} and 2/omega_{n-1}."""
    computed, oracle = [], []
    for n in (1, 2, 3):
        high, low = limit_targets(n)
        for s, target in ((0.99, high), (0.01, low)):
            computed.append(c_const(n, s) / (s * (1.0 - s)))
            oracle.append(target)
    errors = [_rel(c, o) for c, o in zip(computed, oracle)]
    return ReportRecord(
        experiment="constant-asymptotics",
        inputs={"n": "1|2|3", "s": "0.99|0.01", "tol": 0.02},
        computed=computed, oracle=oracle, rel_err=max(errors), ok=max(errors) <= 0.02,
    )


def check_b_endpoints(seed: int = 0) -> ReportRecord:
    computed = [b_const(0.999), b_const(0.001), b_const(0.5)]
    oracle = [0.5, 1.0, 0.25 * math.pi]
    errors = [_rel(c, o) for c, o in zip(computed, oracle)]
    ok = errors[0] <= 0.01 and errors[1] <= 0.01 and abs(computed[2] - oracle[2]) <= 1e-4
    return ReportRecord(
        experiment="b-endpoints",
        inputs={"s": "0.999|0.001|0.5", "tol": 0.01, "tol_mid": 1e-4},
        computed=computed, oracle=oracle, rel_err=max(errors), ok=ok,
    )


def check_e_recursion(seed: int = 0) -> ReportRecord:
    """E_n(theta) = theta/(n-1) E_{n+2}(theta+2) on a sample set, and the closed-form bases."""
    worst = 0.0
    for n in (2, 3, 4):
        for theta in (n - 0.5, float(n), n + 1.0, n + 2.5):
            base = e_integral(n, theta)
            shifted = theta / (n - 1) * e_integral(n + 2, theta + 2.0)
            worst = max(worst, abs(base - shifted) / base)
    bases = [e_integral(2, 4.0), e_integral(2, 2.0), e_integral(3, 3.0)]
    targets = [0.25 * math.pi, 0.5 * math.pi, 1.0]
    base_err = max(abs(b - t) for b, t in zip(bases, targets))
    return ReportRecord(
        experiment="e-recursion",
        inputs={"n": "2|3|4", "tol_recursion": 1e-6, "tol_closed_form": 1e-8},
        computed=[worst] + bases, oracle=[0.0] + targets,
        rel_err=max(worst, base_err), ok=worst <= 1e-6 and base_err <= 1e-8,
    )


def check_bbm_limit(seed: int = 0) -> ReportRecord:
    """(1-s)[x]^2 over (0,1) against 1/(3-2s)."""
    s_list = (0.5, 0.9, 0.99)
    grid = make_grid(0.0, 1.0, 4096)
    u = sample(Linear(), grid)
    points = limit_scan(u, 2.0, LimitMode.BBM, s_list)
    computed = [pt.scaled_value for pt in points]
    oracle = [1.0 / (3.0 - 2.0 * s) for s in s_list]
    errors = [_rel(c, o) for c, o in zip(computed, oracle)]
    return ReportRecord(
        experiment="bbm-limit",
        inputs={"func": "linear", "grid": 4096, "box": "0|1", "p": 2.0, "s": "0.5|0.9|0.99", "tol": 0.01},
        computed=computed, oracle=oracle, rel_err=max(errors), ok=max(errors) <= 0.01,
    )


def check_ms_limit(seed: int = 0) -> ReportRecord:
    """s [chi_(0,1)]^2 over the line against 2/(1-2s)."""
    s_list = (0.01, 0.1)
    grid = make_grid(0.0, 1.0, 257)
    u = sample(Indicator(a=0.0, b=1.0), grid)
    points = limit_scan(u, 2.0, LimitMode.MS, s_list)
    computed = [pt.scaled_value for pt in points]
    oracle = [2.0 / (1.0 - 2.0 * s) for s in s_list]
    errors = [_rel(c, o) for c, o in zip(computed, oracle)]
    return ReportRecord(
        experiment="ms-limit",
        inputs={"func": "indicator:a=0,b=1", "grid": 257, "box": "0|1", "p": 2.0, "s": "0.01|0.1", "tol": 0.02},
        computed=computed, oracle=oracle, rel_err=max(errors), ok=max(errors) <= 0.02,
    )


def _spectral_at(u, s: float, points) -> List[float]:
    field = flap_spectral(u, s).field
    return [float(field.values[u.grid.nearest_index(pt)]) for pt in points]


def check_flap_equivalence(seed: int = 0) -> ReportRecord:
    """pv, quotient and spectral values of the standard gaussian at a few nodes."""
    cfg = make_config(**EQUIVALENCE_CONFIG)
    worst = 0.0
    origin_value = None
    for n, (half, n_pts, points) in EQUIVALENCE_GRIDS.items():
        grid = make_grid((-half,) * n, (half,) * n, n_pts)
        u = sample(Gaussian(), grid)
        func = Gaussian()
        for s in EQUIVALENCE_ORDERS:
            pv = flap_pv(func, points, s, cfg).values
            quotient = flap_quotient(func, points, s, cfg).values
            spectral = _spectral_at(u, s, points)
            for a, b, c in zip(pv, quotient, spectral):
                worst = max(worst, _disagreement([a, b, c]))
            if n == 1 and s == 0.5:
                origin_value = float(pv[0])
            logger.info(f"equivalence n={n} s={s}: pv {list(pv)} quotient {list(quotient)} spectral {spectral}")
    target = math.sqrt(2.0 / math.pi)
    origin_err = abs(origin_value - target)
    return ReportRecord(
        experiment="flap-equivalence",
        inputs={
            "func": "gaussian", "n": "1|2", "s": "0.25|0.5|0.75",
            "grid_1d": "16385 on -512|512", "grid_2d": "513 on -64|64",
            "R": cfg.trunc_radius, "eps": cfg.eps_pv, "angular_nodes": cfg.angular_nodes,
            "tol": 1e-3, "tol_origin": 1e-4,
        },
        computed=[worst, origin_value], oracle=[0.0, target],
        rel_err=worst, ok=worst < 1e-3 and origin_err <= 1e-4,
    )


def check_plancherel(seed: int = 0) -> ReportRecord:
    """Double-sum seminorm against the frequency side, and the two frequency-side forms."""
    s = 0.5
    params = make_params(1, s, 2.0)
    physical = sample(Gaussian(), make_grid(-8.0, 8.0, 1025))
    double_sum = gagliardo_seminorm_p(physical, params, whole_space=True, policy=DiagPolicy.SMOOTH).seminorm_p
    spectral_grid = sample(Gaussian(), make_grid(-256.0, 256.0, 32769))
    frequency = plancherel_seminorm(spectral_grid, s)
    half = half_laplacian_norm(spectral_grid, s)
    closed_form = 2.0 * math.gamma(s + 0.5) / c_const(1, s)
    err = _rel(double_sum, frequency)
    forms_err = _rel(half, frequency)
    return ReportRecord(
        experiment="plancherel",
        inputs={
            "func": "gaussian", "n": 1, "s": s, "p": 2.0,
            "grid": "1025 on -8|8", "spectral_grid": "32769 on -256|256", "tol": 1e-3, "tol_forms": 1e-6,
        },
        computed=[double_sum, frequency, half], oracle=[frequency, closed_form, frequency],
        rel_err=err, ok=err < 1e-3 and forms_err < 1e-6,
    )


def check_operator_limits(seed: int = 0) -> ReportRecord:
    x = (0.0, 0.0)
    points = operator_limit_scan(Gaussian(), x, (0.01, 0.99))
    computed = [pt.value for pt in points]
    oracle = [points[0].target_low, points[1].target_high]
    errors = [_rel(c, o) for c, o in zip(computed, oracle)]
    return ReportRecord(
        experiment="operator-limits",
        inputs={"func": "gaussian", "n": len(x), "x": "|".join(f"{c:g}" for c in x), "s": "0.01|0.99", "tol": 0.03},
        computed=computed, oracle=oracle, rel_err=max(errors), ok=max(errors) <= 0.03,
    )


def check_reflection(seed: int = 0) -> ReportRecord:
    """Even reflection across x_2 = 0 on ten random gaussians."""
    rng = np.random.default_rng(seed)
    params = make_params(2, 0.5, 2.0)
    grid = make_grid((-1.0, -1.0), (1.0, 1.0), 33)
    worst_semi, worst_lp, ok = 0.0, 0.0, True
    for _ in range(10):
        func = Gaussian(
            sigma=float(rng.uniform(0.3, 1.0)),
            center=(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.0, 0.8))),
        )
        report = reflect_extend(sample(func, grid), params)
        worst_semi = max(worst_semi, report.seminorm_ratio or 0.0)
        worst_lp = max(worst_lp, abs((report.lp_ratio or 2.0) - 2.0))
        ok = ok and report.ok
    return ReportRecord(
        experiment="reflection",
        inputs={"n": 2, "s": 0.5, "p": 2.0, "grid": "33 on -1|1", "fields": 10, "seed": seed, "tol_lp": 1e-10},
        computed=[worst_semi, worst_lp], oracle=[4.0, 0.0], rel_err=worst_lp,
        ok=ok and worst_semi <= 4.0 + 1e-12 and worst_lp <= 1e-10,
    )


def check_trace_round_trip(seed: int = 0) -> ReportRecord:
    v = sample(Gaussian(), make_grid(-8.0, 8.0, 129))
    scale = v.sup_norm()
    round_trip, residual = 0.0, 0.0
    for s in (0.6, 0.75, 0.9):
        back = trace_restrict(trace_lift(v, s).u2d)
        round_trip = max(round_trip, float(np.max(np.abs(back.v.values - v.values))) / scale)
        residual = max(residual, back.identity_residual)
    c_one = trace_constant(1.0)
    return ReportRecord(
        experiment="trace-round-trip",
        inputs={"func": "gaussian", "grid": "129 on -8|8", "s": "0.6|0.75|0.9", "tol": 1e-6, "tol_identity": 1e-10},
        computed=[round_trip, residual, c_one], oracle=[0.0, 0.0, math.pi],
        rel_err=round_trip,
        ok=round_trip <= 1e-6 and residual < 1e-10 and abs(c_one - math.pi) <= 1e-8,
    )


def _random_intervals(rng: np.random.Generator, total: float) -> DomainSpec:
    pieces = int(rng.integers(1, 4))
    lengths = rng.dirichlet(np.ones(pieces)) * total
    gaps = rng.uniform(0.05, 1.0, pieces)
    left, spans = float(rng.uniform(-1.0, 1.0)), []
    for length, gap in zip(lengths, gaps):
        spans.append((left, left + float(length)))
        left += float(length) + float(gap)
    # Intervals as 1-D balls, so every piece has a center and a radius.
    return DomainSpec.ball_union([((0.5 * (a + b),), 0.5 * (b - a)) for a, b in spans])


def _random_discs(rng: np.random.Generator, area: float) -> DomainSpec:
    share = float(rng.uniform(0.2, 0.8))
    r1, r2 = math.sqrt(share * area / math.pi), math.sqrt((1.0 - share) * area / math.pi)
    gap = float(rng.uniform(0.05, 0.5))
    angle = float(rng.uniform(0.0, 2.0 * math.pi))
    offset = r1 + r2 + gap
    return DomainSpec.ball_union([((0.0, 0.0), r1), ((offset * math.cos(angle), offset * math.sin(angle)), r2)])


def check_set_bound(seed: int = 0) -> ReportRecord:
    """Equality for centered balls, and 50 random sets of the same measure staying above it."""
    rng = np.random.default_rng(seed)
    p1, p2 = make_params(1, 0.5, 2.0), make_params(2, 0.5, 1.5)
    interval = set_lower_bound(DomainSpec.interval(-0.5, 0.5), (0.0,), p1)
    disc = set_lower_bound(DomainSpec.ball((0.0, 0.0), math.sqrt(1.0 / math.pi)), (0.0, 0.0), p2)
    violations = 0
    for k in range(50):
        if k % 2 == 0:
            E, params = _random_intervals(rng, 1.0), p1
        else:
            E, params = _random_discs(rng, 1.0), p2
        comps = E.components()
        comp = comps[int(rng.integers(len(comps)))]
        center = np.asarray(comp.center, dtype=float)
        direction = rng.normal(size=center.size)
        x = center + 0.9 * comp.radius * float(rng.uniform()) * direction / np.linalg.norm(direction)
        if not set_lower_bound(E, x, params).ok:
            violations += 1
    errors = [abs(interval.ratio - 1.0), abs(disc.ratio - 1.0)]
    return ReportRecord(
        experiment="set-bound",
        inputs={"n": "1|2", "sp": "1.0|0.75", "measure": 1.0, "random_sets": 50, "seed": seed,
                "tol_interval": 1e-6, "tol_disc": 1e-4},
        computed=[interval.ratio, disc.ratio, float(violations)], oracle=[1.0, 1.0, 0.0],
        rel_err=max(errors), ok=errors[0] <= 1e-6 and errors[1] <= 1e-4 and violations == 0,
    )


def check_sequence_inequality(seed: int = 0) -> ReportRecord:
    rng = np.random.default_rng(seed)
    violations, worst = 0, math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 3))
        p = float(rng.uniform(1.0, 4.0))
        s = float(rng.uniform(0.05, min(0.95, 0.95 * n / p)))
        T = float(rng.uniform(1.1, 4.0))
        length = int(rng.integers(1, 25))
        a = np.sort(rng.uniform(0.0, 1.0, length) * float(rng.uniform(0.1, 10.0)))[::-1]
        a[length - int(rng.integers(0, length)):] = 0.0
        report = sequence_inequality_check(a, make_params(n, s, p), T, k0=int(rng.integers(-5, 6)))
        scale = max(report.lhs, 1e-300)
        worst = min(worst, report.margin / scale)
        if not report.ok:
            violations += 1
    return ReportRecord(
        experiment="sequence-inequality",
        inputs={"sequences": 1000, "seed": seed, "tol": 1e-9},
        computed=float(violations), oracle=0.0, rel_err=worst, ok=violations == 0,
    )


def check_sobolev_ratio(seed: int = 0) -> ReportRecord:
    """chi_(0,1) with s = 1/4, p = 2: ||f||_4^2 = 1, [f]^2 = 16, and dilation invariance."""
    params = make_params(1, 0.25, 2.0)
    f = sample(Indicator(a=0.0, b=1.0), make_grid(0.0, 1.0, 257))
    report = sobolev_ratio(f, params)
    dilation = sobolev_ratio_dilation(f, params, (0.5, 1.0, 2.0))
    errors = [_rel(report.lhs, 1.0), _rel(report.rhs, 16.0)]
    return ReportRecord(
        experiment="sobolev-ratio",
        inputs={"func": "indicator:a=0,b=1", "grid": 257, "n": 1, "s": 0.25, "p": 2.0,
                "lambdas": "0.5|1|2", "tol": 0.01, "tol_spread": 1e-3},
        computed=[report.lhs, report.rhs, dilation.ratio], oracle=[1.0, 16.0, 0.0],
        rel_err=max(errors), ok=max(errors) <= 0.01 and dilation.ok,
    )


def check_holder(seed: int = 0) -> ReportRecord:
    params = make_params(1, 0.75, 2.0)
    unit = make_grid(0.0, 1.0, 257)
    calibration = holder_quotient(sample(Linear(), unit), params.alpha, DomainSpec.interval(0.0, 1.0))
    corpus = [
        (sample(Linear(), unit), DomainSpec.interval(0.0, 1.0)),
        (sample(Gaussian(), make_grid(-4.0, 4.0, 257)), DomainSpec.interval(-4.0, 4.0)),
    ]
    reports = [holder_check(f, params, domain) for f, domain in corpus]
    ratios = [r.lhs / r.rhs for r in reports]
    pins = [0.5 * r.constant_used for r in reports]
    return ReportRecord(
        experiment="holder",
        inputs={"n": 1, "s": 0.75, "p": 2.0, "alpha": params.alpha, "grid": 257, "corpus": "linear|gaussian"},
        computed=[calibration] + ratios, oracle=[1.0] + [2.0 * pin for pin in pins],
        rel_err=_rel(calibration, 1.0),
        ok=abs(calibration - 1.0) <= 1e-12 and all(r.ok for r in reports),
    )


def check_cusp(seed: int = 0) -> ReportRecord:
    study = cusp_divergence_study(2.0, 0.9, 5.0, r=0.1)
    control = cusp_control_study(2.0, 0.9)
    slope_err = _rel(study.growth_slope, study.expected_slope)
    control_ok = all(math.isfinite(v) for v in control.values) and not control.divergence_suspected
    return ReportRecord(
        experiment="cusp",
        inputs={"p": 2.0, "s": 0.9, "kappa": 5.0, "r": 0.1, "control_grid": 65, "tol_slope": 0.15},
        computed=[study.grad_sup, study.grad_identity_error, study.growth_slope, control.values[-1]],
        oracle=[math.pi ** 2 + 1.0, 0.0, study.expected_slope, control.values[0]],
        rel_err=slope_err,
        ok=(study.grad_sup <= math.pi ** 2 + 1.0 and study.grad_identity_error <= 1e-10
            and slope_err <= 0.15 and control_ok),
    )


def check_ball_family(seed: int = 0) -> ReportRecord:
    study = ball_family_study(16.0, 0.5, 6)
    norm_err = max(abs(v - 1.0) for v in study.f_norms_L2)
    dist_err = max(abs(d - math.sqrt(2.0)) for _, _, d in study.pair_dists)
    worst = max(study.hs_seminorms)
    return ReportRecord(
        experiment="ball-family",
        inputs={"C": 16.0, "s": 0.5, "n_funcs": 6, "tol": 1e-10},
        computed=[norm_err, dist_err, worst], oracle=[0.0, 0.0, study.analytic_bound],
        rel_err=max(norm_err, dist_err),
        ok=norm_err <= 1e-10 and dist_err <= 1e-10 and worst <= study.analytic_bound,
    )


SUITES: Dict[str, List[Check]] = {
    "asymptotics": [check_constant_asymptotics, check_b_endpoints, check_e_recursion],
    "equivalence": [check_flap_equivalence, check_plancherel, check_trace_round_trip],
    "limits": [check_bbm_limit, check_ms_limit, check_operator_limits],
    "inequalities": [
        check_reflection, check_set_bound, check_sequence_inequality, check_sobolev_ratio, check_holder,
    ],
    "counterexamples": [check_cusp, check_ball_family],
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def run_bundle(name: str, seed: int = 0, timing: bool = False) -> List[ReportRecord]:
    """
    Run one acceptance bundle, or all of them in a fixed order.

    Args:
        name: One of SUITE_NAMES
        seed: Seed of the randomized checks
        timing: Record wall-clock milliseconds; otherwise runtime_ms stays 0

    Raises:
        InvalidArgumentError: Unknown suite name
    """
    if name == "all":
        checks = [check for group in SUITES.values() for check in group]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise InvalidArgumentError(f"Unknown suite {name!r}; known: {list(SUITE_NAMES)}")
    records = []
    for check in checks:
        start = time.perf_counter()
        record = check(seed)
        if timing:
            record = record.model_copy(update={"runtime_ms": round(1000.0 * (time.perf_counter() - start), 3)})
        logger.info(f"{record.experiment}: ok={record.ok} rel_err={record.rel_err}")
        records.append(record)
    return records
