"""
Command-line experiment runner.

Every subcommand prints ReportRecords as CSV (default) or JSON. The exit code
is 0 when every record is ok, 2 when any record fails and 1 on usage errors
or library errors.

Examples:
    fracsob constants --n 2 --s 0.5
    fracsob seminorm --func indicator --a 0 --b 1 --s 0.25 --p 2 --grid 4096
    fracsob counterexample cusp --p 2 --s 0.9 --kappa 5 --r 0.1
    fracsob suite all --format json --out report.json
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .catalog import AnalyticFunction, Gaussian, Indicator, Linear
from .config import get_settings
from .constants import c_const_direct, constant_bundle
from .core import make_config, make_grid, make_params, resolve_function, sample
from .counterexamples import ball_family_study, cusp_control_study, cusp_divergence_study
from .exttrace import (
    cutoff_multiply,
    reflect_extend,
    trace_constant,
    trace_inequality_check,
    trace_lift,
    trace_restrict,
    zero_extend,
)
from .fraclap import flap_pv, flap_quotient, flap_spectral, gaussian_flap_origin, operator_limit_scan
from .gagliardo import gagliardo_seminorm_p, limit_scan, limit_target
from .inequalities import (
    campanato_profile,
    holder_check,
    levelset_seminorm_bound,
    sequence_inequality_check,
    set_lower_bound,
    set_sobolev_check,
    sobolev_level_chain,
    sobolev_ratio,
    sobolev_ratio_dilation,
)
from .models.domain import DomainSpec
from .models.params import LimitMode, QuadConfig
from .models.report import ReportRecord
from .models.results import ExtensionReport, InequalityReport
from .models.validation import FracsobError, InvalidArgumentError
from .suites import EQUIVALENCE_GRIDS, SUITE_NAMES, run_bundle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

# Pass thresholds of the records that carry a closed-form oracle.
SEMINORM_TOL = 1e-3
FLAP_TOL = 1e-3
LIMIT_TOLS = {"bbm": 0.01, "ms": 0.02, "operator": 0.03}
TRACE_TOL = 1e-6
CONSTANT_TOL = 1e-4


class UsageError(InvalidArgumentError):
    """Raised instead of argparse's own exit on bad command lines."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rel(computed: float, oracle: float) -> float:
    if oracle == 0.0:
        return abs(computed)
    return abs(computed - oracle) / abs(oracle)


def _point(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split("|"))
    except ValueError:
        raise UsageError(f"Malformed point {text!r}; write coordinates as x1|x2")


def _floats(values: Optional[Sequence[str]], default: Sequence[float]) -> List[float]:
    if not values:
        return list(default)
    try:
        return [float(v) for v in values]
    except ValueError:
        raise UsageError(f"Expected numbers, got {list(values)}")


def _pick(value, default):
    return default if value is None else value


def _config(args: argparse.Namespace, **defaults) -> QuadConfig:
    """QuadConfig from the shared flags, with per-command defaults for flags not given."""
    overrides = dict(defaults)
    for flag, field in (("R", "trunc_radius"), ("eps", "eps_pv"), ("refine", "refine"), ("tol", "tol")):
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    return make_config(**overrides)


def _settings(cfg: QuadConfig, **extra) -> Dict[str, object]:
    inputs = {"R": cfg.trunc_radius, "eps": cfg.eps_pv, "refine": cfg.refine, "tol": cfg.tol}
    inputs.update(extra)
    return inputs


def _box(n: int, lo: Optional[float], hi: Optional[float], default_lo: float, default_hi: float):
    lo = _pick(lo, default_lo)
    hi = _pick(hi, default_hi)
    return (lo,) * n, (hi,) * n


def _inequality_record(experiment: str, report: InequalityReport, inputs: Dict[str, object]) -> ReportRecord:
    constant = 1.0 if report.constant_used is None else report.constant_used
    return ReportRecord(
        experiment=experiment,
        inputs=dict(inputs, relation=report.relation.value, constant=report.constant_used, ratio=report.ratio),
        computed=report.lhs, oracle=constant * report.rhs, rel_err=report.margin, ok=report.ok,
    )


def _extension_record(experiment: str, report: ExtensionReport, inputs: Dict[str, object]) -> ReportRecord:
    return ReportRecord(
        experiment=experiment,
        inputs=dict(inputs, residual=report.residual, warnings="|".join(report.warnings)),
        computed=[report.ratio, report.lp_ratio or 0.0, report.seminorm_ratio or 0.0],
        oracle=report.bound, rel_err=report.residual, ok=report.ok,
    )


def cmd_constants(args: argparse.Namespace) -> List[ReportRecord]:
    n, s = _pick(args.n, 1), _pick(args.s, 0.5)
    bundle = constant_bundle(n, s)
    direct = c_const_direct(n, s)
    err = _rel(bundle.C, direct)
    finite = all(math.isfinite(v) and v > 0.0 for v in (bundle.A, bundle.B, bundle.C))
    return [ReportRecord(
        experiment="constants",
        inputs={"n": n, "s": s, "I0": bundle.I0, "I1": bundle.I1},
        computed=[bundle.A, bundle.B, bundle.C], oracle=direct, rel_err=err,
        ok=finite and err <= CONSTANT_TOL,
    )]


def _seminorm_oracle(func: AnalyticFunction, n: int, p: float, sp: float, lo, hi, whole_space: bool) -> Optional[float]:
    """Closed forms for indicators of intervals (whole line) and linear functions (on the box)."""
    if n != 1:
        return None
    if isinstance(func, Indicator) and whole_space and func.a is not None and func.b is not None and sp < 1.0:
        length = func.b - func.a
        return 4.0 * length ** (1.0 - sp) / (sp * (1.0 - sp))
    if isinstance(func, Linear) and not whole_space:
        slope = abs(float(np.atleast_1d(func.slope)[0]))
        length = hi[0] - lo[0]
        return slope ** p * 2.0 * length ** (p + 1.0 - sp) / ((p - sp) * (p + 1.0 - sp))
    return None


def cmd_seminorm(args: argparse.Namespace) -> List[ReportRecord]:
    n, s, p = _pick(args.n, 1), _pick(args.s, 0.5), _pick(args.p, 2.0)
    spec = _pick(args.func, "indicator")
    if spec == "indicator" and n == 1:
        spec = f"indicator:a={_pick(args.a, 0.0)},b={_pick(args.b, 1.0)}"
    func = resolve_function(spec)
    if isinstance(func, Indicator) and func.a is not None and func.b is not None:
        lo, hi = _box(n, args.lo, args.hi, func.a, func.b)
    else:
        lo, hi = _box(n, args.lo, args.hi, -8.0, 8.0)
    n_pts = _pick(args.grid, 4096 if n == 1 else 65)
    cfg = _config(args)
    params = make_params(n, s, p)
    u = sample(func, make_grid(lo, hi, n_pts))
    whole_space = not args.domain_only
    result = gagliardo_seminorm_p(u, params, cfg=cfg, whole_space=whole_space)
    oracle = _seminorm_oracle(func, n, p, params.sp, lo, hi, whole_space)
    if oracle is None:
        rel_err, ok = None, math.isfinite(result.seminorm_p)
    else:
        rel_err = _rel(result.seminorm_p, oracle)
        ok = rel_err <= SEMINORM_TOL
    inputs = _settings(
        cfg, n=n, s=s, p=p, func=func.describe(), grid=n_pts, lo=lo[0], hi=hi[0],
        whole_space=whole_space, policy=result.diag_policy.value, est_error=result.est_error,
        warnings="|".join(result.warnings),
    )
    return [ReportRecord(
        experiment="seminorm", inputs=inputs, computed=result.seminorm_p, oracle=oracle, rel_err=rel_err, ok=ok,
    )]


def cmd_flap(args: argparse.Namespace) -> List[ReportRecord]:
    n, s = _pick(args.n, 1), _pick(args.s, 0.5)
    func = resolve_function(_pick(args.func, "gaussian"))
    points = [_point(x) for x in args.x] if args.x else [(0.0,) * n]
    if any(len(pt) != n for pt in points):
        raise UsageError(f"Every --x point needs {n} coordinates")
    cfg = _config(args, eps_pv=1e-4, tol=1e-6)
    default_half, default_pts, _ = EQUIVALENCE_GRIDS.get(n, (8.0, 129, None))
    half = _pick(args.half_width, default_half)
    n_pts = _pick(args.grid, default_pts)
    methods = ("pv", "quotient", "spectral") if args.method == "all" else (args.method,)

    columns = []
    if "pv" in methods:
        columns.append(list(flap_pv(func, points, s, cfg).values))
    if "quotient" in methods:
        columns.append(list(flap_quotient(func, points, s, cfg).values))
    if "spectral" in methods:
        u = sample(func, make_grid((-half,) * n, (half,) * n, n_pts))
        field = flap_spectral(u, s).field
        columns.append([float(field.values[u.grid.nearest_index(pt)]) for pt in points])

    standard = func == Gaussian()
    records = []
    for i, pt in enumerate(points):
        values = [float(col[i]) for col in columns]
        oracle = gaussian_flap_origin(n, s) if standard and not any(pt) else None
        spread = max(
            (abs(a - b) / max(abs(a), abs(b)) for a in values for b in values if max(abs(a), abs(b)) > 0.0),
            default=0.0,
        )
        worst = max([spread] + ([_rel(v, oracle) for v in values] if oracle is not None else []))
        records.append(ReportRecord(
            experiment="flap",
            inputs=_settings(
                cfg, n=n, s=s, func=func.describe(), x="|".join(f"{c:g}" for c in pt),
                method=args.method, grid=n_pts, half_width=half, angular_nodes=cfg.angular_nodes,
            ),
            computed=values if len(values) > 1 else values[0], oracle=oracle, rel_err=worst,
            ok=all(math.isfinite(v) for v in values) and worst < FLAP_TOL,
        ))
    return records


def _limit_oracle(func: AnalyticFunction, mode: str, s: float, p: float, lo, hi) -> Optional[float]:
    if len(lo) != 1:
        return None
    sp = s * p
    if mode == "bbm" and isinstance(func, Linear):
        slope = abs(float(np.atleast_1d(func.slope)[0]))
        length = hi[0] - lo[0]
        return (1.0 - s) * slope ** p * 2.0 * length ** (p + 1.0 - sp) / ((p - sp) * (p + 1.0 - sp))
    if mode == "ms" and isinstance(func, Indicator) and func.a is not None and func.b is not None and sp < 1.0:
        return s * 4.0 * (func.b - func.a) ** (1.0 - sp) / (sp * (1.0 - sp))
    return None


def cmd_limits(args: argparse.Namespace) -> List[ReportRecord]:
    mode = args.mode
    if mode == "operator":
        return _operator_limits(args)
    n, p = _pick(args.n, 1), _pick(args.p, 2.0)
    if mode == "bbm":
        spec, default_s, box, default_pts = "linear", (0.5, 0.9, 0.99), (0.0, 1.0), 4096
    else:
        spec, default_s, box, default_pts = "indicator:a=0,b=1", (0.01, 0.1), (0.0, 1.0), 257
    func = resolve_function(_pick(args.func, spec))
    s_list = _floats(args.s_list, default_s)
    lo, hi = _box(n, args.lo, args.hi, *box)
    n_pts = _pick(args.grid, default_pts if n == 1 else 65)
    cfg = _config(args)
    u = sample(func, make_grid(lo, hi, n_pts))
    points = limit_scan(u, p, LimitMode(mode), s_list, cfg=cfg)
    target = limit_target(u, p, LimitMode(mode))
    records = []
    for pt in points:
        oracle = _limit_oracle(func, mode, pt.s, p, lo, hi)
        rel_err = None if oracle is None else _rel(pt.scaled_value, oracle)
        records.append(ReportRecord(
            experiment=f"limit-{mode}",
            inputs=_settings(cfg, n=n, s=pt.s, p=p, func=func.describe(), grid=n_pts, lo=lo[0], hi=hi[0],
                             limit_target=target),
            computed=pt.scaled_value, oracle=oracle, rel_err=rel_err,
            ok=math.isfinite(pt.scaled_value) if oracle is None else rel_err <= LIMIT_TOLS[mode],
        ))
    return records


def _operator_limits(args: argparse.Namespace) -> List[ReportRecord]:
    n = _pick(args.n, 2)
    func = resolve_function(_pick(args.func, "gaussian"))
    x = _point(args.x[0]) if args.x else (0.0,) * n
    s_list = _floats(args.s_list, (0.01, 0.99))
    cfg = _config(args)
    points = operator_limit_scan(func, x, s_list, cfg)
    standard = func == Gaussian() and not any(x)
    records = []
    for pt in points:
        oracle = gaussian_flap_origin(len(x), pt.s) if standard else None
        rel_err = None if oracle is None else _rel(pt.value, oracle)
        records.append(ReportRecord(
            experiment="limit-operator",
            inputs=_settings(cfg, n=len(x), s=pt.s, func=func.describe(), x="|".join(f"{c:g}" for c in x),
                             target_low=pt.target_low, target_high=pt.target_high, flags="|".join(pt.flags)),
            computed=pt.value, oracle=oracle, rel_err=rel_err,
            ok=math.isfinite(pt.value) if oracle is None else rel_err <= LIMIT_TOLS["operator"],
        ))
    return records


def cmd_trace(args: argparse.Namespace) -> List[ReportRecord]:
    s = _pick(args.s, 0.75)
    func = resolve_function(_pick(args.func, "gaussian"))
    half = _pick(args.half_width, 8.0)
    n_pts = _pick(args.grid, 129)
    v = sample(func, make_grid(-half, half, n_pts))
    pair = trace_lift(v, s)
    back = trace_restrict(pair.u2d)
    scale = v.sup_norm() or 1.0
    round_trip = float(np.max(np.abs(back.v.values - v.values))) / scale
    c_s = trace_constant(s)
    closed = math.sqrt(math.pi) * math.gamma(s - 0.5) / math.gamma(s)
    inputs = {"s": s, "func": func.describe(), "grid": n_pts, "half_width": half, "bump": pair.bump}
    inequality = trace_inequality_check(pair.u2d, s)
    return [
        ReportRecord(experiment="trace-round-trip", inputs=inputs, computed=round_trip, oracle=0.0,
                     rel_err=round_trip, ok=round_trip <= TRACE_TOL),
        ReportRecord(experiment="trace-identity", inputs=inputs, computed=back.identity_residual, oracle=0.0,
                     rel_err=back.identity_residual, ok=back.identity_residual < 1e-10),
        ReportRecord(experiment="trace-constant", inputs=inputs, computed=c_s, oracle=closed,
                     rel_err=_rel(c_s, closed), ok=_rel(c_s, closed) <= 1e-8),
        _inequality_record("trace-inequality", inequality, dict(inputs, note=inequality.note)),
    ]


def cmd_extend(args: argparse.Namespace) -> List[ReportRecord]:
    cfg = _config(args)
    s, p = _pick(args.s, 0.5), _pick(args.p, 2.0)
    if args.op == "zero":
        func = resolve_function(_pick(args.func, "indicator:a=0.25,b=0.75"))
        lo, hi = _box(1, args.lo, args.hi, 0.0, 1.0)
        n_pts = _pick(args.grid, 203)
        support = _point(args.K) if args.K else (0.2, 0.8)
        if len(support) != 2:
            raise UsageError(f"--K needs two ends a|b, got {args.K!r}")
        k_lo, k_hi = support
        params = make_params(1, s, p)
        u = sample(func, make_grid(lo, hi, n_pts))
        report = zero_extend(u, DomainSpec.interval(k_lo, k_hi), params, cfg)
        inputs = _settings(cfg, n=1, s=s, p=p, func=func.describe(), grid=n_pts, lo=lo[0], hi=hi[0],
                           K=f"{k_lo:g}|{k_hi:g}", cross_term=report.cross_term)
    elif args.op == "reflect":
        n = _pick(args.n, 2)
        func = resolve_function(_pick(args.func, "gaussian:center=0|0.3,sigma=0.5" if n == 2 else "gaussian:center=0.3"))
        lo, hi = _box(n, args.lo, args.hi, -1.0, 1.0)
        n_pts = _pick(args.grid, 33 if n == 2 else 257)
        params = make_params(n, s, p)
        report = reflect_extend(sample(func, make_grid(lo, hi, n_pts)), params, cfg)
        inputs = _settings(cfg, n=n, s=s, p=p, func=func.describe(), grid=n_pts, lo=lo[0], hi=hi[0])
    else:
        func = resolve_function(_pick(args.func, "gaussian"))
        psi = resolve_function(_pick(args.psi, "linear:slope=0.125,offset=0.5"))
        lo, hi = _box(1, args.lo, args.hi, -4.0, 4.0)
        n_pts = _pick(args.grid, 257)
        params = make_params(1, s, p)
        report = cutoff_multiply(sample(func, make_grid(lo, hi, n_pts)), psi, params, cfg=cfg)
        inputs = _settings(cfg, n=1, s=s, p=p, func=func.describe(), psi=psi.describe(), grid=n_pts,
                           lo=lo[0], hi=hi[0])
    return [_extension_record(f"extend-{args.op}", report, inputs)]


def _centered_set(n: int, measure: float) -> DomainSpec:
    if n == 1:
        return DomainSpec.interval(-0.5 * measure, 0.5 * measure)
    return DomainSpec.ball((0.0, 0.0), math.sqrt(measure / math.pi))


def cmd_inequality(args: argparse.Namespace) -> List[ReportRecord]:
    kind = args.kind
    cfg = _config(args)
    if kind in ("set", "set-sobolev"):
        n = _pick(args.n, 1)
        params = make_params(n, _pick(args.s, 0.5), _pick(args.p, 2.0))
        measure = _pick(args.measure, 1.0)
        E = _centered_set(n, measure)
        inputs = _settings(cfg, n=n, s=params.s, p=params.p, measure=measure)
        if kind == "set":
            x = _point(args.x[0]) if args.x else (0.0,) * n
            report = set_lower_bound(E, x, params, cfg)
            inputs["x"] = "|".join(f"{c:g}" for c in x)
        else:
            report = set_sobolev_check(E, params, cfg)
        return [_inequality_record(f"inequality-{kind}", report, inputs)]
    if kind == "sequence":
        params = make_params(_pick(args.n, 1), _pick(args.s, 0.25), _pick(args.p, 2.0))
        a = _floats(args.seq, [2.0 ** -k for k in range(10)])
        T = _pick(args.T, 2.0)
        report = sequence_inequality_check(a, params, T, k0=args.k0, left_terms=args.left_terms)
        inputs = {"n": params.n, "s": params.s, "p": params.p, "T": T, "k0": args.k0,
                  "left_terms": args.left_terms, "seq": "|".join(f"{v:g}" for v in a)}
        return [_inequality_record("inequality-sequence", report, inputs)]

    n = _pick(args.n, 1)
    if kind == "holder":
        spec, s_default, box = "linear", 0.75, (0.0, 1.0)
    else:
        spec, s_default, box = "indicator:a=0,b=1", 0.25, (0.0, 1.0)
    func = resolve_function(_pick(args.func, spec))
    params = make_params(n, _pick(args.s, s_default), _pick(args.p, 2.0))
    lo, hi = _box(n, args.lo, args.hi, *box)
    n_pts = _pick(args.grid, 257 if n == 1 else 33)
    f = sample(func, make_grid(lo, hi, n_pts))
    domain = DomainSpec.interval(lo[0], hi[0]) if n == 1 else DomainSpec.box(lo, hi)
    inputs = _settings(cfg, n=n, s=params.s, p=params.p, func=func.describe(), grid=n_pts, lo=lo[0], hi=hi[0])
    if kind == "campanato":
        profile = campanato_profile(f, params, domain, cfg=cfg)
        return [ReportRecord(
            experiment="inequality-campanato",
            inputs=dict(inputs, radii="|".join(f"{r:g}" for r in profile.radii)),
            computed=profile.value, oracle=None, rel_err=None,
            ok=math.isfinite(profile.value) and not profile.divergence_suspected,
        )]
    handlers: Dict[str, Callable[[], InequalityReport]] = {
        "levelset": lambda: levelset_seminorm_bound(f, params, cfg),
        "sobolev": lambda: sobolev_ratio(f, params, cfg),
        "dilation": lambda: sobolev_ratio_dilation(f, params, cfg=cfg),
        "chain": lambda: sobolev_level_chain(f, params),
        "holder": lambda: holder_check(f, params, domain, cfg),
    }
    report = handlers[kind]()
    return [_inequality_record(f"inequality-{kind}", report, dict(inputs, note=report.note))]


def cmd_counterexample(args: argparse.Namespace) -> List[ReportRecord]:
    cfg = _config(args)
    if args.which == "cusp":
        p, s, kappa = _pick(args.p, 2.0), _pick(args.s, 0.9), _pick(args.kappa, 5.0)
        r = _pick(args.r, 0.1)
        study = cusp_divergence_study(p, s, kappa, r=r, j_max=args.j_max, cfg=cfg)
        slope_err = _rel(study.growth_slope, study.expected_slope)
        constants = study.strip_constants
        inputs = {"p": p, "s": s, "kappa": kappa, "r": r, "j_max": args.j_max, "alpha": study.alpha_con,
                  "strip_constant_spread": max(constants) / min(constants) if min(constants) > 0 else None}
        return [
            ReportRecord(
                experiment="cusp-growth", inputs=inputs,
                computed=[study.growth_slope, study.grad_sup, study.grad_identity_error],
                oracle=[study.expected_slope, math.pi ** 2 + 1.0, 0.0], rel_err=slope_err,
                ok=(slope_err <= 0.15 and study.grad_sup <= math.pi ** 2 + 1.0
                    and study.grad_identity_error <= 1e-10),
            ),
            ReportRecord(
                experiment="cusp-strips", inputs=inputs, computed=list(study.strip_contribs),
                oracle=None, rel_err=None,
                ok=all(math.isfinite(c) and c > 0.0 for c in study.strip_contribs),
            ),
        ]
    if args.which == "control":
        p, s = _pick(args.p, 2.0), _pick(args.s, 0.9)
        n_pts = _pick(args.grid, 33)
        ladder = cusp_control_study(p, s, n_pts=n_pts, cfg=cfg)
        return [ReportRecord(
            experiment="cusp-control",
            inputs={"p": p, "s": s, "grid": 2 * n_pts - 1, "levels": "|".join(str(k) for k in ladder.levels)},
            computed=list(ladder.values), oracle=None, rel_err=ladder.differences[-1] if ladder.differences else None,
            ok=all(math.isfinite(v) for v in ladder.values) and not ladder.divergence_suspected,
        )]
    C_ratio, s = _pick(args.C, 16.0), _pick(args.s, 0.5)
    study = ball_family_study(C_ratio, s, args.n_funcs, cfg)
    norm_err = max(abs(v - 1.0) for v in study.f_norms_L2)
    dist_err = max(abs(d - math.sqrt(2.0)) for _, _, d in study.pair_dists)
    return [ReportRecord(
        experiment="ball-family",
        inputs={"C": C_ratio, "s": s, "n_funcs": args.n_funcs, "norm_err": norm_err, "dist_err": dist_err,
                "separation": study.min_separation_ratio},
        computed=list(study.hs_seminorms), oracle=study.analytic_bound, rel_err=max(norm_err, dist_err),
        ok=norm_err <= 1e-10 and dist_err <= 1e-10 and max(study.hs_seminorms) <= study.analytic_bound,
    )]


def cmd_suite(args: argparse.Namespace) -> List[ReportRecord]:
    return run_bundle(args.name, seed=args.seed, timing=args.timing)


def _common_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="Dimension")
    common.add_argument("--s", type=float, default=None, help="Order s")
    common.add_argument("--p", type=float, default=None, help="Integrability exponent p")
    common.add_argument("--func", default=None, help="Catalog function, name:key=value,...")
    common.add_argument("--grid", type=int, default=None, help="Grid points per axis")
    common.add_argument("--lo", type=float, default=None, help="Lower end of the grid box")
    common.add_argument("--hi", type=float, default=None, help="Upper end of the grid box")
    common.add_argument("--R", type=float, default=None, help="Truncation radius")
    common.add_argument("--eps", type=float, default=None, help="Principal-value cutoff")
    common.add_argument("--refine", type=int, default=None, help="Refinement levels")
    common.add_argument("--tol", type=float, default=None, help="Quadrature tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="Output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0, help="Seed of randomized checks")
    common.add_argument("--timing", action="store_true", help="Record wall-clock runtime_ms")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="fracsob", description="Fractional Sobolev experiment runner")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="A(n,s), B(s), C(n,s)")
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("seminorm", parents=[common], help="Gagliardo seminorm of a sampled function")
    p.add_argument("--a", type=float, default=None, help="Indicator left end")
    p.add_argument("--b", type=float, default=None, help="Indicator right end")
    p.add_argument("--domain-only", action="store_true", help="Integrate over the grid box only")
    p.set_defaults(handler=cmd_seminorm)

    p = sub.add_parser("flap", parents=[common], help="Fractional Laplacian at points")
    p.add_argument("--x", nargs="+", default=None, help="Points, coordinates separated by |")
    p.add_argument("--method", choices=("pv", "quotient", "spectral", "all"), default="all")
    p.add_argument("--half-width", type=float, default=None, help="Half-width of the spectral box")
    p.set_defaults(handler=cmd_flap)

    p = sub.add_parser("limits", parents=[common], help="BBM, MS and operator limits")
    p.add_argument("mode", choices=("bbm", "ms", "operator"))
    p.add_argument("--s-list", nargs="+", default=None)
    p.add_argument("--x", nargs="+", default=None, help="Evaluation point for the operator limits")
    p.set_defaults(handler=cmd_limits)

    p = sub.add_parser("trace", parents=[common], help="Trace lift, restriction and constant")
    p.add_argument("--half-width", type=float, default=None)
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("extend", parents=[common], help="Zero extension, reflection and cutoff")
    p.add_argument("op", choices=("zero", "reflect", "cutoff"))
    p.add_argument("--K", default=None, help="Support interval a|b for the zero extension")
    p.add_argument("--psi", default=None, help="Cutoff function for the cutoff product")
    p.set_defaults(handler=cmd_extend)

    p = sub.add_parser("inequality", parents=[common], help="Set, sequence, Sobolev and Hoelder inequalities")
    p.add_argument(
        "kind",
        choices=("set", "set-sobolev", "sequence", "levelset", "sobolev", "dilation", "chain", "holder", "campanato"),
    )
    p.add_argument("--x", nargs="+", default=None)
    p.add_argument("--measure", type=float, default=None)
    p.add_argument("--seq", nargs="+", default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--k0", type=int, default=0)
    p.add_argument("--left-terms", type=int, default=None)
    p.set_defaults(handler=cmd_inequality)

    p = sub.add_parser("counterexample", parents=[common], help="Cusp and ball-family counterexamples")
    p.add_argument("which", choices=("cusp", "control", "balls"))
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--j-max", type=int, default=8)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--n-funcs", type=int, default=6)
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("suite", parents=[common], help="Acceptance bundles")
    p.add_argument("name", choices=SUITE_NAMES)
    p.set_defaults(handler=cmd_suite)
    return parser


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return json.dumps(value)
    return value


def render(records: Sequence[ReportRecord], fmt: str = "csv") -> str:
    """
    Serialize records with the column order experiment, sorted input keys,
    computed, oracle, rel_err, ok, runtime_ms.
    """
    keys = sorted({key for record in records for key in record.inputs})
    rows = [record.flat(keys) for record in records]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buffer = io.StringIO()
    fields = ["experiment"] + keys + ["computed", "oracle", "rel_err", "ok", "runtime_ms"]
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buffer.getvalue()


def _configure_logging(verbose: bool) -> None:
    level = "DEBUG" if verbose else get_settings().log_level
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one subcommand and write its report.

    Returns:
        0 when every record is ok, 2 when any record fails, 1 on usage or library errors
    """
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        start = time.perf_counter()
        records = args.handler(args)
        if args.timing and args.cmd != "suite":
            elapsed = round(1000.0 * (time.perf_counter() - start), 3)
            records = [r.model_copy(update={"runtime_ms": elapsed}) for r in records]
        text = render(records, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            logger.info(f"Wrote {len(records)} records to {args.out}")
        else:
            sys.stdout.write(text)
    except FracsobError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    failed = [r.experiment for r in records if not r.ok]
    if failed:
        logger.warning(f"{len(failed)} failed records: {failed}")
        return EXIT_FAILED
    return EXIT_OK


def run_suite(name: str, argv: Sequence[str] = ()) -> int:
    """Exit code of ``fracsob suite <name>``; argv carries extra flags such as --format."""
    return run(["suite", name, *argv])


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
