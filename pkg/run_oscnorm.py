#!/usr/bin/env python
"""oscnorm command-line front end.

Every command prints a table (CSV by default, JSON with --format json) on stdout; logs go to
stderr. Settings come from --config (JSON, see docs/oscnorm_config.json) and flags override them.

Commands:
  gamma        --q Q [Q ...]                         gamma(q) and gamma(q)^q
  trig-scan    --p P --q Q --family F --N N [N ...]  extremizer ratios against the upper bound
  schrod-scan  --p P --q Q [--gamma G] --N N [N ...] norm scan of the oscillating-kernel operator
  lemma        zygmund|fresnel|statphase|nonstat     checks of the oscillatory-integral lemmas
  region       --n N --inv-r X --inv-rt Y            exponent-region verdict (JSON)
  opnorm       --operator trig|schrod --N N --p P --q Q   one operator norm estimate

Examples:
  python run_oscnorm.py gamma --q 2 4
  python run_oscnorm.py trig-scan --family ones --p inf --q 4 --N 2 4 8 16
  python run_oscnorm.py schrod-scan --p 2 --q 2 --seed 7 --out scan.csv
  python run_oscnorm.py lemma fresnel --grid 20x20
  python run_oscnorm.py region --n 3 --inv-r 1/4 --inv-rt 1/3

Exit codes: 0 every check passed, 1 a check failed, 2 invalid arguments or failed
precondition, 3 a numerical method did not converge.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Any

import numpy as np

from oscnorm import oscint, schrod, trigsum
from oscnorm.config import NumericsConfig
from oscnorm.core import ExponentPair, as_exponent
from oscnorm.export import SCAN_COLUMNS, scan_rows, write_report
from oscnorm.normest import ScanRecord, fit_exponent, log_spaced, opnorm_lower
from oscnorm.phases import ChirpLine, Linear, One, SmoothBump, phase_from_name
from utils.error_handler import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    OscNormError,
    ValidationError,
    get_error_handler,
)
from utils.logging_setup import get_logger, setup_logging
from utils.performance import get_performance_monitor

logger = get_logger('cli')

BOUND_SLACK = 1e-6
FRESNEL_SLACK = 1e-9
ZYGMUND_MAX_SLOPE = 0.05
STATPHASE_SLOPE_TOL = 0.15
NONSTAT_STABILITY = 0.1
DEFAULT_TRIG_NS = [8, 16, 32, 64, 128, 256, 512]
DEFAULT_SCHROD_NS = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]

# critical point at s = 0.5 and near 0.2971
STATPHASE_FAMILIES = {'quad': {'k': 1.0, 's0': 0.5}, 'qpr': {'t': 0.0}}


def _setting(value: Any, cfg: NumericsConfig, key: str) -> Any:
    """Flag value when given, otherwise the configuration value."""
    return cfg.get(key) if value is None else value


def _pair(args) -> ExponentPair:
    return ExponentPair.from_exponents(as_exponent(args.p), as_exponent(args.q))


def _fit_summary(records: list[ScanRecord], offset: float = 0.0) -> dict[str, float]:
    if len(records) < 3:
        return {}
    fit = fit_exponent(records, offset=offset)
    return {'slope': fit.slope, 'intercept': fit.intercept, 'residual': fit.residual}


def cmd_gamma(args, cfg: NumericsConfig) -> dict:
    tol = _setting(args.tol, cfg, 'trigsum.gamma_tol')
    rows = []
    for q in args.q:
        g = trigsum.gamma_q(q, tol)
        rows.append([float(q), g, g**q])
    # gamma(q)^q decreases strictly in q
    ordered = sorted(rows)
    decreasing = all(b[2] < a[2] for a, b in zip(ordered, ordered[1:]) if b[0] > a[0])
    return {
        'command': 'gamma',
        'columns': ['q', 'gamma', 'gamma_pow_q'],
        'rows': rows,
        'summary': {'tol': tol, 'gamma_pow_q_decreasing': decreasing},
        'passed': decreasing,
    }


def cmd_trig_scan(args, cfg: NumericsConfig) -> dict:
    pt = _pair(args)
    seed = _setting(args.seed, cfg, 'seed')
    family = trigsum.ExtremizerKind(args.family)
    records = []
    violations = 0
    for N in sorted(set(args.N)):  # noqa: N806
        value = trigsum.cn_lower_bound(N, pt, family)
        bound = trigsum.cn_upper_bound(N, pt)
        if value > bound * (1.0 + BOUND_SLACK):
            logger.warning(f"N={N}: ratio {value:.12g} exceeds the upper bound {bound:.12g}")
            violations += 1
        records.append(ScanRecord(N, value, label=family.value, predicted=bound, seed=seed))
    summary: dict[str, Any] = {
        'p': str(pt.p),
        'q': str(pt.q),
        'regions': ','.join(sorted(r.value for r in pt.regions())),
        'violations': violations,
        **_fit_summary(records),
    }
    return {
        'command': 'trig-scan',
        'columns': list(SCAN_COLUMNS),
        'rows': scan_rows(records),
        'summary': summary,
        'passed': violations == 0,
    }


def cmd_schrod_scan(args, cfg: NumericsConfig) -> dict:
    seed = _setting(args.seed, cfg, 'seed')
    scan = schrod.decay_scan(
        as_exponent(args.p),
        as_exponent(args.q),
        args.N,
        gamma=_setting(args.gamma, cfg, 'schrod.gamma'),
        restarts=_setting(args.restarts, cfg, 'normest.restarts'),
        rng_seed=seed,
        eta=_setting(args.eta, cfg, 'schrod.eta'),
        tol=_setting(args.tol, cfg, 'normest.tol'),
        base_nodes=_setting(args.base_nodes, cfg, 'schrod.base_nodes'),
        max_validation_nodes=_setting(args.max_validation_nodes, cfg, 'schrod.max_validation_nodes'),
        workers=_setting(args.workers, cfg, 'workers'),
    )
    deviation = abs(scan.fit.slope - scan.predicted)
    summary: dict[str, Any] = {
        'slope': scan.fit.slope,
        'intercept': scan.fit.intercept,
        'residual': scan.fit.residual,
        'predicted': scan.predicted,
        'slope_tol': args.slope_tol,
    }
    summary.update({f"validation_{k}": v for k, v in scan.validation.items()})
    return {
        'command': 'schrod-scan',
        'columns': list(SCAN_COLUMNS),
        'rows': scan_rows(scan.records),
        'summary': summary,
        'passed': deviation <= args.slope_tol,
    }


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        n_N, n_t = (int(part) for part in text.lower().split('x'))  # noqa: N806
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 20x20, got {text!r}") from None
    if n_N < 2 or n_t < 1:
        raise argparse.ArgumentTypeError(f"grid needs at least 2x1 points, got {text!r}")
    return n_N, n_t


def _lemma_zygmund(args, tol: float) -> dict:
    ts = args.t if args.t else [-3.0, -1.0, 0.0, 1.0, 3.0]
    Ns = log_spaced(args.Nmin, args.Nmax, args.points, integer=True)  # noqa: N806
    rows = []
    maxima = []
    violations = 0
    for N in Ns:  # noqa: N806
        worst = 0.0
        for t in sorted(ts):
            res = oscint.zygmund_compare(ChirpLine(N, t), N, tol, M=abs(t) + 2.0)
            if res.diff > res.bound:
                violations += 1
            worst = max(worst, res.diff)
            rows.append([N, float(t), res.diff, res.bound])
        maxima.append(ScanRecord(N, worst, label='zygmund'))
    fit = fit_exponent(maxima)
    return {
        'columns': ['N', 't', 'diff', 'bound'],
        'rows': rows,
        'summary': {
            'violations': violations,
            'max_diff': max(r[2] for r in rows),
            'slope': fit.slope,
            'max_slope': ZYGMUND_MAX_SLOPE,
        },
        'passed': violations == 0 and fit.slope <= ZYGMUND_MAX_SLOPE,
    }


def _lemma_fresnel(args, tol: float) -> dict:
    n_N, n_t = args.grid  # noqa: N806
    rows = []
    violations = 0
    worst_ratio = 0.0
    for N in log_spaced(10.0, 1e4, n_N):  # noqa: N806
        for t in np.linspace(0.05, 0.95, n_t):
            t = float(t)
            defect = abs(oscint.fresnel_I(N, t, tol) - oscint.fresnel_limit(N))
            bound = oscint.fresnel_bound(N, t)
            if defect > bound + FRESNEL_SLACK:
                violations += 1
            worst_ratio = max(worst_ratio, defect / bound)
            rows.append([N, t, defect, bound])
    return {
        'columns': ['N', 't', 'defect', 'bound'],
        'rows': rows,
        'summary': {'violations': violations, 'max_defect_over_bound': worst_ratio},
        'passed': violations == 0,
    }


def _lemma_statphase(args, tol: float) -> dict:
    phase, amp = phase_from_name(args.family, **STATPHASE_FAMILIES[args.family]), One()
    Ns = log_spaced(1e2, 10.0 ** (2 + args.decades), max(args.points, 25))  # noqa: N806
    rows = []
    records = []
    approx_ok = True
    for N in Ns:  # noqa: N806
        res = oscint.stationary_phase(phase, amp, (0.0, 1.0), N, tol)
        if args.family == 'quad':
            expected = math.sqrt(math.pi / N) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
            approx_ok = approx_ok and abs(res.approx - expected) <= 1e-12 * abs(expected)
        rows.append([N, res.s_star, res.defect, res.defect * N])
        records.append(ScanRecord(N, res.defect, label=args.family))
    fit = fit_exponent(records)
    passed = abs(fit.slope + 1.0) <= STATPHASE_SLOPE_TOL and approx_ok
    return {
        'columns': ['N', 's_star', 'defect', 'defect_times_N'],
        'rows': rows,
        'summary': {
            'slope': fit.slope,
            'max_defect_times_N': max(r[3] for r in rows),
            'approx_matches': approx_ok,
        },
        'passed': passed,
    }


def _lemma_nonstat(args, tol: float) -> dict:
    phase, amp = Linear(1.0), SmoothBump(0.25, 0.75, 0.25)
    decades = int(round(math.log10(args.lambda_max)))
    if decades < 2:
        raise ValidationError("--lambda-max must be at least 100", error_code='LAMBDA_MAX')

    def lambdas(top_decade: int) -> list[float]:
        return [0.0, *log_spaced(1.0, 10.0**top_decade, 10 * top_decade + 1)]

    coarse = oscint.nonstationary_decay_check(phase, amp, args.K, args.delta, lambdas(decades - 1), tol)
    full_grid = lambdas(decades)
    full = oscint.nonstationary_decay_check(phase, amp, args.K, args.delta, full_grid, tol)
    rows = []
    for lam in full_grid:
        value = abs(oscint.osc_integral(phase, amp, amp.support(), lam, tol))
        rows.append([lam, value, value * (1.0 + args.delta * lam) ** args.K])
    change = abs(full / coarse - 1.0)
    return {
        'columns': ['lambda', 'abs_integral', 'weighted'],
        'rows': rows,
        'summary': {'c_fit_coarse': coarse, 'c_fit': full, 'relative_change': change},
        'passed': change <= NONSTAT_STABILITY,
    }


LEMMAS = {
    'zygmund': _lemma_zygmund,
    'fresnel': _lemma_fresnel,
    'statphase': _lemma_statphase,
    'nonstat': _lemma_nonstat,
}


def cmd_lemma(args, cfg: NumericsConfig) -> dict:
    tol = _setting(args.tol, cfg, 'oscint.tol')
    report = LEMMAS[args.which](args, tol)
    report['command'] = f"lemma {args.which}"
    report['summary']['passed'] = report['passed']
    return report


def cmd_region(args, cfg: NumericsConfig) -> dict:
    verdict = schrod.strichartz_region(schrod.StrichartzQuery(args.inv_r, args.inv_rt, args.n))
    summary = {'n': args.n, 'inv_r': str(args.inv_r), 'inv_rt': str(args.inv_rt), **verdict.to_dict()}
    return {'command': 'region', 'summary': summary, 'passed': True}


def cmd_opnorm(args, cfg: NumericsConfig) -> dict:
    pt = _pair(args)
    N = args.N  # noqa: N806
    seed = _setting(args.seed, cfg, 'seed')
    options = {
        'restarts': _setting(args.restarts, cfg, 'normest.restarts'),
        'tol': _setting(args.tol, cfg, 'normest.tol'),
        'max_iter': cfg.get('normest.max_iter'),
        'rng_seed': seed,
        'workers': _setting(args.workers, cfg, 'workers'),
    }
    if args.operator == 'trig':
        op = trigsum.TrigOperator(N).discretize()
        seeds = [
            (k.value, trigsum.extremizer(trigsum.ExtremizerFamily(k, N)).entries)
            for k in trigsum.ExtremizerKind
        ]
        upper = trigsum.cn_upper_bound(N, pt)
    else:
        grid = schrod.scan_grid(N, _setting(args.base_nodes, cfg, 'schrod.base_nodes'))
        op = schrod.build_operator(schrod.SchrodOperatorSpec(N, cfg.get('schrod.gamma')), grid)
        eta = cfg.get('schrod.eta')
        seeds = [(w.value, schrod.example_input(w, N, grid.nodes, eta)) for w in schrod.LowerBoundExample]
        upper = None
    est = opnorm_lower(op, pt.p, pt.q, seeds=seeds, **options)
    passed = upper is None or est.lower <= upper * (1.0 + BOUND_SLACK)
    rows = [[label, value] for label, value in sorted(est.start_values.items())]
    return {
        'command': 'opnorm',
        'columns': ['start', 'value'],
        'rows': rows,
        'summary': {
            'operator': args.operator,
            'N': N,
            'p': str(pt.p),
            'q': str(pt.q),
            'lower': est.lower,
            'best_start': est.best_start,
            'iterations': est.iterations,
            'converged': est.converged,
            'upper_bound': upper,
        },
        'passed': passed,
    }


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Random seed (default from config, 0)')
    common.add_argument('--tol', type=float, help="Tolerance (default: the owning module's)")
    common.add_argument('--format', choices=['csv', 'json'], help='Output format')
    common.add_argument('--out', help='Output file (default stdout)')
    common.add_argument('--config', help='JSON settings file')
    common.add_argument('--workers', type=int, help='Threads for independent scan points')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    common.add_argument('--log-file', help='Rotating log file')

    p = argparse.ArgumentParser(description='oscnorm CLI')
    sub = p.add_subparsers(dest='command', required=True)

    pg = sub.add_parser('gamma', parents=[common], help='gamma(q) = lim ||D_N||_q / N^(1-1/q)')
    pg.add_argument('--q', type=float, nargs='+', required=True, help='Exponents q > 1')
    pg.set_defaults(func=cmd_gamma)

    pt = sub.add_parser('trig-scan', parents=[common], help='Extremizer ratios for trig sums')
    pt.add_argument('--p', required=True, help="Input exponent (number or 'inf')")
    pt.add_argument('--q', required=True, help="Output exponent (number or 'inf')")
    pt.add_argument('--family', choices=[k.value for k in trigsum.ExtremizerKind], default='ones')
    pt.add_argument('--N', type=int, nargs='+', default=DEFAULT_TRIG_NS, help='Degrees to scan')
    pt.set_defaults(func=cmd_trig_scan)

    ps = sub.add_parser('schrod-scan', parents=[common], help='Norm scan of the kernel operator')
    ps.add_argument('--p', default='2', help="Input exponent (number or 'inf', default 2)")
    ps.add_argument('--q', default='2', help="Output exponent (number or 'inf', default 2)")
    ps.add_argument('--gamma', type=float, help='Kernel decay exponent')
    ps.add_argument('--N', type=int, nargs='+', default=DEFAULT_SCHROD_NS, help='Frequencies to scan')
    ps.add_argument('--restarts', type=int, help='Random restarts per point')
    ps.add_argument('--eta', type=float, help='Width factor of the concentrated example')
    ps.add_argument('--base-nodes', type=int, help='Minimum quadrature nodes')
    ps.add_argument('--max-validation-nodes', type=int, help='Node cap of the grid-doubling pass')
    ps.add_argument('--slope-tol', type=float, default=0.1, help='Accepted slope deviation (default 0.1)')
    ps.set_defaults(func=cmd_schrod_scan)

    pl = sub.add_parser('lemma', parents=[common], help='Checks of the oscillatory-integral lemmas')
    pl.add_argument('which', choices=sorted(LEMMAS))
    pl.add_argument('--t', type=float, nargs='+', help='zygmund: phase slopes (default -3 -1 0 1 3)')
    pl.add_argument('--Nmin', type=int, default=16, help='zygmund: smallest N (default 16)')
    pl.add_argument('--Nmax', type=int, default=4096, help='zygmund: largest N (default 4096)')
    pl.add_argument('--points', type=int, default=25, help='Points of the log-spaced N grid')
    pl.add_argument('--grid', type=_parse_grid, default=(20, 20), help='fresnel: N x t grid (20x20)')
    pl.add_argument('--family', choices=sorted(STATPHASE_FAMILIES), default='quad', help='statphase: phase')
    pl.add_argument('--decades', type=int, default=3, help='statphase: decades above N=100')
    pl.add_argument('--K', type=int, default=2, help='nonstat: decay order')
    pl.add_argument('--delta', type=float, default=1.0, help="nonstat: lower bound of |phase'|")
    pl.add_argument('--lambda-max', type=float, default=1e3, help='nonstat: largest frequency')
    pl.set_defaults(func=cmd_lemma)

    pr = sub.add_parser('region', parents=[common], help='Exponent-region verdict')
    pr.add_argument('--n', type=int, required=True, help='Space dimension (>= 3)')
    pr.add_argument('--inv-r', type=_fraction, required=True, help='1/r, e.g. 1/4 or 0.25')
    pr.add_argument('--inv-rt', type=_fraction, required=True, help='1/r~, e.g. 1/3')
    pr.set_defaults(func=cmd_region, preferred_format='json')

    po = sub.add_parser('opnorm', parents=[common], help='One operator norm estimate')
    po.add_argument('--operator', choices=['trig', 'schrod'], required=True)
    po.add_argument('--N', type=int, required=True)
    po.add_argument('--p', required=True, help="Input exponent (number or 'inf')")
    po.add_argument('--q', required=True, help="Output exponent (number or 'inf')")
    po.add_argument('--restarts', type=int, help='Random restarts')
    po.add_argument('--base-nodes', type=int, help='schrod: minimum quadrature nodes')
    po.set_defaults(func=cmd_opnorm)

    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or 'WARNING', args.log_file)
    handler = get_error_handler()
    monitor = get_performance_monitor()

    try:
        cfg = NumericsConfig(args.config)
        if args.log_level is None:
            setup_logging(cfg.get('log_level', 'WARNING'))
        with monitor.timer(f"cli.{args.command}"):
            report = args.func(args, cfg)
        fmt = args.format or getattr(args, 'preferred_format', None) or cfg.get('format')
        write_report(report, fmt, args.out, stdout)
    except OscNormError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return handler.handle_error(e, context=args.command, log_error=False)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return handler.handle_error(e, context=args.command)
    finally:
        monitor.log_stats()

    if not report['passed']:
        logger.warning(f"{report['command']}: check failed")
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == '__main__':
    raise SystemExit(main())
