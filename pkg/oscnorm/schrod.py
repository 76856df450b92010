"""The oscillating-kernel operator T_N f(t) = int_0^1 e^{iN/(1+t+s)} f(s) (1+t+s)^-gamma ds.

Covers its discretization, the kernel K_N of T_N T_N^*, the three lower-bound inputs, the
norm scan against the predicted power law and the exponent-region arithmetic for the
dispersive application.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from utils.error_handler import PreconditionError, ValidationError
from utils.logging_setup import get_logger
from utils.performance import get_performance_monitor, ordered_map

from .core import ExponentLike, UnitIntervalGrid, as_exponent, lq_norm
from .normest import (
    DEFAULT_RESTARTS,
    DEFAULT_TOL,
    DiscreteOperator,
    ExponentFit,
    ScanRecord,
    fit_exponent,
    opnorm_lower,
)
from .oscint import DEFAULT_TOL as OSC_TOL
from .oscint import osc_integral
from .phases import (
    Product,
    QuadPlusReciprocal,
    Reciprocal,
    ReciprocalDiff,
    ReciprocalPower,
    SmoothBump,
)

logger = get_logger('schrod')

DEFAULT_GAMMA = 1.0
DEFAULT_ETA = 0.1
MIN_OPERATOR_NODES = 256
SCAN_BASE_NODES = 512
MAX_VALIDATION_NODES = 4096
KERNEL_INTERVAL = (-0.5, 1.5)
KERNEL_CUTOFF = SmoothBump(0.0, 1.0, 0.5)
_ROW_CHUNK = 512


@dataclass(frozen=True)
class SchrodOperatorSpec:
    N: float
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not (self.N >= 0 and math.isfinite(self.N)):
            raise ValidationError(f"N must be finite and >= 0, got {self.N}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValidationError(f"gamma must be finite and >= 0, got {self.gamma}")


class LowerBoundExample(str, Enum):
    CONCENTRATED = 'concentrated'
    PHASE_MATCHED = 'phase-matched'
    CHIRP = 'chirp'


def node_floor(N: float) -> int:  # noqa: N803
    """Minimum grid size resolving the kernel phase: max(256, 2N/pi)."""
    return max(MIN_OPERATOR_NODES, math.ceil(2.0 * N / math.pi))


def build_operator(
    spec: SchrodOperatorSpec, grid: UnitIntervalGrid, out_grid: UnitIntervalGrid | None = None
) -> DiscreteOperator:
    """A_ij = e^{iN/(1+t_i+s_j)} (1+t_i+s_j)^-gamma w_j with L^p(0,1) input weights w."""
    if grid.M < node_floor(spec.N):
        raise PreconditionError(
            f"grid of {grid.M} nodes is below the floor {node_floor(spec.N)} for N={spec.N:g}",
            error_code='GRID_FLOOR',
        )
    out_grid = out_grid or grid
    s, w = grid.nodes, grid.weights
    matrix = np.empty((out_grid.M, grid.M), dtype=np.complex128)
    for start in range(0, out_grid.M, _ROW_CHUNK):
        t = out_grid.nodes[start : start + _ROW_CHUNK, None]
        u = 1.0 + t + s[None, :]
        matrix[start : start + _ROW_CHUNK] = np.exp(1j * spec.N / u) * u ** (-spec.gamma) * w[None, :]
    return DiscreteOperator(matrix, w, out_grid.weights, label=f"schrod_N{spec.N:g}")


def kernel_amplitude(s: float, sigma: float, gamma: float = DEFAULT_GAMMA) -> Product:
    return Product((KERNEL_CUTOFF, ReciprocalPower(gamma, s), ReciprocalPower(gamma, sigma)))


def kernel_KN(  # noqa: N802
    s: float, sigma: float, N: float, tol: float = OSC_TOL, gamma: float = DEFAULT_GAMMA  # noqa: N803
) -> complex:
    """K_N(s, sigma) = int e^{iN phi(t; s, sigma)} chi(t; s, sigma) dt over the cutoff support."""
    if not (0.0 <= s <= 1.0 and 0.0 <= sigma <= 1.0):
        raise ValidationError(f"s and sigma must lie in [0, 1], got {s}, {sigma}")
    return osc_integral(ReciprocalDiff(s, sigma), kernel_amplitude(s, sigma, gamma), KERNEL_INTERVAL, N, tol)


def _example_samples(
    spec: SchrodOperatorSpec, which: LowerBoundExample, eta: float, t: np.ndarray, tol: float
) -> np.ndarray:
    N, gamma = spec.N, spec.gamma  # noqa: N806
    out = np.empty(t.size, dtype=np.complex128)
    for i, ti in enumerate(t):
        amp = ReciprocalPower(gamma, float(ti))
        if which is LowerBoundExample.CONCENTRATED:
            out[i] = osc_integral(Reciprocal(float(ti)), amp, (0.0, eta / N), N, tol)
        elif which is LowerBoundExample.PHASE_MATCHED:
            # 1/(1+t+s) - 1/(1+s) as a function of s
            out[i] = osc_integral(ReciprocalDiff(float(ti), 0.0), amp, (0.0, 1.0), N, tol)
        else:
            out[i] = osc_integral(QuadPlusReciprocal(float(ti)), amp, (0.0, 1.0), N, tol)
    return out


def example_input(which: LowerBoundExample | str, N: float, s: np.ndarray, eta: float = DEFAULT_ETA) -> np.ndarray:  # noqa: N803
    """The lower-bound input f sampled at the nodes s."""
    which = LowerBoundExample(which)
    s = np.asarray(s, dtype=float)
    if which is LowerBoundExample.CONCENTRATED:
        return np.where(s <= eta / N, 1.0, 0.0).astype(np.complex128)
    if which is LowerBoundExample.PHASE_MATCHED:
        return np.exp(-1j * N / (1.0 + s))
    return np.exp(1j * N * s**2)


def lower_bound_example(
    spec: SchrodOperatorSpec,
    which: LowerBoundExample | str,
    p: ExponentLike,
    q: ExponentLike,
    eta: float = DEFAULT_ETA,
    grid: UnitIntervalGrid | None = None,
    tol: float = OSC_TOL,
) -> float:
    """||T_N f||_q / ||f||_p for one of the three example inputs.

    T_N f is evaluated by oscillatory quadrature at the output nodes, so the concentrated
    input is exact even when eta/N is below the grid spacing.
    """
    which = LowerBoundExample(which)
    p, q = as_exponent(p), as_exponent(q)
    if spec.N < 1:
        raise ValidationError(f"lower-bound examples need N >= 1, got {spec.N}")
    if not 0.0 < eta <= 1.0:
        raise ValidationError(f"eta must lie in (0, 1], got {eta}")
    grid = grid or UnitIntervalGrid.graded(spec.N)
    samples = _example_samples(spec, which, eta, grid.nodes, tol)
    if which is LowerBoundExample.CONCENTRATED:
        f_norm = 1.0 if p.is_infinite else (eta / spec.N) ** p.inv
    else:
        f_norm = 1.0
    return lq_norm(samples, grid, q) / f_norm


def best_lower_bound_example(
    spec: SchrodOperatorSpec,
    p: ExponentLike,
    q: ExponentLike,
    eta: float = DEFAULT_ETA,
    grid: UnitIntervalGrid | None = None,
) -> tuple[LowerBoundExample, float]:
    ratios = {w: lower_bound_example(spec, w, p, q, eta, grid) for w in LowerBoundExample}
    best = max(ratios, key=ratios.get)
    return best, ratios[best]


def predicted_exponent(p: ExponentLike, q: ExponentLike) -> float:
    """-min{1 - 1/p, 1/q, 1/2}."""
    p, q = as_exponent(p), as_exponent(q)
    return -min(1.0 - p.inv, q.inv, 0.5) + 0.0


@dataclass
class DecayScan:
    records: list[ScanRecord]
    fit: ExponentFit
    predicted: float
    validation: dict[str, float] = field(default_factory=dict)


def scan_grid(N: float, base_nodes: int) -> UnitIntervalGrid:  # noqa: N803
    return UnitIntervalGrid.gauss(max(base_nodes, math.ceil(N), node_floor(N)))


def _estimate(
    N: int,  # noqa: N803
    p,
    q,
    gamma: float,
    grid: UnitIntervalGrid,
    restarts: int,
    rng_seed: int,
    eta: float,
    tol: float,
):
    op = build_operator(SchrodOperatorSpec(N, gamma), grid)
    seeds = [(w.value, example_input(w, N, grid.nodes, eta)) for w in LowerBoundExample]
    return opnorm_lower(op, p, q, seeds=seeds, restarts=restarts, tol=tol, rng_seed=[rng_seed, int(N)])


def decay_scan(
    p: ExponentLike,
    q: ExponentLike,
    Ns: Sequence[int],  # noqa: N803
    gamma: float = DEFAULT_GAMMA,
    restarts: int = DEFAULT_RESTARTS,
    rng_seed: int = 0,
    eta: float = DEFAULT_ETA,
    tol: float = DEFAULT_TOL,
    base_nodes: int = SCAN_BASE_NODES,
    max_validation_nodes: int = MAX_VALIDATION_NODES,
    workers: int = 1,
) -> DecayScan:
    """Estimate C_N(p->q) over Ns, fit against log(1+N) and compare with the predicted slope."""
    p, q = as_exponent(p), as_exponent(q)
    Ns = sorted({int(N) for N in Ns})  # noqa: N806
    if len(Ns) < 3 or Ns[0] < 1:
        raise ValidationError("scan needs at least three distinct N >= 1")
    if math.log10(Ns[-1] / Ns[0]) < 2.0 - 1e-9:
        raise ValidationError(f"scan N range {Ns[0]}..{Ns[-1]} spans less than two decades")
    predicted = predicted_exponent(p, q)

    def point(N: int) -> ScanRecord:  # noqa: N803
        est = _estimate(N, p, q, gamma, scan_grid(N, base_nodes), restarts, rng_seed, eta, tol)
        logger.debug(f"N={N}: C_N({p}->{q}) >= {est.lower:.12g} from '{est.best_start}'")
        return ScanRecord(N, est.lower, label=est.best_start, predicted=predicted, seed=rng_seed)

    with get_performance_monitor().timer('decay_scan'):
        records = ordered_map(point, Ns, workers)
    fit = fit_exponent(records, offset=1.0)
    logger.info(f"scan {p}->{q}: slope {fit.slope:.4f}, predicted {predicted:.4f}")

    validation: dict[str, float] = {}
    for rec in reversed(records):
        doubled = 2 * scan_grid(rec.N, base_nodes).M
        if doubled <= max_validation_nodes:
            est = _estimate(
                rec.N, p, q, gamma, UnitIntervalGrid.gauss(doubled), restarts, rng_seed, eta, tol
            )
            change = abs(est.lower - rec.value) / max(rec.value, 1e-300)
            validation = {'N': rec.N, 'value': rec.value, 'doubled': est.lower, 'relative_change': change}
            logger.info(f"grid doubling at N={rec.N}: relative change {change:.3g}")
            break
    return DecayScan(records, fit, predicted, validation)


# -- exponent regions of the dispersive application -------------------------------------


@dataclass(frozen=True)
class StrichartzQuery:
    inv_r: float
    inv_rt: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"dimension n must be an integer >= 3, got {self.n}", error_code='DIMENSION')
        for name in ('inv_r', 'inv_rt'):
            v = getattr(self, name)
            if not 0.0 <= float(v) <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class StrichartzVerdict:
    in_cone_region: bool
    in_band_region: bool
    in_hull: bool
    kernel_exponents: tuple[Fraction, Fraction] | None
    strict: bool
    decay_exponent: Fraction | None

    def to_dict(self) -> dict:
        pair = self.kernel_exponents
        return {
            'in_cone_region': self.in_cone_region,
            'in_band_region': self.in_band_region,
            'in_hull': self.in_hull,
            'kernel_exponents': None if pair is None else [float(pair[0]), float(pair[1])],
            'strict': self.strict,
            'decay_exponent': None if self.decay_exponent is None else float(self.decay_exponent),
        }


def _rational(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(v).limit_denominator(10**9)


def kernel_decay_exponent(inv_q, inv_qt) -> Fraction:
    """min{2/q~, 2/q, 1}, the time decay of the dispersive kernel at exponents (q, q~)."""
    return min(2 * _rational(inv_qt), 2 * _rational(inv_q), Fraction(1))


def in_cone_region(x: Fraction, y: Fraction, n: int) -> bool:
    """(n-2)/n x <= y <= 1/2 and (n-2)/n y <= x <= 1/2."""
    k = Fraction(n - 2, n)
    half = Fraction(1, 2)
    return k * x <= y <= half and k * y <= x <= half


def in_band_region(x: Fraction, y: Fraction, n: int) -> bool:
    """Both coordinates in [0, 1/2] and |x - y| < 1/n (strict)."""
    half = Fraction(1, 2)
    return 0 <= x <= half and 0 <= y <= half and abs(x - y) < Fraction(1, n)


def in_convex_hull(x, y, n: int) -> bool:
    """The band region plus its two endpoints (1/2, 1/2 - 1/n) and (1/2 - 1/n, 1/2)."""
    x, y = _rational(x), _rational(y)
    half, step = Fraction(1, 2), Fraction(1, n)
    if (x, y) in ((half, half - step), (half - step, half)):
        return True
    return in_band_region(x, y, n)


def feasible_kernel_exponents(x: Fraction, y: Fraction, n: int) -> tuple[tuple[Fraction, Fraction] | None, bool]:
    """Minimal (1/q, 1/q~) with 1/q = 1/q~ = n/2 (1/r + 1/r~), or None when infeasible."""
    strict = x == 0 or y == 0
    total = x + y
    limit = Fraction(1, n)
    if total > limit or (strict and total == limit):
        return None, strict
    value = min(Fraction(1), Fraction(n, 2) * total)
    return (value, value), strict


def strichartz_region(query: StrichartzQuery) -> StrichartzVerdict:
    """Exact verdict for (1/r, 1/r~) in dimension n; inputs are converted to rationals first."""
    n = int(query.n)
    x, y = _rational(query.inv_r), _rational(query.inv_rt)
    pair, strict = feasible_kernel_exponents(x, y, n)
    decay = kernel_decay_exponent(*pair) if pair is not None else None
    return StrichartzVerdict(
        in_cone_region=in_cone_region(x, y, n),
        in_band_region=in_band_region(x, y, n),
        in_hull=in_convex_hull(x, y, n),
        kernel_exponents=pair,
        strict=strict,
        decay_exponent=decay,
    )
