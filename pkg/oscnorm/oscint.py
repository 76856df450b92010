"""Oscillatory integrals int_a^b e^{iN phi(s)} chi(s) ds and the lemmas built on them.

Reference values always come from resolution-doubling composite Gauss-Legendre quadrature;
the asymptotic formulas (stationary phase, Fresnel limit) are what gets compared against it.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import fresnel

from utils.error_handler import (
    ConvergenceError,
    NoCriticalPointError,
    PreconditionError,
    ValidationError,
)
from utils.logging_setup import get_logger
from utils.performance import increment_counter, monitor_performance

from .core import gauss_legendre_01
from .phases import (
    AmplitudeSpec,
    ChirpLine,
    One,
    PhaseSpec,
    Quadratic,
    is_finite_interval,
    sample_phase_derivative,
    total_variation,
)

logger = get_logger('oscint')

DEFAULT_TOL = 1e-10
OSC_ORDER = 10
MIN_PANELS = 16
NODES_PER_WAVELENGTH = 4
MAX_PANELS = 2**21
CRITICAL_POINT_TOL = 1e-12
PRECONDITION_SAMPLES = 1025
_PANEL_CHUNK = 2**15


@dataclass(frozen=True)
class StationaryPhaseResult:
    s_star: float
    J_star: complex  # noqa: N815
    approx: complex
    exact: complex
    defect: float
    N: float


@dataclass(frozen=True)
class ZygmundResult:
    S: complex
    I: complex  # noqa: E741
    diff: float
    M: float
    bound: float


def _panel_sum(phase: PhaseSpec, amp: AmplitudeSpec, a: float, b: float, N: float, panels: int) -> complex:
    u, w = gauss_legendre_01(OSC_ORDER)
    h = (b - a) / panels
    total = 0j
    for start in range(0, panels, _PANEL_CHUNK):
        left = a + h * np.arange(start, min(panels, start + _PANEL_CHUNK), dtype=float)
        x = (left[:, None] + h * u[None, :]).ravel()
        vals = np.exp(1j * N * phase(x)) * amp(x)
        total += complex(np.sum(vals.reshape(-1, OSC_ORDER) @ w))
    return h * total


def initial_panels(phase: PhaseSpec, interval: Sequence[float], N: float) -> int:
    a, b = interval
    tv = total_variation(phase, a, b)
    return max(MIN_PANELS, math.ceil(NODES_PER_WAVELENGTH * abs(N) * tv / (2.0 * math.pi)))


def osc_integral(
    phase: PhaseSpec,
    amp: AmplitudeSpec,
    interval: Sequence[float],
    N: float,  # noqa: N803
    tol: float = DEFAULT_TOL,
    max_panels: int = MAX_PANELS,
) -> complex:
    """int_a^b e^{iN phi(s)} chi(s) ds, doubling the panel count until two levels agree within tol."""
    if not is_finite_interval(interval):
        raise ValidationError(f"interval must be finite with a < b, got {tuple(interval)}")
    if not math.isfinite(N):
        raise ValidationError(f"N must be finite, got {N}")
    a, b = float(interval[0]), float(interval[1])
    panels = initial_panels(phase, (a, b), N)
    prev, last = None, _panel_sum(phase, amp, a, b, N, panels)
    while True:
        panels *= 2
        if panels > max_panels:
            raise ConvergenceError(
                f"oscillatory quadrature on [{a}, {b}] with N={N} did not reach tol={tol}",
                error_code='OSC_QUAD',
                details={'last_values': (prev, last), 'panels': panels // 2},
            )
        prev, last = last, _panel_sum(phase, amp, a, b, N, panels)
        increment_counter('osc_integral.levels')
        if abs(last - prev) <= tol:
            logger.debug(f"osc_integral {phase.kind} N={N:g}: {panels} panels")
            return last


def fresnel_I(N: float, t: float, tol: float = DEFAULT_TOL) -> complex:  # noqa: N802, N803
    """I(N, t) = int_0^1 e^{-iN(y-t)^2} dy by quadrature."""
    _check_fresnel_args(N, t)
    return osc_integral(Quadratic(k=-1.0, s0=t), One(), (0.0, 1.0), N, tol)


def _check_fresnel_args(N: float, t: float) -> None:  # noqa: N803
    if not 0.0 < t < 1.0:
        raise ValidationError(f"t must lie in (0, 1), got {t}", error_code='FRESNEL_T')
    if not N > 0:
        raise ValidationError(f"N must be positive, got {N}")


def fresnel_reference(N: float, t: float) -> complex:  # noqa: N803
    """Closed form of I(N, t) through the Fresnel integrals C and S."""
    _check_fresnel_args(N, t)
    scale = math.sqrt(2.0 / math.pi)
    root = math.sqrt(N)
    s1, c1 = fresnel((1.0 - t) * root * scale)
    s0, c0 = fresnel(-t * root * scale)
    return math.sqrt(math.pi / 2.0) / root * complex(c1 - c0, -(s1 - s0))


def fresnel_limit(N: float) -> complex:  # noqa: N803
    return math.sqrt(math.pi / N) * cmath.exp(-1j * math.pi / 4.0)


def fresnel_bound(N: float, t: float) -> float:  # noqa: N803
    """(1/t + 1/(1-t)) / N."""
    _check_fresnel_args(N, t)
    return (1.0 / t + 1.0 / (1.0 - t)) / N


def _check_convexity(phase: PhaseSpec, a: float, b: float) -> None:
    analytic = phase.second_derivative_lower_bound(a, b)
    sampled = float(np.min(sample_phase_derivative(phase, a, b, 2, PRECONDITION_SAMPLES)))
    low = min(sampled, analytic) if analytic is not None else sampled
    if low < 1.0 - 1e-12:
        raise PreconditionError(
            f"phase {phase.kind} needs phi'' >= 1 on [{a}, {b}], found {low:.6g}",
            error_code='CONVEXITY',
            details={'min_second_derivative': low},
        )


def find_critical_point(phase: PhaseSpec, interval: Sequence[float]) -> float:
    """The unique s* in [a, b] with phi'(s*) = 0, by Newton safeguarded with bisection."""
    if not is_finite_interval(interval):
        raise ValidationError(f"interval must be finite with a < b, got {tuple(interval)}")
    a, b = float(interval[0]), float(interval[1])
    _check_convexity(phase, a, b)
    da, db = float(phase.derivative(a, 1)), float(phase.derivative(b, 1))
    if not (da < 0.0 < db):
        if abs(da) < CRITICAL_POINT_TOL:
            return a
        if abs(db) < CRITICAL_POINT_TOL:
            return b
        raise NoCriticalPointError(
            f"phi' does not change sign on [{a}, {b}]: phi'(a)={da:.6g}, phi'(b)={db:.6g}",
            error_code='NO_CRITICAL_POINT',
        )
    lo, hi = a, b
    x = 0.5 * (a + b)
    for _ in range(200):
        d1 = float(phase.derivative(x, 1))
        if abs(d1) < CRITICAL_POINT_TOL:
            return x
        if d1 < 0.0:
            lo = x
        else:
            hi = x
        step = x - d1 / float(phase.derivative(x, 2))
        x = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4.0 * np.finfo(float).eps * max(1.0, abs(x)):
            break
    d1 = float(phase.derivative(x, 1))
    if abs(d1) >= CRITICAL_POINT_TOL:
        raise ConvergenceError(
            f"critical point search stalled at s={x!r} with phi'={d1:.3g}",
            error_code='CRITICAL_POINT',
            details={'last_values': (lo, hi)},
        )
    return x


@monitor_performance('stationary_phase')
def stationary_phase(
    phase: PhaseSpec,
    amp: AmplitudeSpec,
    interval: Sequence[float],
    N: float,  # noqa: N803
    tol: float = DEFAULT_TOL,
) -> StationaryPhaseResult:
    """Leading stationary-phase term J* e^{iN phi(s*)}/sqrt(N) against the quadrature value."""
    if not N > 0:
        raise ValidationError(f"N must be positive, got {N}")
    s_star = find_critical_point(phase, interval)
    curvature = float(phase.derivative(s_star, 2))
    j_star = cmath.exp(1j * math.pi / 4.0) * float(amp(s_star)) * math.sqrt(2.0 * math.pi / curvature)
    approx = j_star * cmath.exp(1j * N * float(phase(s_star))) / math.sqrt(N)
    exact = osc_integral(phase, amp, interval, N, tol)
    return StationaryPhaseResult(s_star, j_star, approx, exact, abs(exact - approx), float(N))


def nonstationary_decay_check(
    phase: PhaseSpec,
    amp: AmplitudeSpec,
    K: int,  # noqa: N803
    delta: float,
    lambdas: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> float:
    """C_fit = max_lambda |I(lambda)| (1 + delta |lambda|)^K over the support of the amplitude."""
    if K < 1 or not delta > 0:
        raise ValidationError(f"need K >= 1 and delta > 0, got K={K}, delta={delta}")
    support = amp.support()
    if support is None or not support[0] < support[1]:
        raise ValidationError(f"amplitude {amp.kind} has no compact support", error_code='SUPPORT')
    a, b = support
    slope = np.abs(sample_phase_derivative(phase, a, b, 1, PRECONDITION_SAMPLES))
    if float(slope.min()) < delta:
        raise PreconditionError(
            f"|phase'| drops to {slope.min():.6g} < delta={delta} on the support",
            error_code='NONSTATIONARY',
            details={'min_abs_derivative': float(slope.min())},
        )
    c_fit = 0.0
    for lam in lambdas:
        value = abs(osc_integral(phase, amp, (a, b), float(lam), tol))
        c_fit = max(c_fit, value * (1.0 + delta * abs(lam)) ** K)
    logger.debug(f"nonstationary check {phase.kind} K={K}: C_fit={c_fit:.6g} over {len(lambdas)} points")
    return c_fit


def zygmund_constant(M: float) -> float:  # noqa: N803
    """C_M = 1 + 2 pi M / (3 (2 pi - M))."""
    if not 0.0 <= M < 2.0 * math.pi:
        raise PreconditionError(f"need 0 <= M < 2 pi, got {M}", error_code='ZYGMUND_M')
    return 1.0 + 2.0 * math.pi * M / (3.0 * (2.0 * math.pi - M))


def _derivative_bound(phase: PhaseSpec, a: float, b: float) -> tuple[float, bool]:
    """max |phi'| on [a, b] and whether phi' is monotone there."""
    if isinstance(phase, ChirpLine):
        return phase.max_abs_derivative(a, b), True
    d1 = sample_phase_derivative(phase, a, b, 1, PRECONDITION_SAMPLES)
    steps = np.diff(d1)
    return float(np.max(np.abs(d1))), bool(np.all(steps >= -1e-14) or np.all(steps <= 1e-14))


def zygmund_compare(
    phase: PhaseSpec, N: int, tol: float = DEFAULT_TOL, M: float | None = None  # noqa: N803
) -> ZygmundResult:
    """Compare S = sum_{n=1}^N e^{i phi(n)} with I = int_0^N e^{i phi(x)} dx.

    M defaults to max |phi'| on [0, N]; a larger M may be passed to use a looser constant.
    """
    N = int(N)  # noqa: N806
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    observed, monotone = _derivative_bound(phase, 0.0, float(N))
    if not monotone:
        raise PreconditionError(f"phase {phase.kind} has non-monotone derivative on [0, {N}]")
    M = observed if M is None else max(float(M), observed)  # noqa: N806
    bound = zygmund_constant(M)
    n = np.arange(1, N + 1, dtype=float)
    S = complex(np.sum(np.exp(1j * phase(n))))  # noqa: N806
    I = osc_integral(phase, One(), (0.0, float(N)), 1.0, tol)  # noqa: E741, N806
    return ZygmundResult(S, I, abs(S - I), M, bound)
