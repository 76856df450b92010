"""The trigonometric-sum operator a -> sum a_n e^{int}, its extremizers and bounds.

Samples on the default equispaced circle grid come from one FFT; the Dirichlet kernel is
evaluated in closed form with the removable singularities filled by the cosine sum.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn
from scipy.special import zeta

from utils.error_handler import ConvergenceError, CountingOverflowError, ValidationError
from utils.logging_setup import get_logger
from utils.performance import monitor_performance, ordered_map

from .core import (
    CircleGrid,
    CoefficientVector,
    ExponentPair,
    gauss_legendre_01,
    lp_norm,
    lq_norm,
)
from .normest import DiscreteOperator, ScanRecord

logger = get_logger('trigsum')

DEFAULT_GAMMA_TOL = 1e-10
MAX_GAMMA_PERIODS = 2_000_000
GAMMA_MIN_ORDER = 16
GAMMA_MAX_ORDER = 1024
DIRICHLET_SWITCH = 1e-8
COUNTING_BITS = 63
STRICT_MARGIN = 1e-12
_CHUNK = 4096


class ExtremizerKind(str, Enum):
    DELTA = 'delta'
    ONES = 'ones'
    CHIRP = 'chirp'


@dataclass(frozen=True)
class ExtremizerFamily:
    kind: ExtremizerKind
    N: int

    def __post_init__(self):
        object.__setattr__(self, 'kind', ExtremizerKind(self.kind))
        if int(self.N) < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        object.__setattr__(self, 'N', int(self.N))


@dataclass(frozen=True)
class TrigOperator:
    """T_N: C^N -> functions on the circle."""

    N: int

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        object.__setattr__(self, 'N', int(self.N))

    def apply(self, a: CoefficientVector, grid: CircleGrid) -> np.ndarray:
        if a.N != self.N:
            raise ValidationError(f"operator of length {self.N} applied to {a.N} coefficients")
        return trig_samples(a, grid)

    def discretize(self, grid: CircleGrid | None = None) -> DiscreteOperator:
        """Matrix e^{i n t_m} with l^p inputs and the grid's output weights."""
        grid = grid or CircleGrid.for_degree(self.N)
        n = np.arange(self.N)
        matrix = np.exp(1j * np.outer(grid.nodes, n))
        return DiscreteOperator(matrix, np.ones(self.N), grid.weights, label=f"T_{self.N}")


def trig_eval(a: CoefficientVector, t) -> complex | np.ndarray:
    """f(t) = sum_n a_n e^{int}, summed directly."""
    t_arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t_arr).ravel()
    n = np.arange(a.N)
    out = np.empty(flat.size, dtype=np.complex128)
    for start in range(0, flat.size, _CHUNK):
        block = flat[start : start + _CHUNK]
        out[start : start + _CHUNK] = np.exp(1j * np.outer(block, n)) @ a.entries
    if t_arr.ndim == 0:
        return complex(out[0])
    return out.reshape(t_arr.shape)


def trig_samples(a: CoefficientVector, grid: CircleGrid) -> np.ndarray:
    """f at every grid node; one FFT when the grid is the equispaced rule."""
    if grid.rule == 'trapezoid' and grid.M >= a.N:
        # t_m = -pi + 2 pi m / M, so e^{i n t_m} = (-1)^n e^{2 pi i n m / M}
        signs = np.where(np.arange(a.N) % 2 == 0, 1.0, -1.0)
        return grid.M * np.fft.ifft(a.entries * signs, n=grid.M)
    return trig_eval(a, grid.nodes)


def dirichlet(N: int, t):  # noqa: N803
    """D_N(t) = sin(Nt/2)/sin(t/2), continuous across t in 2 pi Z."""
    if int(N) < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    N = int(N)  # noqa: N806
    t_arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t_arr).ravel()
    half = np.sin(flat / 2.0)
    near = np.abs(half) < DIRICHLET_SWITCH
    out = np.empty_like(flat)
    far = ~near
    out[far] = np.sin(N * flat[far] / 2.0) / half[far]
    if np.any(near):
        k = np.arange(N) - (N - 1) / 2.0
        out[near] = np.cos(np.outer(flat[near], k)).sum(axis=1)
    if t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)


def _sinc_power_mean(q: float) -> float:
    """Mean of |sin|^q over a period."""
    return float(gamma_fn((q + 1.0) / 2.0) / (math.sqrt(math.pi) * gamma_fn(q / 2.0 + 1.0)))


def _periods_integral(q: float, periods: int, order: int) -> float:
    """int_0^{periods*pi} |sin x / x|^q dx, each period by Gauss-Legendre in u = x/pi - k."""
    u, w = gauss_legendre_01(order)
    total = float(np.sum(w * np.abs(np.sinc(u)) ** q))
    sin_q = w * np.abs(np.sin(math.pi * u)) ** q
    for start in range(1, periods, _CHUNK):
        k = np.arange(start, min(periods, start + _CHUNK), dtype=float)[:, None]
        total += float(np.sum(sin_q / (math.pi * (k + u)) ** q))
    return math.pi * total


@monitor_performance('gamma_q')
def gamma_q(q: float, tol: float = DEFAULT_GAMMA_TOL) -> float:
    """gamma(q) = ((1/pi) int_R |sin x / x|^q dx)^(1/q) to absolute accuracy tol.

    Whole periods [k pi, (k+1) pi] are integrated up to T = K pi; the rest is replaced by its
    mean value c_q T^(1-q)/(q-1), whose remainder is at most pi^2 q T^(-q-1).
    """
    q = float(q)
    if not q > 1.0:
        raise ValidationError("q must exceed 1", error_code='GAMMA_DOMAIN', details={'q': q})
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")

    # gamma^q >= (2/pi)^q, so an error eps_G in gamma^q moves gamma by <= eps_G/(q G0^(1-1/q))
    g_floor = (2.0 / math.pi) ** q
    eps_g = 0.25 * tol * q * g_floor ** (1.0 - 1.0 / q)
    t_cut = max(4.0 * math.pi, (2.0 * math.pi * q / eps_g) ** (1.0 / (q + 1.0)))
    periods = math.ceil(t_cut / math.pi)
    if periods > MAX_GAMMA_PERIODS:
        raise ConvergenceError(
            f"gamma_q({q}) needs {periods} periods for tol={tol}",
            error_code='GAMMA_TAIL',
            details={'required_periods': periods, 'cap': MAX_GAMMA_PERIODS},
        )
    t_cut = periods * math.pi
    c_q = _sinc_power_mean(q)
    tail = c_q * t_cut ** (1.0 - q) / (q - 1.0)

    order = GAMMA_MIN_ORDER
    prev = (2.0 / math.pi) * (_periods_integral(q, periods, order) + tail)
    while True:
        order *= 2
        cur = (2.0 / math.pi) * (_periods_integral(q, periods, order) + tail)
        logger.debug(f"gamma_q({q}): order={order} periods={periods} G={cur!r}")
        if abs(cur - prev) <= eps_g:
            return cur ** (1.0 / q)
        if order >= GAMMA_MAX_ORDER:
            raise ConvergenceError(
                f"gamma_q({q}) quadrature did not settle",
                error_code='GAMMA_QUAD',
                details={'last_values': (prev ** (1.0 / q), cur ** (1.0 / q))},
            )
        prev = cur


def gamma_q_reference(q: float) -> float:
    """gamma(q) from one period: |sinc|^q summed over periods through the Hurwitz zeta function."""
    q = float(q)
    if not q > 1.0:
        raise ValidationError("q must exceed 1", error_code='GAMMA_DOMAIN')

    def integrand(u: float) -> float:
        head = abs(np.sinc(u)) ** q
        return head + abs(math.sin(math.pi * u)) ** q * zeta(q, 1.0 + u) / math.pi**q

    value, _ = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return (2.0 * value) ** (1.0 / q)


def dirichlet_norm_even(N: int, m: int) -> int:  # noqa: N803
    """||D_N||_{L^2m}^2m as the exact number of 2m-tuples in [0,N) with equal half sums."""
    N, m = int(N), int(m)  # noqa: N806
    if N < 1 or m < 1:
        raise ValidationError(f"need N >= 1 and m >= 1, got N={N}, m={m}")
    # the count is at most N^(2m-1); it must fit a signed 64-bit integer
    required_bits = math.ceil((2 * m - 1) * math.log2(N)) + 1 if N > 1 else 1
    if N > 1 and (2 * m - 1) * math.log2(N) >= COUNTING_BITS:
        raise CountingOverflowError(
            f"exact count for N={N}, m={m} needs {required_bits} bits",
            error_code='COUNT_WIDTH',
            details={'required_bits': required_bits, 'available_bits': COUNTING_BITS},
        )
    ones = np.ones(N, dtype=np.int64)
    coeffs = ones
    for _ in range(m - 1):
        coeffs = np.convolve(coeffs, ones)
    return int(np.dot(coeffs, coeffs))


def dirichlet_lq_norm(N: int, q, grid: CircleGrid | None = None) -> float:  # noqa: N803
    grid = grid or CircleGrid.for_degree(N)
    return lq_norm(dirichlet(N, grid.nodes), grid, q)


def gamma_convergence_scan(
    q: float, Ns: Iterable[int], workers: int = 1  # noqa: N803
) -> list[ScanRecord]:
    """Rows (N, ||D_N||_q / N^(1-1/q)); the ratios tend to gamma(q)."""
    q = float(q)
    if not q > 1.0:
        raise ValidationError("q must exceed 1", error_code='GAMMA_DOMAIN')
    Ns = sorted({int(N) for N in Ns})  # noqa: N806
    if not Ns or Ns[0] < 1:
        raise ValidationError("scan needs N >= 1")

    def row(N: int) -> ScanRecord:  # noqa: N803
        value = dirichlet_lq_norm(N, q) / N ** (1.0 - 1.0 / q)
        return ScanRecord(N, value, label=f"dirichlet-q{q:g}")

    rows = ordered_map(row, Ns, workers)
    logger.info(f"gamma convergence scan q={q:g}: last ratio {rows[-1].value:.12g}")
    return rows


def strict_inequality_onset(q: float, Ns: Sequence[int]) -> int | None:
    """Smallest scanned N0 such that the ratio is < 1 for every scanned N >= N0."""
    rows = gamma_convergence_scan(q, Ns)
    onset = None
    for r in reversed(rows):
        if r.value < 1.0 - STRICT_MARGIN:
            onset = r.N
        else:
            break
    return onset


def extremizer(family: ExtremizerFamily) -> CoefficientVector:
    N = family.N  # noqa: N806
    if family.kind is ExtremizerKind.DELTA:
        a = np.zeros(N, dtype=np.complex128)
        a[0] = 1.0
    elif family.kind is ExtremizerKind.ONES:
        a = np.ones(N, dtype=np.complex128)
    else:
        n = np.arange(N, dtype=float)
        a = np.exp(-1j * n**2 / N)
    return CoefficientVector(a)


def chirp_main_term(N: int, t) -> np.ndarray:  # noqa: N803
    """sqrt(pi) e^{i(N t^2 - pi)/4} sqrt(N), the profile of the chirp sum on (0, 2)."""
    t = np.asarray(t, dtype=float)
    return math.sqrt(math.pi * N) * np.exp(1j * (N * t**2 - math.pi) / 4.0)


def chirp_profile_check(N: int, t_grid) -> float:  # noqa: N803
    """max_t |f(t) - main term| - 4/(t(2-t)) for the chirp coefficients."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size == 0 or np.any(t <= 0.0) or np.any(t >= 2.0):
        raise ValidationError("chirp profile needs t in the open interval (0, 2)", error_code='CHIRP_T')
    f = trig_eval(extremizer(ExtremizerFamily(ExtremizerKind.CHIRP, N)), t)
    defect = np.abs(f - chirp_main_term(N, t)) - 4.0 / (t * (2.0 - t))
    return float(defect.max())


def cn_upper_bound(N: int, pt: ExponentPair) -> float:  # noqa: N803
    """max{1, N^(1-1/q-1/p), N^(1/2-1/p)}."""
    N = float(N)  # noqa: N806
    return max(1.0, N ** (1.0 - pt.inv_q - pt.inv_p), N ** (0.5 - pt.inv_p))


def cn_lower_bound(
    N: int, pt: ExponentPair, family: ExtremizerFamily | ExtremizerKind | str, grid: CircleGrid | None = None  # noqa: N803
) -> float:
    """||T_N a||_q / ||a||_p for the family's coefficients."""
    if not isinstance(family, ExtremizerFamily):
        family = ExtremizerFamily(ExtremizerKind(family), N)
    grid = grid or CircleGrid.for_degree(N)
    a = extremizer(family)
    return lq_norm(trig_samples(a, grid), grid, pt.q) / lp_norm(a, pt.p)


def region_b_limsup_bound(pt: ExponentPair, tol: float = DEFAULT_GAMMA_TOL) -> float:
    """gamma(q)^(1 - q'/p), the limsup of C_N / N^(1-1/q-1/p) inside region B with 2 < q < inf."""
    x, y = pt.inv_p, pt.inv_q
    if not (0.0 < y < 0.5 and 0.0 < x < 1.0 - y):
        raise ValidationError(f"{pt} is not in the interior of region B", error_code='REGION_B')
    q = 1.0 / y
    q_dual = q / (q - 1.0)
    return gamma_q(q, tol) ** (1.0 - q_dual * x)


def dirichlet_lower_bound_check(N: int, samples: int = 2001) -> float:  # noqa: N803
    """min of |D_N(t)| / (2N/pi) over |t| <= pi/N; at least 1."""
    t = np.linspace(-math.pi / N, math.pi / N, samples)
    return float(np.min(np.abs(dirichlet(N, t))) / (2.0 * N / math.pi))
