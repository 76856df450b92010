"""p->q norm estimation for discretized operators, bound algebra and exponent fitting.

The estimator is a lower-bound method: every value it returns is attained by an explicit
input vector (the witness). Upper bounds come from the closed forms in trigsum/schrod.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, svds

from utils.error_handler import PreconditionError, ValidationError
from utils.logging_setup import get_logger
from utils.performance import monitor_performance, ordered_map

from .core import REGION_EPS, Exponent, ExponentLike, ExponentPair, as_exponent

logger = get_logger('normest')

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500
DEFAULT_RESTARTS = 4
TIE_MARGIN = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Matrix with input/output quadrature weights.

    The input norm is (sum in_w |x|^p)^(1/p), the output norm (sum out_w |y|^q)^(1/q).
    Input weights must be positive so that the p = 1 closed form is finite.
    """

    matrix: np.ndarray
    in_weights: np.ndarray
    out_weights: np.ndarray
    label: str = ''

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=np.complex128)  # noqa: N806
        if A.ndim != 2:
            raise ValidationError(f"operator matrix must be 2-D, got shape {A.shape}")
        w_in = np.asarray(self.in_weights, dtype=float).ravel()
        w_out = np.asarray(self.out_weights, dtype=float).ravel()
        if w_in.size != A.shape[1] or w_out.size != A.shape[0]:
            raise ValidationError(
                f"weights {w_in.size}/{w_out.size} do not match matrix shape {A.shape}"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(w_in)) and np.all(np.isfinite(w_out))):
            raise ValidationError("operator has non-finite entries", error_code='NONFINITE')
        if np.any(w_in <= 0) or np.any(w_out < 0):
            raise ValidationError("input weights must be positive and output weights nonnegative")
        object.__setattr__(self, 'matrix', A)
        object.__setattr__(self, 'in_weights', w_in)
        object.__setattr__(self, 'out_weights', w_out)

    @classmethod
    def sequence_to_sequence(cls, matrix) -> DiscreteOperator:
        """Operator between plain l^p spaces (all weights one)."""
        A = np.asarray(matrix)  # noqa: N806
        return cls(A, np.ones(A.shape[1]), np.ones(A.shape[0]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ z

    def scaled(self, c: complex) -> DiscreteOperator:
        return DiscreteOperator(self.matrix * c, self.in_weights, self.out_weights, self.label)


@dataclass
class NormEstimate:
    """A certified lower bound: lower == ratio at input_witness."""

    lower: float
    input_witness: np.ndarray
    iterations: int
    converged: bool
    best_start: str = ''
    start_values: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ScanRecord:
    """One row of an asymptotics scan."""

    N: int
    value: float
    label: str = ''
    predicted: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if not (self.value >= 0.0) or math.isinf(self.value):
            raise ValidationError(f"scan value must be finite and >= 0, got {self.value}")


class ExponentFit(NamedTuple):
    slope: float
    intercept: float
    residual: float


def weighted_norm(x: np.ndarray, weights: np.ndarray, p: ExponentLike) -> float:
    p = as_exponent(p)
    mod = np.abs(x)
    if p.is_infinite:
        support = weights > 0
        return float(mod[support].max()) if np.any(support) else 0.0
    top = float(mod.max()) if mod.size else 0.0
    if top == 0.0:
        return 0.0
    r = mod / top
    return top * float(np.sum(weights * (r if p.value == 1.0 else r**p.value))) ** (1.0 / p.value)


def witness_ratio(A: DiscreteOperator, x: np.ndarray, p: ExponentLike, q: ExponentLike) -> float:  # noqa: N803
    """Independent evaluation of ||Ax||_q / ||x||_p."""
    x = np.asarray(x, dtype=np.complex128)
    denom = weighted_norm(x, A.in_weights, p)
    if denom == 0.0:
        raise ValidationError("witness vector is zero")
    return weighted_norm(A.apply(x), A.out_weights, q) / denom


def _signum(v: np.ndarray) -> np.ndarray:
    """Complex phase with sgn(0) = 1."""
    mod = np.abs(v)
    out = np.ones_like(v, dtype=np.complex128)
    nz = mod > 0
    out[nz] = v[nz] / mod[nz]
    return out


def _normalize(x: np.ndarray, weights: np.ndarray, p: Exponent) -> np.ndarray:
    n = weighted_norm(x, weights, p)
    return x / n if n > 0 else x


def _boundary_estimate(A: DiscreteOperator, p: Exponent, q: Exponent) -> NormEstimate:  # noqa: N803
    M = A.matrix  # noqa: N806
    w_in = A.in_weights
    if p.value == 1.0:
        # extreme points of the weighted l^1 ball are e_j / w_j
        col_norms = np.array(
            [weighted_norm(M[:, j], A.out_weights, q) for j in range(M.shape[1])]
        ) / w_in
        j = int(np.argmax(col_norms))
        witness = np.zeros(M.shape[1], dtype=np.complex128)
        witness[j] = 1.0 / w_in[j]
        return NormEstimate(float(col_norms[j]), witness, 0, True, 'closed-form')

    # q = inf: ||A||_{p->inf} = max_i ||a_i / w||_{p', w}
    rows = np.flatnonzero(A.out_weights > 0)
    scaled = M[rows] / w_in[None, :]
    p_dual = p.dual()
    row_norms = np.array([weighted_norm(r, w_in, p_dual) for r in scaled])
    i = int(np.argmax(row_norms))
    a = scaled[i]
    if p.is_infinite:
        witness = np.conj(_signum(a))
    else:
        witness = np.conj(_signum(a)) * np.abs(a) ** (1.0 / (p.value - 1.0))
    witness = _normalize(witness, w_in, p) if np.any(witness) else np.ones_like(witness)
    return NormEstimate(float(row_norms[i]), witness, 0, True, 'closed-form')


def opnorm_exact_boundary(A: DiscreteOperator, p: ExponentLike, q: ExponentLike) -> float:  # noqa: N803
    """Exact ||A||_{1->q} or ||A||_{p->inf} from the column / row closed forms."""
    p, q = as_exponent(p), as_exponent(q)
    if p.value != 1.0 and not q.is_infinite:
        raise PreconditionError(
            f"closed form needs p = 1 or q = inf, got p={p}, q={q}", error_code='BOUNDARY'
        )
    return _boundary_estimate(A, p, q).lower


def _dual_iteration(
    A: DiscreteOperator, x0: np.ndarray, p: Exponent, q: Exponent, tol: float, max_iter: int  # noqa: N803
) -> tuple[np.ndarray, float, int, bool]:
    w_in, w_out = A.in_weights, A.out_weights
    x = _normalize(np.asarray(x0, dtype=np.complex128), w_in, p)
    ratio = weighted_norm(A.apply(x), w_out, q)
    for it in range(1, max_iter + 1):
        y = A.apply(x)
        ny = weighted_norm(y, w_out, q)
        if ny == 0.0:
            return x, 0.0, it, True
        if q.value == 1.0:
            z = w_out * _signum(y)
        else:
            z = w_out * np.abs(y / ny) ** (q.value - 1.0) * _signum(y)
        v = A.adjoint(z)
        if not np.any(v):
            return x, ratio, it, True
        if p.is_infinite:
            x_new = _signum(v)
        else:
            x_new = _signum(v) * (np.abs(v) / w_in) ** (1.0 / (p.value - 1.0))
        x_new = _normalize(x_new, w_in, p)
        new_ratio = weighted_norm(A.apply(x_new), w_out, q)
        if new_ratio <= ratio * (1.0 + tol):
            if new_ratio > ratio:
                x, ratio = x_new, new_ratio
            return x, ratio, it, True
        x, ratio = x_new, new_ratio
    return x, ratio, max_iter, False


def _spectral_start(A: DiscreteOperator) -> np.ndarray | None:  # noqa: N803
    """Top right singular vector of the weighted 2->2 problem, mapped back to x."""
    sw_in = np.sqrt(A.in_weights)
    B = np.sqrt(A.out_weights)[:, None] * A.matrix / sw_in[None, :]  # noqa: N806
    try:
        if min(B.shape) < 3:
            _, _, vh = np.linalg.svd(B)
        else:
            v0 = np.ones(min(B.shape), dtype=B.dtype)
            _, _, vh = svds(B, k=1, v0=v0)
    except (ArpackError, ArpackNoConvergence, np.linalg.LinAlgError) as e:
        logger.warning(f"Spectral start failed, continuing without it: {e}")
        return None
    return np.conj(vh[0]) / sw_in


@monitor_performance('opnorm_lower')
def opnorm_lower(
    A: DiscreteOperator,  # noqa: N803
    p: ExponentLike,
    q: ExponentLike,
    seeds: Sequence[tuple[str, np.ndarray]] | Sequence[np.ndarray] = (),
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    rng_seed: int | Sequence[int] = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> NormEstimate:
    """Best Holder-dual fixed-point ratio over the seeds and seeded random restarts.

    Seeds may be plain vectors or (label, vector) pairs; they are tried first and win ties.
    p = 1 or q = inf are answered by the exact closed forms.
    """
    p, q = as_exponent(p), as_exponent(q)
    if restarts < 0:
        raise ValidationError(f"restarts must be >= 0, got {restarts}")
    if p.value == 1.0 or q.is_infinite:
        return _boundary_estimate(A, p, q)

    n_in = A.shape[1]
    starts: list[tuple[str, np.ndarray]] = []
    for k, seed in enumerate(seeds):
        label, vec = seed if isinstance(seed, tuple) else (f"seed{k}", seed)
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        if vec.size != n_in:
            raise ValidationError(f"seed '{label}' has {vec.size} entries, operator takes {n_in}")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(f"seed '{label}' has non-finite entries")
        if np.any(vec):
            starts.append((label, vec))
        else:
            logger.debug(f"Skipping zero seed '{label}'")
    if p.value == 2.0 and q.value == 2.0:
        spectral = _spectral_start(A)
        if spectral is not None:
            starts.append(('svd', spectral))
    for k, child in enumerate(np.random.SeedSequence(rng_seed).spawn(restarts)):
        rng = np.random.default_rng(child)
        starts.append((f"random{k}", rng.standard_normal(n_in) + 1j * rng.standard_normal(n_in)))
    if not starts:
        starts.append(('ones', np.ones(n_in, dtype=np.complex128)))

    def run(start: tuple[str, np.ndarray]):
        label, vec = start
        return (label, *_dual_iteration(A, vec, p, q, tol, max_iter))

    results = ordered_map(run, starts, workers)

    best = None
    start_values = {}
    for label, x, ratio, iters, converged in results:
        start_values[label] = ratio
        logger.debug(f"start {label}: ratio={ratio:.12g} after {iters} iterations")
        if best is None or ratio > best[2] * (1.0 + TIE_MARGIN):
            best = (label, x, ratio, iters, converged)
    label, x, ratio, iters, converged = best
    if not converged:
        logger.warning(f"opnorm iteration from '{label}' hit the cap of {max_iter} iterations")
    if ratio == 0.0:
        return NormEstimate(0.0, x, iters, True, label, start_values)
    return NormEstimate(witness_ratio(A, x, p, q), x, iters, converged, label, start_values)


def riesz_thorin_combine(
    C0: float, pt0: ExponentPair, C1: float, pt1: ExponentPair, theta: float  # noqa: N803
) -> tuple[float, ExponentPair]:
    """C0^(1-theta) C1^theta at the interpolated point of the (1/p, 1/q) square."""
    if not 0.0 <= theta <= 1.0:
        raise ValidationError(f"theta must lie in [0, 1], got {theta}")
    if C0 < 0 or C1 < 0:
        raise ValidationError("operator norm bounds must be nonnegative")
    if theta == 0.0:
        return C0, pt0
    if theta == 1.0:
        return C1, pt1
    pt = ExponentPair(
        (1.0 - theta) * pt0.inv_p + theta * pt1.inv_p,
        (1.0 - theta) * pt0.inv_q + theta * pt1.inv_q,
    )
    return C0 ** (1.0 - theta) * C1**theta, pt


def holder_transfer(
    C: float, source: ExponentPair, target: ExponentPair, N: int  # noqa: N803
) -> float | None:
    """Carry a bound C_N(source) <= C to target by Holder inclusion.

    Moving up (smaller q) keeps the bound; moving left (larger p) costs N^(1/p - 1/p~).
    Any other move is not covered and gives None.
    """
    if target.inv_q < source.inv_q - REGION_EPS or target.inv_p > source.inv_p + REGION_EPS:
        return None
    shift = max(0.0, source.inv_p - target.inv_p)
    return float(N) ** shift * C


def log_spaced(lo: float, hi: float, points: int, integer: bool = False) -> list:
    """Logarithmically spaced scan points; integer grids are rounded and deduplicated."""
    if not 0 < lo < hi or points < 2:
        raise ValidationError(f"bad scan range {lo}..{hi} with {points} points")
    values = np.geomspace(lo, hi, points)
    if integer:
        return sorted({int(round(v)) for v in values})
    return [float(v) for v in values]


def fit_exponent(rows: Sequence[ScanRecord], offset: float = 0.0) -> ExponentFit:
    """Least-squares line through (log(N + offset), log value)."""
    if len(rows) < 3:
        raise ValidationError(f"need at least 3 scan rows to fit, got {len(rows)}")
    Ns = np.array([r.N for r in rows], dtype=float)  # noqa: N806
    values = np.array([r.value for r in rows], dtype=float)
    if np.any(values <= 0):
        raise ValidationError("cannot fit a power law through nonpositive values", error_code='FIT')
    if np.unique(Ns).size != Ns.size:
        raise ValidationError("scan rows must have distinct N")
    x = np.log(Ns + offset)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return ExponentFit(float(slope), float(intercept), residual)
