"""Closed families of phase and amplitude functions with analytic derivatives.

Phases provide derivatives up to order 5, amplitudes up to order 2. Keeping the families
closed makes the analytic preconditions of the oscillatory-integral lemmas checkable.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial as _NumpyPolynomial
from scipy.special import expit

from utils.error_handler import ValidationError

MAX_PHASE_ORDER = 5
MAX_AMPLITUDE_ORDER = 2


def _check_order(order: int, limit: int) -> None:
    if not 0 <= order <= limit:
        raise ValidationError(f"derivative order must lie in [0, {limit}], got {order}")


def _evaluate(func, x, order: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x)
    res = np.broadcast_to(func(flat, order), flat.shape).astype(float)
    return res.reshape(x.shape)


def _reciprocal_power_derivative(u: np.ndarray, power: float, order: int) -> np.ndarray:
    """d^k/du^k of u^(-power)."""
    coeff = 1.0
    for j in range(order):
        coeff *= -(power + j)
    return coeff * u ** (-(power + order))


class PhaseSpec(ABC):
    """A real phase function with exact derivatives up to order 5."""

    kind: str = 'phase'

    @abstractmethod
    def _derivative(self, x: np.ndarray, order: int) -> np.ndarray: ...

    def derivative(self, x, order: int = 0) -> np.ndarray:
        _check_order(order, MAX_PHASE_ORDER)
        return _evaluate(self._derivative, x, order)

    def __call__(self, x) -> np.ndarray:
        return self.derivative(x, 0)

    def second_derivative_lower_bound(self, a: float, b: float) -> float | None:
        """Analytic lower bound of phi'' on [a, b] when the family has one."""
        return None


@dataclass(frozen=True)
class Linear(PhaseSpec):
    c: float = 1.0
    kind = 'linear'

    def _derivative(self, x, order):
        if order == 0:
            return self.c * x
        if order == 1:
            return np.full_like(x, self.c)
        return np.zeros_like(x)

    def second_derivative_lower_bound(self, a, b):
        return 0.0


@dataclass(frozen=True)
class Quadratic(PhaseSpec):
    """k (x - s0)^2."""

    k: float = 1.0
    s0: float = 0.0
    kind = 'quadratic'

    def _derivative(self, x, order):
        if order == 0:
            return self.k * (x - self.s0) ** 2
        if order == 1:
            return 2.0 * self.k * (x - self.s0)
        if order == 2:
            return np.full_like(x, 2.0 * self.k)
        return np.zeros_like(x)

    def second_derivative_lower_bound(self, a, b):
        return 2.0 * self.k


@dataclass(frozen=True)
class ChirpLine(PhaseSpec):
    """-x^2 / N_len + x t, the phase of the chirp trig sum in continuous form."""

    N_len: float  # noqa: N815
    t: float = 0.0
    kind = 'chirp-line'

    def __post_init__(self):
        if self.N_len <= 0:
            raise ValidationError(f"N_len must be positive, got {self.N_len}")

    def _derivative(self, x, order):
        if order == 0:
            return -(x**2) / self.N_len + x * self.t
        if order == 1:
            return -2.0 * x / self.N_len + self.t
        if order == 2:
            return np.full_like(x, -2.0 / self.N_len)
        return np.zeros_like(x)

    def max_abs_derivative(self, a: float, b: float) -> float:
        # phi' is affine, so the extremes sit at the endpoints
        return float(max(abs(self._derivative(np.array(a), 1)), abs(self._derivative(np.array(b), 1))))


@dataclass(frozen=True)
class Reciprocal(PhaseSpec):
    """x -> 1/(1 + t + x)."""

    t: float = 0.0
    kind = 'reciprocal'

    def _derivative(self, x, order):
        return _reciprocal_power_derivative(1.0 + self.t + x, 1.0, order)

    def second_derivative_lower_bound(self, a, b):
        return 2.0 / (1.0 + self.t + b) ** 3


@dataclass(frozen=True)
class QuadPlusReciprocal(PhaseSpec):
    """x -> x^2 + 1/(1 + t + x)."""

    t: float = 0.0
    kind = 'quad-plus-reciprocal'

    def _derivative(self, x, order):
        rec = _reciprocal_power_derivative(1.0 + self.t + x, 1.0, order)
        if order == 0:
            return x**2 + rec
        if order == 1:
            return 2.0 * x + rec
        if order == 2:
            return 2.0 + rec
        return rec

    def second_derivative_lower_bound(self, a, b):
        return 2.0 + 2.0 / (1.0 + self.t + b) ** 3


@dataclass(frozen=True)
class ReciprocalDiff(PhaseSpec):
    """x -> 1/(1 + x + s) - 1/(1 + x + sigma)."""

    s: float
    sigma: float
    kind = 'reciprocal-diff'

    def _derivative(self, x, order):
        return _reciprocal_power_derivative(1.0 + x + self.s, 1.0, order) - _reciprocal_power_derivative(
            1.0 + x + self.sigma, 1.0, order
        )


@dataclass(frozen=True)
class Polynomial(PhaseSpec):
    """sum coeffs[k] x^k."""

    coeffs: tuple[float, ...] = (0.0,)
    kind = 'polynomial'

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(float(c) for c in self.coeffs))

    def _derivative(self, x, order):
        return _NumpyPolynomial(self.coeffs).deriv(order)(x)


class AmplitudeSpec(ABC):
    """A real amplitude with exact derivatives up to order 2."""

    kind: str = 'amplitude'

    @abstractmethod
    def _derivative(self, x: np.ndarray, order: int) -> np.ndarray: ...

    def derivative(self, x, order: int = 0) -> np.ndarray:
        _check_order(order, MAX_AMPLITUDE_ORDER)
        return _evaluate(self._derivative, x, order)

    def __call__(self, x) -> np.ndarray:
        return self.derivative(x, 0)

    def support(self) -> tuple[float, float] | None:
        """Closed interval outside which the amplitude vanishes, None if not compact."""
        return None


@dataclass(frozen=True)
class One(AmplitudeSpec):
    kind = 'one'

    def _derivative(self, x, order):
        return np.ones_like(x) if order == 0 else np.zeros_like(x)


@dataclass(frozen=True)
class ReciprocalPower(AmplitudeSpec):
    """x -> (1 + shift + x)^(-gamma)."""

    gamma: float = 1.0
    shift: float = 0.0
    kind = 'reciprocal-power'

    def __post_init__(self):
        if self.gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {self.gamma}")

    def _derivative(self, x, order):
        return _reciprocal_power_derivative(1.0 + self.shift + x, self.gamma, order)


def _rising_transition(x: np.ndarray, order: int) -> np.ndarray:
    """C-infinity step R on (0, 1): R = expit(-g), g = 1/x - 1/(1-x)."""
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        g = 1.0 / x - 1.0 / (1.0 - x)
        r = expit(-g)
        if order == 0:
            return r
        g1 = -1.0 / x**2 - 1.0 / (1.0 - x) ** 2
        r1 = -r * (1.0 - r) * g1
        if order == 1:
            res = r1
        else:
            g2 = 2.0 / x**3 - 2.0 / (1.0 - x) ** 3
            res = -r1 * (1.0 - 2.0 * r) * g1 - r * (1.0 - r) * g2
    # 0 * inf next to the flat ends; every derivative vanishes there
    return np.where(np.isfinite(res), res, 0.0)


@dataclass(frozen=True)
class SmoothBump(AmplitudeSpec):
    """Equals 1 on [a, b], vanishes outside [a - pad, b + pad], C-infinity in between."""

    a: float = 0.0
    b: float = 1.0
    pad: float = 0.5
    kind = 'smooth-bump'

    def __post_init__(self):
        if self.pad <= 0 or self.b < self.a:
            raise ValidationError(f"bad bump a={self.a}, b={self.b}, pad={self.pad}")

    def _derivative(self, x, order):
        out = np.zeros_like(x) if order else np.where((x >= self.a) & (x <= self.b), 1.0, 0.0)
        left = (x > self.a - self.pad) & (x < self.a)
        right = (x > self.b) & (x < self.b + self.pad)
        scale = self.pad ** (-order)
        if np.any(left):
            u = (x[left] - (self.a - self.pad)) / self.pad
            out[left] = scale * _rising_transition(u, order)
        if np.any(right):
            u = 1.0 - (x[right] - self.b) / self.pad
            out[right] = scale * (-1.0) ** order * _rising_transition(u, order)
        return out

    def support(self):
        return (self.a - self.pad, self.b + self.pad)

    def integral(self) -> float:
        """Exact integral: R(u) + R(1 - u) = 1 makes each transition contribute pad / 2."""
        return (self.b - self.a) + self.pad


@dataclass(frozen=True)
class PolynomialAmplitude(AmplitudeSpec):
    coeffs: tuple[float, ...] = (1.0,)
    kind = 'polynomial'

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(float(c) for c in self.coeffs))

    def _derivative(self, x, order):
        return _NumpyPolynomial(self.coeffs).deriv(order)(x)


@dataclass(frozen=True)
class Product(AmplitudeSpec):
    """Pointwise product of amplitudes (Leibniz rule up to order 2)."""

    factors: tuple[AmplitudeSpec, ...] = field(default_factory=tuple)
    kind = 'product'

    def __post_init__(self):
        object.__setattr__(self, 'factors', tuple(self.factors))
        if not self.factors:
            raise ValidationError("product amplitude needs at least one factor")

    def _derivative(self, x, order):
        v, d1, d2 = np.ones_like(x), np.zeros_like(x), np.zeros_like(x)
        for f in self.factors:
            fv = f.derivative(x, 0)
            f1 = f.derivative(x, 1) if order >= 1 else 0.0
            f2 = f.derivative(x, 2) if order >= 2 else 0.0
            v, d1, d2 = v * fv, d1 * fv + v * f1, d2 * fv + 2.0 * d1 * f1 + v * f2
        return (v, d1, d2)[order]

    def support(self):
        spans = [f.support() for f in self.factors if f.support() is not None]
        if not spans:
            return None
        lo = max(s[0] for s in spans)
        hi = min(s[1] for s in spans)
        return (lo, hi) if lo < hi else (lo, lo)


def sample_phase_derivative(phase: PhaseSpec, a: float, b: float, order: int, n: int = 2049) -> np.ndarray:
    return phase.derivative(np.linspace(a, b, n), order)


def total_variation(phase: PhaseSpec, a: float, b: float, n: int = 2049) -> float:
    """Total variation of phi on [a, b] from a sampled polygon (exact for monotone pieces)."""
    values = phase(np.linspace(a, b, n))
    return float(np.sum(np.abs(np.diff(values))))


def phase_from_name(name: str, **params) -> PhaseSpec:
    """Build a phase family from its short name, as chosen by `lemma statphase --family`."""
    table: dict[str, type[PhaseSpec]] = {
        'linear': Linear,
        'quadratic': Quadratic,
        'quad': Quadratic,
        'chirp-line': ChirpLine,
        'reciprocal': Reciprocal,
        'quad-plus-reciprocal': QuadPlusReciprocal,
        'qpr': QuadPlusReciprocal,
        'reciprocal-diff': ReciprocalDiff,
    }
    try:
        return table[name](**params)
    except KeyError as e:
        raise ValidationError(f"unknown phase family {name!r}") from e


def is_finite_interval(interval: Sequence[float]) -> bool:
    a, b = interval
    return math.isfinite(a) and math.isfinite(b) and a < b
