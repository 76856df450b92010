"""Exponents, discrete norms and quadrature grids shared by every oscnorm module.

Exponents live in the extended range [1, inf]; infinity is a first-class value and every
norm formula branches on it explicitly instead of approximating it by a large number.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss

from utils.error_handler import ValidationError
from utils.logging_setup import get_logger

logger = get_logger('core')

REGION_EPS = 1e-12
MIN_CIRCLE_NODES = 256
CIRCLE_OVERSAMPLING = 4
GL_PANEL_ORDER = 8
WEIGHT_SUM_TOL = 1e-12

_INF_TOKENS = {'inf', 'infinity', '+inf', 'oo', '∞'}


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue exponent p in [1, inf]."""

    value: float

    def __post_init__(self):
        try:
            v = float(self.value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"exponent must be a number, got {self.value!r}") from e
        if math.isnan(v) or v < 1:
            raise ValidationError(
                f"exponent must lie in [1, inf], got {self.value}", error_code='EXPONENT'
            )
        object.__setattr__(self, 'value', v)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def inv(self) -> float:
        """1/p, with 1/inf = 0."""
        return 0.0 if self.is_infinite else 1.0 / self.value

    @classmethod
    def parse(cls, text: str | float | int) -> Exponent:
        """Parse '4', '1.5', 'inf' or '∞'."""
        if isinstance(text, str) and text.strip().lower() in _INF_TOKENS:
            return cls(math.inf)
        return cls(float(text))

    @classmethod
    def from_inv(cls, inv: float) -> Exponent:
        if not 0.0 <= inv <= 1.0:
            raise ValidationError(f"1/p must lie in [0, 1], got {inv}", error_code='EXPONENT')
        return cls(math.inf if inv == 0 else 1.0 / inv)

    def dual(self) -> Exponent:
        return holder_dual(self)

    def __str__(self) -> str:
        return 'inf' if self.is_infinite else f"{self.value:g}"


ExponentLike = Exponent | float | int | str


def as_exponent(p: ExponentLike) -> Exponent:
    """Coerce numbers and strings into an Exponent."""
    if isinstance(p, Exponent):
        return p
    return Exponent.parse(p)


def holder_dual(p: ExponentLike) -> Exponent:
    """Return p' with 1/p + 1/p' = 1 (1 <-> inf)."""
    p = as_exponent(p)
    if p.is_infinite:
        return Exponent(1.0)
    if p.value == 1.0:
        return Exponent(math.inf)
    return Exponent(p.value / (p.value - 1.0))


class Region(str, Enum):
    A = 'A'
    B = 'B'
    C = 'C'


@dataclass(frozen=True)
class ExponentPair:
    """The point (1/p, 1/q) of the unit square."""

    inv_p: float
    inv_q: float

    def __post_init__(self):
        for name in ('inv_p', 'inv_q'):
            v = float(getattr(self, name))
            if math.isnan(v) or not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}", error_code='EXPONENT')
            object.__setattr__(self, name, v)

    @classmethod
    def from_exponents(cls, p: ExponentLike, q: ExponentLike) -> ExponentPair:
        return cls(as_exponent(p).inv, as_exponent(q).inv)

    @property
    def p(self) -> Exponent:
        return Exponent.from_inv(self.inv_p)

    @property
    def q(self) -> Exponent:
        return Exponent.from_inv(self.inv_q)

    def regions(self) -> frozenset[Region]:
        return classify_region(self)

    def __str__(self) -> str:
        return f"({self.p}->{self.q})"


def classify_region(pt: ExponentPair) -> frozenset[Region]:
    """All closed regions A, B, C containing the point; boundary points may have several."""
    x, y = pt.inv_p, pt.inv_q
    found = set()
    if x >= 0.5 - REGION_EPS and y >= 1.0 - x - REGION_EPS:
        found.add(Region.A)
    if y <= 0.5 + REGION_EPS and x <= 1.0 - y + REGION_EPS:
        found.add(Region.B)
    if x <= 0.5 + REGION_EPS and y >= 0.5 - REGION_EPS:
        found.add(Region.C)
    return frozenset(found)


def primary_region(pt: ExponentPair) -> Region:
    """Single label with priority A > B > C."""
    regions = classify_region(pt)
    for region in (Region.A, Region.B, Region.C):
        if region in regions:
            return region
    raise AssertionError(f"regions cover the square, {pt} fell through")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Finite complex coefficient vector a = (a_0, ..., a_{N-1})."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128).ravel()
        if arr.size < 1:
            raise ValidationError("coefficient vector must have N >= 1 entries")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("coefficient vector has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, 'entries', arr)

    @property
    def N(self) -> int:  # noqa: N802
        return int(self.entries.size)

    def __len__(self) -> int:
        return self.N

    def scaled(self, c: complex) -> CoefficientVector:
        return CoefficientVector(self.entries * c)


def _scaled_power_norm(mod: np.ndarray, weights: np.ndarray | None, p: float) -> float:
    """(sum w |x|^p)^(1/p) evaluated after dividing by max |x| to avoid overflow."""
    top = float(mod.max()) if mod.size else 0.0
    if top == 0.0:
        return 0.0
    r = mod / top
    terms = r if p == 1.0 else r**p
    total = float(np.sum(terms if weights is None else weights * terms))
    return top * total ** (1.0 / p)


def lp_norm(a: CoefficientVector | np.ndarray, p: ExponentLike) -> float:
    """Sequence norm (sum |a_n|^p)^(1/p), max |a_n| for p = inf."""
    p = as_exponent(p)
    arr = a.entries if isinstance(a, CoefficientVector) else np.asarray(a)
    mod = np.abs(arr).ravel()
    if p.is_infinite:
        return float(mod.max()) if mod.size else 0.0
    return _scaled_power_norm(mod, None, p.value)


@functools.lru_cache(maxsize=64)
def gauss_legendre_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def composite_gauss_legendre(
    breaks: np.ndarray, order: int = GL_PANEL_ORDER
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule with panels [breaks[k], breaks[k+1]]."""
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) <= 0):
        raise ValidationError("panel breakpoints must be strictly increasing")
    u, w = gauss_legendre_01(order)
    widths = np.diff(breaks)
    nodes = breaks[:-1, None] + widths[:, None] * u[None, :]
    weights = widths[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _check_rule(nodes: np.ndarray, weights: np.ndarray, lo: float, hi: float) -> None:
    if nodes.shape != weights.shape or nodes.size < 2:
        raise ValidationError("grid needs at least two nodes with matching weights")
    if np.any(weights <= 0):
        raise ValidationError("grid weights must be positive")
    if abs(float(np.sum(weights)) - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"grid weights must sum to 1, got {np.sum(weights)!r}")
    if nodes.min() < lo - 1e-12 or nodes.max() > hi + 1e-12:
        raise ValidationError(f"grid nodes must lie in [{lo}, {hi}]")


@dataclass(frozen=True, eq=False)
class CircleGrid:
    """Quadrature for the normalized measure dt/2pi on [-pi, pi].

    rule='trapezoid' uses t_m = -pi + 2 pi m / M with equal weights; it is exact for every
    trigonometric polynomial of degree < M and allows FFT evaluation of trig sums.
    """

    nodes: np.ndarray
    weights: np.ndarray
    rule: str = 'trapezoid'

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        _check_rule(nodes, weights, -math.pi, math.pi)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'weights', weights)

    @property
    def M(self) -> int:  # noqa: N802
        return int(self.nodes.size)

    @classmethod
    def trapezoid(cls, M: int) -> CircleGrid:  # noqa: N803
        if M < 2:
            raise ValidationError("circle rule needs M >= 2 nodes")
        m = np.arange(M)
        return cls(-math.pi + 2.0 * math.pi * m / M, np.full(M, 1.0 / M), 'trapezoid')

    @classmethod
    def gauss(cls, M: int, order: int = GL_PANEL_ORDER) -> CircleGrid:  # noqa: N803
        panels = max(1, math.ceil(M / order))
        nodes, weights = composite_gauss_legendre(
            np.linspace(-math.pi, math.pi, panels + 1), order
        )
        return cls(nodes, weights / (2.0 * math.pi), 'gauss')

    @classmethod
    def for_degree(
        cls, N: int, rule: str = 'trapezoid', min_nodes: int = MIN_CIRCLE_NODES  # noqa: N803
    ) -> CircleGrid:
        """Default grid for trig sums of length N: M = max(4N, min_nodes)."""
        if N < 1:
            raise ValidationError(f"N must be >= 1, got {N}")
        M = max(CIRCLE_OVERSAMPLING * N, min_nodes)  # noqa: N806
        if rule == 'trapezoid':
            return cls.trapezoid(M)
        if rule == 'gauss':
            return cls.gauss(M)
        raise ValidationError(f"unknown circle rule {rule!r}")

    def resolves(self, N: int) -> bool:  # noqa: N803
        """True when M >= 2N, enough to integrate |f|^2 for a length-N sum exactly."""
        return self.M >= 2 * N


@dataclass(frozen=True, eq=False)
class UnitIntervalGrid:
    """Quadrature for ds on [0, 1] (composite Gauss-Legendre)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        _check_rule(nodes, weights, 0.0, 1.0)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'weights', weights)

    @property
    def M(self) -> int:  # noqa: N802
        return int(self.nodes.size)

    @classmethod
    def from_breakpoints(cls, breaks, order: int = GL_PANEL_ORDER) -> UnitIntervalGrid:
        breaks = np.asarray(breaks, dtype=float)
        if breaks[0] != 0.0 or breaks[-1] != 1.0:
            raise ValidationError("breakpoints must start at 0 and end at 1")
        return cls(*composite_gauss_legendre(breaks, order))

    @classmethod
    def gauss(cls, M: int, order: int = GL_PANEL_ORDER) -> UnitIntervalGrid:  # noqa: N803
        """At least M nodes in equal panels of the given order."""
        panels = max(1, math.ceil(M / order))
        return cls.from_breakpoints(np.linspace(0.0, 1.0, panels + 1), order)

    @classmethod
    def graded(
        cls, N: float, base_panels: int = 16, order: int = GL_PANEL_ORDER  # noqa: N803
    ) -> UnitIntervalGrid:
        """Equal panels refined geometrically towards 0 down to width 1/(8N)."""
        h = 1.0 / base_panels
        finest = 1.0 / (8.0 * max(float(N), 1.0))
        levels = max(0, math.ceil(math.log2(h / finest)))
        geometric = h * 2.0 ** -np.arange(levels, 0, -1)
        breaks = np.concatenate(([0.0], geometric, np.linspace(h, 1.0, base_panels)))
        return cls.from_breakpoints(breaks, order)


Grid = CircleGrid | UnitIntervalGrid


def lq_norm(samples: np.ndarray, grid: Grid, q: ExponentLike) -> float:
    """(sum w_m |f_m|^q)^(1/q) on the grid; max |f_m| for q = inf."""
    q = as_exponent(q)
    mod = np.abs(np.asarray(samples)).ravel()
    if mod.size != grid.M:
        raise ValidationError(f"{mod.size} samples for a grid of {grid.M} nodes")
    if q.is_infinite:
        return float(mod.max())
    return _scaled_power_norm(mod, grid.weights, q.value)
