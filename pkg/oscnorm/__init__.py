"""Operator norm asymptotics for trigonometric sums and an oscillating-kernel integral operator."""

from .core import (  # noqa: F401
    CircleGrid,
    CoefficientVector,
    Exponent,
    ExponentPair,
    Region,
    UnitIntervalGrid,
    classify_region,
    holder_dual,
    lp_norm,
    lq_norm,
)
from .normest import (  # noqa: F401
    DiscreteOperator,
    NormEstimate,
    ScanRecord,
    fit_exponent,
    holder_transfer,
    opnorm_exact_boundary,
    opnorm_lower,
    riesz_thorin_combine,
)

__version__ = '0.1.0'

__all__ = [
    'CircleGrid',
    'CoefficientVector',
    'DiscreteOperator',
    'Exponent',
    'ExponentPair',
    'NormEstimate',
    'Region',
    'ScanRecord',
    'UnitIntervalGrid',
    'classify_region',
    'fit_exponent',
    'holder_dual',
    'holder_transfer',
    'lp_norm',
    'lq_norm',
    'opnorm_exact_boundary',
    'opnorm_lower',
    'riesz_thorin_combine',
]
