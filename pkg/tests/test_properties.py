from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oscnorm.core import ExponentPair, as_exponent, classify_region, holder_dual, lp_norm
from oscnorm.normest import DiscreteOperator, opnorm_exact_boundary, witness_ratio
from oscnorm.schrod import StrichartzQuery, strichartz_region
from oscnorm.trigsum import cn_lower_bound, cn_upper_bound

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
exponents = st.one_of(st.floats(min_value=1.0, max_value=50.0), st.just('inf'))
unit = st.floats(min_value=0.0, max_value=1.0)
fractions = st.fractions(min_value=0, max_value=1, max_denominator=60)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 6, elements=finite), arrays(np.float64, 6, elements=finite), exponents)
def test_holder_inequality(a, b, p):
    lhs = float(np.sum(np.abs(a * b)))
    rhs = lp_norm(a, p) * lp_norm(b, holder_dual(p))
    assert lhs <= rhs * (1 + 1e-9) + 1e-9


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 5, elements=finite), exponents, exponents)
def test_norms_are_monotone_in_p(a, p, r):
    small, large = sorted((p, r), key=lambda e: float('inf') if e == 'inf' else e)
    assert lp_norm(a, large) <= lp_norm(a, small) * (1 + 1e-9) + 1e-300


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 6, elements=finite), exponents, exponents)
def test_smaller_exponent_costs_at_most_holder_factor(a, p, r):
    small, large = sorted((as_exponent(p), as_exponent(r)), key=lambda e: e.value)
    bound = 6 ** (small.inv - large.inv) * lp_norm(a, large)
    assert lp_norm(a, small) <= bound * (1 + 1e-9) + 1e-300


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.float64, 5, elements=finite),
    arrays(np.float64, 5, elements=finite),
    finite,
    finite,
    exponents,
)
def test_norms_are_homogeneous(re, im, c_re, c_im, p):
    a, c = re + 1j * im, complex(c_re, c_im)
    assert lp_norm(c * a, p) == pytest.approx(abs(c) * lp_norm(a, p), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(unit, unit)
def test_every_exponent_pair_has_a_region(x, y):
    assert classify_region(ExponentPair(x, y))


@settings(max_examples=40, deadline=None)
@given(unit, unit, st.integers(min_value=1, max_value=40), st.sampled_from(['delta', 'ones', 'chirp']))
def test_extremizers_never_beat_the_upper_bound(x, y, N, family):  # noqa: N803
    pt = ExponentPair(x, y)
    assert cn_lower_bound(N, pt, family) <= cn_upper_bound(N, pt) * (1 + 1e-6)


@settings(max_examples=100, deadline=None)
@given(fractions, fractions, st.integers(min_value=3, max_value=8))
def test_region_verdict_is_symmetric(x, y, n):
    a = strichartz_region(StrichartzQuery(x, y, n))
    b = strichartz_region(StrichartzQuery(y, x, n))
    assert a.in_cone_region == b.in_cone_region
    assert a.in_band_region == b.in_band_region
    assert a.in_hull == b.in_hull
    assert a.kernel_exponents == b.kernel_exponents


@settings(max_examples=100, deadline=None)
@given(fractions, fractions, st.integers(min_value=3, max_value=8))
def test_region_inclusions(x, y, n):
    verdict = strichartz_region(StrichartzQuery(x, y, n))
    if verdict.in_cone_region or verdict.kernel_exponents is not None:
        assert verdict.in_hull
    if verdict.in_hull:
        assert abs(x - y) <= Fraction(1, n)


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (4, 3), elements=finite),
    arrays(np.float64, 3, elements=finite),
    exponents,
)
def test_witness_ratios_respect_closed_forms(matrix, x, q):
    A = DiscreteOperator.sequence_to_sequence(matrix)  # noqa: N806
    if not np.any(x):
        return
    assert witness_ratio(A, x, 1, q) <= opnorm_exact_boundary(A, 1, q) * (1 + 1e-9) + 1e-12
    assert witness_ratio(A, x, 2, 'inf') <= opnorm_exact_boundary(A, 2, 'inf') * (1 + 1e-9) + 1e-12
