import math

import numpy as np
import pytest

from oscnorm.core import ExponentPair
from oscnorm.normest import (
    DiscreteOperator,
    ScanRecord,
    fit_exponent,
    holder_transfer,
    log_spaced,
    opnorm_exact_boundary,
    opnorm_lower,
    riesz_thorin_combine,
    weighted_norm,
    witness_ratio,
)
from oscnorm.trigsum import TrigOperator, cn_upper_bound
from utils.error_handler import PreconditionError, ValidationError


class TestOpnormLower:
    def setup_method(self):
        self.identity = DiscreteOperator.sequence_to_sequence(np.eye(8))
        self.diag = DiscreteOperator.sequence_to_sequence(np.diag([1.0, 2.0, 3.0]))

    def test_identity(self):
        est = opnorm_lower(self.identity, 2, 2)
        assert est.lower == pytest.approx(1.0, rel=1e-10)

    def test_diagonal_largest_singular_value(self):
        est = opnorm_lower(self.diag, 2, 2)
        assert est.lower == pytest.approx(3.0, rel=1e-8)

    def test_lower_is_attained_by_witness(self):
        rng = np.random.default_rng(11)
        A = DiscreteOperator.sequence_to_sequence(rng.standard_normal((6, 5)))  # noqa: N806
        est = opnorm_lower(A, 3, 1.5, restarts=6)
        assert est.lower == pytest.approx(witness_ratio(A, est.input_witness, 3, 1.5), rel=1e-12)
        assert est.lower <= opnorm_lower(A, 1, 1.5).lower * 5 ** (1 - 1 / 3) * (1 + 1e-9)

    def test_ones_maximizes_trig_sum_into_l4(self):
        op = TrigOperator(8).discretize()
        est = opnorm_lower(op, 'inf', 4, seeds=[('ones', np.ones(8))], rng_seed=5)
        assert est.lower == pytest.approx(344**0.25, rel=0.01)
        assert est.best_start == 'ones'
        assert 'random0' in est.start_values

    def test_same_seed_same_estimate(self):
        rng = np.random.default_rng(2)
        A = DiscreteOperator.sequence_to_sequence(rng.standard_normal((7, 7)))  # noqa: N806
        first = opnorm_lower(A, 4, 3, rng_seed=7)
        second = opnorm_lower(A, 4, 3, rng_seed=7)
        assert first.lower == second.lower
        assert first.start_values == second.start_values

    def test_threads_do_not_change_the_result(self):
        rng = np.random.default_rng(4)
        A = DiscreteOperator.sequence_to_sequence(rng.standard_normal((9, 6)))  # noqa: N806
        serial = opnorm_lower(A, 2.5, 2, rng_seed=3, workers=1)
        threaded = opnorm_lower(A, 2.5, 2, rng_seed=3, workers=4)
        assert serial.lower == threaded.lower
        assert serial.best_start == threaded.best_start

    @pytest.mark.parametrize('c', [2.0, 0.5, -3.0])
    def test_scaling_the_operator_scales_the_estimate(self, c):
        rng = np.random.default_rng(11)
        A = DiscreteOperator.sequence_to_sequence(rng.standard_normal((6, 5)))  # noqa: N806
        est = opnorm_lower(A, 3, 1.5, restarts=4, rng_seed=3)
        scaled = opnorm_lower(A.scaled(c), 3, 1.5, restarts=4, rng_seed=3)
        assert scaled.lower == pytest.approx(abs(c) * est.lower, rel=1e-8)
        assert witness_ratio(A, scaled.input_witness, 3, 1.5) == pytest.approx(est.lower, rel=1e-8)

    @pytest.mark.parametrize('N', [4, 16, 32])
    def test_trig_estimates_stay_under_upper_bound(self, N):  # noqa: N803
        A = TrigOperator(N).discretize()  # noqa: N806
        for inv_p in (0.25, 0.5, 0.75):
            for inv_q in (0.25, 0.5, 0.75):
                est = opnorm_lower(A, 1 / inv_p, 1 / inv_q, restarts=2)
                assert est.lower <= cn_upper_bound(N, ExponentPair(inv_p, inv_q)) * (1 + 1e-6)

    def test_zero_operator(self):
        A = DiscreteOperator.sequence_to_sequence(np.zeros((3, 3)))  # noqa: N806
        assert opnorm_lower(A, 2, 3).lower == 0.0

    def test_zero_seed_is_skipped(self):
        est = opnorm_lower(self.diag, 2, 2, seeds=[('zero', np.zeros(3))], restarts=0)
        assert 'zero' not in est.start_values
        assert est.lower == pytest.approx(3.0, rel=1e-8)

    def test_seed_length_checked(self):
        with pytest.raises(ValidationError):
            opnorm_lower(self.diag, 2, 3, seeds=[np.ones(4)])

    def test_q_one_uses_sign_map(self):
        A = DiscreteOperator.sequence_to_sequence(np.array([[1.0, 1.0], [1.0, -1.0]]))  # noqa: N806
        # ||A||_{2->1} = max over the unit l^2 sphere of |x1 + x2| + |x1 - x2| = 2
        assert opnorm_lower(A, 2, 1, restarts=8).lower == pytest.approx(2.0, rel=1e-6)


class TestDiscreteOperator:
    def test_rejects_non_finite_entries(self):
        with pytest.raises(ValidationError) as info:
            DiscreteOperator.sequence_to_sequence(np.array([[1.0, np.nan]]))
        assert info.value.error_code == 'NONFINITE'

    def test_weights_must_match_shape(self):
        with pytest.raises(ValidationError):
            DiscreteOperator(np.ones((2, 3)), np.ones(2), np.ones(2))

    def test_adjoint(self):
        A = DiscreteOperator.sequence_to_sequence(np.array([[1.0, 2j], [0.0, 3.0]]))  # noqa: N806
        x, z = np.array([1.0, 1j]), np.array([2.0, -1.0])
        assert np.vdot(z, A.apply(x)) == pytest.approx(np.vdot(A.adjoint(z), x))


class TestBoundaryForms:
    def test_one_to_inf_is_max_entry(self):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((4, 4))  # noqa: N806
        A = DiscreteOperator.sequence_to_sequence(M)  # noqa: N806
        assert opnorm_exact_boundary(A, 1, 'inf') == pytest.approx(np.abs(M).max())

    def test_trig_operator_one_to_inf(self):
        op = TrigOperator(8).discretize()
        assert opnorm_exact_boundary(op, 1, 'inf') == pytest.approx(1.0)

    def test_weighted_column(self):
        A = DiscreteOperator(np.array([[1.0], [1.0]]), [1.0], [0.5, 0.5])  # noqa: N806
        assert opnorm_exact_boundary(A, 1, 2) == pytest.approx(1.0)

    def test_row_form_matches_holder(self):
        A = DiscreteOperator.sequence_to_sequence(np.array([[3.0, 4.0]]))  # noqa: N806
        assert opnorm_exact_boundary(A, 2, 'inf') == pytest.approx(5.0)
        est = opnorm_lower(A, 2, 'inf')
        assert witness_ratio(A, est.input_witness, 2, 'inf') == pytest.approx(5.0)

    def test_interior_exponents_rejected(self):
        A = DiscreteOperator.sequence_to_sequence(np.eye(2))  # noqa: N806
        with pytest.raises(PreconditionError):
            opnorm_exact_boundary(A, 2, 2)


class TestBoundAlgebra:
    def test_riesz_thorin_endpoints(self):
        pt0, pt1 = ExponentPair(1.0, 0.0), ExponentPair(0.5, 0.5)
        assert riesz_thorin_combine(3.0, pt0, 5.0, pt1, 0.0) == (3.0, pt0)

    def test_riesz_thorin_segment(self):
        pt0, pt1 = ExponentPair(1.0, 0.0), ExponentPair(0.5, 0.5)
        for theta in (0.25, 0.5, 0.9):
            bound, pt = riesz_thorin_combine(1.0, pt0, 1.0, pt1, theta)
            assert bound == pytest.approx(1.0)
            assert pt.inv_q == pytest.approx(1.0 - pt.inv_p)

    def test_geometric_mean(self):
        bound, _ = riesz_thorin_combine(2.0, ExponentPair(1, 0), 8.0, ExponentPair(0, 1), 0.5)
        assert bound == pytest.approx(4.0)

    def test_riesz_thorin_is_log_linear_in_theta(self):
        pt0, pt1 = ExponentPair(1, 0), ExponentPair(0.5, 0.5)
        for theta in np.linspace(0.0, 1.0, 11):
            bound, _ = riesz_thorin_combine(2.0, pt0, 32.0, pt1, float(theta))
            assert math.log(bound) == pytest.approx((1 - theta) * math.log(2.0) + theta * math.log(32.0))

    def test_riesz_thorin_is_monotone_in_both_bounds(self):
        pt0, pt1 = ExponentPair(1, 0), ExponentPair(0, 1)
        base, _ = riesz_thorin_combine(2.0, pt0, 3.0, pt1, 0.4)
        assert riesz_thorin_combine(2.5, pt0, 3.0, pt1, 0.4)[0] > base
        assert riesz_thorin_combine(2.0, pt0, 3.5, pt1, 0.4)[0] > base
        assert riesz_thorin_combine(1.5, pt0, 2.5, pt1, 0.4)[0] < base

    def test_theta_range(self):
        with pytest.raises(ValidationError):
            riesz_thorin_combine(1.0, ExponentPair(1, 0), 1.0, ExponentPair(0, 1), 1.5)

    def test_holder_transfer(self):
        one_inf = ExponentPair.from_exponents(1, 'inf')
        for q in (1, 2, 4):
            assert holder_transfer(1.0, one_inf, ExponentPair.from_exponents(1, q), 64) == 1.0
        two_two = ExponentPair.from_exponents(2, 2)
        inf_two = ExponentPair.from_exponents('inf', 2)
        assert holder_transfer(1.0, two_two, inf_two, 16) == pytest.approx(4.0)

    def test_holder_transfer_incomparable(self):
        source = ExponentPair.from_exponents(1, 2)
        assert holder_transfer(1.0, source, ExponentPair.from_exponents(1, 4), 8) is None
        assert holder_transfer(1.0, ExponentPair.from_exponents(2, 2), source, 8) is None


class TestFitting:
    def test_exact_power_law(self):
        rows = [ScanRecord(N, N**-0.5) for N in (10, 100, 1000, 10000)]
        fit = fit_exponent(rows)
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.residual < 1e-12

    def test_constant(self):
        fit = fit_exponent([ScanRecord(N, 2.5) for N in (4, 8, 16)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert math.exp(fit.intercept) == pytest.approx(2.5)

    def test_offset(self):
        rows = [ScanRecord(N, (1 + N) ** -0.5) for N in (16, 160, 1600)]
        assert fit_exponent(rows, offset=1.0).slope == pytest.approx(-0.5, abs=1e-12)

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValidationError):
            fit_exponent([ScanRecord(N, 0.0) for N in (1, 2, 3)])

    def test_needs_three_rows(self):
        with pytest.raises(ValidationError):
            fit_exponent([ScanRecord(1, 1.0), ScanRecord(2, 1.0)])

    def test_scan_record_rejects_negative(self):
        with pytest.raises(ValidationError):
            ScanRecord(4, -1.0)

    def test_log_spaced_integer_grid(self):
        points = log_spaced(1, 10, 30, integer=True)
        assert points == sorted(set(points))
        assert points[0] == 1 and points[-1] == 10

    def test_weighted_norm_ignores_zero_weight_rows_at_inf(self):
        assert weighted_norm(np.array([5.0, 1.0]), np.array([0.0, 1.0]), 'inf') == 1.0
