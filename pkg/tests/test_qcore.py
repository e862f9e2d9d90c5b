import random

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from qbessel import (INFINITY, CompensatedSum, DomainError, QBase,
                     TruncationPolicy, ZeroDivisor, qpochhammer,
                     qpochhammer_ex, qpochhammer_multi, qpoch_inf_qexp,
                     qpoch_qexp, qpoch_qexp_signed)

import oracle_mp

Q = 0.5


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_empty_product():
    assert qpochhammer(0.3, 0.5, 0) == 1.0


def test_two_factor_product():
    assert qpochhammer(0.5, 0.5, 2) == pytest.approx(0.375, rel=1e-15)


def test_zero_divisor_negative_index():
    # (q*q^-1; q)_1 = (1; q)_1 = 0, so the reciprocal blows up
    with pytest.raises(ZeroDivisor):
        qpochhammer(Q, Q, -1)


def test_unit_parameter_kills_product():
    assert qpochhammer(1.0, Q, 3) == 0.0
    assert qpochhammer(1.0, Q, 1) == 0.0


def test_multi_singleton_matches_scalar():
    assert qpochhammer_multi([0.3 + 0.1j], Q, 4) == qpochhammer(0.3 + 0.1j, Q, 4)


def test_multi_two_factors():
    assert qpochhammer_multi([0.5, 0.25], 0.5, 1) == pytest.approx(0.375, rel=1e-15)


def test_multi_vanishing_chain():
    assert qpochhammer_multi([1.0, 0.5], 0.5, 3) == 0.0


def test_multi_empty_rejected():
    with pytest.raises(DomainError):
        qpochhammer_multi([], Q, 2)


def test_infinite_needs_base_inside_unit_interval():
    with pytest.raises(DomainError):
        qpochhammer(0.5, 1.5, INFINITY)
    with pytest.raises(DomainError):
        qpochhammer(0.5, -0.5, INFINITY)


def test_qbase_cap_applies_to_infinite_products():
    with pytest.raises(DomainError):
        qpochhammer(0.5, QBase(0.995, q_max=0.99), INFINITY)
    # raising the cap admits the same base
    qpochhammer(0.5, QBase(0.995, q_max=0.999), INFINITY)


def test_finite_product_any_real_base():
    # descending-base products occur with base 1/q
    v = qpochhammer(0.25, 2.0, 3)
    assert v == pytest.approx((1 - 0.25) * (1 - 0.5) * (1 - 1.0), abs=1e-15)


def test_infinite_product_matches_oracle():
    got = qpochhammer(0.3 + 0.2j, Q, INFINITY)
    want = complex(oracle_mp.qpoch(mp.mpc(0.3, 0.2), Q, mp.inf))
    assert rel(got, want) < 1e-14


def test_infinite_tail_bound_overestimates_truth():
    for a in (0.9, -0.4, 0.3 + 0.2j):
        loose = TruncationPolicy(eps_term=1e-6, max_terms=500)
        got, _, tail = qpochhammer_ex(a, Q, INFINITY, loose)
        want = complex(oracle_mp.qpoch(mp.mpmathify(a), Q, mp.inf))
        assert abs(got - want) <= tail * max(abs(got), 1.0)


@settings(max_examples=80, deadline=None)
@given(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
       st.integers(min_value=0, max_value=8))
def test_recurrence(a, n):
    lhs = qpochhammer(a, Q, n + 1)
    rhs = qpochhammer(a, Q, n) * (1 - a * Q**n)
    assert rel(lhs, rhs) < 1e-13


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
       st.integers(min_value=0, max_value=8))
def test_splitting(a, n):
    lhs = qpochhammer(a, Q, INFINITY)
    rhs = qpochhammer(a, Q, n) * qpochhammer(a * Q**n, Q, INFINITY)
    assert rel(lhs, rhs) < 1e-11


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
       st.integers(min_value=1, max_value=8))
def test_negative_index_inverse(a, n):
    try:
        lhs = qpochhammer(a, Q, -n)
    except ZeroDivisor:
        return
    rhs = qpochhammer(a * Q ** (-n), Q, n)
    assert rel(lhs * rhs, 1.0) < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=3.0), st.integers(min_value=0, max_value=30))
def test_lower_upper_envelope(alpha, n):
    mid = qpochhammer(Q**alpha, Q, n)
    lo = qpochhammer(Q**alpha, Q, INFINITY)
    hi = qpochhammer(-(Q**alpha), Q, INFINITY)
    assert lo <= mid * (1 + 1e-14) and mid <= hi * (1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10), st.integers(min_value=0, max_value=10))
def test_lattice_decay_envelope(m, n):
    lhs = abs(qpochhammer(Q ** (-m), Q, n) * Q ** (n * m))
    assert lhs <= Q ** (n * (n - 1) // 2) * (1 + 1e-13)


def test_qpoch_qexp_exact_zero():
    # exponent passes through 0, so one factor is exactly 1 - q^0 = 0
    assert qpoch_qexp(-2, 0.3, 5) == 0.0


def test_qpoch_qexp_signed_negative_matches_reciprocal():
    v = qpoch_qexp_signed(0.5, Q, -3)
    w = 1.0 / qpoch_qexp(0.5 - 3, Q, 3)
    assert v == pytest.approx(w, rel=1e-15)
    with pytest.raises(ZeroDivisor):
        qpoch_qexp_signed(1, Q, -3)  # runs through the exact zero at q^0


def test_qpoch_inf_qexp_zero_for_nonpositive_exponent():
    assert qpoch_inf_qexp(0, Q) == 0.0
    assert qpoch_inf_qexp(-3, Q) == 0.0
    assert qpoch_inf_qexp(1, Q) == pytest.approx(
        float(oracle_mp.qpoch(Q, Q, mp.inf)), rel=1e-14)


def test_compensated_sum_beats_naive():
    rng = random.Random(7)
    vals = [rng.uniform(-1, 1) * 10 ** rng.uniform(-12, 12) for _ in range(4000)]
    acc = CompensatedSum(0.0)
    for v in vals:
        acc.add(v)
    want = float(mp.fsum([mp.mpf(v) for v in vals]))
    naive = sum(vals)
    assert abs(acc.value - want) <= abs(naive - want) + 1e-30
    assert abs(acc.value - want) <= 1e-9 * max(abs(want), 1.0)


def test_policy_validation():
    with pytest.raises(DomainError):
        TruncationPolicy(eps_term=0.0)
    with pytest.raises(DomainError):
        TruncationPolicy(stall_window=0)


def test_mpmath_backend_passthrough():
    # the same code path runs at elevated precision when fed mpmath numbers
    hp = qpochhammer(mp.mpf("0.3"), mp.mpf("0.5"), 6)
    assert isinstance(hp, mp.mpf)
    assert rel(float(hp), qpochhammer(0.3, 0.5, 6)) < 1e-15
