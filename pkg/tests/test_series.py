import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qpde import special as sp
from qpde.errors import OrderExceedsTruncation
from qpde.series import INF, QSeries, SubstitutionSpec, qs_equal, qs_heat


def geometric(order):
    """1/(1 - q) truncated at ``order``."""
    return QSeries({e: 1 for e in range(order)}, order=order)


def test_monomial_and_order():
    m = QSeries.monomial(3, F(1, 2), F(5, 8))
    assert m.is_exact()
    assert m.valuation == F(5, 8)
    assert m.order == INF
    assert QSeries.zero().is_zero()


def test_truncation_propagates():
    a = geometric(10)
    b = QSeries.monomial(1, 0, 3) * a
    assert b.order == 13
    assert (a + QSeries.one()).order == 10


def test_product_and_inverse():
    a = sp.qpoch_inf(1, 1, 30)
    inv = a.inverse()
    assert qs_equal(a * inv, QSeries.one(), 30).equal
    p = sp.partition_numbers(30)
    assert [int(inv.numerator(n).constant_term().to_fraction()) for n in range(30)] == p


def test_coefficient_beyond_order_raises():
    with pytest.raises(OrderExceedsTruncation):
        geometric(5).coeff(7)


def test_exact_inverse_needs_order():
    one_minus_q = QSeries.one() - QSeries.monomial(1, 0, 1)
    inv = one_minus_q.inverse(order=12)
    assert qs_equal(inv, geometric(12), 12).equal


def test_one_minus_helpers():
    a = geometric(15)
    back = a.mul_one_minus(1, 0, 1)
    assert qs_equal(back, QSeries.one(), 15).equal
    assert qs_equal(QSeries.one().truncate(15).div_one_minus(1, 0, 1), a, 15).equal


def test_delta_operators():
    m = QSeries.monomial(2, F(3, 2), F(1, 4))
    assert m.delta_q().equals(QSeries.monomial(F(1, 2), F(3, 2), F(1, 4))).equal
    assert m.delta_z().equals(QSeries.monomial(3, F(3, 2), F(1, 4))).equal
    # heat H_s on z^a q^b multiplies by s*b + a^2
    assert qs_heat(2, m).equals(QSeries.monomial(2 * (2 * F(1, 4) + F(9, 4)), F(3, 2), F(1, 4))).equal


def test_substitution_shift_and_root_of_unity():
    th = sp.theta_series(1, 1, 20, slope=F(1, 2))
    assert qs_equal(th.substitute(SubstitutionSpec(turn=1)), -th, 15).equal
    flipped = th.substitute(SubstitutionSpec(zpower=-1))
    assert qs_equal(flipped, -th, 15).equal


def test_specialize_z():
    r = sp.rank_series("eulerian", 20)
    assert qs_equal(r.specialize_z(0), sp.qpoch_inf(1, 1, 20, sign=-1), 20).equal


def test_equal_reports_first_mismatch():
    a = geometric(10)
    b = a + QSeries.monomial(1, 0, 4)
    cmp = qs_equal(a, b, 10)
    assert not cmp.equal and cmp.exponent == 4
    with pytest.raises(OrderExceedsTruncation):
        qs_equal(a, b, 12)


def test_json_roundtrip():
    s = sp.mu_series(1, 1, F(1, 2), F(1, 2), 4)
    doc = json.loads(json.dumps(s.to_json()))
    assert set(doc) >= {"Dq", "Dz", "order", "terms"}
    back = QSeries.from_json(doc)
    assert qs_equal(back, s, 4).equal


coeffs = st.dictionaries(st.integers(0, 8), st.integers(-5, 5), max_size=6)


def series_of(d, order=10):
    return QSeries({e: c for e, c in d.items() if c}, order=order)


@given(coeffs, coeffs, coeffs)
def test_ring_laws(a, b, c):
    A, B, C = series_of(a), series_of(b), series_of(c)
    assert qs_equal(A * (B + C), A * B + A * C, 10).equal
    assert qs_equal(A * B, B * A, 10).equal


@given(coeffs, coeffs)
def test_delta_q_is_a_derivation(a, b):
    A, B = series_of(a), series_of(b)
    assert qs_equal((A * B).delta_q(), A.delta_q() * B + A * B.delta_q(), 10).equal


@given(coeffs)
def test_inverse_property(a):
    a = dict(a)
    a[0] = 1
    A = series_of(a)
    assert qs_equal(A * A.inverse(), QSeries.one(), 10).equal
