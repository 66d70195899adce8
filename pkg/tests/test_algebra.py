from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qpde.algebra import (Cyclo, LaurentPoly, RatCoeff, cyclotomic_polynomial, euler_phi,
                          exact_divide, poly_gcd, rat_normalize)
from qpde.errors import DivisionByZero

small = st.integers(-6, 6)


def cyclo_values(order):
    return st.lists(small, min_size=euler_phi(order), max_size=euler_phi(order)).map(
        lambda cs: sum((Cyclo.zeta(order, k) * c for k, c in enumerate(cs)), Cyclo.rational(0, order)))


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert [euler_phi(n) for n in (1, 2, 3, 4, 5, 12)] == [1, 1, 2, 2, 4, 4]


def test_roots_of_unity():
    i = Cyclo.zeta(4)
    assert i * i == Cyclo.rational(-1)
    w = Cyclo.zeta(3)
    assert 1 + w + w * w == Cyclo.rational(0)
    assert Cyclo.from_turn(F(1, 2)) == Cyclo.rational(-1)
    assert Cyclo.from_turn(F(1, 8)) ** 8 == Cyclo.rational(1)


def test_mixed_orders_embed():
    i = Cyclo.zeta(4)
    w = Cyclo.zeta(3)
    x = i * w
    assert x ** 12 == Cyclo.rational(1)
    assert x ** 6 == Cyclo.rational(-1)


@given(cyclo_values(12))
def test_cyclo_inverse(x):
    if x.is_zero():
        with pytest.raises((DivisionByZero, ZeroDivisionError)):
            x.inverse()
    else:
        assert x * x.inverse() == Cyclo.rational(1)


@given(cyclo_values(5), cyclo_values(5), cyclo_values(5))
def test_cyclo_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)


def poly(d):
    out = LaurentPoly.zero()
    for e, c in d.items():
        out = out + LaurentPoly.monomial((F(e),), c)
    return out


def test_laurent_arithmetic_and_delta():
    p = poly({-1: 1, 0: 2, 3: -1})
    q = poly({1: 1, 0: -1})
    assert p * q == poly({-1: -1, 0: -1, 1: 2, 3: 1, 4: -1})
    assert (p * q) - (q * p) == LaurentPoly.zero()
    assert p.delta() == poly({-1: -1, 3: -3})
    assert p.shift((F(2),)) == poly({1: 1, 2: 2, 5: -1})


def test_laurent_half_exponents():
    h = LaurentPoly.monomial((F(1, 2),), 1)
    assert h * h == poly({1: 1})
    assert h.delta() == h.scale(F(1, 2))


def test_gcd_and_division():
    a = poly({0: -1, 2: 1})          # z^2 - 1
    b = poly({0: 1, 1: 1})           # 1 + z
    g = poly_gcd(a, b)
    assert g.exponent_range() == (0, 1)
    quo = exact_divide(a, g)
    assert quo * g == a


def test_ratcoeff_normalizes():
    a = poly({0: -1, 2: 1})
    b = poly({0: 1, 1: 1})
    r = rat_normalize(RatCoeff(a, b))
    assert r.is_polynomial
    assert r == RatCoeff(poly({0: -1, 1: 1}), poly({0: 1}))


def test_ratcoeff_arithmetic():
    x = RatCoeff(poly({0: 1}), poly({0: 1, 1: -1}))   # 1/(1-z)
    y = x * RatCoeff(poly({0: 1, 1: -1}), poly({0: 1}))
    assert y.is_polynomial
    assert (x + x - x * 2).is_zero()
    assert x * x.inverse() == RatCoeff(poly({0: 1}), poly({0: 1}))


def test_ratcoeff_delta_quotient_rule():
    x = RatCoeff(poly({0: 1}), poly({0: 1, 1: -1}))   # 1/(1-z): delta_z = z/(1-z)^2
    d = x.delta_z()
    assert d == RatCoeff(poly({1: 1}), poly({0: 1, 1: -2, 2: 1}))
