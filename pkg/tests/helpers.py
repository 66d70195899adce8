from fractions import Fraction as F

from qpde.algebra import Cyclo


def row(s, qexp):
    """q^qexp numerator of a series as {z-exponent: value}, rationals where possible."""
    out = {}
    for (e,), c in s.numerator(F(qexp)).terms().items():
        out[e] = c.to_fraction() if c.is_rational() else c
    return out


def scalar_coeffs(s, n):
    """Constant-in-z q-coefficients for exponents start, start+1, ... as a list (pure q-series)."""
    return [row(s, e).get(0, 0) for e in n]


I = Cyclo.zeta(4)
