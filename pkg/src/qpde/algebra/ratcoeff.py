"""Univariate rational functions with cyclotomic coefficients."""

from __future__ import annotations

from fractions import Fraction

from ..errors import DivisionByZero
from .cyclo import Cyclo
from .laurent import LaurentPoly


# dense univariate helpers (polynomials in the grid variable, lowest first) ----

def to_dense(p: LaurentPoly):
    """``(lo, [Cyclo, ...])`` for a single-variable polynomial."""
    if p.nvars != 1:
        raise ValueError("dense form needs a single variable")
    phi = p.phi
    vals = [Cyclo._raw(p.N, [Fraction(c, p.den) for c in p.coef[s:s + phi]])
            for s in range(0, len(p.coef), phi)]
    return p.lo[0], vals


def from_dense(lo, vals, like: LaurentPoly) -> LaurentPoly:
    terms = {Fraction(lo + i, like.dz): v for i, v in enumerate(vals) if not v.is_zero()}
    N = like.N
    for v in vals:
        N = N * v.order // _gcd(N, v.order)
    return LaurentPoly(terms, vars=like.vars, dz=like.dz, N=N)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def dense_divmod(a, b):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if len(a) < len(b):
        return [], _trim(a)
    inv = b[-1].inverse()
    q = [None] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = a[k + len(b) - 1] * inv
        q[k] = c
        if not c.is_zero():
            for i, m in enumerate(b):
                a[k + i] = a[k + i] - c * m
    return _trim(q), _trim(a[:len(b) - 1])


def dense_gcd(a, b):
    """Monic gcd of two dense polynomials (Euclid)."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = dense_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    inv = a[-1].inverse()
    return [c * inv for c in a]


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd with lowest exponent 0 (units z**k are ignored)."""
    a, b = a._align(b)
    _, da = to_dense(a)
    _, db = to_dense(b)
    g = dense_gcd(da, db)
    return from_dense(0, g, a)


def exact_divide(a: LaurentPoly, b: LaurentPoly):
    """``a / b`` when ``b`` divides ``a`` as Laurent polynomials, else None."""
    a, b = a._align(b)
    if b.is_zero():
        raise DivisionByZero("division by zero polynomial")
    if a.is_zero():
        return a
    la, da = to_dense(a)
    lb, db = to_dense(b)
    q, r = dense_divmod(da, db)
    if r:
        return None
    return from_dense(la - lb, q, a)


# rational functions ---------------------------------------------------------

class RatCoeff:
    """A reduced fraction ``num/den`` of single-variable Laurent polynomials.

    The denominator is kept monic with lowest exponent zero, and
    gcd(num, den) = 1 over the coefficient field.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize=True):
        if not isinstance(num, LaurentPoly):
            num = LaurentPoly.constant(num)
        if den is None:
            den = LaurentPoly.constant(1, vars=num.vars)
        elif not isinstance(den, LaurentPoly):
            den = LaurentPoly.constant(den, vars=num.vars)
        if num.nvars != 1 or den.nvars != 1:
            raise ValueError("RatCoeff is single-variable")
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        num, den = num._align(den)
        if normalize:
            num, den = _normalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatCoeff is immutable")

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_constant() and self.den.constant_term() == 1

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = _coerce(other)
        return RatCoeff(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatCoeff(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return RatCoeff(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        return RatCoeff(self.den, self.num)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RatCoeff(self.num ** k, self.den ** k)

    def delta_z(self):
        return rat_delta_z(self)

    def evaluate(self, turn) -> Cyclo:
        d = self.den.evaluate(turn)
        if d.is_zero():
            raise DivisionByZero(f"pole at z = exp(2 pi i * {turn})")
        return self.num.evaluate(turn) / d

    def subs_monomial(self, power, turn=0):
        return RatCoeff(self.num.subs_monomial(power, turn), self.den.subs_monomial(power, turn))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclo, LaurentPoly)):
            other = _coerce(other)
        if not isinstance(other, RatCoeff):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatCoeff({self})"

    def __str__(self):
        if self.is_polynomial:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _coerce(x) -> RatCoeff:
    if isinstance(x, RatCoeff):
        return x
    return RatCoeff(x)


def _normalize(num: LaurentPoly, den: LaurentPoly):
    # pull the lowest power of z and the leading coefficient out of den
    shift = Fraction(den.lo[0], den.dz)
    num, den = num.shift(-shift), den.shift(-shift)
    lead = den.leading()
    if lead != 1:
        inv = lead.inverse()
        num, den = num.scale(inv), den.scale(inv)
    if num.is_zero():
        return num, LaurentPoly.constant(1, vars=den.vars, dz=den.dz, N=den.N)
    if den.shape[0] > 1:
        g = poly_gcd(num, den)
        if g.shape[0] > 1:
            num = exact_divide(num, g)
            den = exact_divide(den, g)
            lead = den.leading()
            if lead != 1:
                inv = lead.inverse()
                num, den = num.scale(inv), den.scale(inv)
    return num, den


def rat_normalize(r: RatCoeff) -> RatCoeff:
    """Canonical reduced form; value unchanged."""
    return RatCoeff(r.num, r.den)


def rat_delta_z(r: RatCoeff) -> RatCoeff:
    """z d/dz by the quotient rule."""
    if r.den.is_constant():
        return RatCoeff(r.num.delta(), r.den)
    return RatCoeff(r.num.delta() * r.den - r.num * r.den.delta(), r.den * r.den)
