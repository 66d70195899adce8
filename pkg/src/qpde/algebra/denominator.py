"""Factored denominators for series with rational-function coefficients.

A denominator is a product of powers of monic "atoms" (lowest exponent 0).
Atoms with rational coefficients are split into cyclotomic factors, so two
denominators built from 1 - z**c style factors have an exact lcm given by
taking the larger exponent of each atom.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .cyclo import Cyclo, cyclotomic_polynomial, euler_phi
from .laurent import LaurentPoly
from .ratcoeff import exact_divide


def canonical_grid(p: LaurentPoly) -> LaurentPoly:
    """Re-express ``p`` on the coarsest exponent grid that holds it."""
    if p.is_zero() or p.nvars != 1:
        return p
    g = p.dz
    for (e,), _ in p.items():
        g = gcd(g, e)
        if g == 1:
            return p
    if g == p.dz and p.dz == 1:
        return p
    terms = {Fraction(e, p.dz): c for (e,), c in p.items()}
    return LaurentPoly(terms, vars=p.vars, dz=p.dz // g, N=p.N)


def split_unit(p: LaurentPoly):
    """Write ``p = c * z**s * m`` with ``m`` monic and lowest exponent 0."""
    p = canonical_grid(p)
    shift = Fraction(p.lo[0], p.dz)
    m = p.shift(-shift)
    lead = m.leading()
    if lead != 1:
        m = m.scale(lead.inverse())
    return lead, shift, canonical_grid(m)


def _cyclotomic_in(grid_dz, d, vars, N):
    coeffs = cyclotomic_polynomial(d)
    return LaurentPoly({Fraction(i, grid_dz): c for i, c in enumerate(coeffs) if c},
                       vars=vars, dz=grid_dz, N=N)


def _rational_coefficients(p):
    return all(c.is_rational() for _, c in p.items())


def atomize(m: LaurentPoly):
    """Split a monic, lowest-exponent-0 polynomial into ``{atom: exponent}``."""
    out = {}
    if m.shape[0] <= 1:
        return out
    if _rational_coefficients(m):
        deg = m.shape[0] - 1
        d = 1
        while deg > 0 and d <= 4 * deg + 2:
            if euler_phi(d) <= deg:
                phi_d = _cyclotomic_in(m.dz, d, m.vars, m.N)
                while True:
                    q = exact_divide(m, phi_d)
                    if q is None:
                        break
                    out[canonical_grid(phi_d)] = out.get(canonical_grid(phi_d), 0) + 1
                    m = q
                    deg = m.shape[0] - 1
                    if deg == 0:
                        break
            d += 1
    if m.shape[0] > 1:
        lead = m.leading()
        if lead != 1:
            m = m.scale(lead.inverse())
        m = canonical_grid(m)
        out[m] = out.get(m, 0) + 1
    return out


def _key(atom):
    return (atom.dz, atom.shape, str(atom))


class Denominator:
    """Immutable product of atom powers."""

    __slots__ = ("factors", "_expanded")

    def __init__(self, factors=None):
        items = {}
        for atom, e in (factors.items() if isinstance(factors, dict) else (factors or ())):
            if e:
                items[atom] = items.get(atom, 0) + e
        self.factors = tuple(sorted(((a, e) for a, e in items.items() if e), key=lambda t: _key(t[0])))
        self._expanded = None

    @classmethod
    def one(cls):
        return _ONE

    @classmethod
    def from_poly(cls, p: LaurentPoly):
        """Return ``(unit, denominator)`` with ``p = unit * denominator``.

        ``unit`` is a monomial ``c * z**s``.
        """
        lead, shift, m = split_unit(p)
        unit = LaurentPoly.monomial((shift,), lead, vars=p.vars)
        return unit, cls(atomize(m))

    def is_one(self):
        return not self.factors

    def as_dict(self):
        return dict(self.factors)

    def __mul__(self, other):
        d = self.as_dict()
        for a, e in other.factors:
            d[a] = d.get(a, 0) + e
        return Denominator(d)

    def __pow__(self, k):
        return Denominator({a: e * k for a, e in self.factors})

    def lcm(self, other):
        d = self.as_dict()
        for a, e in other.factors:
            d[a] = max(d.get(a, 0), e)
        return Denominator(d)

    def radical(self):
        return Denominator({a: 1 for a, _ in self.factors})

    def expand(self, vars=("z",)) -> LaurentPoly:
        if self._expanded is None:
            out = LaurentPoly.constant(1, vars=vars)
            for a, e in self.factors:
                out = out * a ** e
            self._expanded = out
        return self._expanded

    def cofactor(self, target: "Denominator") -> LaurentPoly:
        """``target / self`` as a polynomial; ``self`` must divide ``target``."""
        mine = self.as_dict()
        out = LaurentPoly.constant(1)
        for a, e in target.factors:
            k = e - mine.get(a, 0)
            if k < 0:
                raise ValueError("denominator does not divide target")
            if k:
                out = out * a ** k
        for a in mine:
            if a not in dict(target.factors):
                raise ValueError("denominator does not divide target")
        return out

    def __eq__(self, other):
        return isinstance(other, Denominator) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        if not self.factors:
            return "Denominator(1)"
        return "Denominator(" + " * ".join(f"({a})^{e}" for a, e in self.factors) + ")"


_ONE = Denominator()
