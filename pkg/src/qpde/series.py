"""Truncated q-Puiseux series with rational-function coefficients in z.

A series is stored as ``(1/D(z)) * sum_e P_e(z) q^e`` where ``D`` is a
factored denominator shared by every term and the ``P_e`` are Laurent
polynomials. Exponents are integers on the grid ``1/dq``. All exponents at or
above ``order`` are unknown; an exact series has ``order = INF``.

The optional ``envelope = (s, c)`` is a promise about the whole series,
unknown tail included: every numerator monomial ``z^j q^e`` has
``|j| <= s*e + c``. It is what lets a substitution such as ``z -> z*q`` know
how far the result is valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .algebra.cyclo import Cyclo, euler_phi, lcm
from .algebra.denominator import Denominator, split_unit
from .algebra.laurent import LaurentPoly, poly_sum
from .algebra.ratcoeff import RatCoeff
from .errors import (
    DivisionByZero,
    IncompatibleVariables,
    NonInvertibleLeadingTerm,
    OrderExceedsTruncation,
)
from .kernel import convolve, reduce_cyclotomic
from .algebra.cyclo import _modpoly

INF = math.inf


def _order(o):
    if o is None or o == INF:
        return INF
    return Fraction(o)


def _fmt_rat(x):
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _to_poly(c, vars):
    if isinstance(c, LaurentPoly):
        return c if c.vars == vars or not c.is_constant() else c.with_vars(vars)
    return LaurentPoly.constant(c, vars=vars)


def _monomial_inverse(p: LaurentPoly) -> LaurentPoly:
    ((exps, c),) = list(p.terms().items())
    return LaurentPoly.monomial(tuple(-e for e in exps), c.inverse(), vars=p.vars)


def _zdegree(p: LaurentPoly) -> Fraction:
    if p.is_zero():
        return Fraction(0)
    return Fraction(p.shape[0] - 1, p.dz)


class QSeries:
    """Immutable truncated series in q with coefficients in z."""

    __slots__ = ("vars", "dq", "terms", "den", "order", "envelope")

    def __init__(self, terms=None, order=INF, vars=("z",), envelope=None):
        vars = tuple(vars)
        items = []
        den = Denominator.one()
        for e, c in dict(terms or {}).items():
            e = Fraction(e)
            if isinstance(c, RatCoeff):
                unit, d = Denominator.from_poly(c.den)
                items.append((e, c.num * _monomial_inverse(unit), d))
                den = den.lcm(d)
            else:
                items.append((e, _to_poly(c, vars), Denominator.one()))
        dq = 1
        for e, _, _ in items:
            dq = lcm(dq, e.denominator)
        scaled = {}
        for e, p, d in items:
            if not d.is_one() or not den.is_one():
                p = p * d.cofactor(den)
            k = int(e * dq)
            scaled[k] = scaled[k] + p if k in scaled else p
        built = QSeries._make(vars, dq, scaled, den, _order(order), envelope)
        for name in self.__slots__:
            object.__setattr__(self, name, getattr(built, name))

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    @classmethod
    def _make(cls, vars, dq, terms, den, order, envelope=None):
        obj = object.__new__(cls)
        cutoff = None if order == INF else order * dq
        clean = {}
        for k, p in terms.items():
            if p.is_zero():
                continue
            if cutoff is not None and k >= cutoff:
                continue
            clean[k] = p
        if clean:
            g = dq
            for k in clean:
                g = gcd(g, k)
                if g == 1:
                    break
            if g > 1:
                clean = {k // g: p for k, p in clean.items()}
                dq //= g
        else:
            dq = 1
        s = object.__setattr__
        s(obj, "vars", vars)
        s(obj, "dq", dq)
        s(obj, "terms", dict(sorted(clean.items())))
        s(obj, "den", den)
        s(obj, "order", order)
        s(obj, "envelope", envelope if len(vars) == 1 else None)
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, order=INF, vars=("z",)):
        return cls._make(tuple(vars), 1, {}, Denominator.one(), _order(order), (Fraction(0), Fraction(0)))

    @classmethod
    def one(cls, vars=("z",)):
        return cls.monomial(1, vars=vars)

    @classmethod
    def monomial(cls, coeff=1, zexp=0, qexp=0, vars=("z",), order=INF):
        """``coeff * z**zexp * q**qexp`` (``zexp`` a tuple in multi-variable mode)."""
        vars = tuple(vars)
        zexp = zexp if isinstance(zexp, tuple) else (zexp,) * len(vars) if zexp == 0 else (zexp,)
        p = LaurentPoly.monomial(zexp, coeff, vars=vars)
        env = (Fraction(0), abs(Fraction(zexp[0])) if len(vars) == 1 else Fraction(0))
        # |j| <= 0*e + |zexp| holds for the single term
        qexp = Fraction(qexp)
        return cls._make(vars, qexp.denominator, {qexp.numerator: p}, Denominator.one(), _order(order), env)

    @classmethod
    def from_ratcoeff(cls, r: RatCoeff, qexp=0):
        return cls({qexp: r})

    # inspection ---------------------------------------------------------
    @property
    def valuation(self):
        """Lowest stored exponent, or the order when nothing is stored."""
        if self.terms:
            return Fraction(next(iter(self.terms)), self.dq)
        return self.order

    lower_bound = valuation

    def is_exact(self):
        return self.order == INF

    def is_zero(self):
        return not self.terms

    def exponents(self):
        return [Fraction(k, self.dq) for k in self.terms]

    def denominator(self) -> LaurentPoly:
        return self.den.expand(self.vars)

    def numerator(self, qexp) -> LaurentPoly:
        k = Fraction(qexp) * self.dq
        if k.denominator != 1 or int(k) not in self.terms:
            return LaurentPoly.zero(self.vars)
        return self.terms[int(k)]

    def coeff(self, qexp):
        """Coefficient of ``q**qexp``: a RatCoeff (or LaurentPoly in multi-variable mode)."""
        qexp = Fraction(qexp)
        if self.order != INF and qexp >= self.order:
            raise OrderExceedsTruncation(f"q^{qexp} is beyond the truncation order {self.order}")
        num = self.numerator(qexp)
        if len(self.vars) > 1:
            return num
        if self.den.is_one():
            return RatCoeff(num, normalize=False) if not num.is_zero() else RatCoeff(LaurentPoly.zero(self.vars))
        return RatCoeff(num, self.denominator())

    def __getitem__(self, qexp):
        return self.coeff(qexp)

    def items(self):
        for k in self.terms:
            e = Fraction(k, self.dq)
            yield e, self.coeff(e)

    def with_envelope(self, envelope):
        """Attach a z-envelope ``(s, c)``; the caller vouches for it."""
        env = None if envelope is None else (Fraction(envelope[0]), Fraction(envelope[1]))
        return QSeries._make(self.vars, self.dq, self.terms, self.den, self.order, env)

    def truncate(self, order):
        order = _order(order)
        if order > self.order:
            raise OrderExceedsTruncation(f"cannot extend order {self.order} to {order}")
        return QSeries._make(self.vars, self.dq, self.terms, self.den, order, self.envelope)

    def _regrid_q(self, dq):
        if dq == self.dq:
            return self.terms
        r = dq // self.dq
        return {k * r: p for k, p in self.terms.items()}

    def _is_pure_q(self):
        return self.den.is_one() and all(p.is_constant() for p in self.terms.values())

    def _with_vars(self, vars):
        if vars == self.vars:
            return self
        if not self._is_pure_q():
            raise IncompatibleVariables(f"{self.vars} vs {vars}")
        terms = {k: p.with_vars(vars) for k, p in self.terms.items()}
        env = (Fraction(0), Fraction(0)) if len(vars) == 1 else None
        return QSeries._make(vars, self.dq, terms, self.den, self.order, env)

    def _align(self, other):
        if not isinstance(other, QSeries):
            other = _scalar_series(other, self.vars)
        a, b = self, other
        if a.vars != b.vars:
            if b._is_pure_q():
                b = b._with_vars(a.vars)
            elif a._is_pure_q():
                a = a._with_vars(b.vars)
            else:
                raise IncompatibleVariables(f"{a.vars} vs {b.vars}")
        dq = lcm(a.dq, b.dq)
        return a, b, dq

    # ring operations ----------------------------------------------------
    def __add__(self, other):
        a, b, dq = self._align(other)
        den = a.den.lcm(b.den)
        order = min(a.order, b.order)
        ta, tb = a._regrid_q(dq), b._regrid_q(dq)
        ca = None if a.den == den else a.den.cofactor(den)
        cb = None if b.den == den else b.den.cofactor(den)
        cutoff = None if order == INF else order * dq
        out = {}
        for k in set(ta) | set(tb):
            if cutoff is not None and k >= cutoff:
                continue
            parts = []
            if k in ta:
                parts.append(ta[k] if ca is None else ta[k] * ca)
            if k in tb:
                parts.append(tb[k] if cb is None else tb[k] * cb)
            out[k] = parts[0] if len(parts) == 1 else poly_sum(parts)
        env = _env_add(a, b, ca, cb)
        return QSeries._make(a.vars, dq, out, den, order, env)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._make(self.vars, self.dq, {k: -p for k, p in self.terms.items()},
                             self.den, self.order, self.envelope)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = _scalar_series(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value):
        """Multiply by a constant (number or Cyclo)."""
        if isinstance(value, (int, Fraction)) and value == 1:
            return self
        terms = {k: p.scale(value) for k, p in self.terms.items()}
        return QSeries._make(self.vars, self.dq, terms, self.den, self.order, self.envelope)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            return self.scale(other)
        a, b, dq = self._align(other)
        den = a.den * b.den
        va, vb = a.valuation, b.valuation
        order = min(a.order + vb, b.order + va)
        if order != INF:
            order = Fraction(order)
        cutoff = None if order == INF else order * dq
        if cutoff is not None and cutoff != int(cutoff):
            cutoff = math.ceil(cutoff)
        terms = _packed_product(a._regrid_q(dq), b._regrid_q(dq), cutoff, a.vars)
        return QSeries._make(a.vars, dq, terms, den, order, _env_mul(a, b))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = QSeries.one(self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            if isinstance(other, Cyclo):
                return self.scale(other.inverse())
            if not other:
                raise DivisionByZero("division by zero")
            return self.scale(1 / Fraction(other))
        if not isinstance(other, QSeries):
            other = _scalar_series(other, self.vars)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _scalar_series(other, self.vars) * self.inverse()

    def shift(self, zexp=0, qexp=0):
        """Multiply by ``z**zexp * q**qexp``."""
        qexp = Fraction(qexp)
        dq = lcm(self.dq, qexp.denominator)
        base = self._regrid_q(dq)
        dk = int(qexp * dq)
        zt = zexp if isinstance(zexp, tuple) else (zexp,) * len(self.vars) if zexp == 0 else (zexp,)
        move = any(Fraction(x) for x in zt)
        terms = {k + dk: (p.shift(zt) if move else p) for k, p in base.items()}
        order = self.order + qexp if self.order != INF else INF
        env = None
        if self.envelope is not None:
            s, c = self.envelope
            env = (s, c + abs(Fraction(zt[0])) - s * qexp)
        return QSeries._make(self.vars, dq, terms, self.den, order, env)

    def inverse(self, order=None):
        """Multiplicative inverse by back-substitution.

        The result is valid to ``O - 2L`` for a series valid to ``O`` with
        lowest exponent ``L``; an exact series needs an explicit ``order``.
        """
        if not self.terms:
            raise NonInvertibleLeadingTerm("series has no invertible leading term")
        keys = list(self.terms)
        lead_key = keys[0]
        lead = self.terms[lead_key]
        L = Fraction(lead_key, self.dq)
        D = None if self.den.is_one() else self.denominator()
        if len(keys) == 1 and order is None:
            target = INF if self.order == INF else self.order - 2 * L
            return self._single_term_inverse(lead, lead_key, D, target)
        if order is not None:
            target = Fraction(order)
            if self.order != INF and target > self.order - 2 * L:
                raise OrderExceedsTruncation(
                    f"inverse is only known to {self.order - 2 * L}, asked for {target}")
        elif self.order == INF:
            raise OrderExceedsTruncation("inverse of an exact series needs an explicit order")
        else:
            target = self.order - 2 * L
        g = 0
        for k in keys:
            g = gcd(g, k - lead_key)
        g = g or 1
        # relative scaled cutoff for 1/A where A = q^-L * a
        rel_cut = (target + L) * self.dq
        nsteps = max(0, math.ceil(rel_cut / g))
        A = {(k - lead_key) // g: p for k, p in self.terms.items() if (k - lead_key) // g < nsteps}
        unit_lead = lead.is_monomial()
        B = []
        if unit_lead:
            inv = _monomial_inverse(lead)
            for t in range(nsteps):
                if t == 0:
                    B.append(inv)
                    continue
                acc = [A[s] * B[t - s] for s in A if 0 < s <= t]
                B.append(-(poly_sum(acc, self.vars) * inv) if acc else LaurentPoly.zero(self.vars))
            den = Denominator.one()
            nums = B if D is None else [b * D for b in B]
        else:
            unit, lead_den = Denominator.from_poly(lead)
            monic = lead * _monomial_inverse(unit)
            powers = [LaurentPoly.constant(1, vars=self.vars)]
            for t in range(nsteps):
                if t == 0:
                    B.append(LaurentPoly.constant(1, vars=self.vars))
                    continue
                while len(powers) < t:
                    powers.append(powers[-1] * lead)
                acc = [A[s] * B[t - s] * powers[s - 1] for s in A if 0 < s <= t]
                B.append(-poly_sum(acc, self.vars) if acc else LaurentPoly.zero(self.vars))
            T = nsteps - 1
            uinv = _monomial_inverse(unit)
            mono_pows = [LaurentPoly.constant(1, vars=self.vars)]
            monic_pows = [LaurentPoly.constant(1, vars=self.vars)]
            for _ in range(T + 1):
                mono_pows.append(mono_pows[-1] * uinv)
                monic_pows.append(monic_pows[-1] * monic)
            nums = []
            for t, b in enumerate(B):
                n = b * mono_pows[t + 1] * monic_pows[T - t]
                nums.append(n if D is None else n * D)
            den = lead_den ** (T + 1)
        terms = {t * g - lead_key: n for t, n in enumerate(nums)}
        env = _env_inverse(self, lead, L) if unit_lead and D is None else None
        return QSeries._make(self.vars, self.dq, terms, den, _order(target), env)

    def _single_term_inverse(self, lead, lead_key, D, target):
        if lead.is_monomial():
            num = _monomial_inverse(lead)
            den = Denominator.one()
        else:
            unit, den = Denominator.from_poly(lead)
            num = _monomial_inverse(unit)
        if D is not None:
            num = num * D
        env = None
        if den.is_one() and len(self.vars) == 1:
            env = (Fraction(0), max((abs(Fraction(e)) for (e,), _ in num.terms().items()), default=Fraction(0)))
        return QSeries._make(self.vars, self.dq, {-lead_key: num}, den, target, env)

    # operators ----------------------------------------------------------
    def delta_q(self):
        """q d/dq."""
        terms = {k: p.scale(Fraction(k, self.dq)) for k, p in self.terms.items() if k}
        return QSeries._make(self.vars, self.dq, terms, self.den, self.order, self.envelope)

    def delta_z(self, var=0):
        """z d/dz applied through the quotient rule on the shared denominator."""
        if self.den.is_one():
            terms = {k: p.delta(var) for k, p in self.terms.items()}
            return QSeries._make(self.vars, self.dq, terms, self.den, self.order, self.envelope)
        rad = self.den.radical()
        R = rad.expand(self.vars)
        # S = sum_i e_i * delta(f_i) * prod_{j != i} f_j  so that  delta(D)/D = S/R
        S = []
        for atom, e in self.den.factors:
            other = LaurentPoly.constant(1, vars=self.vars)
            for a2, _ in self.den.factors:
                if a2 is not atom:
                    other = other * a2
            S.append(atom.delta().scale(e) * other)
        S = poly_sum(S, self.vars)
        terms = {k: p.delta(var) * R - p * S for k, p in self.terms.items()}
        env = None
        if self.envelope is not None:
            s, c = self.envelope
            env = (s, c + _zdegree(R))
        return QSeries._make(self.vars, self.dq, terms, self.den * rad, self.order, env)

    def heat(self, s):
        """Normalized heat operator ``s*delta_q + delta_z**2``."""
        return qs_heat(s, self)

    def mul_one_minus(self, coeff=1, zexp=0, qexp=1):
        """Multiply by ``1 - coeff * z**zexp * q**qexp`` (exact factor)."""
        qexp = Fraction(qexp)
        factor = QSeries.one(self.vars) - QSeries.monomial(coeff, zexp, qexp, vars=self.vars)
        if len(self.vars) == 1 and qexp > 0:
            factor = factor.with_envelope((abs(Fraction(zexp)) / qexp, Fraction(0)))
        return self * factor

    def div_one_minus(self, coeff=1, zexp=0, qexp=1):
        """Divide by ``1 - coeff * z**zexp * q**qexp`` with ``qexp > 0`` (geometric recurrence)."""
        qexp = Fraction(qexp)
        if qexp <= 0:
            raise ValueError("geometric division needs a positive q-exponent")
        dq = lcm(self.dq, qexp.denominator)
        base = self._regrid_q(dq)
        step = int(qexp * dq)
        zt = zexp if isinstance(zexp, tuple) else (zexp,) * len(self.vars) if zexp == 0 else (zexp,)
        mono = LaurentPoly.monomial(zt, coeff, vars=self.vars)
        cutoff = None if self.order == INF else self.order * dq
        if cutoff is None:
            raise OrderExceedsTruncation("geometric division of an exact series needs a finite order")
        out = {}
        if base:
            k = next(iter(base))
            while k < cutoff:
                prev = out.get(k - step)
                cur = base.get(k)
                if prev is not None:
                    t = prev * mono
                    cur = t if cur is None else cur + t
                if cur is not None and not cur.is_zero():
                    out[k] = cur
                k += 1
        env = None
        if self.envelope is not None:
            geo = (abs(Fraction(zt[0])) / qexp, Fraction(0))
            env = _env_mul_raw(self.envelope, self.valuation, geo, Fraction(0))
        return QSeries._make(self.vars, dq, out, self.den, self.order, env)

    def substitute(self, spec: "SubstitutionSpec", envelope=None):
        return qs_substitute(self, spec, envelope=envelope)

    def specialize_z(self, turn=0):
        """Set ``z = exp(2*pi*i*turn)``; returns a pure q-series."""
        if len(self.vars) != 1:
            raise IncompatibleVariables("specialization needs a single elliptic variable")
        d = self.denominator().evaluate(turn)
        if d.is_zero():
            raise DivisionByZero(f"denominator vanishes at z = exp(2 pi i * {turn})")
        dinv = d.inverse()
        terms = {k: LaurentPoly.constant(p.evaluate(turn) * dinv, vars=self.vars)
                 for k, p in self.terms.items()}
        return QSeries._make(self.vars, self.dq, terms, Denominator.one(), self.order,
                             (Fraction(0), Fraction(0)))

    def equals(self, other, order=None):
        return qs_equal(self, other, order)

    # presentation -------------------------------------------------------
    def to_json(self):
        dz = 1
        for p in self.terms.values():
            dz = lcm(dz, p.dz)
        out = {"Dq": self.dq, "Dz": dz, "order": _fmt_rat(self.order), "terms": []}
        for e, c in self.items():
            if isinstance(c, RatCoeff):
                coeff = {"num": _poly_json(c.num), "den": _poly_json(c.den)}
            else:
                coeff = {"num": _poly_json(c), "den": _poly_json(LaurentPoly.constant(1, vars=self.vars))}
            out["terms"].append({"q": _fmt_rat(e), "coeff": coeff})
        if len(self.vars) > 1:
            out["vars"] = list(self.vars)
        return out

    @classmethod
    def from_json(cls, doc):
        vars = tuple(doc.get("vars", ["z"]))
        order = INF if doc["order"] == "inf" else Fraction(doc["order"])
        terms = {}
        for t in doc["terms"]:
            num = _poly_from_json(t["coeff"]["num"], vars)
            den = _poly_from_json(t["coeff"]["den"], vars)
            terms[Fraction(t["q"])] = RatCoeff(num, den) if len(vars) == 1 else num
        return cls(terms, order=order, vars=vars)

    def __repr__(self):
        return f"QSeries({self})"

    def __str__(self):
        parts = []
        for e, c in list(self.items())[:8]:
            parts.append(f"({c})*q^{_fmt_rat(e)}")
        tail = "" if self.order == INF else f" + O(q^{_fmt_rat(self.order)})"
        more = " + ..." if len(self.terms) > 8 else ""
        return (" + ".join(parts) or "0") + more + tail


# envelope bookkeeping ------------------------------------------------------

def _env_mul_raw(ea, va, eb, vb):
    (sa, ca), (sb, cb) = ea, eb
    S = max(sa, sb)
    if va == INF or vb == INF:
        return None
    return (S, ca + cb - (S - sa) * va - (S - sb) * vb)


def _env_mul(a, b):
    if a.envelope is None or b.envelope is None or not a.terms or not b.terms:
        return None
    return _env_mul_raw(a.envelope, a.valuation, b.envelope, b.valuation)


def _env_add(a, b, ca, cb):
    if a.envelope is None or b.envelope is None:
        return None
    if not a.terms and a.order == INF:
        return b.envelope if cb is None else None
    if not b.terms and b.order == INF:
        return a.envelope if ca is None else None
    (sa, xa), (sb, xb) = a.envelope, b.envelope
    xa += _zdegree(ca) if ca is not None else 0
    xb += _zdegree(cb) if cb is not None else 0
    S = max(sa, sb)
    va = min(a.valuation, a.order)
    vb = min(b.valuation, b.order)
    return (S, max(xa - (S - sa) * va, xb - (S - sb) * vb))


def _env_inverse(a, lead, L):
    if a.envelope is None or len(a.vars) != 1:
        return None
    s, c = a.envelope
    ((j0,), _), = list(lead.terms().items())
    cg = s * L + c + abs(j0)
    # every term of a / (lead monomial) must satisfy |j| <= s*e exactly
    if cg != 0:
        return None
    return (s, s * L + abs(j0))


# packed multiplication -----------------------------------------------------

def _packed_product(ta, tb, cutoff, vars):
    """Product of two term maps via one integer convolution."""
    if not ta or not tb:
        return {}
    ka, kb = list(ta), list(tb)
    a0, b0 = ka[0], kb[0]
    if cutoff is not None and a0 + b0 >= cutoff:
        return {}
    g = 0
    for k in ka:
        g = gcd(g, k - a0)
    for k in kb:
        g = gcd(g, k - b0)
    g = g or 1
    max_row = None if cutoff is None else (cutoff - 1 - a0 - b0) // g
    if max_row is not None:
        ka = [k for k in ka if (k - a0) // g <= max_row]
        kb = [k for k in kb if (k - b0) // g <= max_row]
    polys = [ta[k] for k in ka] + [tb[k] for k in kb]
    dz, N = 1, 1
    for p in polys:
        dz = lcm(dz, p.dz)
        N = lcm(N, p.N)
    nv = len(vars)

    def prep(p):
        if p.vars != vars:
            p = p.with_vars(vars)
        return p.regrid(dz).embed(N)

    pa = [prep(ta[k]) for k in ka]
    pb = [prep(tb[k]) for k in kb]
    zlo_a = tuple(min(p.lo[d] for p in pa) for d in range(nv))
    zhi_a = tuple(max(p.lo[d] + p.shape[d] for p in pa) for d in range(nv))
    zlo_b = tuple(min(p.lo[d] for p in pb) for d in range(nv))
    zhi_b = tuple(max(p.lo[d] + p.shape[d] for p in pb) for d in range(nv))
    zshape = tuple((ha - la) + (hb - lb) - 1 for la, ha, lb, hb in zip(zlo_a, zhi_a, zlo_b, zhi_b))
    zlo = tuple(x + y for x, y in zip(zlo_a, zlo_b))
    phi = euler_phi(N)
    width = 2 * phi - 1
    zst = [1] * nv
    for d in range(nv - 2, -1, -1):
        zst[d] = zst[d + 1] * zshape[d + 1]
    zsize = zst[0] * zshape[0] if nv else 1
    row = zsize * width
    La = 1
    for p in pa:
        La = lcm(La, p.den)
    Lb = 1
    for p in pb:
        Lb = lcm(Lb, p.den)

    def flatten(keys, ps, origin, zorigin, L):
        rows = (keys[-1] - origin) // g + 1
        flat = [0] * (rows * row)
        for k, p in zip(keys, ps):
            base = ((k - origin) // g) * row
            sc = L // p.den
            _place(flat, base, p, zorigin, zst, width, sc)
        while flat and not flat[-1]:
            flat.pop()
        return flat

    fa = flatten(ka, pa, a0, zlo_a, La)
    fb = flatten(kb, pb, b0, zlo_b, Lb)
    out = convolve(fa, fb)
    nrows = (len(out) + row - 1) // row
    if max_row is not None:
        nrows = min(nrows, max_row + 1)
    den = La * Lb
    result = {}
    mod = _modpoly(N)
    for r in range(nrows):
        chunk = out[r * row:(r + 1) * row]
        if not any(chunk):
            continue
        if len(chunk) < row:
            chunk = chunk + [0] * (row - len(chunk))
        if width != phi:
            chunk = reduce_cyclotomic(chunk, width, phi, mod)
        p = LaurentPoly._new(vars, dz, N, zlo, zshape, chunk, den)
        if not p.is_zero():
            result[a0 + b0 + r * g] = p
    return result


def _place(flat, base, p, zorigin, zst, width, scale):
    phi = p.phi
    coef = p.coef if scale == 1 else [c * scale for c in p.coef]
    if p.nvars == 1:
        off = base + (p.lo[0] - zorigin[0]) * width
        if width == phi:
            flat[off:off + len(coef)] = coef
        else:
            for s in range(0, len(coef) // phi):
                flat[off + s * width:off + s * width + phi] = coef[s * phi:(s + 1) * phi]
        return
    pst = [1] * p.nvars
    for d in range(p.nvars - 2, -1, -1):
        pst[d] = pst[d + 1] * p.shape[d + 1]
    for s in range(len(coef) // phi):
        vec = coef[s * phi:(s + 1) * phi]
        if not any(vec):
            continue
        t = 0
        for d in range(p.nvars):
            i = (s // pst[d]) % p.shape[d]
            t += (p.lo[d] + i - zorigin[d]) * zst[d]
        t = base + t * width
        flat[t:t + phi] = vec


def _scalar_series(x, vars):
    if isinstance(x, QSeries):
        return x
    if isinstance(x, RatCoeff):
        return QSeries({0: x}, vars=vars)
    return QSeries({0: _to_poly(x, vars)}, vars=vars,
                   envelope=(Fraction(0), Fraction(0)) if len(vars) == 1 else None)


def _poly_json(p: LaurentPoly):
    out = []
    for exps, c in sorted(p.terms().items()):
        z = _fmt_rat(exps[0]) if len(exps) == 1 else [_fmt_rat(e) for e in exps]
        out.append({"z": z, "c": cyclo_json(c)})
    return out


def _poly_from_json(items, vars):
    terms = {}
    for t in items:
        z = t["z"]
        key = (Fraction(z),) if isinstance(z, str) else tuple(Fraction(e) for e in z)
        terms[key] = cyclo_from_json(t["c"])
    if not terms:
        return LaurentPoly.zero(vars)
    return LaurentPoly(terms, vars=vars)


def cyclo_json(c: Cyclo):
    return {"N": c.order, "coeffs": [_fmt_rat(x) for x in c.coeffs]}


def cyclo_from_json(doc):
    return Cyclo(doc["N"], [Fraction(x) for x in doc["coeffs"]])


# substitution ---------------------------------------------------------------

@dataclass(frozen=True)
class SubstitutionSpec:
    """``z -> exp(2*pi*i*turn) * z**zpower * q**qshift`` and ``q -> q**qscale``.

    The root of unity is given by its angle in turns so that fractional
    powers ``z**e`` pick up ``exp(2*pi*i*turn*e)`` unambiguously.
    """

    turn: Fraction = Fraction(0)
    zpower: Fraction = Fraction(1)
    qshift: Fraction = Fraction(0)
    qscale: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("turn", "zpower", "qshift", "qscale"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.qscale <= 0:
            raise ValueError("qscale must be positive")
        if self.zpower == 0:
            raise ValueError("zpower must be nonzero")

    @property
    def root_of_unity(self) -> Cyclo:
        return Cyclo.from_turn(self.turn)

    def then(self, other: "SubstitutionSpec") -> "SubstitutionSpec":
        """The substitution equal to applying ``self`` first and ``other`` second."""
        return SubstitutionSpec(
            turn=self.turn + self.zpower * other.turn,
            zpower=self.zpower * other.zpower,
            qshift=self.zpower * other.qshift + other.qscale * self.qshift,
            qscale=self.qscale * other.qscale,
        )


def qs_substitute(a: QSeries, spec: SubstitutionSpec, envelope=None) -> QSeries:
    """Apply ``z -> zeta z^a q^m, q -> q^k`` exactly."""
    if len(a.vars) != 1:
        raise IncompatibleVariables("substitution needs a single elliptic variable")
    k, m, zp, turn = spec.qscale, spec.qshift, spec.zpower, spec.turn
    if m == 0:
        dq = a.dq * k.denominator
        terms = {}
        for key, p in a.terms.items():
            terms[int(Fraction(key, a.dq) * k * dq)] = p.subs_monomial(zp, turn)
        den = Denominator.one()
        unit_fix = LaurentPoly.constant(1, vars=a.vars)
        for atom, e in a.den.factors:
            unit, d = Denominator.from_poly(atom.subs_monomial(zp, turn))
            den = den * d ** e
            unit_fix = unit_fix * _monomial_inverse(unit) ** e
        if not unit_fix == 1:
            terms = {key: p * unit_fix for key, p in terms.items()}
        order = a.order * k if a.order != INF else INF
        env = None
        if a.envelope is not None and den.is_one():
            s, c = a.envelope
            env = (abs(zp) * s / k, abs(zp) * c)
        return QSeries._make(a.vars, dq, terms, den, order, env)

    env = envelope or a.envelope
    if env is None and a.order != INF:
        raise OrderExceedsTruncation(
            "a q-shifting substitution needs a z-envelope to bound the truncation order")
    if env is not None:
        s, c = map(Fraction, env)
        rate = k - abs(m) * s
        if rate <= 0 and a.order != INF:
            raise OrderExceedsTruncation("substitution does not converge q-adically under this envelope")
    new_order = INF if a.order == INF else rate * a.order - abs(m) * c
    buckets = {}
    for key, p in a.terms.items():
        e = Fraction(key, a.dq)
        for (j,), coef in p.terms().items():
            e2 = k * e + m * j
            if new_order != INF and e2 >= new_order:
                continue
            c2 = coef * Cyclo.from_turn(turn * j) if turn else coef
            buckets.setdefault(e2, {})
            z2 = zp * j
            buckets[e2][z2] = buckets[e2][z2] + c2 if z2 in buckets[e2] else c2
    terms = {e2: LaurentPoly(d, vars=a.vars) for e2, d in buckets.items()}
    out_env = None
    if env is not None and rate > 0:
        out_env = (abs(zp) * s / rate, abs(zp) * c * k / rate)
    result = QSeries(terms, order=new_order, vars=a.vars, envelope=out_env)
    if a.den.is_one():
        return result
    # expand 1/D(zeta z^a q^m) as a q-series
    for atom, e in a.den.factors:
        fterms = {}
        for (j,), coef in atom.terms().items():
            c2 = coef * Cyclo.from_turn(turn * j) if turn else coef
            fterms.setdefault(m * j, {})[zp * j] = c2
        fser = QSeries({q: LaurentPoly(d, vars=a.vars) for q, d in fterms.items()}, vars=a.vars,
                       envelope=(abs(zp / m), Fraction(0)) if m else None)
        need = result.order - result.valuation if result.order != INF else None
        if need is None:
            raise OrderExceedsTruncation("exact series with a z-pole cannot be q-shifted")
        finv = fser.inverse(order=need + fser.valuation * 0 - fser.valuation)
        for _ in range(e):
            result = result * finv
    return result


# module-level operations ---------------------------------------------------

def qs_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def qs_inverse(a: QSeries, order=None) -> QSeries:
    return a.inverse(order)


def qs_delta_q(a: QSeries) -> QSeries:
    return a.delta_q()


def qs_delta_z(a: QSeries, var=0) -> QSeries:
    return a.delta_z(var)


def qs_heat(s, a: QSeries) -> QSeries:
    """``s * delta_q(a) + delta_z(delta_z(a))``."""
    if len(a.vars) != 1:
        raise IncompatibleVariables("the heat operator acts on a single elliptic variable")
    s = Fraction(s)
    dz2 = a.delta_z().delta_z()
    if not s:
        return dz2
    return dz2 + a.delta_q().scale(s)


@dataclass(frozen=True)
class Comparison:
    """Outcome of comparing two series up to an order."""

    equal: bool
    order: Fraction
    exponent: Fraction | None = None
    lhs: object = None
    rhs: object = None

    def __bool__(self):
        return self.equal


def qs_equal(a: QSeries, b: QSeries, order=None) -> Comparison:
    """Exact comparison of all coefficients below ``order``."""
    a, b, dq = a._align(b)
    limit = min(a.order, b.order)
    if order is None:
        order = limit
    if order != INF:
        order = Fraction(order)
    if order > limit:
        raise OrderExceedsTruncation(f"order {order} exceeds truncation {limit}")
    ta, tb = a._regrid_q(dq), b._regrid_q(dq)
    same_den = a.den == b.den
    Da = None if same_den else a.denominator()
    Db = None if same_den else b.denominator()
    zero = LaurentPoly.zero(a.vars)
    for k in sorted(set(ta) | set(tb)):
        if order != INF and Fraction(k, dq) >= order:
            break
        pa, pb = ta.get(k, zero), tb.get(k, zero)
        lhs = pa if same_den else pa * Db
        rhs = pb if same_den else pb * Da
        if not lhs == rhs:
            e = Fraction(k, dq)
            return Comparison(False, order, e, a.coeff(e), b.coeff(e))
    return Comparison(True, order)
