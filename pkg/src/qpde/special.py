"""Constructors for the q-series of eta, theta, Appell-Lerch sums and rank-type functions.

Every constructor takes a truncation ``order`` and returns a series valid
exactly up to (not including) ``q**order``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .algebra.cyclo import Cyclo
from .algebra.laurent import LaurentPoly
from .algebra.ratcoeff import RatCoeff
from .errors import ThetaDenominatorVanishes
from .series import INF, QSeries, SubstitutionSpec

F = Fraction
ZERO = F(0)


class Kind(Enum):
    Eta = "eta"
    PochhammerFinite = "poch"
    PochhammerInfinite = "poch-inf"
    Theta = "theta"
    Theta0 = "theta0"
    Theta1 = "theta1"
    A0 = "a0"
    A1 = "a1"
    Mu = "mu"
    RankEulerian = "rank"
    RankLerch = "rank-lerch"
    Crank = "crank"
    RStar = "rstar"
    CStar = "cstar"
    MockF = "mockf"
    NDE = "nde"
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    ROdd = "rodd"


class NDEVariant(Enum):
    """Parameter choices ``(d, e, base)`` of the overpartition family N(d, e, z; q)."""

    Overpartition = "overpartition"      # (1, 0, q)
    M2Over = "m2over"                    # (1, 1/q, q^2)
    M2NoRepeatOdd = "m2norepeatodd"      # (0, 1/q, q^2)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: Kind
    c: Fraction = F(1)
    k: Fraction = F(1)
    alpha: Fraction = ZERO
    beta: Fraction = ZERO
    nde: NDEVariant = NDEVariant.Overpartition
    order: Fraction = F(20)

    def __post_init__(self):
        for name in ("c", "k", "alpha", "beta", "order"):
            object.__setattr__(self, name, F(getattr(self, name)))
        if self.k <= 0:
            raise ValueError("tau scale must be positive")
        object.__setattr__(self, "beta", self.beta - math.floor(self.beta))
        if self.kind is Kind.Mu and theta_vanishes(self.alpha / self.k, self.beta):
            raise ThetaDenominatorVanishes(
                f"theta({self.alpha}*tau + {self.beta}; {self.k}*tau) vanishes identically")

    def build(self) -> QSeries:
        return build(self)


def theta_vanishes(alpha, beta) -> bool:
    """theta(alpha*tau + beta; tau) is identically zero exactly at lattice points."""
    return F(alpha).denominator == 1 and F(beta).denominator == 1


# helpers ----------------------------------------------------------------------

def _zeta(turn) -> Cyclo:
    return Cyclo.from_turn(F(turn))


def _pure(coeffs: dict, order, vars=("z",)) -> QSeries:
    """Pure q-series from ``{exponent: scalar}``."""
    terms = {e: LaurentPoly.constant(c, vars=vars) for e, c in coeffs.items() if c}
    return QSeries(terms, order=order, vars=vars, envelope=(ZERO, ZERO))


def _from_buckets(buckets: dict, order, envelope=None) -> QSeries:
    terms = {}
    for e, zs in buckets.items():
        zs = {z: c for z, c in zs.items() if not (c.is_zero() if isinstance(c, Cyclo) else c == 0)}
        if zs:
            terms[e] = LaurentPoly(zs)
    return QSeries(terms, order=order, envelope=envelope)


def _add_term(buckets, e, z, c):
    row = buckets.setdefault(e, {})
    row[z] = row[z] + c if z in row else c


def _n_range(min_exp, order, start=0):
    """Integers n whose ``min_exp(n)`` is below ``order``; ``min_exp`` must be eventually increasing in |n|."""
    out = []
    for direction in (1, -1):
        n = start if direction == 1 else start - 1
        misses = 0
        prev = None
        while True:
            v = min_exp(n)
            if v < order:
                out.append(n)
                misses = 0
            else:
                # stop once we are past the vertex and above the cutoff
                if prev is not None and v >= prev:
                    misses += 1
                    if misses >= 2:
                        break
            prev = v
            n += direction
            if abs(n - start) > 10 ** 6:
                raise RuntimeError("summation range did not close")
    return sorted(out)


def _int_product_coeffs(factors, limit):
    """Coefficients below ``limit`` of prod (1 - q^a)^s over ``(a, s)`` pairs, s = +-1."""
    c = [0] * limit
    if limit:
        c[0] = 1
    for a, s in factors:
        if a >= limit or a <= 0:
            continue
        if s == 1:
            for i in range(limit - 1, a - 1, -1):
                c[i] -= c[i - a]
        else:
            for i in range(a, limit):
                c[i] += c[i - a]
    return c


# eta and Pochhammer -------------------------------------------------------------

def euler_coeffs(limit: int) -> list:
    """Coefficients of (q; q)_inf below q**limit from the product."""
    return _int_product_coeffs([(n, 1) for n in range(1, limit)], limit)


def partition_numbers(limit: int) -> list:
    """p(0..limit-1) from the expansion of 1/(q; q)_inf."""
    return _int_product_coeffs([(n, -1) for n in range(1, limit)], limit)


def qpoch_inf(a_exp=1, step=1, order=20, coeff=1, sign=1) -> QSeries:
    """``(coeff * q^a; q^step)_inf`` (sign=1) or its reciprocal (sign=-1), pure in q."""
    a_exp, step, order = F(a_exp), F(step), F(order)
    if a_exp <= 0:
        raise ValueError("infinite products need a positive base exponent")
    dq = math.lcm(a_exp.denominator, step.denominator, order.denominator)
    limit = math.ceil(order * dq)
    A, S = int(a_exp * dq), int(step * dq)
    coeff = F(coeff)
    if coeff in (1, -1):
        factors = []
        c = [0] * limit
        if limit:
            c[0] = 1
        e = A
        while e < limit:
            if sign == 1:
                for i in range(limit - 1, e - 1, -1):
                    c[i] -= coeff * c[i - e]
            else:
                for i in range(e, limit):
                    c[i] += coeff * c[i - e]
            e += S
        del factors
        return _pure({F(i, dq): v for i, v in enumerate(c) if v}, order)
    s = QSeries.one().truncate(order)
    e = a_exp
    while e < order:
        s = s.mul_one_minus(coeff, 0, e) if sign == 1 else s.div_one_minus(coeff, 0, e)
        e += step
    return s


def eta_series(k=1, order=20) -> QSeries:
    """eta(k tau) = q^(k/24) prod (1 - q^(k n)), expanded from the product."""
    k, order = F(k), F(order)
    shift = k / 24
    inner = max(ZERO, order - shift)
    # coefficients in the variable q^k
    limit = math.ceil(inner / k)
    c = euler_coeffs(limit)
    terms = {shift + k * i: v for i, v in enumerate(c) if v}
    return _pure(terms, order)


def pentagonal_series(order=20) -> QSeries:
    """sum_n (-1)^n q^(n(3n+1)/2)."""
    order = F(order)
    terms = {}
    for n in _n_range(lambda n: F(n * (3 * n + 1), 2), order):
        terms[F(n * (3 * n + 1), 2)] = (-1) ** (n % 2)
    return _pure(terms, order)


# theta functions ---------------------------------------------------------------

def _theta_envelope(c, k, alpha, slope=None):
    """Linear envelope |c nu| <= s e + c0 for the theta exponents e = k nu^2/2 + alpha nu."""
    c = abs(F(c))
    if c == 0:
        return (ZERO, ZERO)
    s = F(slope) if slope is not None else c / 4
    best = None
    nu = F(1, 2)
    # the excess c|nu| - s e is a concave quadratic in |nu|; scan past its maximum
    bound = int(4 * (c + s * abs(alpha)) / (s * k)) + 4
    for i in range(-bound, bound + 1):
        v = nu + i
        val = c * abs(v) - s * (k * v * v / 2 + alpha * v)
        best = val if best is None or val > best else best
    return (s, best)


def theta_series(c=1, k=1, order=20, alpha=0, beta=0, slope=None) -> QSeries:
    """theta(c u + alpha tau + beta; k tau) = sum_{nu in Z+1/2} q^(k nu^2/2 + alpha nu) z^(c nu) e^(2 pi i nu (beta + 1/2))."""
    c, k, order, alpha, beta = F(c), F(k), F(order), F(alpha), F(beta)
    buckets = {}
    half = F(1, 2)

    def exp(n):
        nu = n + half
        return k * nu * nu / 2 + alpha * nu

    for n in _n_range(exp, order):
        nu = n + half
        _add_term(buckets, exp(n), c * nu, _zeta(nu * (beta + half)))
    env = _theta_envelope(c, k, alpha, slope)
    return _from_buckets(buckets, order, envelope=env)


def theta01_series(j, a=2, alpha=0, beta=0, k=2, order=20) -> QSeries:
    """theta_j(a u + alpha tau + beta; k tau) = sum_n q^(k n^2/2 + alpha n) z^(a n) e^(2 pi i n beta), n in Z + j/2."""
    a, alpha, beta, k, order = F(a), F(alpha), F(beta), F(k), F(order)
    off = F(j, 2)
    buckets = {}

    def exp(n):
        x = n + off
        return k * x * x / 2 + alpha * x

    for n in _n_range(exp, order):
        x = n + off
        _add_term(buckets, exp(n), a * x, _zeta(x * beta))
    env = _theta_envelope(a, k, alpha) if a else (ZERO, ZERO)
    return _from_buckets(buckets, order, envelope=env)


def a_series(j, alpha=0, beta=0, order=20) -> QSeries:
    """a_j^{alpha,beta} = sum (n + alpha/2) q^(n^2 + alpha n) e^(2 pi i n beta), n in Z + j/2."""
    alpha, beta, order = F(alpha), F(beta), F(order)
    off = F(j, 2)
    terms = {}

    def exp(n):
        x = n + off
        return x * x + alpha * x

    for n in _n_range(exp, order):
        x = n + off
        e = exp(n)
        val = _zeta(x * beta) * (x + alpha / 2)
        terms[e] = terms[e] + val if e in terms else val
    return _pure(terms, order)


# Lerch-type sums ---------------------------------------------------------------

def lerch_sum(summand, zpow, dstep, order, subst=None, nstart=0):
    """sum_n a_n q^(E_n) / (1 - z^zpow q^(dstep * n)) with the z-substitution applied termwise.

    ``summand(n)`` returns ``(a_n, E_n)``. ``subst`` (a SubstitutionSpec with
    qscale 1) replaces z by ``zeta z^a q^m`` inside every summand before the
    geometric expansion, so terms whose denominator loses its q-power become
    genuine poles instead of divergent expansions.
    """
    order = F(order)
    zpow, dstep = F(zpow), F(dstep)
    turn, a, m = (ZERO, F(1), ZERO) if subst is None else (subst.turn, subst.zpower, subst.qshift)
    w = _zeta(turn * zpow)
    zc = a * zpow

    def dexp(n):
        return dstep * n + zpow * m

    def min_exp(n):
        _, e = summand(n)
        d = dexp(n)
        return e if d >= 0 else e - d

    buckets = {}
    poles = []
    slope = ZERO
    c0 = None
    for n in _n_range(min_exp, order, nstart):
        coef, e = summand(n)
        d = dexp(n)
        if d == 0:
            poles.append((e, coef))
            c0 = max(c0, -slope * e) if c0 is not None else ZERO
            continue
        if d > 0:
            r, wz, zr, qr, mm = 0, w, zc, d, 0
        else:
            r, wz, zr, qr, mm = 1, w.inverse(), -zc, -d, 1
        sign = -1 if r else 1
        mstart = mm
        cur = coef * (wz ** mstart) * sign
        ee = e + qr * mstart
        while ee < order:
            _add_term(buckets, ee, zr * mstart, cur)
            mstart += 1
            cur = cur * wz
            ee += qr
        s_n = abs(zc) / abs(d)
        slope = max(slope, s_n)
    # envelope: |z-exponent| <= s (e - E_n) for the geometric pieces
    env = None
    if buckets or poles:
        s = max([abs(zc) / abs(dexp(n)) for n in _n_range(min_exp, order, nstart) if dexp(n) != 0] or [ZERO])
        lows = [summand(n)[1] for n in _n_range(min_exp, order, nstart)]
        env = (s, max(-s * E for E in lows) if lows else ZERO)
    series = _from_buckets(buckets, order, envelope=env)
    for e, coef in poles:
        den = LaurentPoly({ZERO: 1}) - LaurentPoly({zc: w})
        if den.is_zero():
            from .errors import DivisionByZero
            raise DivisionByZero("Lerch summand has a constant vanishing denominator")
        pole = QSeries({e: RatCoeff(LaurentPoly.constant(coef), den)}, order=order)
        series = series + pole
    if subst is not None and subst.qscale != 1:
        series = series.substitute(SubstitutionSpec(qscale=subst.qscale))
    return series


def mu_series(c=1, k=1, alpha=0, beta=0, order=20, subst=None) -> QSeries:
    """mu(c u, alpha tau + beta; k tau) with alpha measured in the base modulus tau.

    ``subst`` applies an elliptic shift z -> zeta z^a q^m before expansion.
    """
    c, k, alpha, beta, order = F(c), F(k), F(alpha), F(beta), F(order)
    if theta_vanishes(alpha / k, beta):
        raise ThetaDenominatorVanishes(f"theta({alpha} tau + {beta}; {k} tau) vanishes identically")
    den = theta_series(0, k, order=1, alpha=alpha, beta=beta)
    if den.is_zero():
        # valuation may lie at or above 1; widen until the leading term shows up
        w = F(2)
        while True:
            den = theta_series(0, k, order=w, alpha=alpha, beta=beta)
            if not den.is_zero():
                break
            w *= 2
    v = den.valuation
    turn, za, qm = (ZERO, F(1), ZERO) if subst is None else (subst.turn, subst.zpower, subst.qshift)
    # prefactor (zeta z^a q^m)^(c/2)
    pre_q = qm * c / 2
    target = order - pre_q

    def summand(n):
        sgn = -1 if n % 2 else 1
        return _zeta(beta * n) * sgn, k * F(n * n + n, 2) + alpha * n

    inner = None if subst is None else SubstitutionSpec(turn=turn, zpower=za, qshift=qm)
    S = lerch_sum(summand, c, k, target + v, subst=inner)
    vS = min(S.valuation, S.order)
    theta = theta_series(0, k, order=target - vS + 2 * v, alpha=alpha, beta=beta)
    out = QSeries.monomial(_zeta(turn * c / 2), za * c / 2, pre_q) * S * theta.inverse()
    if subst is not None and subst.qscale != 1:
        out = out.substitute(SubstitutionSpec(qscale=subst.qscale))
        return out.truncate(order * subst.qscale)
    return out.truncate(order)


# rank, crank and relatives -----------------------------------------------------

def rank_series(form="eulerian", order=20) -> QSeries:
    """Two-variable rank generating function R(z; q)."""
    order = F(order)
    form = str(form).lower()
    if form in ("eulerian", "rankeulerian"):
        total = QSeries.one().truncate(order)
        term = QSeries.one().truncate(order)
        n = 1
        while n * n < order:
            term = term.shift(0, 2 * n - 1)
            term = term.div_one_minus(1, 1, n).div_one_minus(1, -1, n)
            total = total + term
            n += 1
        return total.with_envelope((F(1), ZERO))
    if form in ("lerch", "ranklerch"):
        def summand(n):
            return Cyclo.rational(-1 if n % 2 else 1), F(n * (3 * n + 1), 2)
        S = lerch_sum(summand, 1, 1, order)
        one_minus_z = QSeries({0: LaurentPoly({0: 1, 1: -1})})
        pinv = qpoch_inf(1, 1, order, sign=-1)
        return (one_minus_z * S * pinv).truncate(order).with_envelope((F(1), ZERO))
    raise ValueError(f"unknown rank form {form!r}")


def crank_series(order=20) -> QSeries:
    """C(z; q) = prod (1 - q^n) / ((1 - z q^n)(1 - q^n / z))."""
    order = F(order)
    s = qpoch_inf(1, 1, order)
    n = 1
    while n < order:
        s = s.div_one_minus(1, 1, n).div_one_minus(1, -1, n)
        n += 1
    return s.with_envelope((F(1), ZERO))


def _one_minus_z():
    return QSeries({0: LaurentPoly({0: 1, 1: -1})})


def cstar_series(order=20) -> QSeries:
    """C*(z; q) = C(z; q) / (1 - z)."""
    return (crank_series(order) * _one_minus_z().inverse()).with_envelope((F(1), ZERO))


def rstar_series(order=20, form="eulerian") -> QSeries:
    """R*(z; q) = R(z; q) / (1 - z)."""
    return (rank_series(form, order) * _one_minus_z().inverse()).with_envelope((F(1), ZERO))


def mockf_series(order=20) -> QSeries:
    """f(q) = 1 + sum q^(n^2) / (-q; q)_n^2."""
    order = F(order)
    limit = math.ceil(order)
    total = [0] * limit
    term = [0] * limit
    if limit:
        total[0] = term[0] = 1
    n = 1
    while n * n < order:
        # multiply by q^(2n-1) / (1 + q^n)^2
        shift = 2 * n - 1
        term = [0] * shift + term[:limit - shift] if shift < limit else [0] * limit
        for _ in range(2):
            for i in range(n, limit):
                term[i] -= term[i - n]
        for i in range(limit):
            total[i] += term[i]
        n += 1
    return _pure({i: v for i, v in enumerate(total) if v and i < order}, order)


def rodd_series(order=20) -> QSeries:
    """R°(z; q) = 1/(q^2; q^2)_inf * sum_n (-1)^n q^(3n^2+3n+1) / (1 - z q^(2n+1))."""
    order = F(order)

    def summand(n):
        return Cyclo.rational(-1 if n % 2 else 1), F(3 * n * n + 3 * n + 1)

    S = _lerch_odd(summand, order)
    return (S * qpoch_inf(2, 2, order, sign=-1)).truncate(order).with_envelope((F(1), ZERO))


def _lerch_odd(summand, order):
    # 1 - z q^(2n+1): the q-step is odd in n so it never vanishes
    buckets = {}
    for n in _n_range(lambda n: summand(n)[1] if 2 * n + 1 > 0 else summand(n)[1] - (2 * n + 1), order):
        coef, e = summand(n)
        d = 2 * n + 1
        if d > 0:
            m, ee = 0, e
            while ee < order:
                _add_term(buckets, ee, F(m), coef)
                m += 1
                ee += d
        else:
            m, ee = 1, e - d
            while ee < order:
                _add_term(buckets, ee, F(-m), -coef)
                m += 1
                ee -= d
    return _from_buckets(buckets, order, envelope=(F(1), ZERO))


def s_series(which, order=20, subst=None) -> QSeries:
    """S_1, S_2, S_3 Lerch sums."""
    order = F(order)
    if which == 1:
        def summand(n):
            return Cyclo.rational(-1 if n % 2 else 1), F(n * n + n)
        return lerch_sum(summand, 1, 1, order, subst)
    if which == 2:
        def summand(n):
            return Cyclo.rational(-1 if n % 2 else 1), F(n * n + 2 * n)
        return lerch_sum(summand, 1, 2, order, subst)
    if which == 3:
        def summand(n):
            return Cyclo.rational(-1 if n % 2 else 1), F(2 * n * n + 3 * n)
        return lerch_sum(summand, 1, 2, order, subst)
    raise ValueError("S-series index must be 1, 2 or 3")


def _variant(v):
    if isinstance(v, NDEVariant):
        return v
    key = str(v).lower().replace("_", "").replace("-", "")
    for item in NDEVariant:
        if key in (item.value, item.name.lower()):
            return item
    raise ValueError(f"unknown N(d,e) variant {v!r}")


def nde_series(variant=NDEVariant.Overpartition, order=20, star=True) -> QSeries:
    """N(d, e, z; q) (or N* = N/(1-z)) summed from its defining Eulerian series."""
    variant = _variant(variant)
    order = F(order)
    total = QSeries.one().truncate(order)
    term = QSeries.one().truncate(order)
    n = 1
    if variant is NDEVariant.Overpartition:
        # (-1)_n q^(n(n+1)/2) / ((zq)_n (q/z)_n)
        while F(n * (n + 1), 2) < order:
            term = term.mul_one_minus(-1, 0, n - 1) if n > 1 else term.scale(2)
            term = term.shift(0, n).div_one_minus(1, 1, n).div_one_minus(1, -1, n)
            total = total + term
            n += 1
    elif variant is NDEVariant.M2Over:
        # (-1; q^2)_n (-q; q^2)_n q^n / ((z q^2, q^2/z; q^2)_n)
        while n < order:
            term = term.mul_one_minus(-1, 0, 2 * n - 2) if n > 1 else term.scale(2)
            term = term.mul_one_minus(-1, 0, 2 * n - 1)
            term = term.shift(0, 1).div_one_minus(1, 1, 2 * n).div_one_minus(1, -1, 2 * n)
            total = total + term
            n += 1
    else:
        # (-q; q^2)_n q^(n^2) / ((z q^2, q^2/z; q^2)_n)
        while n * n < order:
            term = term.mul_one_minus(-1, 0, 2 * n - 1)
            term = term.shift(0, 2 * n - 1).div_one_minus(1, 1, 2 * n).div_one_minus(1, -1, 2 * n)
            total = total + term
            n += 1
    total = total.with_envelope((F(1), ZERO))
    if not star:
        return total
    return (total * _one_minus_z().inverse()).with_envelope((F(1), ZERO))


def pochhammer_series(a_coeff=1, a_zexp=0, a_qexp=0, n=None, step=1, order=20) -> QSeries:
    """(a; q^step)_n for a = a_coeff z^a_zexp q^a_qexp; ``n=None`` for the infinite product."""
    order = F(order)
    s = QSeries.one().truncate(order)
    j = 0
    while n is None or j < n:
        e = F(a_qexp) + step * j
        if n is None and e >= order:
            break
        if e == 0:
            s = s * QSeries({0: LaurentPoly({0: 1}) - LaurentPoly({F(a_zexp): Cyclo.rational(a_coeff) if not isinstance(a_coeff, Cyclo) else a_coeff})})
        else:
            s = s.mul_one_minus(a_coeff, a_zexp, e)
        j += 1
    return s


# generic dispatch ---------------------------------------------------------------

def build(spec: GeneratorSpec) -> QSeries:
    kd, o = spec.kind, spec.order
    if kd is Kind.Eta:
        return eta_series(spec.k, o)
    if kd is Kind.PochhammerInfinite:
        return qpoch_inf(spec.alpha or 1, spec.k, o)
    if kd is Kind.PochhammerFinite:
        return pochhammer_series(1, 0, spec.alpha, int(spec.c), spec.k, o)
    if kd is Kind.Theta:
        return theta_series(spec.c, spec.k, o, spec.alpha, spec.beta)
    if kd in (Kind.Theta0, Kind.Theta1):
        return theta01_series(0 if kd is Kind.Theta0 else 1, spec.c, spec.alpha, spec.beta, spec.k, o)
    if kd in (Kind.A0, Kind.A1):
        return a_series(0 if kd is Kind.A0 else 1, spec.alpha, spec.beta, o)
    if kd is Kind.Mu:
        return mu_series(spec.c, spec.k, spec.alpha, spec.beta, o)
    if kd is Kind.RankEulerian:
        return rank_series("eulerian", o)
    if kd is Kind.RankLerch:
        return rank_series("lerch", o)
    if kd is Kind.Crank:
        return crank_series(o)
    if kd is Kind.CStar:
        return cstar_series(o)
    if kd is Kind.RStar:
        return rstar_series(o)
    if kd is Kind.MockF:
        return mockf_series(o)
    if kd is Kind.NDE:
        return nde_series(spec.nde, o)
    if kd in (Kind.S1, Kind.S2, Kind.S3):
        return s_series({Kind.S1: 1, Kind.S2: 2, Kind.S3: 3}[kd], o)
    if kd is Kind.ROdd:
        return rodd_series(o)
    raise ValueError(f"unsupported generator {kd}")
