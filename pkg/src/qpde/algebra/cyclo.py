"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored in the power basis 1, zeta, ..., zeta**(phi(N)-1),
reduced modulo the N-th cyclotomic polynomial so that equality is a plain
coefficient comparison once both operands live in the same field.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from ..errors import DivisionByZero
from ..kernel import reduce_cyclotomic

Rational = Fraction


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _moebius(n):
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _exact_div_monic(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _exact_div_monic(num, den):
    num = list(num)
    dd = len(den) - 1
    quot = [0] * (len(num) - dd)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + dd]
        quot[k] = c
        if c:
            for i, m in enumerate(den):
                num[k + i] -= c * m
    assert not any(num[:dd]), "inexact cyclotomic division"
    return quot


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _modpoly(n: int) -> tuple:
    return cyclotomic_polynomial(n)[:-1]


@lru_cache(maxsize=None)
def _ramanujan_sum(n: int, j: int) -> int:
    g = gcd(n, j)
    return sum(_moebius(n // d) * d for d in _divisors(g))


def reduce_int_vector(n: int, raw) -> list:
    """Reduce an integer coefficient vector in zeta_n modulo Phi_n."""
    phi = euler_phi(n)
    raw = list(raw)
    if len(raw) <= phi:
        return raw + [0] * (phi - len(raw))
    return reduce_cyclotomic(raw, len(raw), phi, _modpoly(n))


def embed_int_vector(vec, m: int, n: int) -> list:
    """Map a reduced vector of Q(zeta_m) into Q(zeta_n), m | n."""
    if m == n:
        return list(vec)
    step = n // m
    raw = [0] * ((len(vec) - 1) * step + 1)
    for j, c in enumerate(vec):
        raw[j * step] = c
    return reduce_int_vector(n, raw)


class Cyclo:
    """An element of Q(zeta_N) with rational power-basis coordinates."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs=()):
        if order < 1:
            raise ValueError("order must be positive")
        coeffs = [Fraction(c) for c in coeffs]
        phi = euler_phi(order)
        if len(coeffs) > phi:
            coeffs = _reduce_fraction_vector(order, coeffs)
        else:
            coeffs += [Fraction(0)] * (phi - len(coeffs))
        self.order = order
        self.coeffs = tuple(coeffs)

    # constructors -------------------------------------------------------
    @classmethod
    def _raw(cls, order, coeffs):
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def rational(cls, value, order: int = 1) -> "Cyclo":
        phi = euler_phi(order)
        return cls._raw(order, [Fraction(value)] + [Fraction(0)] * (phi - 1))

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "Cyclo":
        """zeta_order ** power."""
        raw = [0] * (power % order) + [1]
        return cls(order, reduce_int_vector(order, raw))

    @classmethod
    def from_turn(cls, turn) -> "Cyclo":
        """exp(2*pi*i*turn) for a rational ``turn``."""
        turn = Fraction(turn)
        return cls.zeta(turn.denominator, turn.numerator)

    # structure ----------------------------------------------------------
    def embed(self, order: int) -> "Cyclo":
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        vec = embed_int_vector(ints, self.order, order)
        return Cyclo._raw(order, [Fraction(v, den) for v in vec])

    def _common(self, other):
        if not isinstance(other, Cyclo):
            other = Cyclo.rational(other, self.order)
        n = lcm(self.order, other.order)
        return self.embed(n), other.embed(n), n

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def normalized_trace(self) -> Fraction:
        """Tr(x)/[Q(zeta_N):Q]; invariant under field embeddings."""
        n = self.order
        total = sum(c * _ramanujan_sum(n, j) for j, c in enumerate(self.coeffs) if c)
        return Fraction(total) / euler_phi(n)

    def conjugate(self) -> "Cyclo":
        """Complex conjugate (zeta -> zeta**-1)."""
        n = self.order
        raw = [Fraction(0)] * n
        for j, c in enumerate(self.coeffs):
            raw[(-j) % n] += c
        return Cyclo(n, raw)

    def __complex__(self):
        import cmath
        z = cmath.exp(2j * cmath.pi / self.order)
        return complex(sum(float(c) * z ** j for j, c in enumerate(self.coeffs)))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b, n = self._common(other)
        return Cyclo._raw(n, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo._raw(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclo) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            f = Fraction(other)
            return Cyclo._raw(self.order, [c * f for c in self.coeffs])
        a, b, n = self._common(other)
        raw = [Fraction(0)] * (2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        raw[i + j] += x * y
        return Cyclo(n, raw)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        return cyclo_inverse(self)

    def __truediv__(self, other):
        if not isinstance(other, Cyclo):
            f = Fraction(other)
            if not f:
                raise DivisionByZero("division by zero")
            return self * (1 / f)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclo.rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash(self.normalized_trace())

    def __repr__(self):
        return f"Cyclo({self.order}, {format_cyclo(self)})"

    __str__ = lambda self: format_cyclo(self)


def _reduce_fraction_vector(n, coeffs):
    den = 1
    for c in coeffs:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    return [Fraction(v, den) for v in reduce_int_vector(n, ints)]


def cyclo_reduce(order: int, raw) -> Cyclo:
    """Canonical reduced form of a polynomial in zeta_order (lowest degree first)."""
    return Cyclo(order, raw)


def _poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    inv = 1 / b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv
        q[k] = c
        if c:
            for i, m in enumerate(b):
                a[k + i] -= c * m
    return _poly_trim(q), _poly_trim(a[:len(b) - 1])


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    for i, y in enumerate(b):
        a[i] -= y
    return _poly_trim(a)


def cyclo_inverse(x: Cyclo) -> Cyclo:
    """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
    if x.is_zero():
        raise DivisionByZero("inverse of zero in a cyclotomic field")
    if x.is_rational():
        return Cyclo.rational(1 / x.coeffs[0], x.order)
    n = x.order
    r0 = [Fraction(c) for c in cyclotomic_polynomial(n)]
    r1 = _poly_trim(list(x.coeffs))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    # r1 is a nonzero constant: s1 * x == r1 (mod Phi_n)
    c = r1[0]
    return Cyclo(n, [v / c for v in s1])


def format_cyclo(x: Cyclo) -> str:
    parts = []
    name = {4: "i"}.get(x.order, f"z{x.order}")
    for j, c in enumerate(x.coeffs):
        if not c:
            continue
        if j == 0:
            parts.append(str(c))
            continue
        mono = name if j == 1 else f"{name}^{j}"
        if c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    return out if len(parts) == 1 else f"({out})"
