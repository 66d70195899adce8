"""Sparse-in-meaning, dense-in-storage Laurent polynomials over Q(zeta_N).

A polynomial is stored as a dense box of exponent slots. Each slot holds the
phi(N) integer coordinates of a cyclotomic coefficient, and the whole array
shares one positive integer denominator. Keeping the numerators integral lets
multiplication run through the integer convolution kernel.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, prod

from ..errors import DivisionByZero, IncompatibleVariables
from ..kernel import convolve, reduce_cyclotomic
from .cyclo import (
    Cyclo,
    _modpoly,
    embed_int_vector,
    euler_phi,
    lcm,
    reduce_int_vector,
)


def _content_reduce(coef, den):
    if not coef:
        return coef, 1
    g = gcd(den, *coef)
    if g > 1:
        coef = [c // g for c in coef]
        den //= g
    return coef, den


class LaurentPoly:
    """Laurent polynomial in one or more elliptic variables.

    The true exponent of variable ``v`` at box index ``i`` is
    ``(lo[v] + i) / dz``.
    """

    __slots__ = ("vars", "dz", "N", "lo", "shape", "coef", "den", "_hash")

    def __init__(self, terms=None, vars=("z",), dz=None, N=None):
        vars = tuple(vars)
        terms = dict(terms or {})
        keys = []
        for k in terms:
            k = k if isinstance(k, tuple) else (k,)
            if len(k) != len(vars):
                raise IncompatibleVariables(f"exponent {k} does not match variables {vars}")
            keys.append(tuple(Fraction(e) for e in k))
        vals = [v if isinstance(v, Cyclo) else Cyclo.rational(v) for v in terms.values()]
        if dz is None:
            dz = 1
            for k in keys:
                for e in k:
                    dz = lcm(dz, e.denominator)
        if N is None:
            N = 1
            for v in vals:
                N = lcm(N, v.order)
        built = _from_items(vars, dz, N, [(tuple(int(e * dz) for e in k), v) for k, v in zip(keys, vals)])
        for name in self.__slots__:
            object.__setattr__(self, name, getattr(built, name))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def _new(cls, vars, dz, N, lo, shape, coef, den, trim=True):
        obj = object.__new__(cls)
        if trim:
            lo, shape, coef = _trim(lo, shape, coef, euler_phi(N))
            coef, den = _content_reduce(coef, den)
            if den < 0:
                coef, den = [-c for c in coef], -den
        s = object.__setattr__
        s(obj, "vars", vars)
        s(obj, "dz", dz)
        s(obj, "N", N)
        s(obj, "lo", tuple(lo))
        s(obj, "shape", tuple(shape))
        s(obj, "coef", tuple(coef))
        s(obj, "den", den)
        s(obj, "_hash", None)
        return obj

    @classmethod
    def zero(cls, vars=("z",), dz=1, N=1):
        n = len(vars)
        return cls._new(tuple(vars), dz, N, (0,) * n, (0,) * n, (), 1, trim=False)

    @classmethod
    def constant(cls, value, vars=("z",), dz=1, N=None):
        return cls.monomial((0,) * len(vars), value, vars=vars, dz=dz, N=N)

    @classmethod
    def monomial(cls, exps, value=1, vars=("z",), dz=None, N=None):
        exps = exps if isinstance(exps, tuple) else (exps,)
        return cls({exps: value}, vars=vars, dz=dz, N=N)

    # inspection ---------------------------------------------------------
    @property
    def nvars(self):
        return len(self.vars)

    @property
    def phi(self):
        return euler_phi(self.N)

    def is_zero(self):
        return not self.coef

    def nslots(self):
        return len(self.coef) // self.phi

    def is_constant(self):
        return self.is_zero() or (all(s == 1 for s in self.shape) and not any(self.lo))

    def is_monomial(self):
        if self.is_zero():
            return False
        phi = self.phi
        return sum(1 for s in range(0, len(self.coef), phi) if any(self.coef[s:s + phi])) == 1

    def items(self):
        """Yield ``(scaled exponent tuple, Cyclo)`` pairs for nonzero slots."""
        phi = self.phi
        strides = _strides(self.shape)
        for s in range(self.nslots()):
            vec = self.coef[s * phi:(s + 1) * phi]
            if any(vec):
                idx = _unravel(s, self.shape, strides)
                yield (tuple(l + i for l, i in zip(self.lo, idx)),
                       Cyclo._raw(self.N, [Fraction(c, self.den) for c in vec]))

    def terms(self):
        """Nonzero terms as ``{exponent tuple of Fractions: Cyclo}``."""
        return {tuple(Fraction(e, self.dz) for e in k): v for k, v in self.items()}

    def coefficient(self, exps) -> Cyclo:
        exps = exps if isinstance(exps, tuple) else (exps,)
        scaled = []
        for e in exps:
            e = Fraction(e) * self.dz
            if e.denominator != 1:
                return Cyclo.rational(0, self.N)
            scaled.append(int(e))
        idx = [s - l for s, l in zip(scaled, self.lo)]
        if any(i < 0 or i >= n for i, n in zip(idx, self.shape)):
            return Cyclo.rational(0, self.N)
        flat = sum(i * st for i, st in zip(idx, _strides(self.shape)))
        phi = self.phi
        return Cyclo._raw(self.N, [Fraction(c, self.den) for c in self.coef[flat * phi:(flat + 1) * phi]])

    def constant_term(self) -> Cyclo:
        return self.coefficient((0,) * self.nvars)

    def exponent_range(self, var=0):
        """(lowest, highest) true exponent of one variable; None when zero."""
        if self.is_zero():
            return None
        return (Fraction(self.lo[var], self.dz),
                Fraction(self.lo[var] + self.shape[var] - 1, self.dz))

    def leading(self):
        """Highest-exponent coefficient (single variable)."""
        phi = self.phi
        vec = self.coef[-phi:]
        return Cyclo._raw(self.N, [Fraction(c, self.den) for c in vec])

    def trailing(self):
        phi = self.phi
        return Cyclo._raw(self.N, [Fraction(c, self.den) for c in self.coef[:phi]])

    # alignment ----------------------------------------------------------
    def regrid(self, dz):
        if dz == self.dz:
            return self
        if dz % self.dz:
            raise ValueError("exponent grid can only be refined")
        r = dz // self.dz
        if self.is_zero():
            return LaurentPoly._new(self.vars, dz, self.N, self.lo, self.shape, (), 1, trim=False)
        phi = self.phi
        new_shape = tuple((s - 1) * r + 1 for s in self.shape)
        new_lo = tuple(l * r for l in self.lo)
        out = [0] * (prod(new_shape) * phi)
        nst = _strides(new_shape)
        ost = _strides(self.shape)
        for s in range(self.nslots()):
            idx = _unravel(s, self.shape, ost)
            t = sum(i * r * st for i, st in zip(idx, nst))
            out[t * phi:(t + 1) * phi] = self.coef[s * phi:(s + 1) * phi]
        return LaurentPoly._new(self.vars, dz, self.N, new_lo, new_shape, out, self.den, trim=False)

    def embed(self, N):
        if N == self.N:
            return self
        if N % self.N:
            raise ValueError("cyclotomic field can only be enlarged")
        phi_old, phi_new = self.phi, euler_phi(N)
        if self.is_zero():
            return LaurentPoly._new(self.vars, self.dz, N, self.lo, self.shape, (), 1, trim=False)
        if self.N == 1:
            out = []
            pad = [0] * (phi_new - 1)
            for c in self.coef:
                out.append(c)
                out.extend(pad)
        else:
            step = N // self.N
            width = max((phi_old - 1) * step + 1, phi_new)
            raw = []
            for s in range(0, len(self.coef), phi_old):
                slot = [0] * width
                for j in range(phi_old):
                    slot[j * step] = self.coef[s + j]
                raw.extend(slot)
            out = raw if width == phi_new else reduce_cyclotomic(raw, width, phi_new, _modpoly(N))
        return LaurentPoly._new(self.vars, self.dz, N, self.lo, self.shape, out, self.den, trim=False)

    def with_vars(self, vars):
        vars = tuple(vars)
        if vars == self.vars:
            return self
        if not self.is_constant():
            raise IncompatibleVariables(f"cannot view {self.vars} polynomial over {vars}")
        n = len(vars)
        if self.is_zero():
            return LaurentPoly._new(vars, self.dz, self.N, (0,) * n, (0,) * n, (), 1, trim=False)
        return LaurentPoly._new(vars, self.dz, self.N, (0,) * n, (1,) * n, self.coef, self.den, trim=False)

    def _align(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, vars=self.vars, dz=self.dz)
        a, b = self, other
        if a.vars != b.vars:
            if b.is_constant():
                b = b.with_vars(a.vars)
            elif a.is_constant():
                a = a.with_vars(b.vars)
            else:
                raise IncompatibleVariables(f"{a.vars} vs {b.vars}")
        if a.dz != b.dz:
            dz = lcm(a.dz, b.dz)
            a, b = a.regrid(dz), b.regrid(dz)
        if a.N != b.N:
            n = lcm(a.N, b.N)
            a, b = a.embed(n), b.embed(n)
        return a, b

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._align(other)
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        phi = a.phi
        l = lcm(a.den, b.den)
        sa, sb = l // a.den, l // b.den
        if a.nvars == 1:
            lo = min(a.lo[0], b.lo[0])
            hi = max(a.lo[0] + a.shape[0], b.lo[0] + b.shape[0])
            out = [0] * ((hi - lo) * phi)
            off = (a.lo[0] - lo) * phi
            if sa == 1:
                out[off:off + len(a.coef)] = a.coef
            else:
                out[off:off + len(a.coef)] = [c * sa for c in a.coef]
            off = (b.lo[0] - lo) * phi
            for i, c in enumerate(b.coef):
                if c:
                    out[off + i] += c * sb
            return LaurentPoly._new(a.vars, a.dz, a.N, (lo,), (hi - lo,), out, l)
        lo = tuple(min(x, y) for x, y in zip(a.lo, b.lo))
        hi = tuple(max(x + s, y + t) for x, s, y, t in zip(a.lo, a.shape, b.lo, b.shape))
        shape = tuple(h - x for h, x in zip(hi, lo))
        out = _scatter(a, lo, shape, phi, sa)
        for i, c in enumerate(_scatter(b, lo, shape, phi, sb)):
            if c:
                out[i] += c
        return LaurentPoly._new(a.vars, a.dz, a.N, lo, shape, out, l)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._new(self.vars, self.dz, self.N, self.lo, self.shape,
                                [-c for c in self.coef], self.den, trim=False)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, vars=self.vars, dz=self.dz)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value):
        """Multiply by a scalar (int, Fraction or Cyclo)."""
        if isinstance(value, Cyclo):
            if value.is_rational():
                value = value.coeffs[0]
            else:
                return self * LaurentPoly.constant(value, vars=self.vars, dz=self.dz)
        value = Fraction(value)
        if not value or self.is_zero():
            return LaurentPoly.zero(self.vars, self.dz, self.N)
        num, den = value.numerator, value.denominator
        return LaurentPoly._new(self.vars, self.dz, self.N, self.lo, self.shape,
                                [c * num for c in self.coef], self.den * den)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        a, b = self._align(other)
        if a.is_zero() or b.is_zero():
            return LaurentPoly.zero(a.vars, a.dz, a.N)
        phi = a.phi
        lo = tuple(x + y for x, y in zip(a.lo, b.lo))
        shape = tuple(s + t - 1 for s, t in zip(a.shape, b.shape))
        if phi == 1 and a.nvars == 1:
            out = convolve(a.coef, b.coef)
        else:
            width = 2 * phi - 1
            fa = _scatter(a, a.lo, shape, width, 1)
            fb = _scatter(b, b.lo, shape, width, 1)
            _rstrip(fa)
            _rstrip(fb)
            out = convolve(fa, fb)
            out.extend([0] * (prod(shape) * width - len(out)))
            if width != phi:
                out = reduce_cyclotomic(out, width, phi, _modpoly(a.N))
        return LaurentPoly._new(a.vars, a.dz, a.N, lo, shape, out, a.den * b.den)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = LaurentPoly.constant(1, vars=self.vars, dz=self.dz, N=self.N)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exps):
        """Multiply by the monomial with the given (true) exponents."""
        exps = exps if isinstance(exps, tuple) else (exps,)
        exps = [Fraction(e) for e in exps]
        dz = self.dz
        for e in exps:
            dz = lcm(dz, e.denominator)
        p = self.regrid(dz)
        lo = tuple(l + int(e * dz) for l, e in zip(p.lo, exps))
        return LaurentPoly._new(p.vars, dz, p.N, lo, p.shape, p.coef, p.den, trim=False)

    def delta(self, var=0):
        """Euler operator x d/dx in one variable."""
        if self.is_zero():
            return self
        phi = self.phi
        strides = _strides(self.shape)
        out = list(self.coef)
        for s in range(self.nslots()):
            e = self.lo[var] + _unravel(s, self.shape, strides)[var]
            base = s * phi
            for j in range(phi):
                out[base + j] *= e
        return LaurentPoly._new(self.vars, self.dz, self.N, self.lo, self.shape, out, self.den * self.dz)

    def subs_monomial(self, power, turn=0, var=0):
        """Substitute x -> exp(2*pi*i*turn) * x**power in one variable.

        Fractional exponents follow the branch x**e -> exp(2*pi*i*turn*e) x**(power*e).
        """
        power, turn = Fraction(power), Fraction(turn)
        if power == 0:
            raise ValueError("power must be nonzero")
        if self.is_zero():
            return self
        dz = self.dz * power.denominator
        M = lcm(self.N, (turn / self.dz).denominator)
        step = M // self.N
        phi_old = self.phi
        items = []
        strides = _strides(self.shape)
        for s in range(self.nslots()):
            vec = self.coef[s * phi_old:(s + 1) * phi_old]
            if not any(vec):
                continue
            idx = _unravel(s, self.shape, strides)
            exps = [l + i for l, i in zip(self.lo, idx)]
            e = exps[var]
            rot = turn * e / self.dz
            k = (rot.numerator * (M // rot.denominator)) % M
            if M == 1:
                new = list(vec)
            else:
                raw = [0] * M
                for j, c in enumerate(vec):
                    raw[(j * step + k) % M] += c
                new = reduce_int_vector(M, raw)
            exps = [x * power.denominator for x in exps]
            exps[var] = e * power.numerator
            items.append((tuple(exps), new))
        return _from_int_items(self.vars, dz, M, items, self.den)

    def evaluate(self, turns) -> Cyclo:
        """Value at x_v = exp(2*pi*i*turns[v]) as a cyclotomic number."""
        turns = turns if isinstance(turns, (tuple, list)) else (turns,)
        total = Cyclo.rational(0, self.N)
        for exps, c in self.items():
            t = sum((Fraction(tv) * e for tv, e in zip(turns, exps)), Fraction(0)) / self.dz
            total = total + c * Cyclo.from_turn(t)
        return total

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction, Cyclo)):
                other = LaurentPoly.constant(other, vars=self.vars, dz=self.dz)
            else:
                return NotImplemented
        try:
            a, b = self._align(other)
        except IncompatibleVariables:
            return False
        return a.lo == b.lo and a.shape == b.shape and a.den == b.den and a.coef == b.coef

    def __hash__(self):
        if self._hash is None:
            h = hash(tuple(sorted((tuple(Fraction(e, self.dz) for e in k), hash(v))
                                  for k, v in self.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({format_laurent(self)})"

    def __str__(self):
        return format_laurent(self)


# helpers ---------------------------------------------------------------

def _strides(shape):
    st = [1] * len(shape)
    for d in range(len(shape) - 2, -1, -1):
        st[d] = st[d + 1] * shape[d + 1]
    return st


def _unravel(s, shape, strides):
    return tuple((s // st) % n if n else 0 for st, n in zip(strides, shape))


def _rstrip(lst):
    while lst and not lst[-1]:
        lst.pop()


def _scatter(p, lo, shape, width, scale):
    """Copy ``p`` into a zero box with origin ``lo``, ``shape`` and slot ``width``."""
    phi = p.phi
    if p.nvars == 1 and width == phi:
        off = (p.lo[0] - lo[0]) * phi
        out = [0] * (shape[0] * phi)
        out[off:off + len(p.coef)] = p.coef if scale == 1 else [c * scale for c in p.coef]
        return out
    out = [0] * (prod(shape) * width)
    pst = _strides(p.shape)
    tst = _strides(shape)
    for s in range(p.nslots()):
        vec = p.coef[s * phi:(s + 1) * phi]
        if not any(vec):
            continue
        idx = _unravel(s, p.shape, pst)
        t = sum((l + i - o) * st for l, i, o, st in zip(p.lo, idx, lo, tst)) * width
        for j, c in enumerate(vec):
            out[t + j] = c * scale
    return out


def _trim(lo, shape, coef, phi):
    if not coef or not any(coef):
        n = len(lo)
        return (0,) * n, (0,) * n, []
    if len(shape) == 1:
        n = len(coef) // phi
        first = 0
        while not any(coef[first * phi:(first + 1) * phi]):
            first += 1
        last = n - 1
        while not any(coef[last * phi:(last + 1) * phi]):
            last -= 1
        if first == 0 and last == n - 1:
            return lo, shape, list(coef)
        return (lo[0] + first,), (last - first + 1,), list(coef[first * phi:(last + 1) * phi])
    strides = _strides(shape)
    mins = [None] * len(shape)
    maxs = [None] * len(shape)
    for s in range(len(coef) // phi):
        if any(coef[s * phi:(s + 1) * phi]):
            idx = _unravel(s, shape, strides)
            for d, i in enumerate(idx):
                if mins[d] is None or i < mins[d]:
                    mins[d] = i
                if maxs[d] is None or i > maxs[d]:
                    maxs[d] = i
    new_shape = tuple(b - a + 1 for a, b in zip(mins, maxs))
    if new_shape == tuple(shape):
        return lo, shape, list(coef)
    new_lo = tuple(l + a for l, a in zip(lo, mins))
    out = [0] * (prod(new_shape) * phi)
    nst = _strides(new_shape)
    for s in range(len(coef) // phi):
        vec = coef[s * phi:(s + 1) * phi]
        if any(vec):
            idx = _unravel(s, shape, strides)
            t = sum((i - a) * st for i, a, st in zip(idx, mins, nst)) * phi
            out[t:t + phi] = vec
    return new_lo, new_shape, out


def _from_int_items(vars, dz, N, items, den):
    """Build from ``[(scaled exps, int vector)]`` sharing denominator ``den``."""
    n = len(vars)
    phi = euler_phi(N)
    if not items:
        return LaurentPoly.zero(vars, dz, N)
    lo = tuple(min(k[d] for k, _ in items) for d in range(n))
    hi = tuple(max(k[d] for k, _ in items) for d in range(n))
    shape = tuple(h - l + 1 for h, l in zip(hi, lo))
    st = _strides(shape)
    out = [0] * (prod(shape) * phi)
    for k, vec in items:
        t = sum((e - l) * s for e, l, s in zip(k, lo, st)) * phi
        for j, c in enumerate(vec):
            out[t + j] += c
    return LaurentPoly._new(vars, dz, N, lo, shape, out, den)


def _from_items(vars, dz, N, items):
    """Build from ``[(scaled exps, Cyclo)]``."""
    den = 1
    embedded = []
    for k, v in items:
        v = v.embed(N)
        embedded.append((k, v))
        for c in v.coeffs:
            den = lcm(den, c.denominator)
    ints = [(k, [int(c * den) for c in v.coeffs]) for k, v in embedded]
    if not ints:
        return LaurentPoly.zero(vars, dz, N)
    return _from_int_items(vars, dz, N, ints, den)


def format_laurent(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for exps, c in sorted(p.terms().items(), reverse=True):
        mono = "*".join(
            v if e == 1 else f"{v}^{e}" if e.denominator == 1 and e > 0 else f"{v}^({e})"
            for v, e in zip(p.vars, exps) if e != 0
        )
        cs = str(c)
        if not mono:
            pieces.append(cs)
        elif cs == "1":
            pieces.append(mono)
        elif cs == "-1":
            pieces.append("-" + mono)
        else:
            pieces.append(f"{cs}*{mono}")
    out = pieces[0]
    for piece in pieces[1:]:
        out += (" - " + piece[1:]) if piece.startswith("-") else (" + " + piece)
    return out


def poly_sum(polys, vars=None):
    """Sum many polynomials with one alignment pass."""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return LaurentPoly.zero(vars or ("z",))
    if len(polys) == 1:
        return polys[0]
    vs, dz, N = polys[0].vars, 1, 1
    for p in polys:
        if p.vars != vs and not p.is_constant():
            vs = p.vars
        dz = lcm(dz, p.dz)
        N = lcm(N, p.N)
    aligned = []
    den = 1
    for p in polys:
        if p.vars != vs:
            p = p.with_vars(vs)
        p = p.regrid(dz).embed(N)
        aligned.append(p)
        den = lcm(den, p.den)
    phi = euler_phi(N)
    n = len(vs)
    lo = tuple(min(p.lo[d] for p in aligned) for d in range(n))
    hi = tuple(max(p.lo[d] + p.shape[d] for p in aligned) for d in range(n))
    shape = tuple(h - l for h, l in zip(hi, lo))
    if n == 1:
        out = [0] * (shape[0] * phi)
        for p in aligned:
            sc = den // p.den
            off = (p.lo[0] - lo[0]) * phi
            if sc == 1:
                for i, c in enumerate(p.coef):
                    if c:
                        out[off + i] += c
            else:
                for i, c in enumerate(p.coef):
                    if c:
                        out[off + i] += c * sc
    else:
        out = [0] * (prod(shape) * phi)
        for p in aligned:
            for i, c in enumerate(_scatter(p, lo, shape, phi, den // p.den)):
                if c:
                    out[i] += c
    return LaurentPoly._new(vs, dz, N, lo, shape, out, den)
