"""Partition enumeration, rank tables and symmetrized rank moments.

The brute-force oracle here is independent of the series engine and serves
as ground truth for the rank generating function.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import LimitExceeded, OrderExceedsTruncation

DEFAULT_LIMIT = 60


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        if any(p < 1 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def rank(self) -> int:
        """Largest part minus number of parts (0 for the empty partition)."""
        if not self.parts:
            return 0
        return self.parts[0] - len(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def _check(n, limit):
    limit = DEFAULT_LIMIT if limit is None else limit
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > limit:
        raise LimitExceeded(f"n = {n} exceeds the enumeration limit {limit}")


def _gen(n, largest):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _gen(n - first, first):
            yield (first,) + rest


def enumerate_partitions(n: int, limit: int | None = None) -> list:
    """All partitions of n in lexicographic order of their part sequences."""
    _check(n, limit)
    return [Partition(p) for p in sorted(_gen(n, n))]


def count_partitions(n: int, limit: int | None = None) -> int:
    _check(n, limit)
    return sum(1 for _ in _gen(n, n))


@dataclass
class RankTable:
    n: int
    counts: dict = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, m):
        return self.counts.get(m, 0)


def rank_counts(n: int, limit: int | None = None) -> RankTable:
    """N(m, n) by enumeration; N(0, 0) = 1 by convention."""
    _check(n, limit)
    counts = {}
    for p in _gen(n, n):
        r = (p[0] - len(p)) if p else 0
        counts[r] = counts.get(r, 0) + 1
    return RankTable(n, dict(sorted(counts.items())))


def gbinom(m: int, k: int) -> int:
    """C(m, k) = m(m-1)...(m-k+1)/k! for any integer m."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= m - i
    return num // factorial(k)


def eta_weight(m: int, k: int) -> int:
    """Weight of N(m, n) in the symmetrized rank moment eta_k."""
    return gbinom(m + (k - 1) // 2, k)


def eta_odd_weight(m: int, k: int) -> int:
    """Weight of N°(m, n) in the odd-Durfee moment eta°_k."""
    return gbinom(m + k // 2, k)


def _weighted(poly, weight, k):
    total = Fraction(0)
    for (m,), c in poly.terms().items():
        if m.denominator != 1:
            raise ValueError("rank coefficients must have integral z-exponents")
        total += weight(int(m), k) * c.to_fraction()
    if total.denominator != 1:
        raise ArithmeticError("moment is not an integer")
    return int(total)


_series_cache = {}


def _cached(kind, order):
    from . import special as sp
    key = kind
    cached = _series_cache.get(key)
    if cached is None or cached.order < order:
        order = max(order, 2 * cached.order if cached is not None else order)
        cached = sp.rank_series("eulerian", order) if kind == "rank" else sp.rodd_series(order)
        _series_cache[key] = cached
    return cached


def rank_coefficient(n: int):
    """q^n coefficient of R(z; q) as a Laurent polynomial."""
    return _cached("rank", n + 1).numerator(n)


def rodd_coefficient(n: int):
    """q^n coefficient of R°(z; q) as a Laurent polynomial."""
    return _cached("rodd", n + 1).numerator(n)


def moment_eta(k: int, n: int, source: str = "rankSeries", limit: int | None = None) -> int:
    """eta_k(n) from the rank series or the partition oracle."""
    if k < 1:
        raise ValueError("k must be positive")
    if source in ("oracle", "enumeration"):
        table = rank_counts(n, limit)
        return sum(eta_weight(m, k) * c for m, c in table.counts.items())
    if source in ("rankSeries", "series"):
        return _weighted(rank_coefficient(n), eta_weight, k)
    raise ValueError(f"unknown source {source!r}")


def moment_eta_odd(k: int, n: int, series=None) -> int:
    """eta°_k(n) from the q^n coefficient of R°(z; q)."""
    if k < 1:
        raise ValueError("k must be positive")
    if series is not None:
        if n >= series.order:
            raise OrderExceedsTruncation(f"q^{n} lies beyond the series order {series.order}")
        poly = series.numerator(n)
    else:
        poly = rodd_coefficient(n)
    return _weighted(poly, eta_odd_weight, k)


@dataclass
class MomentTable:
    k: int
    values: dict = field(default_factory=dict)
    odd: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,value\n")
        for n, v in sorted(self.values.items()):
            buf.write(f"{n},{v}\n")
        return buf.getvalue()


def moment_table(k: int, n_max: int, odd: bool = False, source: str = "rankSeries") -> MomentTable:
    if odd:
        values = {n: moment_eta_odd(k, n) for n in range(n_max + 1)}
    else:
        values = {n: moment_eta(k, n, source) for n in range(n_max + 1)}
    return MomentTable(k, values, odd)
