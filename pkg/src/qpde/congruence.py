"""Search for arithmetic progressions on which eta°_k vanishes modulo a prime power.

Every hit is evidence only: a candidate is reported as verified up to the
tested range, never as proven.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .combinatorics import eta_odd_weight
from .errors import InvalidModulus, OrderExceedsTruncation


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _pentagonal_terms(limit):
    """(offset, sign) pairs with 1/(q; q)_inf recurrence signs: b_i = a_i + sum sign * b_(i - offset)."""
    out = []
    n = 1
    while True:
        g1 = n * (3 * n - 1) // 2
        if g1 >= limit:
            break
        s = 1 if n % 2 else -1
        out.append((g1, s))
        g2 = n * (3 * n + 1) // 2
        if g2 < limit:
            out.append((g2, s))
        n += 1
    return out


def divide_by_euler(a, step=1, modulus=None):
    """Coefficients of A(q) / (q^step; q^step)_inf, using the pentagonal recurrence."""
    n = len(a)
    b = [0] * n
    pent = _pentagonal_terms(n // step + 1)
    for i in range(n):
        acc = a[i]
        for g, s in pent:
            j = i - g * step
            if j < 0:
                break
            acc += s * b[j]
        b[i] = acc % modulus if modulus else acc
    return b


def partition_sequence(n_max: int, modulus=None) -> list:
    """p(0..n_max), optionally reduced mod ``modulus``."""
    a = [0] * (n_max + 1)
    a[0] = 1
    return divide_by_euler(a, 1, modulus)


def odd_moment_sequence(k: int, n_max: int, modulus=None) -> list:
    """eta°_k(0..n_max) from the moment-weighted Lerch sum divided by (q^2; q^2)_inf."""
    size = n_max + 1
    a = [0] * size
    n = 0
    # summands with 2n+1 > 0: sum_{m>=0} z^m q^(E + (2n+1) m)
    while True:
        e = 3 * n * n + 3 * n + 1
        if e >= size:
            break
        sign = -1 if n % 2 else 1
        d = 2 * n + 1
        m = 0
        while e + d * m < size:
            w = eta_odd_weight(m, k)
            if w:
                a[e + d * m] += sign * w
            m += 1
        n += 1
    n = -1
    # summands with 2n+1 < 0: -sum_{m>=1} z^-m q^(E + |2n+1| m)
    while True:
        e = 3 * n * n + 3 * n + 1
        d = -(2 * n + 1)
        if e + d >= size:
            break
        sign = -1 if n % 2 else 1
        m = 1
        while e + d * m < size:
            w = eta_odd_weight(-m, k)
            if w:
                a[e + d * m] -= sign * w
            m += 1
        n -= 1
    if modulus:
        a = [x % modulus for x in a]
    return divide_by_euler(a, 2, modulus)


@dataclass(frozen=True)
class CongruenceCandidate:
    p: int
    j: int
    k: int
    A: int
    B: int
    nMaxTested: int
    status: str = "verifiedUpTo"
    refutedAt: int | None = None
    witness: int | None = None

    def to_json(self) -> str:
        doc = {"p": self.p, "j": self.j, "k": self.k, "A": self.A, "B": self.B,
               "nMaxTested": self.nMaxTested, "status": self.status}
        if self.refutedAt is not None:
            doc["refutedAt"] = self.refutedAt
            doc["witness"] = self.witness
        return json.dumps(doc)


def _validate(p, j, k, source):
    if j < 1:
        raise InvalidModulus("the exponent j must be positive")
    if source == "partitions":
        if not is_prime(p):
            raise InvalidModulus(f"{p} is not prime")
        return
    if not is_prime(p) or p <= 3:
        raise InvalidModulus(f"modulus prime must exceed 3, got {p}")
    if k < 1 or k % 2:
        raise InvalidModulus(f"k must be even and positive, got {k}")


def sequence(p, j, k, n_max, source="odd-moments"):
    mod = p ** j
    if source == "partitions":
        return partition_sequence(n_max, mod)
    return odd_moment_sequence(k, n_max, mod)


def _scan_block(args):
    values, a_lo, a_hi, n_max = args
    hits = []
    for A in range(a_lo, a_hi):
        for B in range(A):
            if all(values[A * n + B] == 0 for n in range(n_max + 1)):
                hits.append((A, B))
    return hits


def scan(p, j, k, a_max, n_max, source="odd-moments", values=None, workers=None) -> list:
    """All (A, B) with A <= a_max, B < A such that the sequence vanishes mod p^j on A n + B, n <= n_max."""
    _validate(p, j, k, source)
    need = a_max * n_max + a_max
    if values is None:
        values = sequence(p, j, k, need, source)
    elif len(values) <= need - 1:
        raise OrderExceedsTruncation(f"need values up to n = {need - 1}, have {len(values) - 1}")
    workers = workers if workers is not None else int(os.environ.get("QPDE_THREADS", "1") or 1)
    blocks = []
    step = max(1, a_max // max(1, workers * 4))
    for lo in range(1, a_max + 1, step):
        blocks.append((values, lo, min(a_max + 1, lo + step), n_max))
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_block, blocks))
    else:
        parts = [_scan_block(b) for b in blocks]
    pairs = sorted(pair for part in parts for pair in part)
    return [CongruenceCandidate(p, j, k, A, B, n_max) for A, B in pairs]


def residues(p, j, k, A, B, n_max, source="odd-moments", values=None) -> list:
    """eta°_k(A n + B) mod p^j for n = 0..n_max."""
    need = A * n_max + B
    if values is None:
        values = sequence(p, j, k, need, source)
    elif len(values) <= need:
        raise OrderExceedsTruncation(f"need values up to n = {need}, have {len(values) - 1}")
    return [values[A * n + B] for n in range(n_max + 1)]


def recheck(c: CongruenceCandidate, n_max: int, source="odd-moments", values=None) -> CongruenceCandidate:
    """Re-test a candidate on a longer range; a failure is reported with its witness residue."""
    res = residues(c.p, c.j, c.k, c.A, c.B, n_max, source, values)
    for n, r in enumerate(res):
        if r:
            return CongruenceCandidate(c.p, c.j, c.k, c.A, c.B, n_max, "refutedAt", n, r)
    return CongruenceCandidate(c.p, c.j, c.k, c.A, c.B, n_max)


def to_jsonl(candidates) -> str:
    return "".join(c.to_json() + "\n" for c in candidates)
