"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time
from fractions import Fraction as F

import pytest

from conftest import record
from qpde import combinatorics as cb
from qpde import congruence as cg
from qpde import identities as ids
from qpde import numeric as nm
from qpde import special as sp
from qpde.series import QSeries, qs_equal

from helpers import I, row

PARAMS = ids.DEFAULT_PARAMS


def _verify(name, order, params=None):
    r = ids.verify(name, order, params)
    return r, r.passed


def test_criterion_01_diff1():
    t = time.perf_counter()
    r, ok = _verify("diff1", 25)
    dt = time.perf_counter() - t
    ok = ok and dt < 60
    record(1, ok, f"diff1 to q^25: {r.status}, {dt:.2f}s (limit 60s)")
    assert ok, r.discrepancy


PDES = ["diff2", "pdestar", "pdestar2", "pdeoverstar", "pde3", "pdem2star", "pde4", "oddpde", "rstar1"]


def test_criterion_02_pde_family():
    t = time.perf_counter()
    reports = [ids.verify(n, 20) for n in PDES]
    dt = time.perf_counter() - t
    bad = [r.name for r in reports if not r.passed]
    ok = not bad and dt < 300
    record(2, ok, f"{len(PDES) - len(bad)}/{len(PDES)} PDEs to q^20, {dt:.2f}s (limit 300s)"
           + (f", failing: {bad}" if bad else ""))
    assert ok


def test_criterion_03_mainequation():
    reports = [ids.verify("mainequation", 8, p) for p in PARAMS]
    bad = [r.label() for r in reports if not r.passed]
    record(3, not bad, f"mainequation to q^8 for {len(PARAMS)} (alpha, beta) pairs"
           + (f", failing: {bad}" if bad else ""))
    assert not bad


def test_criterion_04_theta_lemma_and_wronskian():
    reports = [ids.verify("theta-lemma", 15)] + [ids.verify("wronskian", 15, p) for p in PARAMS]
    bad = [r.label() for r in reports if not r.passed]
    record(4, not bad, "theta-lemma (two elliptic variables) and wronskian x4 to q^15"
           + (f", failing: {bad}" if bad else ""))
    assert not bad


def _half_sum(order):
    """sum_n (-1)^n (n + 1/2) q^((2n+1)^2/8) as an exact series truncated at ``order``."""
    terms = {}
    n = 0
    while F((2 * n + 1) ** 2, 8) < order:
        for m in (n, -n - 1):
            e = F((2 * m + 1) ** 2, 8)
            terms[e] = terms.get(e, 0) + (-1) ** (m % 2) * (m + F(1, 2))
        n += 1
    return QSeries({e: c for e, c in terms.items() if c}, order=order)


def _literal_prop21_4(order):
    # the criterion's literal statement: i * sum = -eta^3
    return qs_equal(_half_sum(order) * I, -(sp.eta_series(1, order) ** 3), order)


def test_criterion_05_transformation_laws():
    r21, r22 = ids.verify("prop21", 30), ids.verify("prop22", 30)
    # correct normalization: sum = eta^3, i.e. delta_z theta at z = 1 equals i eta^3
    correct = qs_equal(_half_sum(30), sp.eta_series(1, 30) ** 3, 30).equal
    literal = _literal_prop21_4(30)
    ok = r21.passed and r22.passed and correct and literal.equal
    detail = (f"theta laws (1)-(3) and corrected (4): {r21.status}, mu laws (1)-(2): {r22.status}, "
              f"sum = eta^3: {'pass' if correct else 'fail'}; "
              f"literal i*sum = -eta^3: {'pass' if literal.equal else 'fail at q^' + str(literal.exponent)}")
    record(5, ok, detail)
    assert r21.passed and r22.passed and correct


@pytest.mark.xfail(strict=True, reason="the stated sign/normalization of i*sum = -eta^3 is off; "
                                       "the true identity is sum = eta^3 (see decisions ledger)")
def test_criterion_05_literal_form():
    assert _literal_prop21_4(30).equal


def test_criterion_06_rank_forms():
    names = ["rank-forms", "rank-at-1", "rank-at-minus1", "rodd-relation"]
    reports = [ids.verify(n, 40) for n in names]
    bad = [r.name for r in reports if not r.passed]
    record(6, not bad, "rank forms, R(1;q), R(-1;q) = f(q), odd-Durfee relation to q^40"
           + (f", failing: {bad}" if bad else ""))
    assert not bad


def test_criterion_07_oracle():
    r = sp.rank_series("eulerian", 26)
    counts_ok = all(cb.rank_counts(n).counts == row(r, n) for n in range(26))
    moments_ok = all(cb.moment_eta(k, n, "rankSeries") == cb.moment_eta(k, n, "oracle")
                     for k in (2, 4, 6) for n in range(26))
    odd_ok = all(cb.moment_eta(k, n) == 0 and cb.moment_eta_odd(k, n) == 0
                 for k in (1, 3, 5, 7) for n in range(101))
    ok = counts_ok and moments_ok and odd_ok
    record(7, ok, f"rank counts n<=25: {counts_ok}, moments k=2,4,6 n<=25: {moments_ok}, "
                  f"odd k<=7 vanish n<=100: {odd_ok}")
    assert ok


def test_criterion_08_ramanujan():
    inv = sp.qpoch_inf(1, 1, 1001, sign=-1)
    p = [int(row(inv, n).get(0, 0)) for n in range(1001)]
    assert p[:6] == [1, 1, 2, 3, 5, 7] and p[100] == 190569292
    cong = all(p[A * n + B] % A == 0 for A, B in ((5, 4), (7, 5), (11, 6))
               for n in range((1000 - B) // A + 1))
    values = cg.partition_sequence(12 * 80 + 12)
    found = {}
    for prime, A, B in ((5, 5, 4), (7, 7, 5), (11, 11, 6)):
        modded = [v % prime for v in values]
        hits = {(c.A, c.B) for c in cg.scan(prime, 1, 0, 12, 80, source="partitions", values=modded)}
        found[prime] = (A, B) in hits
    ok = cong and all(found.values())
    record(8, ok, f"p(5n+4), p(7n+5), p(11n+6) for n<=1000: {cong}; scanner rediscovers "
                  + ", ".join(f"mod {q}: {v}" for q, v in found.items()))
    assert ok


def test_criterion_09_congruence_scan():
    first = cg.scan(5, 1, 2, 50, 200)
    again = cg.scan(5, 1, 2, 50, 200)
    deterministic = first == again
    values = cg.sequence(5, 1, 2, 50 * 400 + 50)
    rechecked = [cg.recheck(c, 400, values=values) for c in first]
    survivors = all(c.status == "verifiedUpTo" for c in rechecked)
    zero = all(not any(cg.residues(5, 1, 2, c.A, c.B, 200, values=values)) for c in first)
    ok = deterministic and survivors and zero
    pairs = [(c.A, c.B) for c in first]
    record(9, ok, f"scan(5,1,2,50,200): {len(first)} candidates {pairs}, deterministic {deterministic}, "
                  f"all re-verify to n=400: {survivors}, zero residues: {zero}")
    assert ok


RATIONAL_RUNS = [
    (0.5, 0.0, 0), (0.0, 0.5, 1), (1 / 3, 0.0, 2), (0.5, 0.5, 3), (0.25, 0.75, 4),
]
IRRATIONAL_RUNS = [(math.sqrt(2) / 2, 0.0, 0), (1 / math.pi, 0.25, 2), (math.sqrt(3) - 1, 0.5, 4)]


def _point(i):
    from qpde.cli import DEFAULT_POINTS
    u, v, tau = DEFAULT_POINTS[i]
    return nm.ComplexPoint(u, v, tau, 1e-12)


def test_criterion_10_numeric():
    rat = [nm.numeric_check("mainequation", a, b, [_point(i)])[0].absErr for a, b, i in RATIONAL_RUNS]
    irr = [nm.numeric_check("mainequation", a, b, [_point(i)])[0].absErr for a, b, i in IRRATIONAL_RUNS]
    v, tau = 0.3 + 0.4j, 1.1j
    res_err = abs(nm.mu_residue(v, tau) - nm.mu_residue_expected(v, tau))
    # shared points: the exact verdict for these rational parameters must match the numeric one
    conflicts = []
    for a, b, i in RATIONAL_RUNS:
        exact = ids.verify("mainequation", 8, (F(a).limit_denominator(12), F(b).limit_denominator(12))).passed
        numeric_ok = nm.numeric_check("mainequation", a, b, [_point(i)])[0].absErr < 1e-6
        if exact != numeric_ok:
            conflicts.append((a, b))
        for name in ("wronskian", "prop22"):
            ex = ids.verify(name, 10, (F(a).limit_denominator(12), F(b).limit_denominator(12))
                            if ids.get_entry(name).needs_params else None).passed
            nu = all(r.absErr < 1e-6 for r in nm.numeric_check(name, a, b, [_point(i)]))
            if ex != nu:
                conflicts.append((name, a, b))
    ok = max(rat) < 1e-6 and max(irr) < 1e-5 and res_err < 1e-6 and not conflicts
    record(10, ok, f"mainequation max absErr rational {max(rat):.1e} (<1e-6), irrational {max(irr):.1e} "
                   f"(<1e-5); residue error {res_err:.1e} (<1e-6); verdict conflicts: {len(conflicts)}")
    assert ok
