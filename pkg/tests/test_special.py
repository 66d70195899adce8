from fractions import Fraction as F

import pytest

from qpde import special as sp
from qpde.errors import ThetaDenominatorVanishes
from qpde.series import QSeries, SubstitutionSpec, qs_equal

from helpers import I, row


def test_eta_expansion():
    e = sp.eta_series(1, 15)
    assert e.valuation == F(1, 24)
    got = [row(e, n + F(1, 24)).get(0, 0) for n in range(13)]
    assert got == [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]
    assert sp.eta_series(2, 10).valuation == F(1, 12)


def test_theta_leading_block_and_odd_symmetry():
    th = sp.theta_series(1, 1, 10)
    lead = th.numerator(F(1, 8)).terms()
    assert lead == {(F(1, 2),): I, (F(-1, 2),): -I}
    assert th.specialize_z(0).truncate(10).is_zero()


def test_theta_shift_by_one():
    th = sp.theta_series(1, 1, 20, slope=F(1, 2))
    assert qs_equal(th.substitute(SubstitutionSpec(turn=1)), -th, 15).equal


def test_theta_derivative_at_zero_is_eta_cubed():
    th = sp.theta_series(1, 1, 21)
    assert qs_equal(th.delta_z().specialize_z(0), sp.eta_series(1, 21) ** 3 * I, 20).equal


def test_theta01_at_zero():
    t0 = sp.theta01_series(0, 2, 0, 0, 2, 20).specialize_z(0)
    assert {e: row(t0, e)[0] for e in (0, 1, 4, 9, 16)} == {0: 1, 1: 2, 4: 2, 9: 2, 16: 2}
    assert sorted(e for e, _ in t0.items()) == [0, 1, 4, 9, 16]
    t1 = sp.theta01_series(1, 2, 0, 0, 2, 20).specialize_z(0)
    assert sorted(e for e, _ in t1.items()) == [F(1, 4), F(9, 4), F(25, 4), F(49, 4)]
    assert all(row(t1, e)[0] == 2 for e, _ in t1.items())


def test_theta0_even_in_z():
    t0 = sp.theta01_series(0, 2, 0, 0, 2, 15)
    assert qs_equal(t0.substitute(SubstitutionSpec(zpower=-1)), t0, 15).equal


def test_a_series():
    assert sp.a_series(0, 0, 0, 10).is_zero()
    assert sp.a_series(1, 0, 0, 10).is_zero()
    a = sp.a_series(0, F(1, 2), 0, 3)
    assert [row(a, e).get(0) for e in (0, F(1, 2), F(3, 2))] == [F(1, 4), F(-3, 4), F(5, 4)]


def test_mu_rejects_vanishing_theta():
    with pytest.raises(ThetaDenominatorVanishes):
        sp.GeneratorSpec(sp.Kind.Mu, alpha=0, beta=0)
    with pytest.raises(ThetaDenominatorVanishes):
        sp.GeneratorSpec(sp.Kind.Mu, alpha=1, beta=2)


def test_mu_sign_under_u_plus_one():
    mu = sp.mu_series(1, 1, F(1, 2), 0, 10)
    mu1 = sp.mu_series(1, 1, F(1, 2), 0, 10, subst=SubstitutionSpec(turn=1))
    assert qs_equal(mu1, -mu, 10).equal


def test_rank_rows():
    r = sp.rank_series("eulerian", 8)
    assert row(r, 4) == {3: 1, 1: 1, 0: 1, -1: 1, -3: 1}
    assert qs_equal(r, sp.rank_series("lerch", 8), 8).equal
    p = sp.partition_numbers(20)
    r1 = sp.rank_series("eulerian", 20).specialize_z(0)
    assert [row(r1, n).get(0, 0) for n in range(20)] == p


def test_rank_at_minus_one_is_mock_theta_f():
    r = sp.rank_series("eulerian", 25).specialize_z(F(1, 2))
    assert qs_equal(r, sp.mockf_series(25), 25).equal


def test_crank():
    c = sp.crank_series(10)
    assert row(c, 1) == {1: 1, 0: -1, -1: 1}
    p = sp.partition_numbers(10)
    assert [row(c.specialize_z(0), n).get(0, 0) for n in range(2, 10)] == p[2:]
    one_minus_z = QSeries.one() - QSeries.monomial(1, 1, 0)
    assert qs_equal(one_minus_z * sp.cstar_series(10), c, 10).equal


def test_rodd():
    r = sp.rodd_series(30)
    assert row(r, 1) == {0: 1}
    at1 = r.specialize_z(0)
    vals = [row(at1, n).get(0, 0) for n in range(30)]
    assert all(v >= 0 and F(v).denominator == 1 for v in vals)


def test_rodd_eulerian_sum_at_one():
    # independent route: R°(1; q) = sum_{n>=0} q^(2n^2+2n+1) / (q; q^2)_{n+1}^2
    N = 30
    total = [0] * N
    n = 0
    while 2 * n * n + 2 * n + 1 < N:
        term = [0] * N
        term[2 * n * n + 2 * n + 1] = 1
        for j in range(n + 1):
            d = 2 * j + 1
            for _ in range(2):
                for i in range(d, N):
                    term[i] += term[i - d]
        total = [a + b for a, b in zip(total, term)]
        n += 1
    at1 = sp.rodd_series(N).specialize_z(0)
    assert [row(at1, k).get(0, 0) for k in range(N)] == total


def test_generator_spec_build():
    s = sp.GeneratorSpec(sp.Kind.RankEulerian, order=5).build()
    assert row(s, 4) == {3: 1, 1: 1, 0: 1, -1: 1, -3: 1}
