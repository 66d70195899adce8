import pytest
from hypothesis import given, strategies as st

from qpde import combinatorics as cb
from qpde import special as sp
from qpde.errors import LimitExceeded

from helpers import row


def test_enumeration():
    parts = cb.enumerate_partitions(4)
    assert [p.parts for p in parts] == [(1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1), (4,)]
    assert sorted(p.rank for p in parts) == [-3, -1, 0, 1, 3]
    assert cb.enumerate_partitions(0)[0].rank == 0
    with pytest.raises(LimitExceeded):
        cb.enumerate_partitions(61)
    assert cb.count_partitions(30) == 5604


def test_rank_counts_match_series():
    r = sp.rank_series("eulerian", 16)
    for n in range(16):
        table = cb.rank_counts(n)
        assert {m: c for m, c in table.counts.items()} == row(r, n)


def test_rank_symmetry_and_total():
    for n in range(1, 15):
        t = cb.rank_counts(n)
        assert all(t[m] == t[-m] for m in t.counts)
        assert t.total() == sp.partition_numbers(n + 1)[n]


@pytest.mark.parametrize("k", [2, 4])
def test_moment_routes_agree(k):
    for n in range(15):
        assert cb.moment_eta(k, n, "rankSeries") == cb.moment_eta(k, n, "oracle")


@given(st.integers(0, 30), st.sampled_from([1, 3, 5, 7]))
def test_odd_moments_vanish(n, k):
    assert cb.moment_eta(k, n) == 0
    assert cb.moment_eta_odd(k, n) == 0


def test_gbinom_negative_top():
    assert cb.gbinom(-1, 2) == 1
    assert cb.gbinom(-2, 3) == -4
    assert cb.gbinom(5, 2) == 10


def test_moment_table_csv():
    t = cb.moment_table(2, 4)
    assert t.to_csv().splitlines() == ["n,value", "0,0", "1,0", "2,1", "3,4", "4,10"]
