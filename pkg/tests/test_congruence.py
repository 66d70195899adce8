import json

import pytest

from qpde import combinatorics as cb
from qpde import congruence as cg
from qpde import special as sp
from qpde.errors import InvalidModulus, OrderExceedsTruncation


def test_partition_sequence():
    assert cg.partition_sequence(30) == sp.partition_numbers(31)
    assert cg.partition_sequence(10, 7) == [x % 7 for x in sp.partition_numbers(11)]


@pytest.mark.parametrize("k", [2, 4])
def test_odd_moment_routes_agree(k):
    fast = cg.odd_moment_sequence(k, 50)
    assert fast == [cb.moment_eta_odd(k, n) for n in range(51)]


def test_validation():
    with pytest.raises(InvalidModulus):
        cg.scan(3, 1, 2, 5, 5)
    with pytest.raises(InvalidModulus):
        cg.scan(9, 1, 2, 5, 5)
    with pytest.raises(InvalidModulus):
        cg.scan(5, 1, 3, 5, 5)
    with pytest.raises(OrderExceedsTruncation):
        cg.scan(5, 1, 2, 10, 10, values=[0] * 20)


def test_scan_partitions_finds_ramanujan():
    hits = {(c.A, c.B) for c in cg.scan(5, 1, 0, 12, 60, source="partitions")}
    assert (5, 4) in hits and (10, 9) in hits


def test_recheck_reports_witness():
    c = cg.CongruenceCandidate(5, 1, 2, 3, 1, 10)
    out = cg.recheck(c, 40)
    assert out.status == "refutedAt" and out.witness != 0
    assert json.loads(out.to_json())["refutedAt"] == out.refutedAt


def test_parallel_scan_matches_serial():
    a = cg.scan(5, 1, 2, 30, 40, workers=1)
    b = cg.scan(5, 1, 2, 30, 40, workers=2)
    assert a == b


def test_jsonl():
    out = cg.to_jsonl(cg.scan(5, 1, 2, 25, 20))
    lines = out.splitlines()
    assert lines and all(json.loads(l)["status"] == "verifiedUpTo" for l in lines)
    assert list(json.loads(lines[0])) == ["p", "j", "k", "A", "B", "nMaxTested", "status"]
