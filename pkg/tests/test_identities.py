import json
from fractions import Fraction as F

import pytest

from qpde import identities as ids
from qpde.errors import MissingParams, UnknownIdentity

FAST = ["diff1", "diff2", "pdestar", "pdestar2", "pdeoverstar", "pde3", "pdem2star", "pde4",
        "oddpde", "rstar1", "theta-lemma", "addin", "pentagonal", "rank-forms", "rank-at-1",
        "rank-at-minus1", "rodd-relation", "nde-closed-1", "nde-closed-2", "nde-closed-3"]


@pytest.mark.parametrize("name", FAST)
def test_identity_passes_at_low_order(name):
    r = ids.verify(name, 10)
    assert r.status == "pass", r.discrepancy


@pytest.mark.parametrize("params", ids.DEFAULT_PARAMS)
def test_parametrized_identities(params):
    assert ids.verify("mainequation", 4, params).passed
    assert ids.verify("wronskian", 8, params).passed


def test_negative_control_fails_at_q5():
    r = ids.verify("diff1-perturbed", 10)
    assert r.status == "fail"
    assert r.discrepancy["q"] == "5"


def test_control_hidden_from_listing():
    names = [e.name for e in ids.list_identities()]
    assert "diff1-perturbed" not in names
    assert "diff1-perturbed" in [e.name for e in ids.list_identities(include_controls=True)]
    assert "theta-lemma" in names


def test_errors():
    with pytest.raises(UnknownIdentity):
        ids.verify("nosuchidentity", 5)
    with pytest.raises(MissingParams):
        ids.verify("mainequation", 4)


def test_nonpositive_order_is_vacuous():
    assert ids.verify("diff1", 0).passed


def test_rational_orders():
    assert ids.verify("pde3", F(21, 2)).passed


def test_report_json_shape():
    doc = ids.verify("diff1", 6).to_json()
    assert json.loads(json.dumps(doc)) == doc
    assert set(doc) == {"name", "order", "status", "discrepancy", "seconds"}
    doc = ids.verify("mainequation", 3, (F(1, 2), 0)).to_json()
    assert doc["params"] == {"alpha": "1/2", "beta": "0"}


def test_verify_all_is_deterministic():
    a = ids.verify_all(order=4, workers=1)
    names = [r.label() for r in a]
    assert all(r.passed for r in a)
    assert len(names) == len(set(names))
    b = ids.verify_all(order=4, workers=2)
    assert [r.label() for r in b] == names
