import cmath
import math
from fractions import Fraction as F

import pytest

from qpde import numeric as nm
from qpde import special as sp
from qpde.errors import PoleProximity, UnknownIdentity

PT = nm.ComplexPoint(0.13 + 0.07j, 0.21 + 0.31j, 0.1 + 1.1j, 1e-12)


def test_point_validation():
    with pytest.raises(ValueError):
        nm.ComplexPoint(0, 0, -1j)
    with pytest.raises(ValueError):
        nm.ComplexPoint(0, 0, 1j, tol=0)


def test_eta_at_i():
    # eta(i) = Gamma(1/4) / (2 pi^(3/4))
    assert abs(nm.eval_eta(1j) - math.gamma(0.25) / (2 * math.pi ** 0.75)) < 1e-14


def test_theta_quasi_periodicity():
    u, tau = 0.2 + 0.1j, 0.3 + 0.9j
    th = nm.eval_theta(u, tau)
    assert abs(nm.eval_theta(u + 1, tau) + th) < 1e-13
    shifted = nm.eval_theta(u + tau, tau)
    assert abs(shifted + cmath.exp(-1j * math.pi * tau - 2j * math.pi * u) * th) < 1e-12


def test_mpmath_precision_agrees():
    u, tau = 0.2 + 0.1j, 0.3 + 0.9j
    a = nm.eval_theta(u, tau)
    b = complex(nm.eval_theta(u, tau, 1e-30, prec=120))
    assert abs(a - b) < 1e-14


def test_pole_guard():
    with pytest.raises(PoleProximity):
        nm.eval_mu(1e-14, 0.3 + 0.2j, 1j, tol=1e-12)


def test_series_and_numeric_values_agree():
    # a truncated exact expansion evaluated numerically matches the direct sum
    tau, u = 1.2j, 0.1 + 0.05j
    s = sp.theta_series(1, 1, 30)
    assert abs(nm.evaluate_series(s, u, tau) - nm.eval_theta(u, tau)) < 1e-12
    m = sp.mu_series(1, 1, F(1, 2), 0, 30)
    v = 0.5 * tau
    assert abs(nm.evaluate_series(m, u, tau) - nm.eval_mu(u, v, tau)) < 1e-9


@pytest.mark.parametrize("name", sorted(nm.CHECKS))
def test_checks_small_residual(name):
    for r in nm.numeric_check(name, 0.5, 0.25, [PT]):
        assert r.absErr < 1e-8, (r.name, r.absErr)


def test_mu_residue():
    v, tau = 0.3 + 0.4j, 1.1j
    assert abs(nm.mu_residue(v, tau) - nm.mu_residue_expected(v, tau)) < 1e-8


def test_residual_json():
    r = nm.numeric_check("theta-lemma", 0.5, 0, [PT])[0]
    doc = r.to_json()
    assert doc["name"] == "theta-lemma" and len(doc["point"]["u"]) == 2


def test_unknown_check():
    with pytest.raises(UnknownIdentity):
        nm.numeric_check("diff1", 0.5, 0, [PT])
