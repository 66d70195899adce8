"""Registry of the heat-equation identities in normalized (z, q) form, plus the verifier.

Every operator ``c*pi*i*d/dtau + d^2/du^2`` acting on a (z, q)-series equals
``-4*pi^2 * H_{c/2}`` with ``H_s = s*delta_q + delta_z**2``; the constant is
divided out of both sides, which leaves every identity over Q(zeta_N).
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra.cyclo import Cyclo
from .algebra.laurent import LaurentPoly
from .errors import MissingParams, OrderExceedsTruncation, UnknownIdentity
from .series import INF, QSeries, SubstitutionSpec, qs_equal, _fmt_rat
from . import special as sp

F = Fraction
I = Cyclo.zeta(4)
HALF = F(1, 2)

DEFAULT_PARAMS = [(F(1, 2), F(0)), (F(0), F(1, 2)), (F(1, 3), F(0)), (F(1, 2), F(1, 2))]


@dataclass(frozen=True)
class IdentityEntry:
    name: str
    builder: Callable
    default_order: Fraction
    needs_params: bool = False
    reference: str = ""
    normalization: str = ""
    control: bool = False


@dataclass
class IdentityReport:
    name: str
    order: Fraction
    status: str
    discrepancy: dict | None = None
    seconds: float = 0.0
    params: tuple | None = None
    part: str | None = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        out = {
            "name": self.name,
            "order": _fmt_rat(self.order),
            "status": self.status,
            "discrepancy": self.discrepancy,
            "seconds": round(self.seconds, 6),
        }
        if self.params is not None:
            out["params"] = {"alpha": _fmt_rat(self.params[0]), "beta": _fmt_rat(self.params[1])}
        return out

    def label(self):
        if self.params is None:
            return self.name
        return f"{self.name}(alpha={_fmt_rat(self.params[0])}, beta={_fmt_rat(self.params[1])})"


# small building blocks --------------------------------------------------------

def _mono(c=1, zexp=0, qexp=0):
    return QSeries.monomial(c, F(zexp), F(qexp))


def _zpoly(terms):
    """Exact q-constant series from ``{z-exponent: coefficient}``."""
    return QSeries({0: LaurentPoly({F(k): v for k, v in terms.items()})})


def _poch_z(coeff, zexp, qstart, step, order):
    """prod_{j>=0} (1 - coeff z^zexp q^(qstart + j*step)) truncated at ``order``."""
    s = QSeries.one().truncate(order)
    e = F(qstart)
    if e == 0:
        s = s * _zpoly({0: 1, zexp: -coeff})
        e += step
    while e < order:
        s = s.mul_one_minus(coeff, zexp, e)
        e += step
    return s


def _rescale(s, k):
    return s.substitute(SubstitutionSpec(qscale=k))


def _star_operator(Y):
    """2(1+z) delta_q + z/2 + z delta_z + (1/2)(1+z) delta_z^2 (the overpartition operator)."""
    one_z = _zpoly({0: 1, 1: 1})
    z = _mono(1, 1)
    dz = Y.delta_z()
    return (one_z * Y.delta_q().scale(2) + z * Y.scale(HALF) + z * dz
            + one_z * dz.delta_z().scale(HALF))


def _overstar_operator(Y):
    """(1+z) delta_q + z + 2z delta_z + (1+z) delta_z^2."""
    one_z = _zpoly({0: 1, 1: 1})
    z = _mono(1, 1)
    dz = Y.delta_z()
    return one_z * Y.delta_q() + z * Y + z * dz.scale(2) + one_z * dz.delta_z()


def _m2star_operator(Y):
    """2 delta_q + delta_z + delta_z^2."""
    dz = Y.delta_z()
    return Y.delta_q().scale(2) + dz + dz.delta_z()


# identity builders: each returns a list of (label, lhs, rhs) ------------------

def _diff1(O, params=None, perturb=False):
    R = sp.rstar_series(O)
    C = sp.cstar_series(O)
    P = sp.qpoch_inf(1, 1, O)
    lhs = _mono(1, 1) * P * P * C ** 3
    rhs = R.delta_q().scale(3) + R.delta_z().scale(HALF) + R.delta_z().delta_z().scale(HALF)
    if perturb:
        rhs = rhs + _mono(1, 0, 5)
    return [("", lhs, rhs)]


def _diff2(O, params=None):
    R = sp.rstar_series(O + 1)
    X = _mono(1, HALF, F(-1, 24)) * R
    th = sp.theta_series(1, 1, O)
    lhs = th ** 3 * X.heat(6)
    rhs = sp.eta_series(1, O) ** 8 * (2 * I)
    return [("", lhs, rhs)]


def _mainequation(O, params):
    alpha, beta = params
    th = sp.theta_series(1, 1, O)
    pref = _mono(1, alpha, -alpha * alpha / 2)
    mu = sp.mu_series(1, 1, alpha, beta, O + alpha * alpha / 2 + 1)
    lhs = th ** 3 * (pref * mu).heat(2)
    thv = sp.theta_series(0, 1, O + 2, alpha, beta)
    eta = sp.eta_series(1, O + 1)
    a0 = sp.a_series(0, alpha, beta, O + 2)
    a1 = sp.a_series(1, alpha, beta, O + 2)
    t0 = sp.theta01_series(0, 2, alpha, beta, 2, O + 2)
    t1 = sp.theta01_series(1, 2, alpha, beta, 2, O + 2)
    rhs = pref * eta ** 6 * (thv * thv).inverse() * (a1 * t0 - a0 * t1) * (-4)
    return [("", lhs, rhs)]


def _pdestar(O, params=None):
    P = sp.qpoch_inf(1, 1, O)
    mq = sp.qpoch_inf(1, 1, O, coeff=-1)
    C = sp.cstar_series(O)
    lhs = _mono(1, 1) * P * P * mq.inverse() * C ** 3 * _poch_z(-1, 1, 0, 1, O) * _poch_z(-1, -1, 1, 1, O)
    rhs = _star_operator(sp.nde_series("overpartition", O))
    return [("", lhs, rhs)]


def _pdestar2(O, params=None):
    th = sp.theta_series(1, 1, O)
    e1, e2 = sp.eta_series(1, O + 1), sp.eta_series(2, O + 1)
    X = e2 ** 4 * (e1 * e1 * sp.theta_series(2, 2, O + 2)).inverse() \
        + _mono(1, 1, F(-1, 4)) * sp.mu_series(2, 2, 1, 0, O + 1)
    lhs = th ** 3 * X.heat(4)
    rhs = e1 ** 8 * e2.inverse() * sp.theta_series(1, 1, O + 1, 0, HALF)
    return [("", lhs, rhs)]


def _pdeoverstar(O, params=None):
    Q2 = sp.qpoch_inf(2, 2, O)
    C2 = _rescale(sp.cstar_series(O / 2 + 1), 2)
    lhs = _mono(2, 1) * Q2 * Q2 * C2 ** 3 * _poch_z(-1, 1, 0, 1, O) * _poch_z(-1, -1, 1, 1, O)
    rhs = _overstar_operator(sp.nde_series("m2over", O))
    return [("", lhs, rhs)]


def _pde3(O, params=None):
    th2 = sp.theta_series(1, 2, O)
    X = _mono(1, HALF, F(-1, 4)) * sp.mu_series(1, 2, 1, 0, O + 1)
    lhs = th2 ** 3 * X.heat(1)
    rhs = sp.eta_series(2, O + 1) ** 8 * sp.eta_series(1, O + 1).inverse() \
        * sp.theta_series(1, 1, O + 1, 0, HALF)
    return [("", lhs, rhs)]


def _pdem2star(O, params=None):
    Q2 = sp.qpoch_inf(2, 2, O)
    mq2 = sp.qpoch_inf(1, 2, O, coeff=-1)
    C2 = _rescale(sp.cstar_series(O / 2 + 1), 2)
    lhs = _mono(2, 1) * Q2 * Q2 * mq2.inverse() * C2 ** 3 \
        * _poch_z(-1, 1, 1, 2, O) * _poch_z(-1, -1, 1, 2, O)
    rhs = _m2star_operator(sp.nde_series("m2norepeatodd", O))
    return [("", lhs, rhs)]


def _pde4(O, params=None):
    th2 = sp.theta_series(1, 2, O)
    X = _mono(1, HALF, F(-1, 8)) * sp.mu_series(2, 4, 1, 0, O + 1) \
        + _mono(1, F(3, 2), F(-9, 8)) * sp.mu_series(2, 4, 3, 0, O + 2)
    lhs = th2 ** 3 * X.heat(2)
    rhs = sp.eta_series(1, O + 1) * sp.eta_series(2, O + 1) ** 5 * sp.eta_series(4, O + 1) \
        * _mono(2, HALF, F(1, 4)) * sp.theta_series(1, 2, O + 1, 1, HALF)
    return [("", lhs, rhs)]


def _oddpde(O, params=None):
    th = sp.theta_series(1, 2, O + 1, 1, 0)
    X = _mono(1, 0, F(-1, 3)) * sp.rodd_series(O + 1)
    lhs = th ** 3 * X.heat(3)
    rhs = sp.eta_series(2, O + 1) ** 8 * _mono(2 * I, F(-3, 2), F(-3, 4))
    return [("", lhs, rhs)]


def _rstar1(O, params=None):
    R = sp.rstar_series(O)
    m1 = sp.mu_series(3, 3, -1, 0, O + 1)
    m2 = sp.mu_series(3, 3, 1, 0, O + 1)
    th = sp.theta_series(3, 3, O + 2)
    e3, e1 = sp.eta_series(3, O + 2), sp.eta_series(1, O + 2)
    rhs = _mono(I, F(-3, 2), F(-1, 8)) * m1 - _mono(I, HALF, F(-1, 8)) * m2 \
        - _mono(I, F(-1, 2), F(1, 24)) * e3 ** 3 * (e1 * th).inverse()
    return [("", R, rhs)]


def theta_two_var(kind, O):
    """Two-variable theta products for the duplication lemma.

    ``kind``: "t0+" = theta_0(v1+v2; 2tau), "t1-" = theta_1(v1-v2; 2tau),
    "t1+", "t0-" analogously, "t1" / "t2" = theta(v_i; tau).
    """
    vars = ("z1", "z2")
    buckets = {}
    if kind in ("t1", "t2"):
        for n in sp._n_range(lambda n: (n + HALF) ** 2 / 2, O):
            nu = n + HALF
            e = nu * nu / 2
            exps = (nu, F(0)) if kind == "t1" else (F(0), nu)
            buckets.setdefault(e, {})[exps] = Cyclo.from_turn(nu / 2)
    else:
        off = F(0) if kind[1] == "0" else HALF
        sgn = 1 if kind[2] == "+" else -1
        for n in sp._n_range(lambda n: (n + off) ** 2, O):
            x = n + off
            buckets.setdefault(x * x, {})[(x, sgn * x)] = Cyclo.rational(1)
    terms = {e: LaurentPoly(d, vars=vars) for e, d in buckets.items()}
    return QSeries(terms, order=O, vars=vars)


def _theta_lemma(O, params=None):
    t = lambda k: theta_two_var(k, O + 1)
    lhs = t("t0+") * t("t1-") - t("t1+") * t("t0-")
    rhs = t("t1") * t("t2")
    return [("", lhs, rhs)]


def _wronskian(O, params):
    alpha, beta = params
    a0 = sp.a_series(0, alpha, beta, O + 2)
    a1 = sp.a_series(1, alpha, beta, O + 2)
    t0 = sp.theta01_series(0, 0, alpha, beta, 2, O + 2)
    t1 = sp.theta01_series(1, 0, alpha, beta, 2, O + 2)
    lhs = a0 * t1 - a1 * t0
    rhs = sp.eta_series(1, O + 2) ** 3 * sp.theta_series(0, 1, O + 2, alpha, beta) * (I / 2)
    return [("", lhs, rhs)]


def _addin(O, params=None):
    Y = _zpoly({0: 1, 1: 1}).inverse()
    return [("", _star_operator(Y), QSeries.zero())]


def _prop21(O, params=None):
    pad = 2 * O + 8
    th = sp.theta_series(1, 1, pad, slope=F(1, 2))
    out = [("(1) u -> u+1", th.substitute(SubstitutionSpec(turn=1)), -th)]
    shifted = th.substitute(SubstitutionSpec(qshift=1))
    out.append(("(2) u -> u+tau", shifted, -(_mono(1, -1, -HALF) * th)))
    out.append(("(3) u -> -u", th.substitute(SubstitutionSpec(zpower=-1)), -th))
    # (4): delta_z theta at z = 1 equals i eta^3, i.e. sum (-1)^n (n+1/2) q^((2n+1)^2/8) = eta^3
    th1 = sp.theta_series(1, 1, O + 1)
    out.append(("(4) theta'(0)", th1.delta_z().specialize_z(0), sp.eta_series(1, O + 1) ** 3 * I))
    return out


def _prop22(O, params=None):
    out = []
    for alpha, beta in DEFAULT_PARAMS:
        tag = f"alpha={_fmt_rat(alpha)}, beta={_fmt_rat(beta)}"
        mu = sp.mu_series(1, 1, alpha, beta, O + 1)
        mu1 = sp.mu_series(1, 1, alpha, beta, O + 1, subst=SubstitutionSpec(turn=1))
        out.append((f"(1) {tag}", mu1, -mu))
        mut = sp.mu_series(1, 1, alpha, beta, O + 2, subst=SubstitutionSpec(qshift=1))
        lhs = mu + _mono(Cyclo.from_turn(beta), -1, alpha - HALF) * mut
        rhs = _mono(I * Cyclo.from_turn(beta / 2) * -1, -HALF, alpha / 2 - F(1, 8))
        out.append((f"(2) {tag}", lhs, rhs))
    return out


def _pentagonal(O, params=None):
    return [("", sp.qpoch_inf(1, 1, O), sp.pentagonal_series(O))]


def _rank_forms(O, params=None):
    return [("", sp.rank_series("eulerian", O), sp.rank_series("lerch", O))]


def _rank_at_1(O, params=None):
    return [("", sp.rank_series("eulerian", O).specialize_z(0), sp.qpoch_inf(1, 1, O, sign=-1))]


def _rank_at_minus1(O, params=None):
    return [("", sp.rank_series("eulerian", O).specialize_z(HALF), sp.mockf_series(O))]


def _rodd_relation(O, params=None):
    # R*(zq; q^2) is a genuine substitution of the truncated R* series
    R = sp.rstar_series(O + 2)
    Rs = R.substitute(SubstitutionSpec(qshift=1, qscale=2))
    rhs = _mono(1, -1) * (Rs - QSeries.one())
    return [("", sp.rodd_series(O), rhs)]


def _nde_closed_1(O, params=None):
    """N*(1,0,z;q) through S_1 and through theta/mu."""
    N = sp.nde_series("overpartition", O)
    inv1z = _zpoly({0: 1, 1: 1}).inverse()
    ratio = sp.qpoch_inf(1, 1, O + 1, coeff=-1) * sp.qpoch_inf(1, 1, O + 1, sign=-1)
    via_s1 = inv1z * (ratio * _mono(2, 1) * sp.s_series(1, O + 1) + QSeries.one())
    e1, e2 = sp.eta_series(1, O + 2), sp.eta_series(2, O + 2)
    via_mu = inv1z * (e2 ** 4 * (e1 * e1 * sp.theta_series(2, 2, O + 2)).inverse() * (-2 * I)
                      + _mono(-2 * I, 1, F(-1, 4)) * sp.mu_series(2, 2, 1, 0, O + 1) + QSeries.one())
    return [("S1 form", N, via_s1), ("mu form", N, via_mu)]


def _nde_closed_2(O, params=None):
    """N*(1,1/q,z;q^2) through S_2 and through mu."""
    N = sp.nde_series("m2over", O)
    inv1z = _zpoly({0: 1, 1: 1}).inverse()
    ratio = sp.qpoch_inf(1, 1, O + 1, coeff=-1) * sp.qpoch_inf(1, 1, O + 1, sign=-1)
    via_s2 = inv1z * (ratio * _mono(2, 1) * sp.s_series(2, O + 1) + QSeries.one())
    via_mu = inv1z * (_mono(-2 * I, HALF, F(-1, 4)) * sp.mu_series(1, 2, 1, 0, O + 1) + QSeries.one())
    return [("S2 form", N, via_s2), ("mu form", N, via_mu)]


def _nde_closed_3(O, params=None):
    """N*(0,1/q,z;q^2) through S_3 and through mu."""
    N = sp.nde_series("m2norepeatodd", O)
    ratio = sp.qpoch_inf(1, 2, O + 1, coeff=-1) * sp.qpoch_inf(2, 2, O + 1, sign=-1)
    via_s3 = ratio * _mono(1, 1) * sp.s_series(3, O + 1) + QSeries.one()
    via_mu = _mono(-I) * sp.mu_series(2, 4, 1, 0, O + 1) \
        + _mono(-I, 1, -1) * sp.mu_series(2, 4, 3, 0, O + 2) + QSeries.one()
    return [("S3 form", N, via_s3), ("mu form", N, via_mu)]


_ENTRIES = [
    IdentityEntry("diff1", _diff1, F(20), reference="rank/crank heat equation",
                  normalization="z(q)^2 C*^3 = (3 dq + dz/2 + dz^2/2) R*"),
    IdentityEntry("diff2", _diff2, F(20), reference="heat equation for R* with eta^8 right side",
                  normalization="theta^3 H_6(z^(1/2) q^(-1/24) R*) = 2i eta^8"),
    IdentityEntry("mainequation", _mainequation, F(8), needs_params=True, reference="heat equation for the Appell-Lerch sum mu",
                  normalization="theta^3 H_2(z^a q^(-a^2/2) mu) = -4 z^a q^(-a^2/2) eta^6/theta(v)^2 (a1 t0 - a0 t1)"),
    IdentityEntry("pdestar", _pdestar, F(20), reference="overpartition rank heat equation"),
    IdentityEntry("pdestar2", _pdestar2, F(20), reference="overpartition equation, theta form",
                  normalization="theta^3 H_4(...) = eta^8/eta(2tau) theta(u+1/2)"),
    IdentityEntry("pdeoverstar", _pdeoverstar, F(20), reference="M2-rank overpartition heat equation"),
    IdentityEntry("pde3", _pde3, F(20), reference="mu(u, tau; 2tau) heat equation",
                  normalization="theta(u;2tau)^3 H_1(q^(-1/4) z^(1/2) mu(u,tau;2tau)) = eta(2tau)^8/eta theta(u+1/2)"),
    IdentityEntry("pdem2star", _pdem2star, F(20), reference="M2-rank, no repeated odd parts"),
    IdentityEntry("pde4", _pde4, F(20), reference="mu heat equation with theta(u+1/2+tau; 2tau)",
                  normalization="theta(u;2tau)^3 H_2(...) = 2 eta eta(2tau)^5 eta(4tau) z^(1/2) q^(1/4) theta(u+1/2+tau;2tau)"),
    IdentityEntry("oddpde", _oddpde, F(20), reference="odd-Durfee rank heat equation",
                  normalization="theta(u+tau;2tau)^3 H_3(q^(-1/3) R°) = 2i eta(2tau)^8 q^(-3/4) z^(-3/2)"),
    IdentityEntry("rstar1", _rstar1, F(20), reference="R* as a mu-quotient"),
    IdentityEntry("theta-lemma", _theta_lemma, F(15), reference="theta product in two elliptic variables"),
    IdentityEntry("wronskian", _wronskian, F(15), needs_params=True, reference="a_j / theta_j Wronskian"),
    IdentityEntry("addin", _addin, F(20), reference="theta addition step"),
    IdentityEntry("prop21", _prop21, F(30), reference="theta transformation laws"),
    IdentityEntry("prop22", _prop22, F(30), reference="mu transformation laws"),
    IdentityEntry("pentagonal", _pentagonal, F(100), reference="pentagonal number theorem"),
    IdentityEntry("rank-forms", _rank_forms, F(40), reference="Eulerian and Lerch forms of R agree"),
    IdentityEntry("rank-at-1", _rank_at_1, F(40), reference="R(1;q) = 1/(q)_inf"),
    IdentityEntry("rank-at-minus1", _rank_at_minus1, F(40), reference="R(-1;q) = f(q)"),
    IdentityEntry("rodd-relation", _rodd_relation, F(40), reference="R° = z^-1 (R*(zq;q^2) - 1)"),
    IdentityEntry("nde-closed-1", _nde_closed_1, F(20), reference="N*(1,0,z;q) closed form"),
    IdentityEntry("nde-closed-2", _nde_closed_2, F(15), reference="N*(1,1/q,z;q^2) closed form"),
    IdentityEntry("nde-closed-3", _nde_closed_3, F(15), reference="N*(0,1/q,z;q^2) closed form"),
    IdentityEntry("diff1-perturbed", lambda O, p=None: _diff1(O, perturb=True), F(20),
                  reference="negative control: diff1 with q^5 added", control=True),
]

REGISTRY = {e.name: e for e in _ENTRIES}


def list_identities(include_controls=False):
    return [e for e in _ENTRIES if include_controls or not e.control]


def get_entry(name) -> IdentityEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownIdentity(name) from None


def build_sides(name, order, params=None):
    """Build the comparison parts of an identity, padding inputs until every side reaches ``order``."""
    entry = get_entry(name)
    order = F(order)
    if entry.needs_params:
        if params is None:
            raise MissingParams(f"{name} needs (alpha, beta)")
        params = (F(params[0]), F(params[1]))
    pad = F(0)
    for _ in range(8):
        parts = entry.builder(order + pad, params)
        short = [min(l.order, r.order) for _, l, r in parts if min(l.order, r.order) < order]
        if not short:
            return parts
        pad += max(F(1), order - min(short))
    raise OrderExceedsTruncation(f"{name}: could not reach order {order}")


def verify(name, order=None, params=None) -> IdentityReport:
    entry = get_entry(name)
    order = entry.default_order if order is None else F(order)
    if entry.needs_params and params is None:
        raise MissingParams(f"{name} needs parameters alpha, beta")
    if params is not None:
        params = (F(params[0]), F(params[1]))
    start = time.perf_counter()
    if order <= 0:
        return IdentityReport(name, order, "pass", None, time.perf_counter() - start,
                              params if entry.needs_params else None)
    parts = build_sides(name, order, params)
    for label, lhs, rhs in parts:
        cmp = qs_equal(lhs, rhs, order)
        if not cmp.equal:
            disc = {"q": _fmt_rat(cmp.exponent), "lhs": str(cmp.lhs), "rhs": str(cmp.rhs)}
            if label:
                disc["part"] = label
            return IdentityReport(name, order, "fail", disc, time.perf_counter() - start,
                                  params if entry.needs_params else None, label or None)
    return IdentityReport(name, order, "pass", None, time.perf_counter() - start,
                          params if entry.needs_params else None)


def _run_job(job):
    name, order, params = job
    return verify(name, order, params)


def worker_count():
    try:
        n = int(os.environ.get("QPDE_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def verify_all(order=None, workers=None) -> list:
    """Verify every registry entry; the parametrized ones over the default (alpha, beta) set.

    ``order=None`` uses each entry's default order. Report order is deterministic.
    """
    jobs = []
    for e in list_identities():
        o = e.default_order if order is None else F(order)
        if e.needs_params:
            jobs.extend((e.name, o, p) for p in DEFAULT_PARAMS)
        else:
            jobs.append((e.name, o, None))
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_job, jobs))


def reports_to_json(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)
