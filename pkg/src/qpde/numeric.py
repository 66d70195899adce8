"""Floating-point evaluation of theta, eta, mu, theta_0/theta_1 and a_j, and point checks.

The checks evaluate the identities in their original analytic form (with the
pi factors and tau/u derivatives), using symmetric difference stencils, so they
share no operator code with the exact engine. The heat-operator check uses
stencils on a small complex circle, whose error decays geometrically in the
number of points for analytic functions. Double precision is the default; pass
``prec`` (mantissa bits) to evaluate with mpmath instead.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import mpmath

from .errors import PoleProximity, ToleranceUnreachable

MAX_TERMS = 20000


@dataclass(frozen=True)
class ComplexPoint:
    u: complex = 0j
    v: complex = 0j
    tau: complex = 1j
    tol: float = 1e-12

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class Residual:
    name: str
    point: ComplexPoint
    lhs: complex
    rhs: complex
    absErr: float
    step: float | None = None

    def to_json(self):
        p = self.point
        return {
            "name": self.name,
            "point": {"u": _cjson(p.u), "v": _cjson(p.v), "tau": _cjson(p.tau), "tol": p.tol},
            "lhs": _cjson(self.lhs),
            "rhs": _cjson(self.rhs),
            "absErr": self.absErr,
            "step": self.step,
        }


def _cjson(x):
    x = complex(x)
    return [x.real, x.imag]


# precision handling -------------------------------------------------------------

class _Ctx:
    def __init__(self, prec=None):
        self.prec = prec
        if prec is None:
            self.exp = cmath.exp
            self.pi = math.pi
            self.num = complex
        else:
            self.exp = mpmath.exp
            self.pi = mpmath.pi
            self.num = mpmath.mpc


@contextmanager
def _precision(prec):
    if prec is None:
        yield _Ctx(None)
    else:
        with mpmath.workprec(int(prec)):
            yield _Ctx(prec)


def _out(x, ctx):
    return complex(x) if ctx.prec is None else x


def _sum_outward(term, center, tol, cap=MAX_TERMS):
    """Sum term(n) over all integers, expanding from ``center`` until the tail is below tol.

    Each direction stops at the first term below tol/4 whose successor ratio is at
    most 1/2, so the neglected tail is bounded by twice that term.
    """
    total = 0
    for direction in (1, -1):
        n = center if direction == 1 else center - 1
        prev = None
        steps = 0
        while True:
            t = term(n)
            total += t
            mag = abs(t)
            if prev is not None and mag < tol / 4 and (prev == 0 or mag <= prev / 2):
                break
            prev = mag
            n += direction
            steps += 1
            if steps > cap:
                raise ToleranceUnreachable("series did not reach the tolerance within the iteration cap")
    return total


# evaluators ----------------------------------------------------------------------

def eval_theta(u, tau, tol=1e-15, prec=None):
    """theta(u; tau) = sum_{nu in Z+1/2} exp(pi i nu^2 tau + 2 pi i nu (u + 1/2))."""
    with _precision(prec) as C:
        u, tau = C.num(u), C.num(tau)
        y = tau.imag
        center = int(round(-float(u.imag) / float(y))) if y else 0
        twopi_i = 2j * C.pi

        def term(n):
            nu = n + 0.5 if C.prec is None else mpmath.mpf(n) + mpmath.mpf(1) / 2
            return C.exp(1j * C.pi * nu * nu * tau + twopi_i * nu * (u + 0.5))

        return _out(_sum_outward(term, center, tol), C)


def eval_theta01(j, u, tau, tol=1e-15, prec=None):
    """theta_j(u; tau) = sum_{n in Z + j/2} exp(pi i n^2 tau + 2 pi i n u)."""
    with _precision(prec) as C:
        u, tau = C.num(u), C.num(tau)
        off = 0.5 * j
        center = int(round(-float(u.imag) / float(tau.imag)))

        def term(n):
            x = n + off if C.prec is None else mpmath.mpf(n) + mpmath.mpf(j) / 2
            return C.exp(1j * C.pi * x * x * tau + 2j * C.pi * x * u)

        return _out(_sum_outward(term, center, tol), C)


def eval_eta(tau, tol=1e-15, prec=None):
    """eta(tau) = q^(1/24) prod (1 - q^n), q = exp(2 pi i tau)."""
    with _precision(prec) as C:
        tau = C.num(tau)
        q = C.exp(2j * C.pi * tau)
        aq = abs(q)
        if aq >= 1:
            raise ToleranceUnreachable("tau must lie in the upper half-plane")
        prod = C.num(1)
        qn = q
        n = 1
        while True:
            prod *= 1 - qn
            # tail of the log-product is at most 2|q|^(n+1) / (1 - |q|)
            if 2 * abs(qn) * aq / (1 - aq) < tol:
                break
            qn *= q
            n += 1
            if n > MAX_TERMS:
                raise ToleranceUnreachable("eta product did not converge within the iteration cap")
        return _out(C.exp(2j * C.pi * tau / 24) * prod, C)


def eval_a(j, alpha, beta, tau, tol=1e-15, prec=None):
    """a_j^{alpha,beta}(tau) = sum (n + alpha/2) exp(2 pi i n^2 tau + 2 pi i n (alpha tau + beta))."""
    with _precision(prec) as C:
        tau = C.num(tau)
        alpha = C.num(alpha).real if C.prec else float(alpha)
        beta = C.num(beta).real if C.prec else float(beta)
        off = 0.5 * j
        center = int(round(-alpha / 2))

        def term(n):
            x = n + off if C.prec is None else mpmath.mpf(n) + mpmath.mpf(j) / 2
            return (x + alpha / 2) * C.exp(2j * C.pi * x * x * tau + 2j * C.pi * x * (alpha * tau + beta))

        return _out(_sum_outward(term, center, tol), C)


def lattice_distance(u, tau):
    """Distance from u to the nearest point of Z tau + Z."""
    u, tau = complex(u), complex(tau)
    n0 = round(u.imag / tau.imag)
    best = math.inf
    for n in (n0 - 1, n0, n0 + 1):
        w = u - n * tau
        m = round(w.real)
        for mm in (m - 1, m, m + 1):
            best = min(best, abs(w - mm))
    return best


def eval_mu(u, v, tau, tol=1e-15, prec=None, guard=None):
    """mu(u, v; tau) = exp(pi i u)/theta(v) sum (-1)^n exp(pi i (n^2+n) tau + 2 pi i n v) / (1 - exp(2 pi i n tau + 2 pi i u))."""
    guard = 10 * tol if guard is None else guard
    if lattice_distance(u, tau) < guard:
        raise PoleProximity(f"u = {u} is within {guard} of a pole")
    if lattice_distance(v, tau) < guard:
        raise PoleProximity(f"v = {v} is within {guard} of a zero of theta")
    with _precision(prec) as C:
        u, v, tau = C.num(u), C.num(v), C.num(tau)
        pi_i = 1j * C.pi

        def term(n):
            sgn = -1 if n % 2 else 1
            return sgn * C.exp(pi_i * (n * n + n) * tau + 2 * pi_i * n * v) / (1 - C.exp(2 * pi_i * (n * tau + u)))

        s = _sum_outward(term, 0, tol)
        th = eval_theta(v, tau, tol, prec)
        return _out(C.exp(pi_i * u) * s / th, C)


# finite differences ------------------------------------------------------------------

def _step(tol, prec):
    # five-point stencils: truncation O(h^4), rounding O(eps/h^2)
    eps = 2.0 ** -(52 if prec is None else int(prec))
    return max(eps ** (1 / 6), min(1e-2, tol ** (1 / 3)))


def d_tau(f, u, tau, h):
    return (-f(u, tau + 2 * h) + 8 * f(u, tau + h) - 8 * f(u, tau - h) + f(u, tau - 2 * h)) / (12 * h)


def d2_u(f, u, tau, h):
    return (-f(u + 2 * h, tau) + 16 * f(u + h, tau) - 30 * f(u, tau)
            + 16 * f(u - h, tau) - f(u - 2 * h, tau)) / (12 * h * h)


def d_u(f, u, tau, h):
    return (-f(u + 2 * h, tau) + 8 * f(u + h, tau) - 8 * f(u - h, tau) + f(u - 2 * h, tau)) / (12 * h)


def circle_derivative(g, x0, order, r, points=32):
    """order-th derivative of an analytic g at x0 from a symmetric stencil on the circle |x - x0| = r.

    This is the trapezoidal rule for Cauchy's integral formula; its truncation
    error decays like (r/R)^points, R being the distance to the nearest
    singularity, and its rounding error like eps*|g|/r^order.
    """
    total = 0j
    for k in range(points):
        w = cmath.exp(2j * math.pi * k / points)
        total += g(x0 + r * w) * w ** (-order)
    return total * math.factorial(order) / (points * r ** order)


# residue -------------------------------------------------------------------------------

def mu_residue(v, tau, u0=0.05 + 0.03j, levels=8, tol=1e-15, prec=None):
    """Extrapolate u*mu(u, v) to u = 0 along u0/2^k by Richardson's scheme."""
    rows = []
    for k in range(levels):
        u = u0 / 2 ** k
        rows.append(complex(u) * complex(eval_mu(u, v, tau, tol, prec, guard=0)))
    table = [rows]
    for m in range(1, levels):
        prev = table[-1]
        table.append([(2 ** m * prev[i + 1] - prev[i]) / (2 ** m - 1) for i in range(len(prev) - 1)])
    return table[-1][0]


def mu_residue_expected(v, tau, tol=1e-15, prec=None):
    return -1 / (2j * math.pi * complex(eval_theta(v, tau, tol, prec)))


# identity checks ------------------------------------------------------------------------

def _main_f(alpha, beta, tol, prec):
    def f(u, tau):
        v = alpha * tau + beta
        return cmath.exp(2j * math.pi * alpha * u - 1j * math.pi * alpha * alpha * tau) \
            * complex(eval_mu(u, v, tau, tol, prec, guard=0))
    return f


def _check_mainequation(pt, alpha, beta, prec):
    tol = pt.tol
    inner = min(1e-15, tol * 1e-6) if prec is None else tol * 1e-6
    u, tau = complex(pt.u), complex(pt.tau)
    v = alpha * tau + beta
    if lattice_distance(u, tau) < 10 * tol or lattice_distance(v, tau) < 10 * tol:
        raise PoleProximity("point too close to the lattice")
    f = _main_f(alpha, beta, inner, prec)
    # stencil radii stay well inside the distance to the nearest pole of f
    ru = min(0.1, 0.4 * lattice_distance(u, tau))
    rt = min(0.1, 0.25 * tau.imag, 0.4 * lattice_distance(u, tau))
    npts = 48
    th = complex(eval_theta(u, tau, inner, prec))
    dt = circle_derivative(lambda t: f(u, t), tau, 1, rt, npts)
    duu = circle_derivative(lambda x: f(x, tau), u, 2, ru, npts)
    h = min(ru, rt)
    lhs = th ** 3 * (4j * math.pi * dt + duu)
    eta = complex(eval_eta(tau, inner, prec))
    thv = complex(eval_theta(v, tau, inner, prec))
    a0 = complex(eval_a(0, alpha, beta, tau, inner, prec))
    a1 = complex(eval_a(1, alpha, beta, tau, inner, prec))
    t0 = complex(eval_theta01(0, 2 * u + v, 2 * tau, inner, prec))
    t1 = complex(eval_theta01(1, 2 * u + v, 2 * tau, inner, prec))
    pref = cmath.exp(2j * math.pi * alpha * u - 1j * math.pi * alpha * alpha * tau)
    rhs = pref * 16 * math.pi ** 2 * eta ** 6 / thv ** 2 * (a1 * t0 - a0 * t1)
    return [Residual("mainequation", pt, lhs, rhs, abs(lhs - rhs), h)]


def _check_theta_lemma(pt, alpha, beta, prec):
    tol = pt.tol
    v1, v2, tau = complex(pt.u), complex(pt.v), complex(pt.tau)
    lhs = (complex(eval_theta01(0, v1 + v2, 2 * tau, tol, prec)) * complex(eval_theta01(1, v1 - v2, 2 * tau, tol, prec))
           - complex(eval_theta01(1, v1 + v2, 2 * tau, tol, prec)) * complex(eval_theta01(0, v1 - v2, 2 * tau, tol, prec)))
    rhs = complex(eval_theta(v1, tau, tol, prec)) * complex(eval_theta(v2, tau, tol, prec))
    return [Residual("theta-lemma", pt, lhs, rhs, abs(lhs - rhs))]


def _check_wronskian(pt, alpha, beta, prec):
    tol = pt.tol
    tau = complex(pt.tau)
    v = alpha * tau + beta
    lhs = (complex(eval_a(0, alpha, beta, tau, tol, prec)) * complex(eval_theta01(1, v, 2 * tau, tol, prec))
           - complex(eval_a(1, alpha, beta, tau, tol, prec)) * complex(eval_theta01(0, v, 2 * tau, tol, prec)))
    rhs = 0.5j * complex(eval_eta(tau, tol, prec)) ** 3 * complex(eval_theta(v, tau, tol, prec))
    return [Residual("wronskian", pt, lhs, rhs, abs(lhs - rhs))]


def _check_prop21(pt, alpha, beta, prec):
    tol = pt.tol
    u, tau = complex(pt.u), complex(pt.tau)
    th = lambda x: complex(eval_theta(x, tau, tol, prec))
    out = [
        Residual("prop21(1)", pt, th(u + 1), -th(u), abs(th(u + 1) + th(u))),
        Residual("prop21(2)", pt, th(u + tau), -cmath.exp(-1j * math.pi * tau - 2j * math.pi * u) * th(u), 0.0),
        Residual("prop21(3)", pt, th(-u), -th(u), abs(th(-u) + th(u))),
    ]
    out[1].absErr = abs(out[1].lhs - out[1].rhs)
    h = _step(tol, prec)
    deriv = d_u(lambda x, t: th(x), 0j, tau, h)
    rhs4 = -2 * math.pi * complex(eval_eta(tau, tol, prec)) ** 3
    out.append(Residual("prop21(4)", pt, deriv, rhs4, abs(deriv - rhs4), h))
    return out


def _check_prop22(pt, alpha, beta, prec):
    tol = pt.tol
    u, v, tau = complex(pt.u), complex(pt.v), complex(pt.tau)
    mu = lambda x: complex(eval_mu(x, v, tau, tol, prec))
    r1 = Residual("prop22(1)", pt, mu(u + 1), -mu(u), abs(mu(u + 1) + mu(u)))
    lhs = mu(u) + cmath.exp(-2j * math.pi * (u - v) - 1j * math.pi * tau) * mu(u + tau)
    rhs = -1j * cmath.exp(-1j * math.pi * (u - v) - 1j * math.pi * tau / 4)
    r2 = Residual("prop22(2)", pt, lhs, rhs, abs(lhs - rhs))
    res = mu_residue(v, tau, tol=tol, prec=prec)
    exp = mu_residue_expected(v, tau, tol, prec)
    r3 = Residual("prop22(3)", pt, res, exp, abs(res - exp))
    return [r1, r2, r3]


CHECKS = {
    "mainequation": _check_mainequation,
    "theta-lemma": _check_theta_lemma,
    "wronskian": _check_wronskian,
    "prop21": _check_prop21,
    "prop22": _check_prop22,
}


def _run(args):
    name, alpha, beta, pt, prec = args
    return CHECKS[name](pt, alpha, beta, prec)


def numeric_check(name, alpha=0.5, beta=0.0, points=(), prec=None, workers=None) -> list:
    """Residuals of an identity at the given points (parallel over points when workers > 1)."""
    if name not in CHECKS:
        from .errors import UnknownIdentity
        raise UnknownIdentity(name)
    alpha, beta = float(alpha), float(beta)
    jobs = [(name, alpha, beta, p, prec) for p in points]
    if workers is None:
        workers = int(os.environ.get("QPDE_THREADS", "1") or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run, jobs))
    else:
        parts = [_run(j) for j in jobs]
    return [r for part in parts for r in part]


def evaluate_series(s, u, tau):
    """Numerical value of a truncated exact series at (u, tau); the tail is simply dropped."""
    z_turn = complex(u)
    total = 0j
    for e, c in s.items():
        qe = cmath.exp(2j * math.pi * tau * float(e))
        num = _poly_value(c.num if hasattr(c, "num") else c, z_turn)
        den = _poly_value(c.den, z_turn) if hasattr(c, "den") else 1
        total += qe * num / den
    return total


def _poly_value(p, u):
    val = 0j
    for (e,), c in p.terms().items():
        val += complex(c) * cmath.exp(2j * math.pi * u * float(e))
    return val
