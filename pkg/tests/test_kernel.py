import os
import subprocess
import sys

from hypothesis import given, strategies as st

from qpde import _pykernel, kernel

try:
    from qpde import _ckernel
except ImportError:
    _ckernel = None

ints = st.lists(st.integers(-(1 << 70), 1 << 70), max_size=40)


def naive(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@given(ints, ints)
def test_python_convolve(a, b):
    assert _pykernel.convolve(a, b) == naive(a, b)


@given(ints, ints)
def test_backends_agree(a, b):
    if _ckernel is not None:
        assert _ckernel.convolve(a, b) == _pykernel.convolve(a, b)


def test_large_convolution_agrees():
    a = list(range(-300, 300))
    b = [x * x - 7 for x in range(500)]
    assert kernel.convolve(a, b) == naive(a, b)


def test_reduce_cyclotomic_agrees():
    from qpde.algebra.cyclo import _modpoly, euler_phi
    for n in (3, 4, 5, 12):
        phi = euler_phi(n)
        width = 2 * phi - 1
        flat = list(range(-7, 3 * width - 7))
        a = _pykernel.reduce_cyclotomic(flat, width, phi, _modpoly(n))
        if _ckernel is not None:
            assert _ckernel.reduce_cyclotomic(flat, width, phi, _modpoly(n)) == a


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, QPDE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "import qpde.kernel as k; from qpde.identities import verify;"
                          "print(k.BACKEND, verify('diff1', 12).status)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "pass"]
