# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer convolution.

Inputs whose product bound fits in a signed 64-bit accumulator take the
C loop; anything larger is handed to the pure-Python Kronecker path.
"""
from libc.stdlib cimport malloc, free

from . import _pykernel

cdef long long _LIMIT = 1LL << 62


def convolve(a, b):
    cdef Py_ssize_t na = len(a), nb = len(b), i, j, n_out
    cdef long long *xa
    cdef long long *xb
    cdef long long *acc
    cdef long long x
    if na == 0 or nb == 0:
        return []
    ma = max(abs(v) for v in a)
    mb = max(abs(v) for v in b)
    if ma * mb * min(na, nb) >= _LIMIT:
        return _pykernel.convolve(a, b)
    n_out = na + nb - 1
    xa = <long long *> malloc(na * sizeof(long long))
    xb = <long long *> malloc(nb * sizeof(long long))
    acc = <long long *> malloc(n_out * sizeof(long long))
    if xa == NULL or xb == NULL or acc == NULL:
        free(xa); free(xb); free(acc)
        raise MemoryError()
    try:
        for i in range(na):
            xa[i] = a[i]
        for j in range(nb):
            xb[j] = b[j]
        for i in range(n_out):
            acc[i] = 0
        for i in range(na):
            x = xa[i]
            if x != 0:
                for j in range(nb):
                    acc[i + j] += x * xb[j]
        return [acc[i] for i in range(n_out)]
    finally:
        free(xa)
        free(xb)
        free(acc)


def reduce_cyclotomic(flat, Py_ssize_t width, Py_ssize_t phi, modpoly):
    cdef Py_ssize_t s, d, i, base, n = len(flat)
    cdef list out = []
    cdef list slot
    cdef list mods = list(modpoly)
    if width == phi:
        return list(flat)
    for s in range(0, n, width):
        slot = list(flat[s:s + width])
        for d in range(width - 1, phi - 1, -1):
            c = slot[d]
            if c:
                base = d - phi
                for i in range(phi):
                    m = mods[i]
                    if m:
                        slot[base + i] -= c * m
        out.extend(slot[:phi])
    return out
