"""Pure-Python integer convolution.

Short inputs use the schoolbook product; long ones go through Kronecker
substitution so the work lands in CPython's big-integer multiply.
"""

_SCHOOLBOOK_CUTOFF = 24


def convolve(a, b):
    """Return the linear convolution of two integer sequences as a list."""
    na, nb = len(a), len(b)
    if not na or not nb:
        return []
    if min(na, nb) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b)
    return _kronecker(a, b)


def _schoolbook(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, y in enumerate(b):
        if y:
            for i, x in enumerate(a):
                if x:
                    out[i + j] += x * y
    return out


def _pack(seq, nbytes):
    pos = b"".join((x if x > 0 else 0).to_bytes(nbytes, "little") for x in seq)
    neg = b"".join((-x if x < 0 else 0).to_bytes(nbytes, "little") for x in seq)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker(a, b):
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if not ma or not mb:
        return [0] * (len(a) + len(b) - 1)
    bound = ma * mb * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    bits = 8 * nbytes
    n_out = len(a) + len(b) - 1
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    half = 1 << (bits - 1)
    # bias every digit into [0, 2**bits) so the packed value unpacks bytewise
    bias = int.from_bytes(half.to_bytes(nbytes, "little") * n_out, "little")
    raw = (prod + bias).to_bytes(n_out * nbytes, "little")
    return [
        int.from_bytes(raw[i:i + nbytes], "little") - half
        for i in range(0, n_out * nbytes, nbytes)
    ]


def reduce_cyclotomic(flat, width, phi, modpoly):
    """Reduce every ``width``-long slot of ``flat`` modulo a monic polynomial.

    ``modpoly`` holds the low coefficients c_0..c_{phi-1} of
    x**phi + c_{phi-1} x**(phi-1) + ... + c_0. Returns a flattened list with
    slots of length ``phi``.
    """
    if width == phi:
        return list(flat)
    out = []
    for s in range(0, len(flat), width):
        slot = list(flat[s:s + width])
        for d in range(width - 1, phi - 1, -1):
            c = slot[d]
            if c:
                base = d - phi
                for i, m in enumerate(modpoly):
                    if m:
                        slot[base + i] -= c * m
        out.extend(slot[:phi])
    return out
