"""Compare the compiled and pure-Python kernels.

Usage: python3 benchmarks/bench_kernel.py [--repeat N]

Times the raw convolution kernel on random integer vectors and an end-to-end
series workload (a diff1 verification) under each backend. The end-to-end
run uses a subprocess per backend because the kernel is chosen at import.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from qpde import _pykernel, kernel

try:
    from qpde import _ckernel
except ImportError:
    _ckernel = None

WORKLOAD = "from qpde.identities import verify; r = verify('diff1', 40); assert r.passed"


def _vectors(n, bits, seed=1):
    rng = random.Random(seed)
    lim = 1 << bits
    return [rng.randrange(-lim, lim) for _ in range(n)], [rng.randrange(-lim, lim) for _ in range(n)]


def bench_convolve(repeat):
    print(f"{'size':>6} {'bits':>5} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n, bits in [(16, 20), (64, 20), (256, 40), (1024, 40), (2048, 200)]:
        a, b = _vectors(n, bits)
        ref = _pykernel.convolve(a, b)
        t_py = min(timeit.repeat(lambda: _pykernel.convolve(a, b), number=5, repeat=repeat)) / 5
        if _ckernel is None:
            print(f"{n:6d} {bits:5d} {t_py * 1e3:10.3f} {'n/a':>10} {'':>8}")
            continue
        assert _ckernel.convolve(a, b) == ref
        t_c = min(timeit.repeat(lambda: _ckernel.convolve(a, b), number=5, repeat=repeat)) / 5
        print(f"{n:6d} {bits:5d} {t_py * 1e3:10.3f} {t_c * 1e3:10.3f} {t_py / t_c:8.2f}x")


def bench_end_to_end(repeat):
    results = {}
    for label, pure in (("python", "1"), ("cython", "0")):
        env = dict(os.environ, QPDE_PURE_PYTHON=pure)
        code = (f"import timeit; t = min(timeit.repeat({WORKLOAD!r}, number=1, repeat={repeat})); "
                "import qpde.kernel as k; print(k.BACKEND, t)")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        results[label] = (backend, float(seconds))
    for label, (backend, seconds) in results.items():
        print(f"verify diff1 to q^40 with {label:6s} (loaded: {backend}): {seconds:.3f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"default backend: {kernel.BACKEND}")
    bench_convolve(args.repeat)
    bench_end_to_end(args.repeat)


if __name__ == "__main__":
    main()
