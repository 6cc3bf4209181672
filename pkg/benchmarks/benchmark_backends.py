"""Compare the compiled kernels against the pure numpy fallback.

Run from the repository root:

    python benchmarks/benchmark_backends.py

Times the three hot kernels (truncated tensor product, signature of a
stream of increment logs, p-variation dynamic program) on both backends
and reports the speedup. Also checks that the two backends agree bit for
bit on every benchmarked input.
"""

import time

import numpy as np

from jumprough._kernels import _pykernels

try:
    from jumprough._kernels import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_tensor_mul(kernels, a, b, dim, level, n=2000):
    def run():
        for _ in range(n):
            kernels.tensor_mul(a, b, dim, level)
    return run


def bench_sig_product(kernels, logs, dim, level, n=50):
    def run():
        for _ in range(n):
            kernels.sig_product(logs, dim, level)
    return run


def bench_pvar(kernels, pts, p, n=20):
    def run():
        for _ in range(n):
            kernels.pvar_dp(pts, p)
    return run


def main():
    if _ckernels is None:
        print("compiled backend not available; nothing to compare")
        return
    rng = np.random.default_rng(0)
    dim, level = 3, 5
    size = _pykernels.tensor_size(dim, level)
    a = rng.normal(size=size)
    b = rng.normal(size=size)
    logs = rng.normal(size=(200, size)) * 0.1
    pts = rng.normal(size=(400, 3))

    cases = [
        ("tensor_mul (d=3, N=5)",
         bench_tensor_mul(_ckernels, a, b, dim, level),
         bench_tensor_mul(_pykernels, a, b, dim, level),
         lambda k: k.tensor_mul(a, b, dim, level)),
        ("sig_product (200 segments)",
         bench_sig_product(_ckernels, logs, dim, level),
         bench_sig_product(_pykernels, logs, dim, level),
         lambda k: k.sig_product(logs, dim, level)),
        ("pvar_dp (400 points, p=2.5)",
         bench_pvar(_ckernels, pts, 2.5),
         bench_pvar(_pykernels, pts, 2.5),
         lambda k: k.pvar_dp(pts, 2.5)),
    ]

    print(f"{'kernel':<30} {'c':>10} {'python':>10} {'speedup':>9}  agree")
    for name, run_c, run_py, once in cases:
        tc = timeit(run_c)
        tp = timeit(run_py)
        rc, rp = once(_ckernels), once(_pykernels)
        agree = np.array_equal(np.asarray(rc), np.asarray(rp))
        print(f"{name:<30} {tc:>9.4f}s {tp:>9.4f}s {tp / tc:>8.1f}x  "
              f"{'bitwise' if agree else 'MISMATCH'}")


if __name__ == "__main__":
    main()
