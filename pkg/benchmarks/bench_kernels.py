"""Compare the compiled and pure-Python radial-derivative kernels.

    python benchmarks/bench_kernels.py [--points N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from apeuler.kernels import available_backends
from apeuler.scale_wrap import multi_indices


def workload(backend, pts, alphas, q):
    s = np.einsum("ij,ij->i", pts, pts)
    for alpha in alphas:
        tab = backend.power_profile_table(s, q, sum(alpha))
        backend.radial_derivative(pts, alpha, tab)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("--q", type=int, default=8)
    args = ap.parse_args(argv)

    pts = np.random.default_rng(0).uniform(-1, 1, (args.points, 2))
    alphas = [a for n in range(args.order + 1) for a in multi_indices(2, n)]
    backends = available_backends()
    ref = backends["python"]
    s = np.einsum("ij,ij->i", pts, pts)
    times = {}
    for name, mod in backends.items():
        for alpha in alphas:
            tab = mod.power_profile_table(s, args.q, sum(alpha))
            got = mod.radial_derivative(pts, alpha, tab)
            want = ref.radial_derivative(pts, alpha, ref.power_profile_table(s, args.q, sum(alpha)))
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12 * np.abs(want).max())
        times[name] = min(timeit.repeat(lambda: workload(mod, pts, alphas, args.q),
                                        number=1, repeat=args.repeat))
    print(f"{args.points} points, {len(alphas)} multi-indices up to order {args.order}")
    for name, t in times.items():
        print(f"  {name:7s} {t * 1e3:9.2f} ms")
    if "cython" in times:
        print(f"  speedup {times['python'] / times['cython']:.1f}x")
    return times


if __name__ == "__main__":
    main()
