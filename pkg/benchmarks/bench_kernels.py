"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 5]

Times the two hot kernels (spinor sandwiches over the 42-matrix stack and the
epsilon contraction of the Belinfante tensor) on identical random inputs,
checks that both backends agree, and prints the best-of-N time per call.
The end_to_end row runs bilinear_jet plus the bilinear Belinfante tensor
with each backend swapped in.
"""
import argparse
import timeit

import numpy as np

from fierzstress import _backend, stress
from fierzstress.bilinear import _sandwich_stack, bilinear_jet, random_jets, random_spinors
from fierzstress.clifford import EPS_LOWER


def inputs(rng, n):
    left, right = random_spinors(rng, n), random_spinors(rng, n)
    mats = np.ascontiguousarray(_sandwich_stack())
    a = np.ascontiguousarray(random_spinors(rng, (n, 4)))
    b, c = random_spinors(rng, n), random_spinors(rng, n)
    eps = np.ascontiguousarray(EPS_LOWER, dtype=float)
    return dict(sandwich=(left, mats, right), eps_contract=(eps, a, b, c))


def bench(sizes, repeat, seed=0):
    rng = np.random.default_rng(seed)
    backends = {name: _backend.get_backend(name) for name in _backend.available_backends()}
    rows = []
    for n in sizes:
        data = inputs(rng, n)
        for kernel, args in data.items():
            ref = None
            times = {}
            for name, mod in backends.items():
                fn = getattr(mod, kernel)
                out = np.asarray(fn(*args))
                if ref is None:
                    ref = out
                elif not np.allclose(out, ref, rtol=0, atol=1e-10):
                    raise AssertionError(f"{kernel}: backends disagree at n={n}")
                number = max(1, int(2e5 // n))
                times[name] = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
            rows.append((kernel, n, times))
        rows.append(("end_to_end", n, end_to_end(rng, n, backends, repeat)))
    return rows


def end_to_end(rng, n, backends, repeat):
    """bilinear_jet followed by the bilinear Belinfante tensor, per backend."""
    jet = random_jets(rng, n)
    saved = _backend._impl
    times = {}
    try:
        for name, mod in backends.items():
            _backend._impl = mod
            fn = lambda: stress.belinfante_bilinear(bilinear_jet(jet))
            number = max(1, int(2e4 // n))
            times[name] = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
    finally:
        _backend._impl = saved
    return times


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"default backend: {_backend.BACKEND}")
    rows = bench(args.sizes, args.repeat)
    names = _backend.available_backends()
    print(f"{'kernel':<14s}{'n':>9s}" + "".join(f"{n + ' [ms]':>16s}" for n in names)
          + ("    speedup" if len(names) > 1 else ""))
    for kernel, n, times in rows:
        line = f"{kernel:<14s}{n:>9d}" + "".join(f"{1e3 * times[b]:>16.3f}" for b in names)
        if len(names) > 1:
            line += f"    {times['numpy'] / times['cython']:>6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
