"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three kernel entry points over a (dimension, facet-count) grid and
a full inscribed-ellipsoid solve with each backend.  Run from the repo root:

    python benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from johnbox import _kernels
from johnbox._kernels import pure
from johnbox.body import make_standard
from johnbox.solver import mvie


def _instance(rng, d, n):
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    A = (Q * np.exp(rng.uniform(-0.3, 0.3, d))) @ Q.T
    a = rng.standard_normal(d) * 0.05
    V = rng.standard_normal((n, d))
    V /= np.linalg.norm(V, axis=1)[:, None]
    h = 2.0 + rng.uniform(0, 1, n)
    return A, a, V, h


def _time(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    backends = {"pure": pure}
    if "compiled" in _kernels.available_backends():
        from johnbox._kernels import _core

        backends["compiled"] = _core
    print(f"{'kernel':<24}{'d':>3}{'n':>6}", end="")
    for name in backends:
        print(f"{name:>14}", end="")
    if len(backends) == 2:
        print(f"{'speedup':>10}", end="")
    print()

    for d, n in ((3, 24), (3, 200), (6, 24), (6, 200)):
        A, a, V, h = _instance(rng, d, n)
        s, G, nrm = pure.facet_slacks(V, h, A, a)
        dim = d * (d + 1) // 2 + d
        C = rng.standard_normal((n * 4, dim))
        z = rng.standard_normal(dim) * 0.01
        slin = 1.0 + rng.uniform(0, 1, n * 4) - C @ z

        cases = {
            "facet_slacks": lambda b: b.facet_slacks(V, h, A, a),
            "barrier_system": lambda b: b.barrier_system(V, G, nrm, s, True),
            "linear_barrier_system": lambda b: b.linear_barrier_system(C, slin),
        }
        for label, call in cases.items():
            times = {
                name: _time(lambda b=mod: call(b), repeats)
                for name, mod in backends.items()
            }
            print(f"{label:<24}{d:>3}{n:>6}", end="")
            for name in backends:
                print(f"{times[name] * 1e6:>12.1f}us", end="")
            if len(backends) == 2:
                print(f"{times['pure'] / times['compiled']:>9.2f}x", end="")
            print()


def bench_solver(repeats):
    print("\nfull solve (random_symmetric body, symmetric mode):")
    previous = _kernels.active_backend()
    try:
        for d in (3, 5):
            body = make_standard("random_symmetric", d, seed=1)
            row = f"  d={d} ({body.n_facets} facets):"
            times = {}
            for name in _kernels.available_backends():
                _kernels.use(name)
                times[name] = _time(
                    lambda: mvie(body, mode="symmetric"), max(1, repeats // 20)
                )
                row += f"  {name} {times[name] * 1e3:.2f}ms"
            if len(times) == 2:
                row += f"  speedup {times['pure'] / times['compiled']:.2f}x"
            print(row)
    finally:
        _kernels.use(previous)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    print(f"available backends: {', '.join(_kernels.available_backends())}")
    bench_kernels(args.repeats)
    bench_solver(args.repeats)


if __name__ == "__main__":
    main()
