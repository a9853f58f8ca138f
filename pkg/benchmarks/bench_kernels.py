"""Time the compiled kernels against the NumPy fallback.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat R]``
"""

import argparse
import timeit

import numpy as np

from distopt import _fallback

try:
    from distopt import _kernels
except ImportError:  # extension not built
    _kernels = None


def quad_args(n, steps, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    H = A @ A.T / n + np.eye(n)
    return (H, rng.standard_normal(n), rng.standard_normal(n), np.zeros(n), np.full(steps, 0.01),
            rng.standard_normal((steps, n)), np.array([steps - 1], dtype=np.int64))


def sliding_args(n, T, zo, seed=0):
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((T, n)) if zo else np.empty((0, n))
    if zo:
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return rng.standard_normal(n), rng.standard_normal(n), 2.0, T, 0.1, dirs, 1e-4


CASES = [
    ("quad_sgd n=10 steps=20000", "quad_sgd", lambda: quad_args(10, 20_000)),
    ("quad_sgd n=100 steps=5000", "quad_sgd", lambda: quad_args(100, 5_000)),
    ("sliding_l1 n=10 T=20000", "sliding_l1", lambda: sliding_args(10, 20_000, False)),
    ("sliding_l1 zo n=10 T=20000", "sliding_l1", lambda: sliding_args(10, 20_000, True)),
]


def best_time(fn, make, repeat):
    def once():
        args = make()
        # quad_sgd updates x and s in place, so every call gets fresh copies
        return fn(*[a.copy() if isinstance(a, np.ndarray) else a for a in args])

    return min(timeit.repeat(once, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    print(f"{'case':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for label, name, make in CASES:
        t_py = best_time(getattr(_fallback, name), make, args.repeat)
        if _kernels is None:
            print(f"{label:32s} {t_py:11.4f} {'n/a':>11s} {'n/a':>8s}")
            continue
        t_cy = best_time(getattr(_kernels, name), make, args.repeat)
        print(f"{label:32s} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
