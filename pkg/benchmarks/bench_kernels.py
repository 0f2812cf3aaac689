"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Covers the full-space moment and psi kernels at several q, and the
class-symmetric solver loop (numba kernel vs the numpy loop).
"""

import argparse
import timeit

import numpy as np

from slsdesign import SolverConfig, enumerate_binary, solve
from slsdesign import _kernels


def best(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'q':>4}{'numpy ms':>12}{'numba ms':>12}{'speedup':>9}")
    for q in (8, 12, 16):
        X = enumerate_binary(q).as_float()
        p = rng.dirichlet(np.ones(len(X)))
        G, g = _kernels.moments_numpy(X, p)
        M = np.linalg.inv(G - 0.5 * np.outer(g, g))
        pairs = {
            "moments": (lambda: _kernels.moments_numpy(X, p), lambda: _kernels.moments_numba(X, p)),
            "quadratic_psi": (lambda: _kernels.quadratic_psi_numpy(X, g, M, 0.5),
                              lambda: _kernels.quadratic_psi_numba(X, g, M, 0.5)),
        }
        for name, (slow, fast) in pairs.items():
            a, b = best(slow, args.repeat), best(fast, args.repeat)
            print(f"{name:<28}{q:>4}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{a / b:>9.1f}")

    cfg = SolverConfig(max_iterations=50_000)
    for q, t, crit in ((6, 0.9, "A"), (8, 0.9, "A")):
        space = enumerate_binary(q)
        fast = best(lambda: solve(space, t, crit, cfg), args.repeat)
        _kernels.USE_NUMBA = False
        try:
            slow = best(lambda: solve(space, t, crit, cfg), max(1, args.repeat // 2))
        finally:
            _kernels.USE_NUMBA = True
        print(f"{'solve ' + crit + ' t=' + str(t) + ' (5e4 it)':<28}{q:>4}"
              f"{slow * 1e3:>12.1f}{fast * 1e3:>12.1f}{slow / fast:>9.1f}")


if __name__ == "__main__":
    main()
