"""Compare the numba and numpy dense rank-mod-p kernels.

    python3 benchmarks/bench_kernels.py [--sizes 100,300,600] [--p 5] [--repeat 3]

Also times a full modular homology run on a real complex with each path.
"""
import argparse
import time

import numpy as np

from matchtor import _kernels
from matchtor.builders import build_matching_complex
from matchtor.homology import modular_homology


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,300,600")
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--density", type=float, default=0.1)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    # warm the JIT so compilation is not billed to the first size
    _kernels.use_numba(True)
    _kernels.rank_mod_p_dense(np.eye(3, dtype=np.int64), args.p)

    print(f"{'size':>6} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  rank")
    for n in map(int, args.sizes.split(",")):
        a = rng.integers(-2, 3, size=(n, n)).astype(np.int64)
        a[rng.random((n, n)) > args.density] = 0
        times = {}
        ranks = set()
        for flag in (True, False):
            _kernels.use_numba(flag)
            t, r = best_of(lambda: _kernels.rank_mod_p_dense(a.copy(), args.p), args.repeat)
            times[flag] = t
            ranks.add(r)
        assert len(ranks) == 1, "kernels disagree"
        print(f"{n:>6} {times[True]:>10.4f} {times[False]:>10.4f} {times[False] / times[True]:>8.1f}  {ranks.pop()}")

    cx = build_matching_complex(10)
    for flag in (True, False):
        _kernels.use_numba(flag)
        t, res = best_of(lambda: modular_homology(cx, (3, 5)), 1)
        print(f"M_10 modular homology, {'numba' if flag else 'numpy'}: {t:.2f}s, betti {res.betti}")


if __name__ == "__main__":
    main()
