"""Compare the numba and numpy backends on the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once per backend to warm up (numba compiles or loads its
cache), then ``--repeat`` timed runs; the best time is reported. Results of
both backends are checked for equality before timing.
"""
import argparse
import os
import time

import numpy as np

from synchrolab import constructions as K
from synchrolab import kernels


def _cases():
    rng = np.random.default_rng(0)
    p12 = K.p_n(12)
    c9 = K.cerny(9)
    reps5 = kernels.conjugacy_representatives(kernels.all_maps(5, partial=False), 5)
    dfa5 = kernels.all_maps(5, partial=False)
    base = rng.integers(0, 6, size=(2, 6))
    cand = rng.integers(0, 6, size=(400, 6))
    small = rng.integers(-1, 7, size=(400, 2, 7))
    pfa4 = kernels.all_maps(4, partial=True)
    reps4 = kernels.conjugacy_representatives(pfa4, 4)
    full = lambda a: (1 << a.n) - 1  # noqa: E731
    return [
        ("sync_bfs P_12", lambda: kernels.sync_bfs(p12.delta, p12.n, full(p12))),
        ("sync_bfs C_9", lambda: kernels.sync_bfs(c9.delta, c9.n, full(c9))),
        ("subset_distances C_9", lambda: kernels.subset_distances(c9.delta, c9.n)),
        ("canonical_key 400 x n=7", lambda: [kernels.canonical_key(r, 7) for r in small]),
        ("rewrite_bfs h=2 m=3 k=12", lambda: kernels.rewrite_bfs(2, 3, 12)),
        ("enumerate_pairs n=5 DFA", lambda: kernels.enumerate_pairs(reps5, dfa5, 5, False)),
        ("enumerate_pairs n=4 PFA", lambda: kernels.enumerate_pairs(reps4, pfa4, 4, True)),
        ("sync_lengths_batch 400 x n=6", lambda: kernels.sync_lengths_batch(base, cand, 6)),
        ("lpp_batch 400 x n=6", lambda: kernels.lpp_batch(base, cand, 6)),
        ("reducible_pair_counts n=5", lambda: kernels.reducible_pair_counts(dfa5[7:8], dfa5, 5)),
    ]


def _same(a, b):
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _time(fn, backend, repeat):
    os.environ["SYNCHROLAB_BACKEND"] = backend
    out = fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':32s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fn in _cases():
        a, t_nb = _time(fn, "numba", args.repeat)
        b, t_np = _time(fn, "numpy", args.repeat)
        flag = "" if _same(a, b) else "  MISMATCH"
        print(f"{name:32s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}{flag}")
    os.environ.pop("SYNCHROLAB_BACKEND", None)


if __name__ == "__main__":
    main()
