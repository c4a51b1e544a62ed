"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--features 2000] [--repeat 5]

Each kernel is warmed up once (numba compiles on first call) and then timed
as the best of ``--repeat`` runs.
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from mdselect import _kernels as k
from mdselect.divergence import pooled_rows


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--features", type=int, default=2000)
    parser.add_argument("--classes", type=int, default=20)
    parser.add_argument("--docs", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if not k.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    m, n = args.features, args.classes
    theta = rng.dirichlet(np.full(m, 0.5), size=n) * 0.99 + 0.01 / m
    theta /= theta.sum(axis=1, keepdims=True)
    q = pooled_rows(theta, np.full(n, 1.0 / n))
    p1, p2 = theta[0].copy(), theta[1].copy()
    X = sp.random(args.docs, m, density=0.01, format="csr", random_state=args.seed,
                  data_rvs=lambda size: rng.integers(1, 5, size=size)).astype(np.int64)
    labels = rng.integers(0, n, size=args.docs)

    cases = {
        "class_term_counts": ((labels, X.indptr, X.indices, X.data, n, m),),
        "greedy_j": ((p1, p2, p1.sum(), p2.sum(), 1e-12),),
        "two_bin_kl_sum": ((theta, q),),
        "two_bin_nu_j": ((theta, q, 1.0),),
    }
    print(f"M={m} N={n} docs={args.docs} (best of {args.repeat})")
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}")
    for name, (call_args,) in cases.items():
        t_np = best_of(getattr(k, f"{name}_numpy"), call_args, args.repeat)
        t_nb = best_of(getattr(k, f"{name}_numba"), call_args, args.repeat)
        print(f"{name:<20}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
