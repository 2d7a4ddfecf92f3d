"""Time the numba and numpy swap kernels on the same random batches.

    python3 benchmarks/bench_kernels.py [--n 200000] [--dims 2 4 8] [--repeat 5]

The first numba call is excluded (JIT or cache load). Results are also
checked for agreement, since a fast wrong kernel is worse than a slow one.
"""

import argparse
import time

import numpy as np

from qudit_swap import _kernels


def _best(fn, *args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 6, 8])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"{'d':>3} {'n':>9} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'max |diff|':>11}")
    for d in args.dims:
        c = np.sqrt(rng.dirichlet(np.ones(d), size=args.n))
        e = np.sqrt(rng.dirichlet(np.ones(d), size=args.n))
        _kernels.swap_tables_numba(c[:8], e[:8])  # warm up
        t_np = _best(_kernels.swap_tables_numpy, c, e, repeat=args.repeat)
        t_nb = _best(_kernels.swap_tables_numba, c, e, repeat=args.repeat)
        p1, w1 = _kernels.swap_tables_numpy(c, e)
        p2, w2 = _kernels.swap_tables_numba(c, e)
        diff = max(np.max(np.abs(p1 - p2)), np.max(np.abs(w1 - w2)))
        print(f"{d:>3} {args.n:>9} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f} {diff:>11.1e}")
    print(f"numba threads: {_kernels.numba.get_num_threads()}")


if __name__ == "__main__":
    main()
