"""Compare the numba and numpy kernel backends on the hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 100000]

Each row reports the best wall time of ``--repeat`` calls after one warm-up
call (which also triggers numba compilation) and the numpy/numba ratio.
"""

import argparse
import time

import numpy as np

from circleifs import _kernels_numba as nb
from circleifs import _kernels_numpy as npk
from circleifs.systems import demo_contractive, half_symmetric


def best_time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(size, rng):
    demo, half = demo_contractive(), half_symmetric()
    word = rng.integers(0, 2, size)
    xs = np.sort(rng.random(size))
    ws = np.full(size, 1.0 / size)
    cumw = np.cumsum(ws)
    for name, sys in (("demo", demo), ("half", half)):
        k, p = sys.kinds, sys.params
        yield f"orbit[{name}]", lambda m, k=k, p=p: m.orbit(k, p, word, 0.1)
        yield f"apply_indexed[{name}]", lambda m, k=k, p=p: m.apply_indexed(k, p, word, xs)
        yield f"branch_sorted[{name}]", lambda m, k=k, p=p, s=sys: m.branch_sorted(k, p, s.probs, xs, ws)
        yield f"backward[{name}]", lambda m, k=k, p=p: m.backward(k, p, word[:300], xs[: size // 10])
    yield "systematic_indices", lambda m: m.systematic_indices(cumw, 0.37, size)
    inv = np.array([3]), np.array([[0.0, 0.5]])
    yield "orbit[sine inverse]", lambda m: m.orbit(inv[0], inv[1], np.zeros(size // 10, dtype=np.int64), 0.2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, call in cases(args.size, rng):
        t_np = best_time(lambda: call(npk), args.repeat)
        t_nb = best_time(lambda: call(nb), args.repeat)
        print(f"{name:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
