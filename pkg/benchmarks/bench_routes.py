"""Time the two exact routes to the S_n terms.

Racah: one single-sum evaluation per coefficient <s (s-n) s (n-s) | l 0>.
Descent: stretched product plus a few exact recurrence steps per l.

    python benchmarks/bench_routes.py --two-s 20 40 80 160 --n 3
"""

import argparse
import time

from spinlimit.coupling import descend_from_stretched, zero_projection_cg
from spinlimit.exact import HalfInt


def racah_column(two_s, n):
    spin = HalfInt(two_s)
    m = HalfInt(two_s - 2 * n)
    return [zero_projection_cg(spin, m, l) for l in range(two_s + 1)]


def descent_column(two_s, n):
    spin = HalfInt(two_s)
    return [descend_from_stretched(spin, l, n)[n] for l in range(two_s + 1)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--two-s", type=int, nargs="+", default=[20, 40, 80, 160])
    parser.add_argument("--n", type=int, default=3)
    args = parser.parse_args()
    print(f"{'2s':>6} {'racah [s]':>10} {'descent [s]':>12} {'speedup':>8}")
    for two_s in args.two_s:
        t0 = time.perf_counter()
        a = racah_column(two_s, args.n)
        t1 = time.perf_counter()
        b = descent_column(two_s, args.n)
        t2 = time.perf_counter()
        assert a == b
        print(f"{two_s:>6} {t1 - t0:>10.3f} {t2 - t1:>12.3f} {(t1 - t0) / (t2 - t1):>8.1f}")


if __name__ == "__main__":
    main()
