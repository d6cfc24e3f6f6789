"""Compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times the colored Jones table and the rational surgery sum for both backends
and checks that their results agree.
"""

import argparse
import timeit

import numpy as np

from fig8rt import _fallback
from fig8rt.invariants import GUARD_BITS, _amplitudes, growth_bits, surgery_coefficient

try:
    from fig8rt import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return
    print(f"{'kernel':<14}{'r':>6}{'compiled s':>14}{'fallback s':>14}{'speedup':>10}{'max diff':>12}")
    for r in (50, 200, 800):
        prec = growth_bits(r) + GUARD_BITS
        a = _kernels.jones_table(r, prec)
        b = _fallback.jones_table(r, prec)
        diff = float(np.max(np.abs(a[1:] - b[1:]) / np.maximum(1.0, np.abs(a[1:]))))
        tc = best_of(lambda: _kernels.jones_table(r, prec), args.repeat)
        tf = best_of(lambda: _fallback.jones_table(r, prec), args.repeat)
        print(f"{'jones_table':<14}{r:>6}{tc:>14.4f}{tf:>14.4f}{tf / tc:>10.1f}{diff:>12.1e}")
    for r, (p, q) in ((200, (5, 2)), (800, (7, 3)), (2000, (-4, 1))):
        sc = surgery_coefficient(p, q)
        amp = _amplitudes(r)
        a = _kernels.surgery_sum(sc.p, sc.q, sc.d, r, amp, True)
        b = _fallback.surgery_sum(sc.p, sc.q, sc.d, r, amp)
        diff = abs(a - b) / max(1.0, abs(a))
        tc = best_of(lambda: _kernels.surgery_sum(sc.p, sc.q, sc.d, r, amp, True), args.repeat)
        tf = best_of(lambda: _fallback.surgery_sum(sc.p, sc.q, sc.d, r, amp), args.repeat)
        print(f"{'surgery_sum':<14}{r:>6}{tc:>14.4f}{tf:>14.4f}{tf / tc:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
