"""Time the nested harmonic sum kernel: compiled extension against pure Python.

    python3 benchmarks/bench_nested.py [--d 20000] [--digits 50] [--repeat 3]
"""

import argparse
import time

from qdeq import _nested_py, kernels

COMPS = [(2,), (3,), (2, 1), (3, 1), (2, 1, 1), (4, 1), (2, 3), (3, 2), (2, 2, 1), (3, 1, 1, 1)]


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=20000)
    ap.add_argument("--digits", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    limbs = kernels.frac_limbs_for(args.digits)
    marks = [args.d]
    py_t, py_out = best_of(lambda: _nested_py.nested_sums(COMPS, args.d, False, limbs, marks), args.repeat)
    print(f"python  d={args.d} limbs={limbs}: {py_t:.3f}s")
    try:
        from qdeq import _nested
    except ImportError:
        print("cython  extension not built; nothing to compare")
        return
    cy_t, cy_out = best_of(lambda: _nested.nested_sums(COMPS, args.d, False, limbs, marks), args.repeat)
    print(f"cython  d={args.d} limbs={limbs}: {cy_t:.3f}s")
    print(f"speedup {py_t / cy_t:.1f}x, outputs identical: {py_out == cy_out}")


if __name__ == "__main__":
    main()
