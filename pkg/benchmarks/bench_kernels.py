"""Time the compiled and pure-Python recurrence kernels on identical inputs.

Run with ``python benchmarks/bench_kernels.py [--size N] [--repeat R]``. Each
row reports the best-of-R wall time per call for both backends, the speedup,
and whether the two results agree exactly.
"""
import argparse
import timeit

import numpy as np

from dlaguerre import _pykernels
from dlaguerre.operators import couplings, diagonal, string_weights

try:
    from dlaguerre import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workloads(size: int, alpha: float = 0.5):
    d = diagonal(alpha, size)
    e = -couplings(alpha, size)[1:size]
    a = couplings(alpha, size + 2)
    b = diagonal(alpha, size + 2)
    sw = string_weights(alpha, size)
    return {
        "sturm_count": (d - 0.01 * np.arange(size), e, 0.0),
        "stieltjes_cf": (sw.l, sw.w, 0.1),
        "minimal_ratios": (a, b, -0.5, size),
        "forward_three_term": (a, b, -0.5, 1.0, 1.2, size),
    }


def best_time(fn, args, repeat: int) -> float:
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=loops)) / loops


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':<20}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}  identical")
    for name, inputs in workloads(args.size).items():
        py_fn = getattr(_pykernels, name)
        t_py = best_time(py_fn, inputs, args.repeat)
        if _ckernels is None:
            print(f"{name:<20}{t_py:>14.3e}{'-':>14}{'-':>10}  -")
            continue
        c_fn = getattr(_ckernels, name)
        t_c = best_time(c_fn, inputs, args.repeat)
        same = np.array_equal(np.asarray(py_fn(*inputs)), np.asarray(c_fn(*inputs)))
        print(f"{name:<20}{t_py:>14.3e}{t_c:>14.3e}{t_py / t_c:>10.1f}  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
