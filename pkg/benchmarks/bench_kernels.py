"""Compare the numba and pure-numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are always importable, so one process times both.  The numba
timings exclude the first (compiling) call.
"""
import argparse
import timeit

import numpy as np

from vallab import _kernels
from vallab.grassmann import haar_frames


def _cases(rng):
    frames = haar_frames(6, 2, 50_000, rng)
    yield ("permanent 12x12", (rng.uniform(0, 1, (12, 12)),),
           _kernels.permanent_numpy, _kernels.permanent_numba)
    yield ("abs_det 200k x 2x2", (rng.standard_normal((200_000, 2, 2)),),
           _kernels.abs_det_numpy, _kernels.abs_det_numba)
    yield ("abs_det 50k x 4x4", (rng.standard_normal((50_000, 4, 4)),),
           _kernels.abs_det_numpy, _kernels.abs_det_numba)
    yield ("hw_values 50k frames (6,2)", (frames, np.array([2, 1]), False),
           _kernels.hw_values_numpy, _kernels.hw_values_numba)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy path is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<30}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, a, f_np, f_nb in _cases(rng):
        ref = f_np(*a)
        t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=args.repeat))
        if _kernels.HAS_NUMBA:
            out = f_nb(*a)
            t_nb = min(timeit.repeat(lambda: f_nb(*a), number=1, repeat=args.repeat))
            ref_arr = np.abs(np.asarray(ref))
            diff = float(np.max(np.abs(np.asarray(out) - np.asarray(ref)) / np.maximum(ref_arr, 1e-300)))
            print(f"{name:<30}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>14.2e}")
        else:
            print(f"{name:<30}{1e3 * t_np:>12.2f}{'-':>12}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
