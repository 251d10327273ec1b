#!/usr/bin/env python3
"""Benchmark the Wigner kernel: numba @njit versus the vectorized numpy path.

Renders a partially decohered cat on progressively larger grids and reports
wall times for both implementations plus their maximum disagreement.

    python benchmarks/bench_wigner.py [--dim 40] [--grids 101,201,401]
"""

import argparse
import time

import numpy as np

from dscqed import _kernels, cvs


def build_state(dim: int) -> np.ndarray:
    from dscqed import metrology as met
    from dscqed.metrology import MeasurementAxis

    zts = cvs.build_zts(0.9789, 0.8764, dim)
    _, post = met.qubit_measure(zts, MeasurementAxis(np.pi / 2, 0.0))[1]
    return post.matrix


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=40)
    ap.add_argument("--grids", default="101,201,401")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rho = build_state(args.dim)
    try:
        _kernels._get_numba_kernel()   # trigger compilation outside the timing
        have_numba = True
    except ImportError:
        have_numba = False

    print(f"state dim = {args.dim}; repeats = {args.repeats}")
    print(f"{'grid':>8} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max|diff|':>11}")
    for n in (int(tok) for tok in args.grids.split(",")):
        xs = np.linspace(-4.0, 4.0, n)
        beta = (xs[None, :] + 1j * xs[:, None]).ravel()

        t_np = min(_timeit(lambda: _kernels.wigner_grid_numpy(rho, beta), args.repeats))
        w_np = _kernels.wigner_grid_numpy(rho, beta)
        if have_numba:
            t_nb = min(_timeit(lambda: _kernels.wigner_grid_numba(rho, beta), args.repeats))
            w_nb = _kernels.wigner_grid_numba(rho, beta)
            diff = float(np.max(np.abs(w_np - w_nb)))
            print(f"{n}x{n:<4} {t_np*1e3:12.1f} {t_nb*1e3:12.1f} "
                  f"{t_np/t_nb:9.1f}x {diff:11.2e}")
        else:
            print(f"{n}x{n:<4} {t_np*1e3:12.1f} {'n/a':>12} {'':>9} {'':>11}")


def _timeit(fn, repeats):
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


if __name__ == "__main__":
    main()
