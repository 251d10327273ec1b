"""Phase-space kernels: Wigner function of a truncated-Fock density matrix.

W(beta) is the displaced-parity expectation (2/pi) tr[rho D(beta) P D(-beta)],
evaluated in closed form through the exact displacement matrix elements
<m|D(2 beta)|n> (associated-Laguerre recurrences), so there is no quadrature
error on the truncated space.  This is the one numerically hot inner loop of
the package: a grid render touches ~4e4 points x dim^2 recurrence steps.

Two interchangeable implementations are provided: a numba @njit kernel and a
vectorized pure-numpy fallback.  Selection: environment variable
DSCQED_NUMBA=0 forces numpy; otherwise numba is used when importable.  The
benchmark in benchmarks/bench_wigner.py compares the two.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import prange
except ImportError:      # pragma: no cover - the njit path needs numba anyway
    prange = range

_TWO_OVER_PI = 2.0 / math.pi


def _wigner_loop(rho_re, rho_im, zr_arr, zi_arr, out):
    """Loop body compiled by numba; grid points are independent, so the outer
    loop parallelizes without changing any per-point result.

    z = 2*beta per point; rho is hermitian so only the upper diagonals k >= 0
    contribute through 2*Re[rho_{m,m+k} z^k] terms.
    """
    d = rho_re.shape[0]
    npts = zr_arr.shape[0]
    for p in prange(npts):
        zr = zr_arr[p]
        zi = zi_arr[p]
        r = zr * zr + zi * zi
        acc = 0.0
        # main diagonal: sum_m (-1)^m rho_mm L_m(r)
        lm2 = 0.0
        lm1 = 1.0
        sgn = 1.0
        for m in range(d):
            if m == 0:
                lcur = 1.0
            elif m == 1:
                lcur = 1.0 - r
            else:
                k0 = m - 1
                lcur = ((2.0 * k0 + 1.0 - r) * lm1 - k0 * lm2) / (k0 + 1.0)
            if m >= 1:
                lm2 = lm1
                lm1 = lcur
            acc += sgn * rho_re[m, m] * lcur
            sgn = -sgn
        # upper diagonals k >= 1
        zkr = 1.0
        zki = 0.0
        s0k = 1.0
        for k in range(1, d):
            t = zkr * zr - zki * zi
            zki = zkr * zi + zki * zr
            zkr = t
            s0k /= math.sqrt(k)          # 1/sqrt(k!)
            s = s0k
            lm2 = 0.0
            lm1 = 1.0
            sgn = 1.0
            for m in range(0, d - k):
                if m == 0:
                    lcur = 1.0
                elif m == 1:
                    lcur = 1.0 + k - r
                else:
                    m0 = m - 1
                    lcur = ((2.0 * m0 + k + 1.0 - r) * lm1 - (m0 + k) * lm2) / (m0 + 1.0)
                if m >= 1:
                    lm2 = lm1
                    lm1 = lcur
                if m > 0:
                    s *= math.sqrt(m / (m + k))
                n = m + k
                re_part = rho_re[m, n] * zkr - rho_im[m, n] * zki
                acc += 2.0 * sgn * s * lcur * re_part
                sgn = -sgn
        out[p] = _TWO_OVER_PI * math.exp(-0.5 * r) * acc
    return out


_numba_kernel = None


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is None:
        from numba import njit
        _numba_kernel = njit(cache=False, fastmath=False, parallel=True)(_wigner_loop)
    return _numba_kernel


def use_numba() -> bool:
    flag = os.environ.get("DSCQED_NUMBA", "").strip().lower()
    if flag in ("0", "off", "false", "no"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def wigner_grid_numpy(rho: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Vectorized fallback: same series as the compiled kernel, grid-wide ops."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    z = 2.0 * np.asarray(beta, dtype=complex).reshape(-1)
    r = np.abs(z) ** 2
    acc = np.zeros_like(r)
    # diagonal
    lm2 = np.zeros_like(r)
    lm1 = np.ones_like(r)
    sgn = 1.0
    for m in range(d):
        if m == 0:
            lcur = np.ones_like(r)
        elif m == 1:
            lcur = 1.0 - r
        else:
            k0 = m - 1
            lcur = ((2.0 * k0 + 1.0 - r) * lm1 - k0 * lm2) / (k0 + 1.0)
        if m >= 1:
            lm2, lm1 = lm1, lcur
        acc += sgn * rho[m, m].real * lcur
        sgn = -sgn
    # upper diagonals
    zk = np.ones_like(z)
    s0k = 1.0
    for k in range(1, d):
        zk = zk * z
        s0k /= math.sqrt(k)
        s = s0k
        lm2 = np.zeros_like(r)
        lm1 = np.ones_like(r)
        sgn = 1.0
        for m in range(0, d - k):
            if m == 0:
                lcur = np.ones_like(r)
            elif m == 1:
                lcur = 1.0 + k - r
            else:
                m0 = m - 1
                lcur = ((2.0 * m0 + k + 1.0 - r) * lm1 - (m0 + k) * lm2) / (m0 + 1.0)
            if m >= 1:
                lm2, lm1 = lm1, lcur
            if m > 0:
                s *= math.sqrt(m / (m + k))
            acc += 2.0 * sgn * s * lcur * (rho[m, m + k] * zk).real
            sgn = -sgn
    return _TWO_OVER_PI * np.exp(-0.5 * r) * acc


def wigner_grid_numba(rho: np.ndarray, beta: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    z = 2.0 * np.asarray(beta, dtype=complex).reshape(-1)
    out = np.empty(z.shape[0], dtype=np.float64)
    kern = _get_numba_kernel()
    kern(np.ascontiguousarray(rho.real), np.ascontiguousarray(rho.imag),
         np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag), out)
    return out


def wigner_grid(rho: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Wigner values at the complex phase-space points beta (flattened)."""
    if use_numba():
        return wigner_grid_numba(rho, beta)
    return wigner_grid_numpy(rho, beta)
