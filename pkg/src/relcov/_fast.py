"""Hot loop for the two-dimensional kernel sums.

Every Nadaraya-Watson quantity needs, per evaluation point (ex, ey), the six
sums over observations j inside the product-kernel support:

    S     = sum K_hx(ex - x_j) K_hy(ey - y_j)
    S_t   = sum t_j  K K
    S_dx  = sum K'_hx K_hy          S_tdx = sum t_j K'_hx K_hy
    S_dy  = sum K_hx  K'_hy         S_tdy = sum t_j K_hx  K'_hy

The Epanechnikov kernel has compact support, so after sorting by x each
evaluation point only scans its x-window.  The scan is jitted with numba
when available; the fallback runs the identical loop in Python (same
summation order, so results agree up to nothing - it is the same code).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _scan(xs, ys, ts, ex, ey, lo, hi, hx, hy, out):
    for i in range(ex.size):
        s = 0.0
        st = 0.0
        sdx = 0.0
        sdy = 0.0
        stdx = 0.0
        stdy = 0.0
        exi = ex[i]
        eyi = ey[i]
        for j in range(lo[i], hi[i]):
            ux = (exi - xs[j]) / hx
            if ux <= -1.0 or ux >= 1.0:
                continue
            uy = (eyi - ys[j]) / hy
            if uy <= -1.0 or uy >= 1.0:
                continue
            kx = 0.75 * (1.0 - ux * ux) / hx
            ky = 0.75 * (1.0 - uy * uy) / hy
            kdx = -1.5 * ux / (hx * hx)
            kdy = -1.5 * uy / (hy * hy)
            w = kx * ky
            a = kdx * ky
            b = kx * kdy
            tj = ts[j]
            s += w
            st += tj * w
            sdx += a
            stdx += tj * a
            sdy += b
            stdy += tj * b
        out[0, i] = s
        out[1, i] = st
        out[2, i] = sdx
        out[3, i] = stdx
        out[4, i] = sdy
        out[5, i] = stdy


def local_sums(xs, ys, ts, ex, ey, hx, hy):
    """Six kernel sums at each evaluation point.

    Parameters
    ----------
    xs, ys, ts : ndarray
        Observed covariates and durations (any order).
    ex, ey : ndarray
        Evaluation points.
    hx, hy : float
        Bandwidths.

    Returns
    -------
    ndarray of shape (6, len(ex)):
        rows are S, S_t, S_dx, S_tdx, S_dy, S_tdy.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    ex = np.ascontiguousarray(ex, dtype=np.float64)
    ey = np.ascontiguousarray(ey, dtype=np.float64)
    order = np.argsort(xs, kind="stable")
    xs_s = xs[order]
    ys_s = ys[order]
    ts_s = ts[order]
    lo = np.searchsorted(xs_s, ex - hx, side="left").astype(np.int64)
    hi = np.searchsorted(xs_s, ex + hx, side="right").astype(np.int64)
    out = np.empty((6, ex.size), dtype=np.float64)
    _scan(xs_s, ys_s, ts_s, ex, ey, lo, hi, float(hx), float(hy), out)
    return out
