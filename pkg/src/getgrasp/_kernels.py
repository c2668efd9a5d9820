"""
Hot numeric kernels.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics. The numba path is used when numba is
importable and ``GETGRASP_DISABLE_NUMBA`` is unset (or ``0``); set it to
``1`` to force the numpy path, e.g. for debugging or on platforms without
LLVM.

Kernels
-------
pivot_loop
    Primal simplex iterations on a dense tableau (in place): Dantzig
    pricing, switching to Bland's rule after repeated degenerate pivots.
winkler_integrate
    Elastic-foundation pressure over sampled cells, with the resultant
    force, first moments and bottom-out flag.
"""
import os

import numpy as np

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITERATION_LIMIT = 2
DEGENERATE_LIMIT = 50


def _env_disabled():
    return os.environ.get("GETGRASP_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:  # pragma: no cover - exercised implicitly
    if _env_disabled():
        raise ImportError("numba disabled by GETGRASP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# Simplex pivoting
# --------------------------------------------------------------------------
# Pricing is Dantzig's most negative reduced cost until DEGENERATE_LIMIT
# consecutive degenerate pivots, then Bland's smallest index for the rest of
# the solve, which rules out cycling.
# Tableau layout: rows 0..m-1 are constraints [A | b], row m is the reduced
# cost row [r | -z] for a minimisation. ``basis[i]`` is the column basic in
# row i.


def _pivot_loop_numpy(T, basis, max_iter, tol):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    bland = False
    stall = 0
    for it in range(max_iter):
        cost = T[m, :n]
        candidates = np.nonzero(cost < -tol)[0]
        if candidates.size == 0:
            return STATUS_OPTIMAL, it
        col = candidates[0] if bland else candidates[np.argmin(cost[candidates])]
        column = T[:m, col]
        rows = np.nonzero(column > tol)[0]
        if rows.size == 0:
            return STATUS_UNBOUNDED, it
        ratios = T[rows, n] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = tied[np.argmin(basis[tied])]
        stall = stall + 1 if best <= tol else 0
        if stall >= DEGENERATE_LIMIT:
            bland = True
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
    return STATUS_ITERATION_LIMIT, max_iter


def _pivot_loop_loops(T, basis, max_iter, tol):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    bland = False
    stall = 0
    for it in range(max_iter):
        col = -1
        low = -tol
        for j in range(n):
            if T[m, j] < low:
                col = j
                if bland:
                    break
                low = T[m, j]
        if col < 0:
            return STATUS_OPTIMAL, it
        best = np.inf
        for i in range(m):
            if T[i, col] > tol:
                r = T[i, n] / T[i, col]
                if r < best:
                    best = r
        if best == np.inf:
            return STATUS_UNBOUNDED, it
        if best <= tol:
            stall += 1
            if stall >= DEGENERATE_LIMIT:
                bland = True
        else:
            stall = 0
        thresh = best + tol * max(1.0, abs(best))
        row = -1
        for i in range(m):
            if T[i, col] > tol and T[i, n] / T[i, col] <= thresh:
                if row < 0 or basis[i] < basis[row]:
                    row = i
        piv = T[row, col]
        for j in range(n + 1):
            T[row, j] /= piv
        for i in range(m + 1):
            if i != row:
                f = T[i, col]
                if f != 0.0:
                    for j in range(n + 1):
                        T[i, j] -= f * T[row, j]
                    T[i, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
    return STATUS_ITERATION_LIMIT, max_iter


# --------------------------------------------------------------------------
# Winkler foundation integration
# --------------------------------------------------------------------------


def _winkler_numpy(gap, max_indent, depth, k, cell_area, xs, ys):
    """``gap`` is the distance from the undeformed gel surface to the
    object surface at each sample (negative = already interpenetrating)."""
    indent = depth - gap
    indent = np.where(indent > 0.0, indent, 0.0)
    bottomed = bool(np.any(indent > max_indent + 1e-12))
    pressure = k * indent
    w = pressure * cell_area
    force = w.sum()
    return pressure, force, (w * xs).sum(), (w * ys).sum(), bottomed


def _winkler_loops(gap, max_indent, depth, k, cell_area, xs, ys):
    n = gap.shape[0]
    pressure = np.zeros(n)
    force = 0.0
    mx = 0.0
    my = 0.0
    bottomed = False
    for i in range(n):
        d = depth - gap[i]
        if d > 0.0:
            if d > max_indent[i] + 1e-12:
                bottomed = True
            p = k * d
            pressure[i] = p
            w = p * cell_area[i]
            force += w
            mx += w * xs[i]
            my += w * ys[i]
    return pressure, force, mx, my, bottomed


if HAVE_NUMBA:
    _pivot_loop_jit = njit(cache=True)(_pivot_loop_loops)
    _winkler_jit = njit(cache=True)(_winkler_loops)

    def pivot_loop(T, basis, max_iter=10_000, tol=1e-10):
        status, it = _pivot_loop_jit(T, basis, max_iter, tol)
        return int(status), int(it)

    def winkler_integrate(gap, max_indent, depth, k, cell_area, xs, ys):
        p, f, mx, my, b = _winkler_jit(gap, max_indent, float(depth), float(k), cell_area, xs, ys)
        return p, float(f), float(mx), float(my), bool(b)

else:
    def pivot_loop(T, basis, max_iter=10_000, tol=1e-10):
        return _pivot_loop_numpy(T, basis, max_iter, tol)

    def winkler_integrate(gap, max_indent, depth, k, cell_area, xs, ys):
        p, f, mx, my, b = _winkler_numpy(gap, max_indent, depth, k, cell_area, xs, ys)
        return p, float(f), float(mx), float(my), b


BACKEND = "numba" if HAVE_NUMBA else "numpy"

# Explicit handles for benchmarking and cross-checking both paths.
numpy_pivot_loop = _pivot_loop_numpy
numpy_winkler_integrate = _winkler_numpy
