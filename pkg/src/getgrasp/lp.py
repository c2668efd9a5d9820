"""
Dense two-phase primal simplex; Bland's rule takes over when pivots stall.

Problems are small (tens of rows, a few hundred columns), so a dense
tableau is both the simplest and the fastest option. The pivot loop itself
lives in :mod:`getgrasp._kernels`.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray
    objective: float
    iterations: int


def _scale_rows(A, b):
    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0.0] = 1.0
    return A / scale[:, None], b / scale


def maximize(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, tol=1e-10, max_iter=20_000):
    """Maximise ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``.

    Parameters
    ----------
    c : (n,) array_like
    A_eq, b_eq : (p, n), (p,) array_like, optional
    A_ub, b_ub : (q, n), (q,) array_like, optional
    tol : float
        Pivot and feasibility tolerance on row-normalised data.

    Returns
    -------
    LPResult
        ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.
        ``x`` is zero unless optimal.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    if A_eq.shape != (b_eq.size, n) or A_ub.shape != (b_ub.size, n):
        raise ValueError("constraint shapes do not match the objective")

    # entries this far below the data scale are round-off (far under any grasp
    # tolerance); row scaling would otherwise amplify them into real constraints
    big = max(1.0, np.abs(A_eq).max(initial=0.0), np.abs(A_ub).max(initial=0.0))
    A_eq = np.where(np.abs(A_eq) < ZERO_TOL * big, 0.0, A_eq)
    A_ub = np.where(np.abs(A_ub) < ZERO_TOL * big, 0.0, A_ub)
    b_eq = np.where(np.abs(b_eq) < ZERO_TOL * big, 0.0, b_eq)

    p, q = b_eq.size, b_ub.size
    m = p + q
    # columns: x | slack (q) | artificial (m)
    A = np.zeros((m, n + q))
    b = np.zeros(m)
    if p:
        A[:p, :n], b[:p] = _scale_rows(A_eq, b_eq)
    if q:
        A[p:, :n], b[p:] = _scale_rows(A_ub, b_ub)
        A[p:, n:] = np.eye(q)
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    basis = np.full(m, -1, dtype=np.int64)
    need_art = []
    for i in range(m):
        if i >= p and not neg[i]:
            basis[i] = n + (i - p)
        else:
            need_art.append(i)
    n_art = len(need_art)
    ncols = n + q + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, : n + q] = A
    T[:m, -1] = b
    for k, i in enumerate(need_art):
        T[i, n + q + k] = 1.0
        basis[i] = n + q + k

    iterations = 0
    if n_art:
        # phase 1: minimise the sum of artificials
        T[m, n + q : ncols] = 1.0
        for i in need_art:
            T[m] -= T[i]
        status, it = _kernels.pivot_loop(T, basis, max_iter, tol)
        iterations += it
        if status == _kernels.STATUS_ITERATION_LIMIT:
            raise SolverError("simplex phase 1 hit the iteration limit")
        if -T[m, -1] > 1e-8 * max(1.0, np.abs(b).max(initial=0.0)):
            return LPResult(INFEASIBLE, np.zeros(n), 0.0, iterations)
        # drive remaining artificials out of the basis
        keep = np.ones(m + 1, dtype=bool)
        for i in range(m):
            if basis[i] >= n + q:
                row = T[i, : n + q]
                nz = np.nonzero(np.abs(row) > 1e-9)[0]
                if nz.size == 0:
                    keep[i] = False  # redundant constraint
                    continue
                col = nz[0]
                T[i] /= T[i, col]
                f = T[:, col].copy()
                f[i] = 0.0
                T -= np.outer(f, T[i])
                basis[i] = col
        T = np.delete(T, np.s_[n + q : ncols], axis=1)
        basis = basis[keep[:m]]
        T = T[keep]
        m = T.shape[0] - 1
        T = np.ascontiguousarray(T)

    # phase 2 (minimise -c)
    T[m, :] = 0.0
    T[m, :n] = -c
    for i in range(m):
        cb = T[m, basis[i]]
        if cb != 0.0:
            T[m] -= cb * T[i]
    status, it = _kernels.pivot_loop(T, basis, max_iter, tol)
    iterations += it
    if status == _kernels.STATUS_ITERATION_LIMIT:
        raise SolverError("simplex phase 2 hit the iteration limit")
    if status == _kernels.STATUS_UNBOUNDED:
        return LPResult(UNBOUNDED, np.zeros(n), np.inf, iterations)
    x = np.zeros(n + q)
    for i in range(m):
        if basis[i] < n + q:
            x[basis[i]] = T[i, -1]
    x = np.clip(x[:n], 0.0, None)
    return LPResult(OPTIMAL, x, float(c @ x), iterations)


def feasible(A_eq=None, b_eq=None, A_ub=None, b_ub=None, n=None):
    """Return a feasible point or ``None``."""
    if n is None:
        n = (np.atleast_2d(A_eq) if A_eq is not None else np.atleast_2d(A_ub)).shape[1]
    res = maximize(np.zeros(n), A_eq, b_eq, A_ub, b_ub)
    return res.x if res.status == OPTIMAL else None
