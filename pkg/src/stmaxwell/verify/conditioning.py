"""Condition numbers of the space-time operators and their growth in N."""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from ..chebyshev import cgl_grid, diff_matrix, restrict
from ..kron import apply, check_cap
from ..maxwell.kronsolve import KronSumSolver
from ..maxwell.wave import wave_operator

__all__ = [
    "OPERATORS",
    "KINDS",
    "time_block",
    "condition_number",
    "min_real_eig_time",
    "fit_loglog_slope",
    "fit_exponential_rate",
]

OPERATORS = ("a_lap", "a_curl", "s_t_int")
KINDS = ("svd", "eig")


def time_block(N: int, interval=(0.0, 1.0)) -> np.ndarray:
    """``<S_t>``: time derivative on CGL(N+1) restricted to nodes ``t > t_0``."""
    g = cgl_grid(N + 1, interval)
    it = np.arange(1, g.n)
    return restrict(diff_matrix(g).entries, it, it)


def _lap_parts(N: int, c: float):
    grids = tuple(cgl_grid(N + 1, (0.0, 1.0)) for _ in range(4))
    op, T, Ls, _, _ = wave_operator(grids, c)
    return op, T, Ls


def _kappa_lap_eig(N: int, c: float) -> float:
    _, T, Ls = _lap_parts(N, c)
    lt = np.linalg.eigvals(T @ T)
    ls = [np.linalg.eigvals(L) for L in Ls]
    lam = lt[:, None, None, None] - c * c * (
        ls[0][None, :, None, None] + ls[1][None, None, :, None] + ls[2][None, None, None, :]
    )
    mag = np.abs(lam)
    return float(mag.max() / mag.min())


def _kappa_lap_svd(N: int, c: float, tol: float) -> float:
    op, T, Ls = _lap_parts(N, c)
    shape = op.in_shape
    n = int(np.prod(shape))
    opt = op.transpose()
    fwd = KronSumSolver(T @ T, Ls, c * c)
    bwd = fwd.transpose()

    def normal(v):
        x = v.reshape(shape)
        return apply(opt, apply(op, x)).ravel()

    def inv_normal(v):
        # (A^T A)^{-1} v = A^{-1} A^{-T} v
        return fwd.solve(bwd.solve(v.reshape(shape))).ravel()

    v0 = np.ones(n)
    smax2 = eigsh(LinearOperator((n, n), matvec=normal, dtype=float), k=1, which="LA", tol=tol, v0=v0)[0][0]
    imax2 = eigsh(LinearOperator((n, n), matvec=inv_normal, dtype=float), k=1, which="LA", tol=tol, v0=v0)[0][0]
    return float(np.sqrt(smax2 * imax2))


def condition_number(op: str, N: int, kind: str = "svd", c: float = 1.0, tol: float = 1e-8) -> float:
    """Condition number of a space-time operator at resolution N.

    Parameters
    ----------
    op : {"a_lap", "a_curl", "s_t_int"}
        ``a_lap`` is the wave operator of one E component; ``a_curl`` is the
        magnetic recovery operator ``<S_t> kron I``, whose condition number
        equals that of ``s_t_int`` = ``<S_t>``.
    kind : {"svd", "eig"}
        ``svd`` gives the 2-norm condition number ``s_max / s_min``; ``eig``
        gives ``max|lambda| / min|lambda|``. For ``a_lap`` both use only
        1-D factorisations, which keeps N up to 16 cheap.
    """
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}; choose from {', '.join(OPERATORS)}")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    if int(N) != N or N < 3:
        raise ValueError("N must be an integer >= 3")
    if op == "a_lap":
        # several work vectors of the interior size
        check_cap(8.0 * 16 * N * (N - 1) ** 3, "condition estimate")
        return _kappa_lap_eig(N, c) if kind == "eig" else _kappa_lap_svd(N, c, tol)
    check_cap(8.0 * N * N, "condition estimate")
    T = time_block(N)
    if kind == "svd":
        return float(np.linalg.cond(T))
    mag = np.abs(np.linalg.eigvals(T))
    return float(mag.max() / mag.min())


def min_real_eig_time(N: int, interval=(-1.0, 1.0)) -> float:
    """Smallest real part over the spectrum of ``<S_t>``."""
    return float(np.linalg.eigvals(time_block(N, interval)).real.min())


def fit_loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(value)`` against ``log(N)``."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def fit_exponential_rate(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(value)`` against ``N``; negative means decay."""
    x = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
