"""Alternating minimal energy (AMEn) solver for ``A x = b`` in TT format.

One-site variant: each sweep right-orthogonalises the iterate, then visits
the cores left to right. At every core the Galerkin-projected local system
is assembled from the interface frames and solved directly, the update is
truncated with a residual-based rank choice, and the core is enriched with
a low-rank projection of the current residual, carried by an auxiliary TT
``z`` of rank ``kick_rank``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, gmres

from ..errors import SolverError
from .core import TTMatrix, TTTensor, apply_tt, tt_add, tt_norm, tt_scale, tt_zeros

__all__ = ["AmenConfig", "AmenResult", "amen_solve", "tt_residual"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AmenConfig:
    tol: float = 1e-10
    max_sweeps: int = 50
    kick_rank: int = 2
    max_rank: int = 200
    seed: int = 0
    # local systems larger than this go to GMRES instead of LU
    local_max_full: int = 5000
    # stop early once `stall_sweeps` sweeps in a row fail to cut the
    # residual by `stall_factor`
    stall_sweeps: int = 3
    stall_factor: float = 0.99

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1 or self.max_rank < 1:
            raise ValueError("max_sweeps and max_rank must be positive")
        if self.kick_rank < 0:
            raise ValueError("kick_rank must be non-negative")


@dataclass(frozen=True, eq=False)
class AmenResult:
    x: TTTensor
    residual: float
    converged: bool
    sweeps: int
    history: tuple = field(default=())


def tt_residual(a: TTMatrix, x: TTTensor, b: TTTensor) -> float:
    """``||a x - b|| / ||b||`` computed without rounding."""
    nb = tt_norm(b)
    r = tt_norm(tt_add(apply_tt(a, x), tt_scale(b, -1.0)))
    return r / nb if nb > 0 else r


# frame contractions; frames are (test rank, operator rank, trial rank)
def _left_a(phi, u, a, v):
    return np.einsum("xay,xiX,aijA,yjY->XAY", phi, u, a, v, optimize=True)


def _right_a(phi, u, a, v):
    return np.einsum("XAY,xiX,aijA,yjY->xay", phi, u, a, v, optimize=True)


def _left_b(phi, u, b):
    return np.einsum("xb,xiX,biB->XB", phi, u, b, optimize=True)


def _right_b(phi, u, b):
    return np.einsum("XB,xiX,biB->xb", phi, u, b, optimize=True)


def _local_rhs(pl, b, pr):
    return np.einsum("xb,biB,XB->xiX", pl, b, pr, optimize=True)


def _local_apply(pl, a, pr, v):
    w = np.tensordot(v, pr, axes=(2, 2))  # y j X A
    w = np.tensordot(pl, w, axes=(2, 0))  # x a j X A
    w = np.tensordot(w, a, axes=([1, 2, 4], [0, 2, 3]))  # x X i
    return w.transpose(0, 2, 1)


def _local_matrix(pl, a, pr):
    m = np.einsum("xay,aijA,XAY->xiXyjY", pl, a, pr, optimize=True)
    n = pl.shape[0] * a.shape[1] * pr.shape[0]
    return m.reshape(n, n)


def _orth_right(core):
    """Return (Q-core with orthonormal rows, R) with ``core = R.T @ Q``."""
    r0, n, r1 = core.shape
    q, r = linalg.qr(core.reshape(r0, n * r1).T, mode="economic")
    return q.T.reshape(-1, n, r1), r


def amen_solve(a: TTMatrix, b: TTTensor, cfg: AmenConfig = AmenConfig(), x0: TTTensor | None = None) -> AmenResult:
    """Solve ``a x = b`` to relative residual ``cfg.tol``.

    Parameters
    ----------
    a : TTMatrix
        Square operator, ``row_sizes == col_sizes == b.mode_sizes``.
    b : TTTensor
    cfg : AmenConfig
    x0 : TTTensor, optional
        Initial guess; defaults to `b`.

    Returns
    -------
    AmenResult
        Best iterate over all sweeps, its relative residual (recomputed
        with :func:`tt_residual`), convergence flag and per-sweep residual
        history. An initial guess that already meets ``cfg.tol`` is
        returned unchanged with ``sweeps == 0``.
    """
    n = b.mode_sizes
    if a.row_sizes != n or a.col_sizes != n:
        raise ValueError(f"operator {a.row_sizes}x{a.col_sizes} does not match right-hand side {n}")
    d = b.d
    bnorm = tt_norm(b)
    if bnorm == 0.0:
        return AmenResult(tt_zeros(n), 0.0, True, 0, ())
    if x0 is not None:
        if x0.mode_sizes != n:
            raise ValueError("initial guess has the wrong mode sizes")
        res0 = tt_residual(a, x0, b)
        if res0 <= cfg.tol:
            return AmenResult(x0, float(res0), True, 0, (res0,))
    rng = np.random.default_rng(cfg.seed)

    A = [np.asarray(c) for c in a.cores]
    B = [np.asarray(c) for c in b.cores]
    x = [np.array(c) for c in (x0 if x0 is not None else b).cores]
    kick = cfg.kick_rank
    if kick:
        zr = [1]
        for k in range(1, d):
            zr.append(int(min(kick, np.prod(n[:k]), np.prod(n[k:]))))
        zr.append(1)
        z = [rng.standard_normal((zr[k], n[k], zr[k + 1])) for k in range(d)]
    tol_loc = cfg.tol / np.sqrt(d)

    one3 = np.ones((1, 1, 1))
    one2 = np.ones((1, 1))
    PA = [one3] + [None] * (d - 1) + [one3]
    Pb = [one2] + [None] * (d - 1) + [one2]
    if kick:
        PzA = [one3] + [None] * (d - 1) + [one3]
        Pzb = [one2] + [None] * (d - 1) + [one2]

    history = []
    converged = False
    best, best_res = None, np.inf
    sweeps = 0
    for sweep in range(cfg.max_sweeps):
        sweeps = sweep + 1
        for k in range(d - 1, 0, -1):
            if kick:
                if sweep > 0:
                    cz = _local_rhs(Pzb[k], B[k], Pzb[k + 1]) - _local_apply(PzA[k], A[k], PzA[k + 1], x[k])
                    z[k] = cz
                z[k], _ = _orth_right(z[k])
                if z[k].shape[0] < zr[k]:
                    pad = np.zeros((zr[k] - z[k].shape[0], n[k], z[k].shape[2]))
                    z[k] = np.concatenate([z[k], pad], axis=0)
            x[k], r = _orth_right(x[k])
            x[k - 1] = np.tensordot(x[k - 1], r.T, axes=(2, 0))
            PA[k] = _right_a(PA[k + 1], x[k], A[k], x[k])
            Pb[k] = _right_b(Pb[k + 1], x[k], B[k])
            if kick:
                PzA[k] = _right_a(PzA[k + 1], z[k], A[k], x[k])
                Pzb[k] = _right_b(Pzb[k + 1], z[k], B[k])

        max_local = 0.0
        for k in range(d):
            r0, nk, r1 = x[k].shape
            rhs = _local_rhs(Pb[k], B[k], Pb[k + 1]).ravel()
            nrhs = np.linalg.norm(rhs)
            if nrhs == 0.0:
                nrhs = 1.0

            mat = _local_matrix(PA[k], A[k], PA[k + 1]) if rhs.size <= cfg.local_max_full else None
            if mat is not None:
                matvec = mat.__matmul__
            else:

                def matvec(v, k=k, shape=(r0, nk, r1)):
                    return _local_apply(PA[k], A[k], PA[k + 1], v.reshape(shape)).ravel()

            max_local = max(max_local, np.linalg.norm(matvec(x[k].ravel()) - rhs) / nrhs)
            sol = _solve_local(mat, rhs, x[k].ravel(), matvec, cfg, tol_loc, sweep, k)
            res_new = np.linalg.norm(matvec(sol) - rhs) / nrhs

            if k == d - 1:
                x[k] = sol.reshape(r0, nk, r1)
                break
            u, s, vt = linalg.svd(sol.reshape(r0 * nk, r1), full_matrices=False)
            target = max(tol_loc, 2.0 * res_new)

            def fits(rr):
                cand = (u[:, :rr] * s[:rr]) @ vt[:rr]
                return np.linalg.norm(matvec(cand.ravel()) - rhs) / nrhs <= target

            # smallest rank meeting the local residual target, by bisection
            lo, hi = 1, s.size
            while lo < hi:
                mid = (lo + hi) // 2
                if fits(mid):
                    hi = mid
                else:
                    lo = mid + 1
            rank = min(lo, cfg.max_rank)
            u = u[:, :rank]
            w = s[:rank, None] * vt[:rank]
            if kick:
                cur = (u @ w).reshape(r0, nk, r1)
                cz = _local_rhs(Pzb[k], B[k], Pzb[k + 1]) - _local_apply(PzA[k], A[k], PzA[k + 1], cur)
                qz = linalg.qr(cz.reshape(-1, cz.shape[2]), mode="economic")[0]
                if qz.shape[1] < zr[k + 1]:
                    qz = np.hstack([qz, np.zeros((qz.shape[0], zr[k + 1] - qz.shape[1]))])
                z[k] = qz.reshape(zr[k], nk, zr[k + 1])
                enr = _local_rhs(Pb[k], B[k], Pzb[k + 1]) - _local_apply(PA[k], A[k], PzA[k + 1], cur)
                uu = np.hstack([u, enr.reshape(r0 * nk, -1)])
                u, rr_ = linalg.qr(uu, mode="economic")
                w = rr_ @ np.vstack([w, np.zeros((uu.shape[1] - rank, r1))])
            x[k] = u.reshape(r0, nk, -1)
            x[k + 1] = np.tensordot(w, x[k + 1], axes=(1, 0))
            PA[k + 1] = _left_a(PA[k], x[k], A[k], x[k])
            Pb[k + 1] = _left_b(Pb[k], x[k], B[k])
            if kick:
                PzA[k + 1] = _left_a(PzA[k], z[k], A[k], x[k])
                Pzb[k + 1] = _left_b(Pzb[k], z[k], B[k])

        xt = TTTensor(tuple(x))
        res = tt_residual(a, xt, b)
        history.append(res)
        log.debug("amen sweep %d: residual %.3e, local %.3e, ranks %s", sweeps, res, max_local, xt.ranks)
        if res < best_res:
            best, best_res = xt, res
        if res <= cfg.tol:
            converged = True
            break
        # the Galerkin residual need not decrease monotonically, so stalling
        # is judged on the best residual so far
        if len(history) > cfg.stall_sweeps and best_res > cfg.stall_factor * min(history[: -cfg.stall_sweeps]):
            log.debug("amen stalled at residual %.3e", best_res)
            break
    return AmenResult(best, float(best_res), converged, sweeps, tuple(history))


def _solve_local(mat, rhs, guess, matvec, cfg, tol_loc, sweep, k):
    m = rhs.size
    if mat is not None:
        try:
            with np.errstate(divide="ignore", invalid="ignore"):
                sol = linalg.solve(mat, rhs, check_finite=False)
        except (linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"singular local system at sweep {sweep + 1}, core {k}: {exc}") from exc
        # scipy's diagonal shortcut divides by zero instead of raising
        if not np.all(np.isfinite(sol)):
            raise SolverError(f"singular local system at sweep {sweep + 1}, core {k}")
        return sol
    op = LinearOperator((m, m), matvec=matvec, dtype=float)
    sol, info = gmres(op, rhs, x0=guess, rtol=tol_loc * 0.1, restart=min(m, 100), maxiter=50)
    if info < 0:
        raise SolverError(f"local GMRES breakdown at sweep {sweep + 1}, core {k}")
    return sol
