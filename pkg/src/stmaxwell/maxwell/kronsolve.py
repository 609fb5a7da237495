"""Direct solver for ``T kron I - c2 * I kron (L_x (+) L_y (+) L_z)``.

The three space factors are diagonalised (their eigenvector bases are well
conditioned). The time factor is only brought to complex Schur form, since
its eigenvector basis becomes severely ill conditioned as N grows; each
spatial eigen-triple then needs one shifted triangular solve in time, all of
which are done together by vectorised back substitution.
"""
from __future__ import annotations

import numpy as np
from scipy import linalg

from ..kron import mode_product

__all__ = ["KronSumSolver", "EIGVEC_COND_LIMIT"]

EIGVEC_COND_LIMIT = 1e8


class KronSumSolver:
    """Factorised inverse of a time-space Kronecker sum.

    Parameters
    ----------
    time_matrix : (n_t, n_t) array
    space_matrices : three square arrays
    c2 : float
        Scale of the spatial part.

    Raises
    ------
    np.linalg.LinAlgError
        If a spatial eigenvector basis has condition number above
        ``EIGVEC_COND_LIMIT`` or a shifted time block is singular.
    """

    def __init__(self, time_matrix, space_matrices, c2: float = 1.0):
        self.time_matrix = np.asarray(time_matrix, dtype=float)
        self.space_matrices = tuple(np.asarray(m, dtype=float) for m in space_matrices)
        self.c2 = float(c2)
        self.R, self.U = linalg.schur(self.time_matrix.astype(complex), output="complex")
        self.vecs, self.ivecs, lams = [], [], []
        self.eigvec_cond = 0.0
        for m in self.space_matrices:
            lam, v = np.linalg.eig(m)
            cond = np.linalg.cond(v)
            self.eigvec_cond = max(self.eigvec_cond, cond)
            if not np.isfinite(cond) or cond > EIGVEC_COND_LIMIT:
                raise np.linalg.LinAlgError(f"spatial eigenvector basis has condition number {cond:.2e}")
            self.vecs.append(v)
            self.ivecs.append(np.linalg.inv(v))
            lams.append(lam)
        mu = -self.c2 * (lams[0][:, None, None] + lams[1][None, :, None] + lams[2][None, None, :])
        self.shift = mu.ravel()
        diag = np.diag(self.R)
        denom = diag[:, None] + self.shift[None, :]
        if np.min(np.abs(denom)) <= 1e3 * np.finfo(float).eps * np.abs(denom).max():
            raise np.linalg.LinAlgError("shifted time block is numerically singular")
        self.shape = (self.time_matrix.shape[0], *(m.shape[0] for m in self.space_matrices))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != self.shape:
            raise ValueError(f"rhs shape {rhs.shape} does not match {self.shape}")
        w = rhs.astype(complex)
        for ax, iv in enumerate(self.ivecs, start=1):
            w = mode_product(w, iv, ax)
        w = mode_product(w, self.U.conj().T, 0)
        n = self.shape[0]
        w = w.reshape(n, -1)
        y = np.empty_like(w)
        R = self.R
        for i in range(n - 1, -1, -1):
            acc = w[i] - R[i, i + 1 :] @ y[i + 1 :] if i < n - 1 else w[i]
            y[i] = acc / (R[i, i] + self.shift)
        y = mode_product(y.reshape(self.shape), self.U, 0)
        for ax, v in enumerate(self.vecs, start=1):
            y = mode_product(y, v, ax)
        return y.real

    def transpose(self) -> "KronSumSolver":
        return KronSumSolver(self.time_matrix.T, tuple(m.T for m in self.space_matrices), self.c2)
