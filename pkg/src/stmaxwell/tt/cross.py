"""Maximum-volume row selection and TT cross interpolation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .core import TTTensor, tt_add, tt_norm, tt_scale, truncation_rank

__all__ = ["maxvol", "CrossConfig", "CrossResult", "tt_cross", "grid_oracle"]


def maxvol(m: np.ndarray, delta: float = 1e-2, max_iters: int = 1000) -> np.ndarray:
    """Rows of a tall matrix spanning a quasi-maximal-volume square block.

    Starts from the rows chosen by a column-pivoted QR of ``m.T`` and swaps
    rows while some entry of ``m @ inv(m[rows])`` exceeds ``1 + delta``.

    Parameters
    ----------
    m : (n, r) array with n >= r and full column rank.
    delta : float
        Dominance slack.

    Returns
    -------
    ndarray of int, length r
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("maxvol needs a 2-D matrix")
    n, r = m.shape
    if n < r:
        raise ValueError(f"maxvol needs rows >= cols, got {m.shape}")
    if r == 0:
        return np.zeros(0, dtype=int)
    _, _, perm = linalg.qr(m.T, mode="economic", pivoting=True)
    rows = np.array(perm[:r], dtype=int)
    block = m[rows]
    scale = max(np.abs(m).max(), np.finfo(float).tiny)
    sv = np.linalg.svd(block, compute_uv=False)
    if sv[-1] <= n * np.finfo(float).eps * scale * max(1.0, sv[0] / scale):
        raise ValueError("maxvol input is rank deficient")
    b = linalg.solve(block.T, m.T).T
    for _ in range(max_iters):
        i, j = np.unravel_index(np.argmax(np.abs(b)), b.shape)
        if abs(b[i, j]) <= 1.0 + delta:
            break
        # swap row rows[j] out for row i; rank-one update of b = m @ inv(m[rows])
        bj = b[:, j].copy()
        bi = b[i, :].copy()
        bi[j] -= 1.0
        b -= np.outer(bj, bi / b[i, j])
        rows[j] = i
    return rows


@dataclass(frozen=True)
class CrossConfig:
    tol: float = 1e-10
    max_rank: int = 100
    max_sweeps: int = 20
    initial_rank: int = 2
    validation_samples: int = 100
    seed: int = 0
    kick: int = 2

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        for name in ("max_rank", "max_sweeps", "initial_rank", "validation_samples"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.initial_rank > self.max_rank:
            raise ValueError("initial_rank must not exceed max_rank")
        if self.kick < 0:
            raise ValueError("kick must be non-negative")


@dataclass(frozen=True, eq=False)
class CrossResult:
    tt: TTTensor
    converged: bool
    sweeps: int
    change: float
    validation_error: float
    evaluations: int


def grid_oracle(func: Callable, axes: Sequence[np.ndarray]) -> Callable:
    """Turn ``func(*coords)`` into an oracle on integer multi-indices.

    The oracle takes a ``(k, d)`` integer array and returns ``k`` values.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]

    def oracle(idx: np.ndarray) -> np.ndarray:
        coords = [a[idx[:, k]] for k, a in enumerate(axes)]
        out = np.asarray(func(*coords), dtype=float)
        return np.broadcast_to(out, (idx.shape[0],))

    return oracle


def _evaluate(oracle, left: np.ndarray, n1: int, n2: int, right: np.ndarray, k: int, d: int):
    """Values on ``left x i_k x i_{k+1} x right`` as a (rl, n1, n2, rr) array."""
    rl, rr = left.shape[0], right.shape[0]
    idx = np.empty((rl, n1, n2, rr, d), dtype=np.int64)
    idx[..., :k] = left[:, None, None, None, :]
    idx[..., k] = np.arange(n1)[None, :, None, None]
    idx[..., k + 1] = np.arange(n2)[None, None, :, None]
    idx[..., k + 2 :] = right[None, None, None, :, :]
    vals = np.asarray(oracle(idx.reshape(-1, d)), dtype=float)
    if vals.shape != (idx.size // d,):
        raise ValueError(f"oracle returned shape {vals.shape}, expected ({idx.size // d},)")
    if not np.all(np.isfinite(vals)):
        bad = idx.reshape(-1, d)[~np.isfinite(vals)][0]
        raise FloatingPointError(f"oracle returned a non-finite value at index {tuple(bad)}")
    return vals.reshape(rl, n1, n2, rr)


def _augment(sets: np.ndarray, sizes: Sequence[int], count: int, rng) -> np.ndarray:
    if count == 0:
        return sets
    extra = np.stack([rng.integers(0, n, size=count) for n in sizes], axis=1)
    out = np.unique(np.concatenate([sets, extra], axis=0), axis=0)
    return out


def tt_cross(oracle: Callable, mode_sizes: Sequence[int], cfg: CrossConfig = CrossConfig()) -> CrossResult:
    """Two-site maxvol cross interpolation of a black-box tensor.

    Sweeps alternate direction. At every bond the two-site block on the
    current left/right index sets is sampled, truncated by SVD to the
    requested accuracy, and maxvol picks the nested index set for the next
    bond. Sweeping stops once two consecutive approximations differ by at
    most ``cfg.tol`` in relative Frobenius norm.

    Parameters
    ----------
    oracle : callable
        Maps a ``(k, d)`` integer array of multi-indices to ``k`` values.
    mode_sizes : sequence of int
    cfg : CrossConfig

    Returns
    -------
    CrossResult
        The TT approximation plus convergence flag and sampled error.
    """
    sizes = [int(n) for n in mode_sizes]
    d = len(sizes)
    if d < 2:
        raise ValueError("cross interpolation needs at least 2 modes")
    rng = np.random.default_rng(cfg.seed)
    evals = 0
    # left[k]: multi-indices over modes < k, right[k]: over modes >= k
    left = [np.zeros((1, 0), dtype=np.int64)] + [None] * (d - 1) + [None]
    right = [None] * d + [np.zeros((1, 0), dtype=np.int64)]
    r0 = cfg.initial_rank
    seedidx = np.stack([rng.integers(0, n, size=r0) for n in sizes], axis=1)
    for k in range(1, d):
        right[k] = np.unique(seedidx[:, k:], axis=0)
    delta_rel = cfg.tol / np.sqrt(d - 1)

    prev = None
    change = np.inf
    converged = False
    sweeps = 0
    for sweep in range(cfg.max_sweeps):
        sweeps = sweep + 1
        cores = [None] * d
        if sweep % 2 == 0:
            for k in range(d - 1):
                rset = _augment(right[k + 2], sizes[k + 2 :], cfg.kick, rng) if k + 2 < d else right[d]
                blk = _evaluate(oracle, left[k], sizes[k], sizes[k + 1], rset, k, d)
                evals += blk.size
                rl, n1, n2, rr = blk.shape
                u, s, vt = np.linalg.svd(blk.reshape(rl * n1, n2 * rr), full_matrices=False)
                rk = truncation_rank(s, delta_rel * np.linalg.norm(s), cfg.max_rank)
                u = u[:, :rk]
                piv = maxvol(u)
                cores[k] = np.linalg.solve(u[piv].T, u.T).T.reshape(rl, n1, rk)
                prevl = left[k][piv // n1]
                left[k + 1] = np.concatenate([prevl, (piv % n1)[:, None]], axis=1)
                if k == d - 2:
                    last = (u[piv] * s[:rk]) @ vt[:rk]
                    cores[d - 1] = last.reshape(rk, n2, rr)
                    if rr != 1:
                        raise AssertionError("right boundary set must be a single empty index")
        else:
            for k in range(d - 2, -1, -1):
                lset = _augment(left[k], sizes[:k], cfg.kick, rng) if k > 0 else left[0]
                blk = _evaluate(oracle, lset, sizes[k], sizes[k + 1], right[k + 2], k, d)
                evals += blk.size
                rl, n1, n2, rr = blk.shape
                u, s, vt = np.linalg.svd(blk.reshape(rl * n1, n2 * rr), full_matrices=False)
                rk = truncation_rank(s, delta_rel * np.linalg.norm(s), cfg.max_rank)
                piv = maxvol(vt[:rk].T)
                cores[k + 1] = np.linalg.solve(vt[:rk][:, piv], vt[:rk]).reshape(rk, n2, rr)
                nextr = right[k + 2][piv % rr]
                right[k + 1] = np.concatenate([(piv // rr)[:, None], nextr], axis=1)
                if k == 0:
                    first = (u[:, :rk] * s[:rk]) @ vt[:rk][:, piv]
                    cores[0] = first.reshape(rl, n1, rk)
        approx = TTTensor(tuple(cores))
        if prev is not None:
            nrm = tt_norm(approx)
            diff = tt_norm(tt_add(approx, tt_scale(prev, -1.0)))
            change = diff / nrm if nrm > 0 else diff
            if change <= cfg.tol:
                converged = True
                prev = approx
                break
        prev = approx

    idx = np.stack([rng.integers(0, n, size=cfg.validation_samples) for n in sizes], axis=1)
    exact = np.asarray(oracle(idx), dtype=float)
    evals += idx.shape[0]
    approx_vals = _sample(prev, idx)
    ref = np.linalg.norm(exact)
    err = np.linalg.norm(exact - approx_vals)
    verr = err / ref if ref > 0 else err
    return CrossResult(prev, converged, sweeps, float(change), float(verr), int(evals))


def _sample(x: TTTensor, idx: np.ndarray) -> np.ndarray:
    """Entries of `x` at a batch of multi-indices."""
    v = np.ones((idx.shape[0], 1))
    for k, c in enumerate(x.cores):
        v = np.einsum("sa,asb->sb", v, c[:, idx[:, k], :])
    return v[:, 0]
