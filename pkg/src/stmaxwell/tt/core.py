"""Tensor-train tensors and matrices.

A TT tensor with cores ``G_k`` of shape ``(r_{k-1}, n_k, r_k)`` represents

    X[i_1, ..., i_d] = G_1[:, i_1, :] @ G_2[:, i_2, :] @ ... @ G_d[:, i_d, :]

with ``r_0 = r_d = 1``. A TT matrix has cores ``(r_{k-1}, m_k, n_k, r_k)``
carrying a row and a column index per mode. Row-major linearisation is
used throughout, matching :mod:`stmaxwell.kron`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from ..kron import KronOp, check_cap

__all__ = [
    "TTTensor",
    "TTMatrix",
    "tt_from_full",
    "full",
    "tt_round",
    "tt_add",
    "tt_scale",
    "tt_dot",
    "tt_norm",
    "tt_matrix_from_kron",
    "apply_tt",
    "tt_rank1",
    "tt_zeros",
    "tt_random",
    "tt_mode_product",
    "tt_embed",
    "truncation_rank",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TTTensor:
    cores: tuple

    def __post_init__(self):
        cores = tuple(_freeze(c) for c in self.cores)
        if not cores:
            raise ValueError("a TT tensor needs at least one core")
        if any(c.ndim != 3 for c in cores):
            raise ValueError("TT cores must be 3-D arrays (r_prev, n, r_next)")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise ValueError("boundary ranks must be 1")
        for a, b in zip(cores[:-1], cores[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError(f"core shapes do not chain: {a.shape} -> {b.shape}")
        object.__setattr__(self, "cores", cores)

    @property
    def d(self) -> int:
        return len(self.cores)

    @property
    def mode_sizes(self) -> tuple:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> list:
        """Interior ranks ``[r_1, ..., r_{d-1}]``."""
        return [c.shape[2] for c in self.cores[:-1]]

    @property
    def nbytes(self) -> int:
        return sum(c.nbytes for c in self.cores)

    def element(self, index: Sequence[int]) -> float:
        v = np.ones((1, 1))
        for c, i in zip(self.cores, index):
            v = v @ c[:, i, :]
        return float(v[0, 0])

    def full(self) -> np.ndarray:
        return full(self)

    def round(self, tol: float, max_rank: int | None = None) -> "TTTensor":
        return tt_round(self, tol, max_rank)

    def norm(self) -> float:
        return tt_norm(self)

    def __add__(self, other: "TTTensor") -> "TTTensor":
        return tt_add(self, other)

    def __sub__(self, other: "TTTensor") -> "TTTensor":
        return tt_add(self, tt_scale(other, -1.0))

    def __neg__(self) -> "TTTensor":
        return tt_scale(self, -1.0)

    def __mul__(self, alpha: float) -> "TTTensor":
        return tt_scale(self, alpha)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TTMatrix:
    cores: tuple

    def __post_init__(self):
        cores = tuple(_freeze(c) for c in self.cores)
        if not cores:
            raise ValueError("a TT matrix needs at least one core")
        if any(c.ndim != 4 for c in cores):
            raise ValueError("TT-matrix cores must be 4-D arrays (r_prev, m, n, r_next)")
        if cores[0].shape[0] != 1 or cores[-1].shape[3] != 1:
            raise ValueError("boundary ranks must be 1")
        for a, b in zip(cores[:-1], cores[1:]):
            if a.shape[3] != b.shape[0]:
                raise ValueError(f"core shapes do not chain: {a.shape} -> {b.shape}")
        object.__setattr__(self, "cores", cores)

    @property
    def d(self) -> int:
        return len(self.cores)

    @property
    def row_sizes(self) -> tuple:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def col_sizes(self) -> tuple:
        return tuple(c.shape[2] for c in self.cores)

    @property
    def ranks(self) -> list:
        return [c.shape[3] for c in self.cores[:-1]]

    def as_tensor(self) -> TTTensor:
        """View with row and column index fused per mode."""
        return TTTensor(tuple(c.reshape(c.shape[0], -1, c.shape[3]) for c in self.cores))

    def round(self, tol: float, max_rank: int | None = None) -> "TTMatrix":
        t = tt_round(self.as_tensor(), tol, max_rank)
        return TTMatrix(
            tuple(c.reshape(c.shape[0], m, n, c.shape[2]) for c, m, n in zip(t.cores, self.row_sizes, self.col_sizes))
        )

    def transpose(self) -> "TTMatrix":
        return TTMatrix(tuple(c.transpose(0, 2, 1, 3) for c in self.cores))

    def full(self) -> np.ndarray:
        """Dense matrix of shape ``(prod(row_sizes), prod(col_sizes))``."""
        m, n = int(np.prod(self.row_sizes)), int(np.prod(self.col_sizes))
        check_cap(8.0 * m * n, f"dense {m}x{n} TT matrix")
        acc = np.ones((1, 1, 1))
        for c in self.cores:
            p, q, _ = acc.shape
            acc = np.einsum("ijr,rmns->imjns", acc, c).reshape(p * c.shape[1], q * c.shape[2], c.shape[3])
        return acc[:, :, 0]

    def __matmul__(self, x: TTTensor) -> TTTensor:
        return apply_tt(self, x)


def truncation_rank(s: np.ndarray, delta: float, max_rank: int | None = None) -> int:
    """Smallest rank whose discarded singular-value tail has norm <= `delta`."""
    if s.size == 0:
        return 1
    tail = np.sqrt(np.cumsum((s**2)[::-1]))[::-1]  # tail[r] = ||s[r:]||
    ok = np.nonzero(tail <= delta)[0]
    r = int(ok[0]) if ok.size else s.size
    r = max(r, 1)
    if max_rank is not None:
        r = min(r, max_rank)
    return r


def _svd(a: np.ndarray):
    try:
        return linalg.svd(a, full_matrices=False, lapack_driver="gesdd")
    except linalg.LinAlgError:
        return linalg.svd(a, full_matrices=False, lapack_driver="gesvd")


def tt_from_full(t: np.ndarray, tol: float = 0.0, max_rank: int | None = None) -> TTTensor:
    """TT-SVD with ``||full(result) - t||_F <= tol * ||t||_F``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    t = np.asarray(t, dtype=float)
    d = t.ndim
    if d == 0:
        raise ValueError("need at least a 1-D tensor")
    shape = t.shape
    if not t.any():
        return tt_zeros(shape)
    delta = tol * np.linalg.norm(t) / np.sqrt(max(d - 1, 1))
    cores = []
    r = 1
    c = t
    for k in range(d - 1):
        c = c.reshape(r * shape[k], -1)
        u, s, vt = _svd(c)
        rk = truncation_rank(s, delta, max_rank)
        cores.append(u[:, :rk].reshape(r, shape[k], rk))
        c = s[:rk, None] * vt[:rk]
        r = rk
    cores.append(c.reshape(r, shape[-1], 1))
    return TTTensor(tuple(cores))


def full(x: TTTensor) -> np.ndarray:
    """Materialise `x`; refused above the dense memory cap."""
    size = int(np.prod(x.mode_sizes))
    check_cap(8.0 * size, f"full tensor of shape {x.mode_sizes}")
    acc = x.cores[0].reshape(x.cores[0].shape[1], -1)
    for c in x.cores[1:]:
        acc = (acc @ c.reshape(c.shape[0], -1)).reshape(-1, c.shape[2])
    return acc.reshape(x.mode_sizes)


def _right_orthogonalize(cores: list) -> list:
    """Make cores 1..d-1 right-orthonormal; the norm ends up in core 0."""
    cores = [np.array(c) for c in cores]
    for k in range(len(cores) - 1, 0, -1):
        r0, n, r1 = cores[k].shape
        q, r = linalg.qr(cores[k].reshape(r0, n * r1).T, mode="economic")
        cores[k] = q.T.reshape(-1, n, r1)
        cores[k - 1] = np.tensordot(cores[k - 1], r.T, axes=(2, 0))
    return cores


def tt_round(x: TTTensor, tol: float, max_rank: int | None = None) -> TTTensor:
    """Recompress `x` to relative Frobenius accuracy `tol`."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    d = x.d
    if d == 1:
        return x
    cores = _right_orthogonalize(list(x.cores))
    nrm = np.linalg.norm(cores[0])
    if nrm == 0.0:
        return tt_zeros(x.mode_sizes)
    delta = tol * nrm / np.sqrt(d - 1)
    for k in range(d - 1):
        r0, n, r1 = cores[k].shape
        u, s, vt = _svd(cores[k].reshape(r0 * n, r1))
        rk = truncation_rank(s, delta, max_rank)
        cores[k] = u[:, :rk].reshape(r0, n, rk)
        cores[k + 1] = np.tensordot(s[:rk, None] * vt[:rk], cores[k + 1], axes=(1, 0))
    return TTTensor(tuple(cores))


def _check_same_modes(x: TTTensor, y: TTTensor) -> None:
    if x.mode_sizes != y.mode_sizes:
        raise ValueError(f"mode sizes differ: {x.mode_sizes} vs {y.mode_sizes}")


def tt_add(x: TTTensor, y: TTTensor) -> TTTensor:
    """Exact sum; ranks add."""
    _check_same_modes(x, y)
    d = x.d
    if d == 1:
        return TTTensor((x.cores[0] + y.cores[0],))
    cores = []
    for k, (a, b) in enumerate(zip(x.cores, y.cores)):
        if k == 0:
            c = np.concatenate([a, b], axis=2)
        elif k == d - 1:
            c = np.concatenate([a, b], axis=0)
        else:
            c = np.zeros((a.shape[0] + b.shape[0], a.shape[1], a.shape[2] + b.shape[2]))
            c[: a.shape[0], :, : a.shape[2]] = a
            c[a.shape[0] :, :, a.shape[2] :] = b
        cores.append(c)
    return TTTensor(tuple(cores))


def tt_scale(x: TTTensor, alpha: float) -> TTTensor:
    cores = list(x.cores)
    cores[0] = alpha * cores[0]
    return TTTensor(tuple(cores))


def tt_dot(x: TTTensor, y: TTTensor) -> float:
    """Inner product by left-to-right core contraction."""
    _check_same_modes(x, y)
    m = np.ones((1, 1))
    for a, b in zip(x.cores, y.cores):
        m = np.einsum("ab,aic,bid->cd", m, a, b, optimize=True)
    return float(m[0, 0])


def tt_norm(x: TTTensor) -> float:
    """Frobenius norm through a QR sweep (no cancellation)."""
    g = x.cores[0]
    for c in x.cores[1:]:
        r0, n, r1 = g.shape
        r = linalg.qr(g.reshape(r0 * n, r1), mode="r")[0]
        r = r[: min(r.shape), :]
        g = np.tensordot(r, c, axes=(1, 0))
    return float(np.linalg.norm(g))


def tt_matrix_from_kron(op: KronOp) -> TTMatrix:
    """Each Kronecker term becomes a rank-1 TT matrix; terms are stacked."""
    nt = len(op.terms)
    d = 4
    cores = []
    for k in range(d):
        m, n = op.out_shape[k], op.in_shape[k]
        r0 = 1 if k == 0 else nt
        r1 = 1 if k == d - 1 else nt
        c = np.zeros((r0, m, n, r1))
        for j, term in enumerate(op.terms):
            f = term.factors[k] * (term.scalar if k == 0 else 1.0)
            c[0 if k == 0 else j, :, :, 0 if k == d - 1 else j] = f
        cores.append(c)
    return TTMatrix(tuple(cores))


def apply_tt(a: TTMatrix, x: TTTensor) -> TTTensor:
    """Core-wise product; output ranks are products of input ranks."""
    if a.col_sizes != x.mode_sizes:
        raise ValueError(f"TT matrix columns {a.col_sizes} do not match tensor modes {x.mode_sizes}")
    cores = []
    for ac, xc in zip(a.cores, x.cores):
        ra0, m, _, ra1 = ac.shape
        rx0, _, rx1 = xc.shape
        cores.append(np.einsum("aijb,xjy->axiby", ac, xc, optimize=True).reshape(ra0 * rx0, m, ra1 * rx1))
    return TTTensor(tuple(cores))


def tt_rank1(vectors: Sequence[np.ndarray]) -> TTTensor:
    return TTTensor(tuple(np.asarray(v, dtype=float).reshape(1, -1, 1) for v in vectors))


def tt_zeros(mode_sizes: Sequence[int]) -> TTTensor:
    return TTTensor(tuple(np.zeros((1, n, 1)) for n in mode_sizes))


def tt_random(mode_sizes: Sequence[int], ranks: Sequence[int], rng=None) -> TTTensor:
    rng = np.random.default_rng(rng)
    rs = [1, *ranks, 1]
    if len(rs) != len(mode_sizes) + 1:
        raise ValueError("need d-1 interior ranks")
    return TTTensor(tuple(rng.standard_normal((rs[k], n, rs[k + 1])) for k, n in enumerate(mode_sizes)))


def tt_mode_product(x: TTTensor, mats: Sequence) -> TTTensor:
    """Apply one matrix per mode (`None` = identity); ranks are unchanged."""
    if len(mats) != x.d:
        raise ValueError("need one matrix per mode")
    cores = []
    for c, m in zip(x.cores, mats):
        if m is None:
            cores.append(c)
            continue
        m = np.asarray(m, dtype=float)
        if m.shape[1] != c.shape[1]:
            raise ValueError(f"matrix {m.shape} does not match mode size {c.shape[1]}")
        cores.append(np.einsum("ij,ajb->aib", m, c))
    return TTTensor(tuple(cores))


def tt_embed(x: TTTensor, positions: Sequence, full_sizes: Sequence[int]) -> TTTensor:
    """Scatter mode `k` of `x` into index set ``positions[k]`` of a longer mode.

    Entries outside the listed positions are zero. `None` keeps a mode as is.
    """
    mats = []
    for n_small, pos, n_full in zip(x.mode_sizes, positions, full_sizes):
        if pos is None:
            mats.append(None)
            continue
        pos = np.asarray(pos, dtype=int)
        if pos.size != n_small:
            raise ValueError("positions must list one target index per mode entry")
        p = np.zeros((n_full, n_small))
        p[pos, np.arange(n_small)] = 1.0
        mats.append(p)
    return tt_mode_product(x, mats)
