"""Kronecker-structured operators on 4-D tensors with axes (t, x, y, z).

A :class:`KronOp` is a short sum of terms ``s * (F_t kron F_x kron F_y kron F_z)``.
Vectorisation is C-order, so ``t`` is the slowest index and the dense matrix
of a term is ``s * np.kron(np.kron(np.kron(F_t, F_x), F_y), F_z)``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MemoryCapError

__all__ = [
    "AXES",
    "KronTerm",
    "KronOp",
    "apply",
    "row_select",
    "compose",
    "to_dense",
    "assemble_laplacian",
    "assemble_first_derivative",
    "dense_cap_bytes",
    "mode_product",
]

AXES = ("t", "x", "y", "z")
CAP_ENV = "STMAXWELL_DENSE_CAP_MB"
DEFAULT_CAP_MB = 1024.0


def dense_cap_bytes() -> float:
    """Byte budget for dense fallbacks, read from ``STMAXWELL_DENSE_CAP_MB``."""
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP_MB * 2**20
    try:
        mb = float(raw)
    except ValueError as exc:
        raise ValueError(f"{CAP_ENV} must be a number of megabytes, got {raw!r}") from exc
    if mb <= 0:
        raise ValueError(f"{CAP_ENV} must be positive")
    return mb * 2**20


def check_cap(nbytes: float, what: str) -> None:
    cap = dense_cap_bytes()
    if nbytes > cap:
        raise MemoryCapError(
            f"{what} needs {nbytes / 2**20:.1f} MB, above the {cap / 2**20:.1f} MB cap "
            f"(set {CAP_ENV} to raise it)"
        )


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        return AXES.index(axis)
    axis = int(axis)
    if not 0 <= axis < 4:
        raise ValueError(f"axis must be one of {AXES} or 0..3, got {axis}")
    return axis


@dataclass(frozen=True, eq=False)
class KronTerm:
    scalar: float
    factors: tuple

    def __post_init__(self):
        if len(self.factors) != 4:
            raise ValueError(f"a term needs 4 factors, got {len(self.factors)}")
        fs = []
        for f in self.factors:
            f = np.array(f, dtype=float)
            if f.ndim != 2:
                raise ValueError("every factor must be a 2-D matrix")
            f.setflags(write=False)
            fs.append(f)
        object.__setattr__(self, "factors", tuple(fs))
        object.__setattr__(self, "scalar", float(self.scalar))
        ident = tuple(f.shape[0] == f.shape[1] and np.array_equal(f, np.eye(f.shape[0])) for f in fs)
        object.__setattr__(self, "_identity", ident)

    @property
    def in_shape(self) -> tuple:
        return tuple(f.shape[1] for f in self.factors)

    @property
    def out_shape(self) -> tuple:
        return tuple(f.shape[0] for f in self.factors)


@dataclass(frozen=True, eq=False)
class KronOp:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("a KronOp needs at least one term")
        if any(t.in_shape != terms[0].in_shape or t.out_shape != terms[0].out_shape for t in terms):
            raise ValueError("all terms must share in_shape and out_shape")
        object.__setattr__(self, "terms", terms)

    @property
    def in_shape(self) -> tuple:
        return self.terms[0].in_shape

    @property
    def out_shape(self) -> tuple:
        return self.terms[0].out_shape

    def __add__(self, other: "KronOp") -> "KronOp":
        return KronOp(self.terms + other.terms)

    def __neg__(self) -> "KronOp":
        return self.scaled(-1.0)

    def __sub__(self, other: "KronOp") -> "KronOp":
        return self + (-other)

    def scaled(self, alpha: float) -> "KronOp":
        return KronOp(tuple(KronTerm(alpha * t.scalar, t.factors) for t in self.terms))

    def transpose(self) -> "KronOp":
        return KronOp(tuple(KronTerm(t.scalar, tuple(f.T for f in t.factors)) for t in self.terms))

    def __call__(self, v):
        return apply(self, v)


def mode_product(v: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    """Multiply the matrix `m` into tensor `v` along `axis`."""
    return np.moveaxis(np.tensordot(m, v, axes=(1, axis)), 0, axis)


def apply(op: KronOp, v: np.ndarray) -> np.ndarray:
    """Matrix-free ``op @ vec(v)`` returned in tensor form."""
    v = np.asarray(v, dtype=float)
    if v.shape != op.in_shape:
        raise ValueError(f"input shape {v.shape} does not match operator in_shape {op.in_shape}")
    out = np.zeros(op.out_shape)
    for term in op.terms:
        if term.scalar == 0.0:
            continue
        w = v
        for ax, (f, ident) in enumerate(zip(term.factors, term._identity)):
            if not ident:
                w = mode_product(w, f, ax)
        out += term.scalar * w
    return out


def row_select(op: KronOp, keep: Sequence) -> KronOp:
    """Keep the listed output rows per axis; `None` keeps the whole axis."""
    if len(keep) != 4:
        raise ValueError("row_select needs one index set per axis")
    terms = []
    for term in op.terms:
        fs = []
        for f, k in zip(term.factors, keep):
            if k is None:
                fs.append(f)
                continue
            k = np.asarray(k, dtype=int)
            if k.size == 0:
                raise ValueError("row selection would be empty")
            if k.min() < 0 or k.max() >= f.shape[0]:
                raise IndexError(f"row index out of range for a factor with {f.shape[0]} rows")
            fs.append(f[k])
        terms.append(KronTerm(term.scalar, tuple(fs)))
    return KronOp(tuple(terms))


def compose(a: KronOp, b: KronOp) -> KronOp:
    """The operator ``a @ b``; term count is the product of the two."""
    if a.in_shape != b.out_shape:
        raise ValueError(f"cannot compose: {a.in_shape} vs {b.out_shape}")
    terms = [
        KronTerm(ta.scalar * tb.scalar, tuple(fa @ fb for fa, fb in zip(ta.factors, tb.factors)))
        for ta in a.terms
        for tb in b.terms
    ]
    return KronOp(tuple(terms))


def to_dense(op: KronOp) -> np.ndarray:
    """Explicit matrix of `op`; refused when it would exceed the dense cap."""
    m = int(np.prod(op.out_shape))
    n = int(np.prod(op.in_shape))
    check_cap(8.0 * m * n, f"dense {m}x{n} operator")
    out = np.zeros((m, n))
    for term in op.terms:
        k = term.factors[0]
        for f in term.factors[1:]:
            k = np.kron(k, f)
        out += term.scalar * k
    return out


def _eye_like(n: int) -> np.ndarray:
    return np.eye(n)


def assemble_laplacian(gx: np.ndarray, gy: np.ndarray, gz: np.ndarray, time_dim: int) -> KronOp:
    """``I_t kron (S_xx (+) S_yy (+) S_zz)`` as three terms."""
    gx, gy, gz = (np.asarray(g, dtype=float) for g in (gx, gy, gz))
    for g in (gx, gy, gz):
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("second-derivative factors must be square")
    It, Ix, Iy, Iz = (_eye_like(n) for n in (time_dim, gx.shape[0], gy.shape[0], gz.shape[0]))
    return KronOp(
        (
            KronTerm(1.0, (It, gx, Iy, Iz)),
            KronTerm(1.0, (It, Ix, gy, Iz)),
            KronTerm(1.0, (It, Ix, Iy, gz)),
        )
    )


def assemble_first_derivative(axis, d, dims: Sequence[int]) -> KronOp:
    """Single term with `d` on `axis` and identities elsewhere."""
    ax = _axis_index(axis)
    d = np.asarray(getattr(d, "entries", d), dtype=float)
    dims = tuple(int(n) for n in dims)
    if len(dims) != 4:
        raise ValueError("dims must have 4 entries")
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != dims[ax]:
        raise ValueError(f"derivative matrix {d.shape} does not match axis {AXES[ax]} of size {dims[ax]}")
    factors = [_eye_like(n) for n in dims]
    factors[ax] = d
    return KronOp((KronTerm(1.0, tuple(factors)),))
