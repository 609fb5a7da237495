import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stmaxwell.chebyshev import cgl_grid, diff_matrix, second_diff
from stmaxwell.errors import MemoryCapError
from stmaxwell.kron import (
    CAP_ENV,
    KronOp,
    KronTerm,
    apply,
    assemble_first_derivative,
    assemble_laplacian,
    compose,
    row_select,
    to_dense,
)

rng = np.random.default_rng(1)


def rand_op(dims, nterms=2, rows=None):
    rows = rows or dims
    return KronOp(
        tuple(
            KronTerm(rng.standard_normal(), tuple(rng.standard_normal((m, n)) for m, n in zip(rows, dims)))
            for _ in range(nterms)
        )
    )


def mesh(grids):
    return np.meshgrid(*[g.nodes for g in grids], indexing="ij")


def test_identity_apply():
    dims = (2, 3, 4, 5)
    op = KronOp((KronTerm(1.0, tuple(np.eye(n) for n in dims)),))
    v = rng.standard_normal(dims)
    np.testing.assert_array_equal(apply(op, v), v)


def test_single_factor_acts_per_mode():
    grids = [cgl_grid(n, (0, 1)) for n in (3, 6, 4, 5)]
    a, b, c, d = (rng.standard_normal(g.n) for g in grids)
    v = np.einsum("i,j,k,l->ijkl", a, b, c, d)
    S = diff_matrix(grids[1]).entries
    op = KronOp((KronTerm(1.0, (np.eye(3), S, np.eye(4), np.eye(5))),))
    np.testing.assert_allclose(apply(op, v), np.einsum("i,j,k,l->ijkl", a, S @ b, c, d), atol=1e-12)


def test_kron_vs_dense_2x2():
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    op = KronOp((KronTerm(1.0, (A, B, np.eye(2), np.eye(2))),))
    v = rng.standard_normal((2, 2, 2, 2))
    dense = np.kron(np.kron(np.kron(A, B), np.eye(2)), np.eye(2))
    np.testing.assert_allclose(apply(op, v).ravel(), dense @ v.ravel(), atol=1e-13)


def test_row_select():
    op = rand_op((3, 3, 3, 3))
    np.testing.assert_allclose(to_dense(row_select(op, [None] * 4)), to_dense(op))
    keep = [[0, 2], [1], None, [0, 1]]
    sub = row_select(op, keep)
    idx = np.arange(81).reshape(3, 3, 3, 3)[np.ix_([0, 2], [1], [0, 1, 2], [0, 1])].ravel()
    np.testing.assert_allclose(to_dense(sub), to_dense(op)[idx], atol=1e-13)
    v = rng.standard_normal((3, 3, 3, 3))
    np.testing.assert_allclose(apply(sub, v), apply(op, v)[np.ix_([0, 2], [1], [0, 1, 2], [0, 1])], atol=1e-13)


def test_row_select_of_identity_extracts_interior():
    dims = (4, 5, 5, 5)
    eye = KronOp((KronTerm(1.0, tuple(np.eye(n) for n in dims)),))
    keep = [np.arange(1, 4)] + [np.arange(1, 4)] * 3
    v = rng.standard_normal(dims)
    np.testing.assert_array_equal(apply(row_select(eye, keep), v), v[np.ix_(*keep)])


def test_compose_and_transpose():
    a, b = rand_op((2, 3, 2, 2)), rand_op((2, 2, 3, 2), rows=(2, 3, 2, 2))
    np.testing.assert_allclose(to_dense(compose(a, b)), to_dense(a) @ to_dense(b), atol=1e-12)
    np.testing.assert_allclose(to_dense(a.transpose()), to_dense(a).T, atol=1e-13)
    np.testing.assert_allclose(to_dense(a - a.scaled(0.5)), 0.5 * to_dense(a), atol=1e-13)


def test_laplacian_examples():
    grids = [cgl_grid(n, (-1, 1)) for n in (3, 9, 9, 9)]
    S = [second_diff(diff_matrix(g)) for g in grids[1:]]
    lap = assemble_laplacian(*S, time_dim=3)
    assert len(lap.terms) == 3
    T, X, Y, Z = mesh(grids)
    np.testing.assert_allclose(apply(lap, X**2 + Y**2 + Z**2), 6.0, atol=1e-9)
    assert np.abs(apply(lap, np.ones(lap.in_shape))).max() < 1e-9
    grids = [cgl_grid(n, (0, 1)) for n in (3, 13, 4, 4)]
    S = [second_diff(diff_matrix(g)) for g in grids[1:]]
    T, X, Y, Z = mesh(grids)
    np.testing.assert_allclose(
        apply(assemble_laplacian(*S, time_dim=3), np.sin(np.pi * X)), -np.pi**2 * np.sin(np.pi * X), atol=1e-7
    )


def test_first_derivative_examples():
    grids = [cgl_grid(n) for n in (5, 4, 6, 3)]
    dims = tuple(g.n for g in grids)
    T, X, Y, Z = mesh(grids)
    dt = assemble_first_derivative("t", diff_matrix(grids[0]), dims)
    assert np.abs(apply(dt, np.ones(dims))).max() < 1e-12
    dy = assemble_first_derivative("y", diff_matrix(grids[2]), dims)
    np.testing.assert_allclose(apply(dy, Y**2), 2 * Y, atol=1e-10)
    with pytest.raises(ValueError):
        assemble_first_derivative("x", diff_matrix(grids[2]), dims)
    d = rng.standard_normal((4, 4))
    op = assemble_first_derivative(1, d, dims)
    dense = np.kron(np.kron(np.kron(np.eye(5), d), np.eye(6)), np.eye(3))
    np.testing.assert_allclose(to_dense(op), dense)


def test_shape_mismatch():
    op = rand_op((2, 2, 2, 2))
    with pytest.raises(ValueError):
        apply(op, np.zeros((2, 2, 2, 3)))


def test_memory_cap(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "1")
    op = KronOp((KronTerm(1.0, tuple(np.eye(n) for n in (20, 20, 20, 20))),))
    with pytest.raises(MemoryCapError):
        to_dense(op)


@settings(max_examples=30, deadline=None)
@given(
    dims=st.tuples(*[st.integers(1, 4)] * 4),
    nterms=st.integers(1, 3),
    alpha=st.floats(-2, 2),
    beta=st.floats(-2, 2),
    seed=st.integers(0, 2**32 - 1),
)
def test_apply_matches_dense_and_is_linear(dims, nterms, alpha, beta, seed):
    r = np.random.default_rng(seed)
    op = KronOp(
        tuple(KronTerm(r.standard_normal(), tuple(r.standard_normal((n, n)) for n in dims)) for _ in range(nterms))
    )
    u, v = r.standard_normal(dims), r.standard_normal(dims)
    dense = to_dense(op)
    np.testing.assert_allclose(apply(op, u).ravel(), dense @ u.ravel(), atol=1e-12 * (1 + np.abs(dense).sum()))
    lhs = apply(op, alpha * u + beta * v)
    rhs = alpha * apply(op, u) + beta * apply(op, v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * (1 + np.abs(dense).sum()))
