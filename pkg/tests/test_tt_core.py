import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stmaxwell.chebyshev import cgl_grid, diff_matrix, second_diff
from stmaxwell.errors import MemoryCapError
from stmaxwell.kron import CAP_ENV, KronOp, KronTerm, assemble_laplacian, to_dense
from stmaxwell.tt import (
    TTMatrix,
    TTTensor,
    apply_tt,
    tt_add,
    tt_dot,
    tt_embed,
    tt_from_full,
    tt_matrix_from_kron,
    tt_mode_product,
    tt_norm,
    tt_random,
    tt_rank1,
    tt_round,
    tt_scale,
    tt_zeros,
)

rng = np.random.default_rng(7)


def rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def test_core_shape_validation():
    with pytest.raises(ValueError):
        TTTensor((np.ones((1, 2, 2)), np.ones((3, 2, 1))))
    with pytest.raises(ValueError):
        TTTensor((np.ones((2, 2, 1)),))
    with pytest.raises(ValueError):
        TTTensor(())


def test_cores_are_immutable():
    x = tt_random((2, 3, 2, 2), (2, 2, 2), rng)
    with pytest.raises(ValueError):
        x.cores[0][0, 0, 0] = 1.0


def test_separable_and_zero_tensors_have_rank_one():
    vecs = [rng.standard_normal(n) for n in (3, 4, 5, 6)]
    t = np.einsum("i,j,k,l->ijkl", *vecs)
    x = tt_from_full(t, 1e-14)
    assert x.ranks == [1, 1, 1]
    assert rel(x.full(), t) < 1e-14
    z = tt_from_full(np.zeros((3, 3, 3, 3)), 0.0)
    assert z.ranks == [1, 1, 1]
    assert all(not c.any() for c in z.cores)


def test_round_trip_random():
    t = rng.standard_normal((5, 5, 5, 5))
    assert rel(tt_from_full(t, 1e-12).full(), t) <= 1e-11
    assert rel(tt_from_full(t, 0.0).full(), t) <= 1e-12


def test_rank_one_of_ones_and_single_entries():
    x = tt_rank1([np.ones(n) for n in (2, 3, 4, 5)])
    np.testing.assert_array_equal(x.full(), np.ones((2, 3, 4, 5)))
    y = tt_random((3, 4, 3, 2), (2, 3, 2), rng)
    f = y.full()
    for idx in [(0, 0, 0, 0), (2, 3, 1, 1), (1, 2, 2, 0)]:
        chain = y.cores[0][:, idx[0]] @ y.cores[1][:, idx[1]] @ y.cores[2][:, idx[2]] @ y.cores[3][:, idx[3]]
        assert abs(f[idx] - chain[0, 0]) < 1e-13
        assert abs(y.element(idx) - chain[0, 0]) < 1e-13


def test_full_respects_cap(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "1")
    x = tt_zeros((64, 64, 64, 64))
    with pytest.raises(MemoryCapError):
        x.full()


def test_round():
    x = tt_rank1([rng.standard_normal(n) for n in (3, 4, 5, 6)])
    assert tt_round(x, 1e-14).ranks == [1, 1, 1]
    s = tt_add(x, x)
    assert s.ranks == [2, 2, 2]
    r = tt_round(s, 1e-14)
    assert r.ranks == [1, 1, 1]
    assert rel(r.full(), 2 * x.full()) < 1e-13
    y = tt_random((4, 5, 4, 3), (3, 4, 3), rng)
    z = tt_round(y, 1e-8)
    assert all(a <= b for a, b in zip(z.ranks, y.ranks))
    assert rel(z.full(), y.full()) <= 1e-8
    assert tt_round(y, 0.0, max_rank=2).ranks == [2, 2, 2]


def test_arithmetic():
    x = tt_random((4, 4, 4, 4), (2, 3, 2), rng)
    y = tt_random((4, 4, 4, 4), (3, 2, 2), rng)
    assert tt_add(x, y).ranks == [5, 5, 4]
    assert tt_norm(tt_round(x + tt_scale(x, -1.0), 1e-12)) <= 1e-12 * tt_norm(x)
    assert abs(tt_dot(x, x) - tt_norm(x) ** 2) <= 1e-12 * tt_norm(x) ** 2
    assert abs(tt_dot(x, y) - np.vdot(x.full(), y.full())) <= 1e-12 * tt_norm(x) * tt_norm(y)
    np.testing.assert_allclose((x - 2.0 * y).full(), x.full() - 2 * y.full(), atol=1e-12)
    np.testing.assert_allclose((-x).full(), -x.full())
    with pytest.raises(ValueError):
        tt_add(x, tt_zeros((4, 4, 4, 3)))


def test_tt_matrix_from_kron():
    one = KronOp((KronTerm(2.0, tuple(rng.standard_normal((n, n)) for n in (2, 3, 2, 3))),))
    a = tt_matrix_from_kron(one)
    assert a.ranks == [1, 1, 1]
    np.testing.assert_allclose(a.full(), to_dense(one), atol=1e-13)
    grids = [cgl_grid(n) for n in (3, 5, 5, 5)]
    lap = assemble_laplacian(*(second_diff(diff_matrix(g)) for g in grids[1:]), time_dim=3)
    al = tt_matrix_from_kron(lap)
    assert all(r <= 3 for r in al.ranks)
    x = tt_random(lap.in_shape, (2, 2, 2), rng)
    got = apply_tt(al, x).full().ravel()
    ref = to_dense(lap) @ x.full().ravel()
    assert rel(got, ref) <= 1e-11


def test_apply_tt():
    dims = (3, 3, 3, 3)
    eye = TTMatrix(tuple(np.eye(n).reshape(1, n, n, 1) for n in dims))
    x = tt_random(dims, (2, 2, 2), rng)
    assert rel(tt_round(eye @ x, 1e-14).full(), x.full()) < 1e-14
    a1 = TTMatrix(tuple(rng.standard_normal((1, n, n, 1)) for n in dims))
    v1 = tt_rank1([rng.standard_normal(n) for n in dims])
    assert apply_tt(a1, v1).ranks == [1, 1, 1]
    a = TTMatrix(tuple(rng.standard_normal(s) for s in [(1, 3, 3, 2), (2, 3, 3, 2), (2, 3, 3, 2), (2, 3, 3, 1)]))
    y = apply_tt(a, x)
    assert y.ranks == [4, 4, 4]
    assert rel(y.full().ravel(), a.full() @ x.full().ravel()) <= 1e-11
    np.testing.assert_allclose(a.transpose().full(), a.full().T)
    with pytest.raises(ValueError):
        apply_tt(a, tt_zeros((3, 3, 3, 2)))


def test_mode_product_and_embed():
    x = tt_random((2, 3, 4, 2), (2, 2, 2), rng)
    m = rng.standard_normal((5, 3))
    np.testing.assert_allclose(
        tt_mode_product(x, [None, m, None, None]).full(), np.einsum("ij,ajbc->aibc", m, x.full()), atol=1e-13
    )
    e = tt_embed(x, [None, [0, 2, 4], None, [1, 3]], (2, 5, 4, 4)).full()
    ref = np.zeros((2, 5, 4, 4))
    ref[np.ix_(range(2), [0, 2, 4], range(4), [1, 3])] = x.full()
    np.testing.assert_allclose(e, ref, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(
    dims=st.tuples(*[st.integers(1, 6)] * 4),
    rank=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
)
def test_round_trip_and_rank_bound(dims, rank, seed):
    r = np.random.default_rng(seed)
    t = tt_random(dims, (rank,) * 3, r).full() + 1e-3 * r.standard_normal(dims)
    x = tt_from_full(t, 0.0)
    assert rel(x.full(), t) <= 1e-12
    for k, rk in enumerate(x.ranks):
        assert rk <= min(np.prod(dims[: k + 1]), np.prod(dims[k + 1 :]))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), tol=st.sampled_from([1e-2, 1e-5, 1e-9]))
def test_round_error_bound(seed, tol):
    r = np.random.default_rng(seed)
    x = tt_random((3, 4, 4, 3), (3, 4, 3), r)
    y = tt_round(x, tol)
    assert rel(y.full(), x.full()) <= tol * (1 + 1e-8)
