import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fgmsc.subspace import init_w, update_w, w_objective


def test_init_range():
    W = init_w(3, seed=0)
    assert W.min() >= 0.3 and W.max() <= 1.1 / 3
    np.testing.assert_array_equal(W, init_w(3, seed=0))
    np.testing.assert_array_equal(W, W.T)
    assert (W > 0).all()


def test_objective_hand_values():
    X = np.random.default_rng(1).random((3, 4))
    zero = np.zeros((4, 4))
    assert w_objective(X, zero, zero, 0.5) == pytest.approx((X ** 2).sum())
    W = np.random.default_rng(2).random((4, 4))
    assert w_objective(np.zeros((3, 4)), W, W, 0.5) == pytest.approx(np.abs(W).sum())
    assert w_objective(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)), 0.5) == 1.0


def test_scalar_step():
    W = update_w(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)), 0.5,
                 inner_iters=1, tol=0)
    assert W[0, 0] == 0.5


def test_zero_data_decays():
    W0 = init_w(4, 3)
    W, trace = update_w(np.zeros((2, 4)), W0, np.zeros((4, 4)), 0.1,
                        inner_iters=20, tol=0, return_trace=True)
    assert W.max() < W0.max()
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_rejects_negative_and_bad_alpha():
    X = np.ones((2, 3))
    with pytest.raises(ValueError):
        update_w(-X, init_w(3, 0), np.zeros((3, 3)), 0.1)
    with pytest.raises(ValueError):
        update_w(X, init_w(3, 0), np.zeros((3, 3)), 0.0)
    with pytest.raises(ValueError):
        update_w(X, init_w(4, 0), np.zeros((3, 3)), 0.1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12), st.integers(2, 12),
       st.floats(1e-3, 10.0))
def test_monotone(seed, d, n, alpha):
    rng = np.random.default_rng(seed)
    X = rng.random((d, n))
    Z = rng.random((n, n))  # need not be symmetric
    _, trace = update_w(X, init_w(n, seed), Z, alpha, inner_iters=30, tol=0,
                        return_trace=True)
    # stops early only once a step changes nothing
    assert len(trace) == 31 or trace[-1] == trace[-2]
    assert all(b <= a + 1e-10 for a, b in zip(trace, trace[1:]))


def test_trace_matches_objective():
    rng = np.random.default_rng(4)
    X, Z = rng.random((3, 5)), rng.random((5, 5))
    W, trace = update_w(X, init_w(5, 0), Z, 0.3, inner_iters=5, tol=0,
                        return_trace=True)
    assert trace[-1] == pytest.approx(w_objective(X, W, Z, 0.3), rel=1e-12)


def test_low_rank_gram_same_result():
    # few features trigger the factored Gram path; compare with the dense one
    rng = np.random.default_rng(5)
    X = rng.random((2, 30))
    Z = rng.random((30, 30))
    W = update_w(X, init_w(30, 1), Z, 0.05, inner_iters=10, tol=0)
    Xd = np.vstack([X, np.zeros((20, 30))])  # same K, dense path
    Wd = update_w(Xd, init_w(30, 1), Z, 0.05, inner_iters=10, tol=0)
    np.testing.assert_allclose(W, Wd, rtol=1e-10)


def test_stays_non_negative_and_symmetric():
    rng = np.random.default_rng(6)
    X = rng.random((4, 8))
    W = update_w(X, init_w(8, 2), rng.random((8, 8)), 0.01, inner_iters=50, tol=0)
    assert (W >= 0).all()
    np.testing.assert_allclose(W, W.T, rtol=1e-10, atol=1e-14)
