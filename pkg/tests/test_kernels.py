import numpy as np
import pytest

from spectral_bench import kernels
from helpers import naive_conv1d, naive_maxpool


def _native_or_skip():
    try:
        return kernels.get_backend("native")
    except ImportError:
        pytest.skip("native kernels not built")


def test_conv_forward_matches_naive_oracle():
    gen = np.random.default_rng(0)
    x = gen.standard_normal((1, 2, 7))
    w = gen.standard_normal((3, 2, 3))
    b = gen.standard_normal(3)
    got = kernels.conv1d_forward(x, w, b)
    assert got.shape == (1, 3, 5)
    assert np.max(np.abs(got - naive_conv1d(x, w, b))) <= 1e-12


def test_maxpool_matches_naive_oracle():
    gen = np.random.default_rng(1)
    x = gen.standard_normal((2, 3, 11))
    y, arg = kernels.maxpool1d_forward(x, 3)
    assert y.shape == (2, 3, 3)
    assert np.array_equal(y, naive_maxpool(x, 3))
    # recorded argmaxes reproduce the maxima
    xt = x[:, :, :9].reshape(2, 3, 3, 3)
    assert np.array_equal(np.take_along_axis(xt, arg[..., None], 3)[..., 0], y)


def test_maxpool_first_max_wins_on_ties():
    x = np.array([[[1.0, 5.0, 5.0, 2.0]]])
    _, arg = kernels.maxpool1d_forward(x, 4)
    assert arg[0, 0, 0] == 1


def test_backends_agree():
    native = _native_or_skip()
    ref = kernels.get_backend("numpy")
    gen = np.random.default_rng(7)
    x = np.ascontiguousarray(gen.standard_normal((4, 3, 20)))
    w = np.ascontiguousarray(gen.standard_normal((5, 3, 4)))
    b = np.ascontiguousarray(gen.standard_normal(5))
    ya, yb = native.conv1d_forward(x, w, b), ref.conv1d_forward(x, w, b)
    assert np.allclose(ya, yb, rtol=1e-12, atol=1e-12)
    gy = np.ascontiguousarray(gen.standard_normal(ya.shape))
    for ga, gb in zip(native.conv1d_backward(x, w, gy),
                      ref.conv1d_backward(x, w, gy)):
        assert np.allclose(ga, gb, rtol=1e-11, atol=1e-11)
    pa, aa = native.maxpool1d_forward(x, 3)
    pb, ab = ref.maxpool1d_forward(x, 3)
    assert np.array_equal(pa, pb) and np.array_equal(aa, ab)
    ga = native.maxpool1d_backward(pa, aa, 3, 20)
    gb = ref.maxpool1d_backward(pb, ab, 3, 20)
    assert np.array_equal(ga, gb)
    q = np.ascontiguousarray(gen.standard_normal((12, 6)))
    da, db = native.pairwise_sq_dists(q), ref.pairwise_sq_dists(q)
    assert np.allclose(da, db, rtol=1e-10, atol=1e-10)


def test_pairwise_sq_dists_basics():
    x = np.array([[0.0, 0.0], [3.0, 4.0]])
    d = kernels.pairwise_sq_dists(x)
    assert np.allclose(d, [[0.0, 25.0], [25.0, 0.0]])
    assert np.all(np.diag(kernels.pairwise_sq_dists(np.random.default_rng(0)
                                                    .standard_normal((5, 3)))) == 0)


def test_conv_backward_is_sum_rule_consistent():
    # gw summed against x windows equals d(sum y)/d(w) for gy of ones
    gen = np.random.default_rng(3)
    x = gen.standard_normal((2, 2, 9))
    w = gen.standard_normal((3, 2, 3))
    gy = np.ones((2, 3, 7))
    gx, gw, gb = kernels.conv1d_backward(x, w, gy)
    assert gb.shape == (3,)
    assert np.allclose(gb, 2 * 7)  # batch * positions
    # brute force: perturbing each weight changes sum(y) by sum of its inputs
    brute = np.zeros_like(w)
    for o in range(3):
        for i in range(2):
            for k in range(3):
                brute[o, i, k] = x[:, i, k:k + 7].sum()
    assert np.allclose(gw, brute, atol=1e-12)
