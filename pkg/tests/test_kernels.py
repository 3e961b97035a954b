"""The numba and pure-numpy kernel paths must agree."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dip1d import kernels

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _both(fn, *args):
    before = kernels.backend()
    out = []
    try:
        for name in ("numpy", "numba"):
            kernels.set_backend(name)
            out.append(fn(*[a.copy() if isinstance(a, np.ndarray) else a for a in args]))
    finally:
        kernels.set_backend(before)
    return out


@pytest.mark.parametrize("n_in", [1, 2, 5, 64])
@pytest.mark.parametrize("factor,stride,pad,k", [(1, 1, 0, 3), (1, 1, 1, 3), (2, 1, 1, 3),
                                                 (2, 1, 2, 5), (3, 1, 1, 3), (1, 2, 1, 4),
                                                 (2, 3, 2, 5)])
def test_conv_forward_backward_bitwise_equal(n_in, factor, stride, pad, k):
    if factor * n_in + 2 * pad < k:
        pytest.skip("kernel longer than padded input")
    rng = np.random.default_rng(n_in * 100 + factor * 10 + stride)
    x = rng.standard_normal((3, n_in))
    w = rng.standard_normal((4, 3, k))
    b = rng.standard_normal(4)
    fwd = _both(kernels.conv_taps_forward, x, w, b, factor, stride, pad)
    assert_array_equal(fwd[0], fwd[1])
    dout = rng.standard_normal(fwd[0].shape)
    bwd = _both(kernels.conv_taps_backward, x, w, dout, factor, stride, pad)
    for a, c in zip(*bwd):
        assert_array_equal(a, c)


def test_leaky_kernels_equal(rng):
    x = rng.standard_normal((5, 33))
    x[0, :3] = 0.0
    g = rng.standard_normal(x.shape)
    f = _both(kernels.leaky_forward, x, 0.2)
    assert_array_equal(f[0], f[1])
    bk = _both(kernels.leaky_backward, x, g, 0.2)
    assert_array_equal(bk[0], bk[1])


def test_tv_kernels_agree_to_rounding(rng):
    x = rng.standard_normal(4097)
    x[10] = x[11]
    (v0, g0), (v1, g1) = _both(kernels.tv_value_and_grad, x)
    assert v0 == pytest.approx(v1, rel=1e-12)
    assert_array_equal(g0, g1)
    assert v0 == pytest.approx(np.abs(np.diff(x)).sum(), rel=1e-12)


def test_rmsprop_kernels_equal(rng):
    def step(w, g, s, u):
        kernels.rmsprop_update(w, g, s, u, 1e-3, 0.9, 1.0, 0.99, 1e-8)
        return w, s, u

    args = [rng.standard_normal((8, 4, 3)), rng.standard_normal((8, 4, 3)),
            np.abs(rng.standard_normal((8, 4, 3))), rng.standard_normal((8, 4, 3))]
    a, c = _both(step, *args)
    for x, y in zip(a, c):
        assert_array_equal(x, y)


def test_rmsprop_matches_formula(rng, each_backend):
    w, g = rng.standard_normal(6), rng.standard_normal(6)
    s, u = np.abs(rng.standard_normal(6)), rng.standard_normal(6)
    lr, mu, wd, rho, eps = 0.01, 0.9, 0.5, 0.99, 1e-8
    ge = g + wd * w
    s_ref = rho * s + (1 - rho) * ge ** 2
    u_ref = mu * u + ge / np.sqrt(s_ref + eps)
    w_ref = w - lr * u_ref
    kernels.rmsprop_update(w, g, s, u, lr, mu, wd, rho, eps)
    assert_allclose(w, w_ref, rtol=1e-14)
    assert_allclose(s, s_ref, rtol=1e-14)
    assert_allclose(u, u_ref, rtol=1e-14)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("cuda")


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.setenv("DIP1D_NUMBA", "0")
    assert not kernels._env_wants_numba()
    monkeypatch.setenv("DIP1D_NUMBA", "1")
    assert kernels._env_wants_numba()


def test_env_flag_selects_numpy_backend_at_import():
    import os
    import subprocess
    import sys

    env = dict(os.environ, DIP1D_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from dip1d import kernels; print(kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
