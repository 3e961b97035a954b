import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dip1d import autodiff as ad
from dip1d.metrics import imputation_mse, mse


def test_mse_examples():
    assert mse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert mse([0.0, 0.0], [2.0, 0.0]) == 2.0


def test_mse_length_mismatch():
    with pytest.raises(ValueError):
        mse([1.0], [1.0, 2.0])


def test_mse_is_normalized_sum_loss(rng):
    x, y = rng.standard_normal(100), rng.standard_normal(100)
    tape = ad.Tape()
    assert mse(x, y) == pytest.approx(ad.mse_loss(tape.constant(x), y).item() / 100, abs=1e-12)


def test_imputation_mse_examples():
    assert imputation_mse([0.0, 1.0], [9.0, 0.0], [1]) == 1.0
    x = np.arange(5.0)
    garbage = x.copy()
    garbage[[0, 4]] = 1e6
    assert imputation_mse(x, garbage, [1, 2, 3]) == 0.0


def test_imputation_mse_rejects_empty_and_out_of_range():
    with pytest.raises(ValueError):
        imputation_mse([1.0], [1.0], [])
    with pytest.raises(ValueError):
        imputation_mse([1.0, 2.0], [1.0, 2.0], [2])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_imputation_mse_is_subvector_mse_and_ignores_kept(n, seed):
    rng = np.random.default_rng(seed)
    x, xh = rng.standard_normal(n), rng.standard_normal(n)
    S = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
    assert imputation_mse(x, xh, S) == pytest.approx(mse(x[S], xh[S]), rel=1e-15)
    kept = np.setdiff1d(np.arange(n), S)
    xh2 = xh.copy()
    xh2[kept] = rng.standard_normal(kept.size) * 100
    assert imputation_mse(x, xh2, S) == imputation_mse(x, xh, S)
