"""Reconstruction error metrics."""

import numpy as np


def mse(x, x_hat) -> float:
    """Mean squared error over all samples."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    x_hat = np.asarray(x_hat, dtype=np.float64).reshape(-1)
    if x.shape != x_hat.shape:
        raise ValueError(f"mse: lengths differ ({x.size} vs {x_hat.size})")
    d = x - x_hat
    return float(d @ d) / d.size


def imputation_mse(x, x_hat, missing) -> float:
    """Mean squared error restricted to the ``missing`` positions.

    Values of ``x_hat`` at observed positions do not affect the result.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    x_hat = np.asarray(x_hat, dtype=np.float64).reshape(-1)
    if x.shape != x_hat.shape:
        raise ValueError(f"imputation_mse: lengths differ ({x.size} vs {x_hat.size})")
    missing = np.unique(np.asarray(missing, dtype=np.int64).reshape(-1))
    if missing.size == 0:
        raise ValueError("imputation_mse needs at least one missing index")
    if missing[0] < 0 or missing[-1] >= x.size:
        raise ValueError("missing index out of range")
    return mse(x[missing], x_hat[missing])
