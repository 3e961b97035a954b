"""Classical baselines: Lasso over DCT coefficients and cubic-spline imputation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .measurements import MeasurementOperator, dct_forward, dct_inverse

# Power iteration approaches the top eigenvalue from below; inflate the
# estimate slightly so 1/L stays a valid step size.
LIPSCHITZ_SAFETY = 1.01
POWER_ITERATIONS = 50


@dataclass(frozen=True)
class LassoConfig:
    alpha: float = 1e-5
    max_iterations: int = 5000
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")


@dataclass
class LassoResult:
    signal: np.ndarray
    coefficients: np.ndarray
    objective: list = field(default_factory=list)
    iterations: int = 0
    lipschitz: float = float("nan")
    converged: bool = False


def soft_threshold(x, thresh):
    """Proximal map of ``thresh * |x|``."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)


def _power_iteration(apply_normal, n, iterations=POWER_ITERATIONS):
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iterations):
        w = apply_normal(v)
        lam = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return lam


def fista_lasso(y, op: MeasurementOperator, n: int, config: LassoConfig | None = None) -> LassoResult:
    """FISTA on ``(1/2m)||y - A D^T c||^2 + alpha ||c||_1`` with restart on increase.

    ``D^T`` is the orthonormal inverse DCT, so ``c`` are the DCT coefficients
    of the signal.  A candidate step that would raise the objective is
    rejected and the momentum is reset, which keeps the objective history
    non-increasing and gives fast convergence on well-posed problems.
    """
    config = config or LassoConfig()
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    m = y.size
    if m == 0 or op.m == 0:
        raise ValueError("lasso needs at least one measurement")
    if op.n != n or op.m != m:
        raise ValueError(f"operator is {op.m}x{op.n}, data implies {m}x{n}")

    def fwd(c):
        return op.apply(dct_inverse(c))

    def adj(r):
        return dct_forward(op.adjoint(r))

    lip = _power_iteration(lambda v: adj(fwd(v)) / m, n) * LIPSCHITZ_SAFETY
    alpha = config.alpha
    if lip <= 0:
        zero = np.zeros(n)
        return LassoResult(dct_inverse(zero), zero, [0.5 * (y @ y) / m], 0, lip, True)
    step = 1.0 / lip

    def value(resid, c):
        return 0.5 * (resid @ resid) / m + alpha * np.abs(c).sum()

    x = np.zeros(n)
    bx = np.zeros(m)
    z, bz = x.copy(), bx.copy()
    t = 1.0
    f_x = value(y - bx, x)
    history = [f_x]
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        grad = -adj(y - bz) / m
        u = soft_threshold(z - step * grad, alpha * step)
        bu = fwd(u)
        f_u = value(y - bu, u)
        change = np.linalg.norm(u - x)
        scale = max(np.linalg.norm(x), np.finfo(float).tiny)
        if f_u <= f_x:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            b = (t - 1.0) / t_next
            z = u + b * (u - x)
            bz = bu + b * (bu - bx)
            x, bx, f_x, t = u, bu, f_u, t_next
        else:
            # objective went up: keep x and restart the momentum from it
            z, bz, t = x, bx, 1.0
        history.append(f_x)
        if change <= config.tolerance * scale:
            converged = True
            break
    return LassoResult(dct_inverse(x), x, history, it, lip, converged)


def lasso_dct(y, op: MeasurementOperator, n: int, config: LassoConfig | None = None) -> np.ndarray:
    """Lasso reconstruction in the DCT basis; returns the length-``n`` signal."""
    return fista_lasso(y, op, n, config).signal


def spline_impute(known_values, known_indices, n: int) -> np.ndarray:
    """Natural cubic spline through the known samples.

    Positions before the first or after the last knot repeat the nearest knot
    value.  Known positions are returned exactly.
    """
    values = np.asarray(known_values, dtype=np.float64).reshape(-1)
    idx = np.asarray(known_indices, dtype=np.int64).reshape(-1)
    if idx.size != values.size:
        raise ValueError("known_values and known_indices differ in length")
    if idx.size < 2:
        raise ValueError("spline interpolation needs at least 2 known samples")
    if np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"known_indices must be strictly increasing within [0, {n})")
    spline = CubicSpline(idx.astype(np.float64), values, bc_type="natural")
    grid = np.arange(n)
    out = spline(grid.astype(np.float64))
    out[grid < idx[0]] = values[0]
    out[grid > idx[-1]] = values[-1]
    out[idx] = values
    return out
