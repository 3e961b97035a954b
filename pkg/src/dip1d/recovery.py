"""Deep-prior recovery: fit generator weights to measurements.

The objective for one fixed latent input is::

    ||y - A G(z, w)||^2 + tv_lambda * TV(G(z, w))

minimized over the weights ``w`` with RMSProp (coupled L2 weight decay) for a
fixed number of steps.  The last iterate is the reconstruction; there is no
loss-based iterate selection.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import autodiff as ad
from . import generator as gen
from .measurements import MeasurementOperator, add_awgn, identity_operator
from .metrics import mse
from .seeding import derive_seed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecoveryConfig:
    learning_rate: float = 1e-4
    momentum: float = 0.9
    weight_decay: float = 1.0
    tv_lambda: float = 0.1
    iterations: int = 3000
    restarts: int = 5
    filters_per_layer: int = 64
    rmsprop_smoothing: float = 0.99
    rmsprop_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.iterations < 1 or self.restarts < 1 or self.filters_per_layer < 1:
            raise ValueError("iterations, restarts and filters_per_layer must be >= 1")
        if self.tv_lambda < 0 or self.weight_decay < 0:
            raise ValueError("tv_lambda and weight_decay must be nonnegative")
        if not 0 <= self.rmsprop_smoothing <= 1 or self.rmsprop_epsilon < 0:
            raise ValueError("rmsprop_smoothing must lie in [0, 1] and rmsprop_epsilon >= 0")

    def replace(self, **changes) -> "RecoveryConfig":
        return dataclasses.replace(self, **changes)


def denoise_config(sigma: float, base: RecoveryConfig | None = None) -> RecoveryConfig:
    """Shorter budget and narrower layers for blind denoising.

    300 steps always; 64 filters below sigma 0.15, 16 below 0.2, else 8.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    base = base or RecoveryConfig()
    if sigma < 0.15:
        filters = 64
    elif sigma < 0.2:
        filters = 16
    else:
        filters = 8
    return base.replace(iterations=300, filters_per_layer=filters)


class ObjectiveTerms(NamedTuple):
    total: ad.Tensor
    fidelity: ad.Tensor
    tv: float
    output: ad.Tensor


def objective(net: gen.GeneratorNet, op: MeasurementOperator, y, tv_lambda: float,
              tape: ad.Tape, parts: bool = False):
    """Record the full objective on ``tape`` and return its scalar node.

    With ``parts=True`` an :class:`ObjectiveTerms` tuple is returned instead
    (the TV value is reported even when ``tv_lambda`` is 0).
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if op.n != net.spec.output_length:
        raise ValueError(f"operator input length {op.n} != generator output {net.spec.output_length}")
    if y.size != op.m:
        raise ValueError(f"{y.size} measurements for an operator with m={op.m}")
    out = gen.forward(net, tape)
    if op.kind == "identity":
        measured = out
    else:
        measured = ad.linear_map(out, op.apply, op.adjoint, kind=f"measure_{op.kind}")
    fidelity = ad.mse_loss(measured, y)
    if tv_lambda > 0:
        tv = ad.tv_loss(out)
        total = ad.add(fidelity, ad.scale(tv, tv_lambda))
        tv_value = tv.item()
    else:
        total = fidelity
        tv_value = float(np.abs(np.diff(out.value.reshape(-1))).sum())
    if parts:
        return ObjectiveTerms(total, fidelity, tv_value, out)
    return total


@dataclass
class RMSPropState:
    square_avg: list
    momentum_buf: list

    @classmethod
    def zeros_like(cls, params):
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def rmsprop_step(params, grads, state: RMSPropState, config: RecoveryConfig):
    """One in-place RMSProp update of every array in ``params``.

    Per element: ``g += wd*w; s = rho*s + (1-rho)*g^2; u = mu*u + g/sqrt(s+eps);
    w -= lr*u``.
    """
    for w, g, s, u in zip(params, grads, state.square_avg, state.momentum_buf):
        g = np.asarray(g, dtype=np.float64).reshape(w.shape)
        ad.kernels.rmsprop_update(w, g, s, u, config.learning_rate, config.momentum,
                                  config.weight_decay, config.rmsprop_smoothing,
                                  config.rmsprop_epsilon)
    return params, state


@dataclass
class RestartRun:
    seed: int
    reconstruction: np.ndarray | None
    objective: np.ndarray
    fidelity: np.ndarray
    tv: np.ndarray
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class RecoveryResult:
    runs: list
    per_restart_mse: np.ndarray
    mean_mse: float
    best_restart: int | None
    spec: gen.GeneratorSpec | None = None
    failures: dict = field(default_factory=dict)

    @property
    def best(self) -> np.ndarray | None:
        """Reconstruction of the restart with the lowest final objective."""
        if self.best_restart is None:
            return None
        return self.runs[self.best_restart].reconstruction

    @property
    def reconstructions(self) -> list:
        return [r.reconstruction for r in self.runs]

    @property
    def loss_curves(self) -> list:
        return [r.objective for r in self.runs]


def restart_seed(seed: int, restart: int) -> int:
    return derive_seed(seed, "restart", restart)


def fit_restart(y, op: MeasurementOperator, config: RecoveryConfig, spec: gen.GeneratorSpec,
                seed: int, callback: Callable | None = None) -> RestartRun:
    """Optimize one freshly initialized generator for ``config.iterations`` steps."""
    net = gen.init_generator(spec, seed)
    params = net.parameters()
    state = RMSPropState.zeros_like(params)
    iters = config.iterations
    obj = np.full(iters, np.nan)
    fid = np.full(iters, np.nan)
    tvs = np.full(iters, np.nan)
    output = None
    for it in range(iters):
        tape = ad.Tape()
        terms = objective(net, op, y, config.tv_lambda, tape, parts=True)
        total = terms.total.item()
        obj[it], fid[it], tvs[it] = total, terms.fidelity.item(), terms.tv
        if not np.isfinite(total):
            msg = f"non-finite objective ({total}) at iteration {it}"
            log.warning("restart seed %d aborted: %s", seed, msg)
            tape.clear()
            return RestartRun(seed, None, obj, fid, tvs, error=msg)
        output = terms.output.value.reshape(-1).copy()
        grads = ad.backward(tape, terms.total)
        tape.clear()
        if callback is not None:
            callback(it, total)
        if it == iters - 1:
            break
        rmsprop_step(params, grads, state, config)
    return RestartRun(seed, output, obj, fid, tvs)


def recover(y, op: MeasurementOperator, config: RecoveryConfig, ground_truth=None,
            spec: gen.GeneratorSpec | None = None, metric: Callable | None = None) -> RecoveryResult:
    """Run ``config.restarts`` independent fits and aggregate them.

    ``metric(truth, reconstruction)`` defaults to :func:`dip1d.metrics.mse`;
    restarts whose objective went non-finite get NaN and are left out of
    ``mean_mse``.
    """
    spec = spec or gen.default_spec(op.n, config.filters_per_layer)
    metric = metric or mse
    runs = []
    for r in range(config.restarts):
        seed = restart_seed(config.seed, r)
        log.debug("restart %d/%d (seed %d)", r + 1, config.restarts, seed)
        runs.append(fit_restart(y, op, config, spec, seed))
    per = np.full(len(runs), np.nan)
    if ground_truth is not None:
        for i, run in enumerate(runs):
            if run.ok:
                per[i] = metric(ground_truth, run.reconstruction)
    finite = per[np.isfinite(per)]
    mean = float(finite.mean()) if finite.size else float("nan")
    ok = [i for i, run in enumerate(runs) if run.ok]
    best = min(ok, key=lambda i: runs[i].objective[-1]) if ok else None
    failures = {i: run.error for i, run in enumerate(runs) if not run.ok}
    return RecoveryResult(runs, per, mean, best, spec, failures)


def noise_impedance_curves(signal, sigma: float, iterations: int, config: RecoveryConfig,
                           noise_seed=None) -> dict:
    """Fidelity curves for fitting a signal, pure noise and their sum.

    All three fits start from the same generator initialization; the noise is
    AWGN with standard deviation ``sigma``.
    """
    signal = np.asarray(signal, dtype=np.float64).reshape(-1)
    cfg = config.replace(iterations=int(iterations), restarts=1)
    op = identity_operator(signal.size)
    if noise_seed is None:
        noise_seed = derive_seed(config.seed, "impedance-noise")
    noise = add_awgn(np.zeros_like(signal), sigma, noise_seed)
    targets = {"signal": signal, "noise": noise, "signal+noise": signal + noise}
    curves = {}
    for name, target in targets.items():
        res = recover(target, op, cfg)
        curves[name] = res.runs[0].fidelity
    return curves
