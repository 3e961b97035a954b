"""Deep-prior recovery of one-dimensional signals.

An untrained convolutional generator is fitted to linear measurements of a
single signal; its architecture acts as the prior.  The package bundles a
small reverse-mode autodiff engine, the generator, measurement operators,
Lasso and spline baselines, signal I/O and an experiment runner.
"""

from .baselines import LassoConfig, fista_lasso, lasso_dct, spline_impute
from .generator import GeneratorSpec, default_spec, generate, init_generator
from .harness import ExperimentConfig, InputSpec, emit_outputs, load_config, run_experiment
from .measurements import (MeasurementOperator, add_awgn, dct_forward, dct_inverse,
                           make_operator)
from .metrics import imputation_mse, mse
from .recovery import RecoveryConfig, denoise_config, noise_impedance_curves, recover
from .seeding import derive_seed
from .signal_io import Signal, gen_chirp, load_csv, load_wav, normalize_unit_range

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "GeneratorSpec", "InputSpec", "LassoConfig", "MeasurementOperator",
    "RecoveryConfig", "Signal", "add_awgn", "dct_forward", "dct_inverse", "default_spec",
    "denoise_config", "derive_seed", "emit_outputs", "fista_lasso", "gen_chirp", "generate",
    "imputation_mse", "init_generator", "lasso_dct", "load_config", "load_csv", "load_wav",
    "make_operator", "mse", "noise_impedance_curves", "normalize_unit_range", "recover",
    "run_experiment", "spline_impute",
]
