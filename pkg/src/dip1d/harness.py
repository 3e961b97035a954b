"""Configuration-driven experiment runner.

A run loads one signal, normalizes it to [-1, 1], zero-pads it to a generator
length, then for every sweep level builds the measurement operator, runs each
method and scores it.  Seeds for operators, noise and restarts are derived from
``(seed, task, level)`` so adding a level or a restart never changes others.
"""

from __future__ import annotations

import configparser
import io
import logging
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import measurements as meas
from .baselines import LassoConfig, lasso_dct, spline_impute
from .metrics import imputation_mse, mse
from .recovery import RecoveryConfig, denoise_config, fit_restart, recover
from .seeding import derive_seed
from .signal_io import (Signal, crop, decimate, gen_chirp, load_csv, load_wav,
                        normalize_unit_range, pad_to_valid_length)
from . import generator as gen

log = logging.getLogger(__name__)

TASKS = ("impute", "cs-gaussian", "cs-dct", "denoise", "noise-impedance")
METHODS = ("dip", "lasso", "spline")
OPERATOR_FOR_TASK = {"impute": "mask", "cs-gaussian": "gaussian", "cs-dct": "dct",
                     "denoise": "identity", "noise-impedance": "identity"}
DEFAULT_OUTPUT_DIR = "dip1d-results"
OUTPUT_DIR_ENV = "DIP1D_OUTPUT_DIR"


class ConfigError(ValueError):
    """Inconsistent experiment configuration."""


@dataclass(frozen=True)
class InputSpec:
    """Where the signal comes from: ``wav``, ``csv`` or ``chirp``."""

    kind: str = "chirp"
    path: str | None = None
    column: str = "0"
    chirp: tuple = (750.0, 250.0, 16384, 8192.0)
    decimate: int = 1
    length: int | None = None

    def __post_init__(self):
        if self.kind not in ("wav", "csv", "chirp"):
            raise ConfigError(f"unknown input kind {self.kind!r}")
        if self.kind in ("wav", "csv") and not self.path:
            raise ConfigError(f"{self.kind} input needs a path")
        if self.kind == "chirp" and len(self.chirp) != 4:
            raise ConfigError("chirp input needs f0,f1,n,fs")

    def describe(self) -> str:
        if self.kind == "chirp":
            f0, f1, n, fs = self.chirp
            return f"chirp {f0:g}->{f1:g} Hz, n={int(n)}, fs={fs:g}"
        return f"{self.kind} {self.path}"


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    input: InputSpec = field(default_factory=InputSpec)
    levels: tuple = ()
    recovery: RecoveryConfig = field(default_factory=RecoveryConfig)
    lasso: LassoConfig = field(default_factory=LassoConfig)
    methods: tuple = ("dip", "lasso")
    external_results: tuple = ()  # (name, path) pairs
    output_dir: str | None = None
    seed: int = 0
    gap_start: int | None = None  # impute only: levels become contiguous gap lengths

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; choose from {', '.join(TASKS)}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods listed twice")
        if "spline" in self.methods and self.task != "impute":
            raise ConfigError("spline interpolation only applies to task 'impute'")
        if self.task == "noise-impedance" and set(self.methods) - {"dip"}:
            raise ConfigError("noise-impedance runs the dip method only")
        if self.task in ("denoise", "noise-impedance"):
            if any(float(v) < 0 for v in self.levels):
                raise ConfigError("noise levels must be >= 0")
        else:
            if any(int(v) != float(v) or int(v) < 1 for v in self.levels):
                raise ConfigError("measurement counts must be positive integers")
        if self.gap_start is not None and self.task != "impute":
            raise ConfigError("gap_start only applies to task 'impute'")
        # recovery seed follows the experiment seed
        if self.recovery.seed != self.seed:
            object.__setattr__(self, "recovery", self.recovery.replace(seed=self.seed))

    @property
    def level_kind(self) -> str:
        if self.task in ("denoise", "noise-impedance"):
            return "sigma"
        return "gap" if self.gap_start is not None else "m"


@dataclass
class CellResult:
    method: str
    level: object
    per_restart_mse: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_mse: float = float("nan")
    best_restart: int | None = None
    reconstruction: np.ndarray | None = None
    restarts: list = field(default_factory=list)  # per-restart reconstructions
    curves: list = field(default_factory=list)  # per-restart dicts of arrays
    restart_errors: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.restart_errors


@dataclass
class LevelData:
    level: object
    operator: meas.MeasurementOperator
    y: np.ndarray
    missing: np.ndarray | None
    seed: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list
    truth: np.ndarray | None
    levels: list
    n: int
    original_length: int
    seeds: dict
    wall_time: float = 0.0
    impedance: dict = field(default_factory=dict)  # level -> {name: fidelity curve}

    @property
    def failed(self) -> list:
        return [c for c in self.cells if not c.ok]

    def cell(self, method, level) -> CellResult:
        for c in self.cells:
            if c.method == method and format_level(c.level) == format_level(level):
                return c
        raise KeyError((method, level))

    def table(self) -> list:
        """``(method, level, mean_mse, error)`` rows in canonical order."""
        return [(c.method, format_level(c.level), c.mean_mse, c.error) for c in self.cells]


def format_level(level) -> str:
    """Canonical text for a sweep level; used in file names and seeds."""
    if isinstance(level, str):
        return level
    v = float(level)
    if v.is_integer() and abs(v) < 1e15 and not isinstance(level, float):
        return str(int(v))
    return format(v, "g")


# ---------------------------------------------------------------------------
# signal preparation
# ---------------------------------------------------------------------------


def load_input(spec: InputSpec) -> Signal:
    if spec.kind == "chirp":
        f0, f1, n, fs = spec.chirp
        s = gen_chirp(float(f0), float(f1), int(n), float(fs))
    elif spec.kind == "wav":
        s = load_wav(spec.path)
    else:
        s = load_csv(spec.path, spec.column)
    if spec.decimate > 1:
        if s.missing.size:
            raise ConfigError("cannot decimate a signal with missing samples")
        s = decimate(s, spec.decimate)
    if spec.length is not None:
        if spec.length > len(s):
            raise ConfigError(f"requested length {spec.length} exceeds signal length {len(s)}")
        keep = s.missing[s.missing < spec.length]
        s = Signal(s.samples[:spec.length], s.sample_rate, s.source, keep)
    return s


def _build_level(config: ExperimentConfig, level, x_pad, n_orig, seed) -> LevelData:
    n = x_pad.size
    task = config.task
    if task == "impute":
        if config.gap_start is not None:
            gap = int(level)
            start = int(config.gap_start)
            if gap < 1 or start < 0 or start + gap > n_orig:
                raise ConfigError(f"gap [{start}, {start + gap}) outside the signal (length {n_orig})")
            missing = np.arange(start, start + gap)
        else:
            m = int(level)
            if m > n_orig:
                raise ConfigError(f"m={m} exceeds signal length {n_orig}")
            rng = np.random.default_rng(seed)
            kept = np.sort(rng.choice(n_orig, size=m, replace=False))
            missing = np.setdiff1d(np.arange(n_orig), kept)
        # padded tail is known (it is zero by construction)
        op = meas.mask_from_indices(n, np.setdiff1d(np.arange(n), missing))
        op = meas.MeasurementOperator("mask", n, op.m, indices=op.indices, seed=seed)
        return LevelData(level, op, op.apply(x_pad), missing, seed)
    if task in ("cs-gaussian", "cs-dct"):
        m = int(level)
        if m > n:
            raise ConfigError(f"m={m} exceeds signal length {n}")
        op = meas.make_operator(OPERATOR_FOR_TASK[task], n, m, seed)
        return LevelData(level, op, op.apply(x_pad), None, seed)
    op = meas.identity_operator(n)
    y = meas.add_awgn(x_pad, float(level), seed)
    return LevelData(level, op, y, None, seed)


def _scorer(level_data: LevelData, n_orig):
    if level_data.missing is not None and level_data.missing.size:
        missing = level_data.missing
        return lambda truth, rec: imputation_mse(crop(truth, n_orig), crop(rec, n_orig), missing)
    return lambda truth, rec: mse(crop(truth, n_orig), crop(rec, n_orig))


# ---------------------------------------------------------------------------
# methods
# ---------------------------------------------------------------------------


def _run_dip(config, ld, truth_pad, n_orig, score):
    cfg = config.recovery
    if config.task == "denoise":
        cfg = denoise_config(float(ld.level), cfg)
    cfg = cfg.replace(seed=derive_seed(config.seed, config.task, format_level(ld.level), "dip"))
    res = recover(ld.y, ld.operator, cfg, ground_truth=truth_pad, metric=score)
    cell = CellResult("dip", ld.level)
    cell.per_restart_mse = res.per_restart_mse
    cell.mean_mse = res.mean_mse
    cell.best_restart = res.best_restart
    cell.reconstruction = None if res.best is None else crop(res.best, n_orig)
    cell.restarts = [None if r.reconstruction is None else crop(r.reconstruction, n_orig) for r in res.runs]
    cell.curves = [{"objective": r.objective, "fidelity": r.fidelity, "tv": r.tv} for r in res.runs]
    cell.restart_errors = dict(res.failures)
    if res.best_restart is None:
        cell.error = "all restarts failed: " + "; ".join(res.failures.values())
    return cell


def _single(method, ld, rec, truth_pad, n_orig, score):
    cell = CellResult(method, ld.level)
    cell.reconstruction = crop(rec, n_orig)
    cell.restarts = [cell.reconstruction]
    cell.per_restart_mse = np.array([score(truth_pad, rec)])
    cell.mean_mse = float(cell.per_restart_mse[0])
    cell.best_restart = 0
    return cell


def _run_method(method, config, ld, truth_pad, n_orig):
    score = _scorer(ld, n_orig)
    n = truth_pad.size
    if method == "dip":
        return _run_dip(config, ld, truth_pad, n_orig, score)
    if method == "lasso":
        rec = lasso_dct(ld.y, ld.operator, n, config.lasso)
        return _single(method, ld, rec, truth_pad, n_orig, score)
    if method == "spline":
        rec = spline_impute(ld.y, ld.operator.indices, n)
        return _single(method, ld, rec, truth_pad, n_orig, score)
    raise ConfigError(f"unknown method {method!r}")


def _run_external(name, path, ld, truth_pad, n_orig):
    col = format_level(ld.level)
    table = load_csv(path, col)
    if table.missing.size:
        raise ValueError(f"{path}: column {col!r} has blank cells")
    rec = table.samples
    if rec.size < n_orig:
        raise ValueError(f"{path}: column {col!r} has {rec.size} samples, need {n_orig}")
    rec = np.concatenate([rec[:n_orig], np.zeros(truth_pad.size - n_orig)])
    return _single(name, ld, rec, truth_pad, n_orig, _scorer(ld, n_orig))


def _failed_cell(method, level, exc):
    log.error("%s at level %s failed: %s", method, format_level(level), exc)
    return CellResult(method, level, error=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (method, level) cell of ``config``; failures are recorded per cell."""
    t0 = time.perf_counter()
    raw = load_input(config.input)
    signal, _ = normalize_unit_range(raw)
    observed_only = signal.missing.size > 0
    if observed_only and config.task != "impute":
        raise ConfigError(f"input has {signal.missing.size} blank samples; only task 'impute' accepts gaps")
    padded, n_orig = pad_to_valid_length(signal)
    x_pad = np.nan_to_num(padded.samples, nan=0.0)
    n = x_pad.size
    truth = None if observed_only else x_pad
    levels = list(config.levels)
    if observed_only:
        levels = ["observed"]
    cells, seeds, level_data, impedance = [], {}, [], {}
    for level in levels:
        key = format_level(level)
        seed = derive_seed(config.seed, config.task, key)
        seeds[key] = seed
        try:
            if observed_only:
                missing = signal.missing
                op = meas.mask_from_indices(n, np.setdiff1d(np.arange(n), missing))
                ld = LevelData(level, op, op.apply(x_pad), missing, seed)
            else:
                ld = _build_level(config, level, x_pad, n_orig, seed)
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            for method in config.methods:
                cells.append(_failed_cell(method, level, exc))
            for name, _path in config.external_results:
                cells.append(_failed_cell(name, level, exc))
            continue
        level_data.append(ld)
        if config.task == "noise-impedance":
            cell, curves = _run_impedance(config, ld, x_pad, n_orig)
            cells.append(cell)
            impedance[key] = curves
            continue
        for method in config.methods:
            log.info("%s: %s at %s=%s", config.task, method, config.level_kind, key)
            try:
                if truth is None:
                    cell = _run_untruthed(method, config, ld, x_pad, n_orig)
                else:
                    cell = _run_method(method, config, ld, truth, n_orig)
            except Exception as exc:  # noqa: BLE001
                cell = _failed_cell(method, level, exc)
            cells.append(cell)
        for name, path in config.external_results:
            try:
                if truth is None:
                    raise ValueError("no ground truth to score against")
                cells.append(_run_external(name, path, ld, truth, n_orig))
            except Exception as exc:  # noqa: BLE001
                cells.append(_failed_cell(name, level, exc))
    result = ExperimentResult(config, cells, None if truth is None else crop(truth, n_orig),
                              level_data, n, n_orig, seeds, impedance=impedance)
    result.wall_time = time.perf_counter() - t0
    return result


def _run_untruthed(method, config, ld, x_pad, n_orig):
    # real gaps: reconstruct, nothing to score against
    nan_score = lambda truth, rec: float("nan")  # noqa: E731
    if method == "dip":
        return _run_dip(config, ld, x_pad, n_orig, nan_score)
    n = x_pad.size
    if method == "lasso":
        rec = lasso_dct(ld.y, ld.operator, n, config.lasso)
    else:
        rec = spline_impute(ld.y, ld.operator.indices, n)
    return _single(method, ld, rec, x_pad, n_orig, nan_score)


def _run_impedance(config, ld, x_pad, n_orig):
    sigma = float(ld.level)
    cfg = config.recovery.replace(restarts=1)
    spec = gen.default_spec(x_pad.size, cfg.filters_per_layer)
    init_seed = derive_seed(config.seed, config.task, format_level(ld.level), "dip")
    noise = meas.add_awgn(np.zeros_like(x_pad), sigma, ld.seed)
    targets = {"signal": x_pad, "noise": noise, "signal+noise": x_pad + noise}
    curves, runs = {}, {}
    for name, target in targets.items():
        runs[name] = fit_restart(target, ld.operator, cfg, spec, init_seed)
        curves[name] = runs[name].fidelity
    run = runs["signal+noise"]
    cell = CellResult("dip", ld.level)
    cell.curves = [{"objective": run.objective, "fidelity": run.fidelity, "tv": run.tv}]
    if run.ok:
        cell.reconstruction = crop(run.reconstruction, n_orig)
        cell.restarts = [cell.reconstruction]
        cell.per_restart_mse = np.array([mse(crop(x_pad, n_orig), cell.reconstruction)])
        cell.mean_mse = float(cell.per_restart_mse[0])
        cell.best_restart = 0
    else:
        cell.error = run.error
    return cell, curves


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def _csv_list(text, conv=str):
    return tuple(conv(v.strip()) for v in str(text).split(",") if v.strip())


def _num(v):
    f = float(v)
    return int(f) if f.is_integer() and "." not in v and "e" not in v.lower() else f


def _coerce(tp, value):
    if tp in (int, "int"):
        return int(value)
    if tp in (float, "float"):
        return float(value)
    return value


def config_to_text(config: ExperimentConfig, include_output_dir: bool = False) -> str:
    """Render ``config`` in the key-value format read by :func:`load_config`."""
    cp = configparser.ConfigParser(interpolation=None)
    exp = {
        "task": config.task,
        "levels": ",".join(format_level(v) for v in config.levels),
        "methods": ",".join(config.methods),
        "seed": str(config.seed),
    }
    if config.gap_start is not None:
        exp["gap_start"] = str(config.gap_start)
    if include_output_dir and config.output_dir:
        exp["output_dir"] = config.output_dir
    cp["experiment"] = exp
    inp = {"kind": config.input.kind}
    if config.input.kind == "chirp":
        inp["chirp"] = ",".join(format_level(v) for v in config.input.chirp)
    else:
        inp["path"] = str(config.input.path)
        if config.input.kind == "csv":
            inp["column"] = str(config.input.column)
    inp["decimate"] = str(config.input.decimate)
    if config.input.length is not None:
        inp["length"] = str(config.input.length)
    cp["input"] = inp
    cp["recovery"] = {f.name: repr(getattr(config.recovery, f.name))
                      for f in fields(RecoveryConfig) if f.name != "seed"}
    cp["lasso"] = {f.name: repr(getattr(config.lasso, f.name)) for f in fields(LassoConfig)}
    if config.external_results:
        cp["external"] = dict(config.external_results)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load_config(path_or_text: str) -> ExperimentConfig:
    """Parse an INI-style experiment file (sections experiment/input/recovery/lasso/external)."""
    cp = configparser.ConfigParser(interpolation=None)
    if os.path.exists(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            cp.read_file(fh)
    else:
        cp.read_string(path_or_text)
    if "experiment" not in cp:
        raise ConfigError("config needs an [experiment] section")
    exp = cp["experiment"]
    task = exp.get("task")
    level_text = exp.get("levels") or exp.get("m") or exp.get("sigma") or ""
    levels = _csv_list(level_text, _num)
    inp = cp["input"] if "input" in cp else {}
    kind = inp.get("kind", "chirp")
    input_spec = InputSpec(
        kind=kind,
        path=inp.get("path"),
        column=inp.get("column", "0"),
        chirp=_csv_list(inp.get("chirp", "750,250,16384,8192"), float),
        decimate=int(inp.get("decimate", 1)),
        length=int(inp["length"]) if inp.get("length") else None,
    )
    rec_kw = {}
    if "recovery" in cp:
        types = {f.name: f.type for f in fields(RecoveryConfig)}
        for k, v in cp["recovery"].items():
            if k not in types:
                raise ConfigError(f"unknown recovery key {k!r}")
            rec_kw[k] = _coerce(types[k], v)
    lasso_kw = {}
    if "lasso" in cp:
        types = {f.name: f.type for f in fields(LassoConfig)}
        for k, v in cp["lasso"].items():
            if k not in types:
                raise ConfigError(f"unknown lasso key {k!r}")
            lasso_kw[k] = _coerce(types[k], v)
    external = tuple(cp["external"].items()) if "external" in cp else ()
    seed = int(exp.get("seed", 0))
    return ExperimentConfig(
        task=task,
        input=input_spec,
        levels=levels,
        recovery=RecoveryConfig(**rec_kw).replace(seed=seed),
        lasso=LassoConfig(**lasso_kw),
        methods=_csv_list(exp.get("methods", "dip,lasso")),
        external_results=external,
        output_dir=exp.get("output_dir"),
        seed=seed,
        gap_start=int(exp["gap_start"]) if exp.get("gap_start") else None,
    )


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    v = float(v)
    return "nan" if np.isnan(v) else format(v, ".17g")


def emit_outputs(result: ExperimentResult, output_dir) -> list:
    """Write the result tables, curves, reconstructions and manifest.

    ``results.csv`` has one row per (method, level): ``restart`` is the
    restart with the lowest final objective and ``mse`` its score.  Every
    restart's score goes to ``restarts.csv``.  Returns the written paths.
    """
    from .signal_io import save_csv

    output_dir = os.fspath(output_dir)
    try:
        os.makedirs(output_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {output_dir}: {exc}") from exc
    written = []

    def target(name):
        path = os.path.join(output_dir, name)
        written.append(path)
        return path

    try:
        with open(target("results.csv"), "w", newline="", encoding="utf-8") as fh:
            fh.write("method,level,restart,mse,mean_mse,status\n")
            for cell in result.cells:
                r = cell.best_restart
                best = "" if r is None else str(r)
                value = float("nan") if r is None else cell.per_restart_mse[r]
                fh.write(f"{cell.method},{format_level(cell.level)},{best},{_fmt(value)},"
                         f"{_fmt(cell.mean_mse)},{_status(cell.error or 'ok')}\n")
        with open(target("restarts.csv"), "w", newline="", encoding="utf-8") as fh:
            fh.write("method,level,restart,mse,status\n")
            for cell in result.cells:
                for r, value in enumerate(cell.per_restart_mse):
                    status = _status(cell.restart_errors.get(r, "ok"))
                    fh.write(f"{cell.method},{format_level(cell.level)},{r},{_fmt(value)},{status}\n")
        for cell in result.cells:
            lv = format_level(cell.level)
            for r, curve in enumerate(cell.curves):
                with open(target(f"curve_{cell.method}_{lv}_{r}.csv"), "w", encoding="utf-8") as fh:
                    fh.write("iteration,objective,fidelity,tv\n")
                    for i, (o, f, t) in enumerate(zip(curve["objective"], curve["fidelity"], curve["tv"])):
                        fh.write(f"{i},{_fmt(o)},{_fmt(f)},{_fmt(t)}\n")
            if cell.reconstruction is not None:
                cols = {}
                if result.truth is not None:
                    cols["truth"] = result.truth
                cols["reconstruction"] = cell.reconstruction
                if len(cell.restarts) > 1:
                    for r, rec in enumerate(cell.restarts):
                        cols[f"restart_{r}"] = np.full(result.original_length, np.nan) if rec is None else rec
                save_csv(target(f"recon_{cell.method}_{lv}.csv"), cols)
        for ld in result.levels:
            lv = format_level(ld.level)
            cols = {"y": ld.y}
            if ld.operator.indices is not None:
                cols["index"] = ld.operator.indices
            save_csv(target(f"observed_{lv}.csv"), cols)
        for lv, curves in result.impedance.items():
            with open(target(f"impedance_{lv}.csv"), "w", encoding="utf-8") as fh:
                names = list(curves)
                fh.write("iteration," + ",".join(names) + "\n")
                for i in range(len(curves[names[0]])):
                    fh.write(f"{i}," + ",".join(_fmt(curves[k][i]) for k in names) + "\n")
        with open(target("manifest.txt"), "w", encoding="utf-8") as fh:
            fh.write(_manifest(result))
    except OSError as exc:
        raise OSError(f"writing experiment outputs to {output_dir} failed: {exc}") from exc
    return written


def _status(text) -> str:
    return str(text).replace(",", ";").replace("\n", " ")


def _manifest(result: ExperimentResult) -> str:
    cfg = result.config
    lines = ["# dip1d experiment manifest", "# replay: dip1d run --config manifest.txt", ""]
    lines.append(config_to_text(cfg).rstrip())
    lines += ["", "[derived]", f"input = {cfg.input.describe()}",
              f"signal_length = {result.original_length}", f"generator_length = {result.n}"]
    if "dip" in cfg.methods:
        spec = gen.default_spec(result.n, cfg.recovery.filters_per_layer)
        lines.append(f"generator = blocks={spec.num_blocks} latent={spec.latent_channels}x{spec.latent_length}"
                     f" kernel={spec.kernel_size} filters={spec.filters_per_layer}")
    for ld in result.levels:
        lv = format_level(ld.level)
        lines.append(f"level.{lv}.operator = {ld.operator.kind} n={ld.operator.n} m={ld.operator.m} seed={ld.seed}")
        if "dip" in cfg.methods:
            dseed = derive_seed(cfg.seed, cfg.task, lv, "dip")
            from .recovery import restart_seed
            rs = [restart_seed(dseed, r) for r in range(cfg.recovery.restarts)]
            lines.append(f"level.{lv}.dip_restart_seeds = {','.join(map(str, rs))}")
    return "\n".join(lines) + "\n"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)
