import filecmp
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dip1d.baselines import LassoConfig
from dip1d.harness import (ConfigError, ExperimentConfig, InputSpec, config_to_text, emit_outputs,
                           format_level, load_config, run_experiment)
from dip1d.recovery import RecoveryConfig
from dip1d.signal_io import load_csv, save_csv

FAST = RecoveryConfig(iterations=8, restarts=2, filters_per_layer=4, learning_rate=1e-3)
CHIRP = InputSpec("chirp", chirp=(40.0, 15.0, 1000, 1000.0))


def _cfg(**kw):
    base = dict(task="impute", input=CHIRP, levels=(300, 600), recovery=FAST,
                lasso=LassoConfig(max_iterations=300), methods=("dip", "lasso"), seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def _rows(path):
    with open(path) as fh:
        return fh.read().splitlines()


def test_config_invariants():
    with pytest.raises(ConfigError):
        _cfg(task="inpaint")
    with pytest.raises(ConfigError):
        _cfg(methods=("dip", "kalman"))
    with pytest.raises(ConfigError):
        _cfg(task="cs-dct", methods=("spline",))
    with pytest.raises(ConfigError):
        _cfg(task="denoise", levels=(-0.1,))
    with pytest.raises(ConfigError):
        _cfg(levels=(0,))
    with pytest.raises(ConfigError):
        InputSpec("wav")


def test_format_level():
    assert format_level(1000) == "1000"
    assert format_level(0.1) == "0.1"
    assert format_level(np.int64(5)) == "5"


def test_impute_three_methods_finite(tmp_path):
    res = run_experiment(_cfg(levels=(600,), methods=("dip", "lasso", "spline")))
    assert [(c.method, format_level(c.level)) for c in res.cells] == [
        ("dip", "600"), ("lasso", "600"), ("spline", "600")]
    assert all(np.isfinite(c.mean_mse) and c.ok for c in res.cells)
    emit_outputs(res, tmp_path)
    assert len(_rows(tmp_path / "results.csv")) == 4


def test_cardinality_and_files(tmp_path):
    res = run_experiment(_cfg(levels=(200, 400, 600)))
    written = emit_outputs(res, tmp_path)
    rows = _rows(tmp_path / "results.csv")
    assert rows[0] == "method,level,restart,mse,mean_mse,status"
    assert len(rows) == 1 + 2 * 3
    assert len(_rows(tmp_path / "restarts.csv")) == 1 + 3 * (2 + 1)
    names = {os.path.basename(p) for p in written}
    for lv in ("200", "400", "600"):
        assert {f"curve_dip_{lv}_0.csv", f"curve_dip_{lv}_1.csv", f"recon_dip_{lv}.csv",
                f"recon_lasso_{lv}.csv", f"observed_{lv}.csv"} <= names
    curve = _rows(tmp_path / "curve_dip_200_0.csv")
    assert curve[0] == "iteration,objective,fidelity,tv" and len(curve) == 1 + 8
    recon = load_csv(tmp_path / "recon_lasso_200.csv", "reconstruction")
    assert len(recon) == 1000  # cropped back to the input length


def test_empty_method_list_gives_header_only(tmp_path):
    res = run_experiment(_cfg(methods=()))
    emit_outputs(res, tmp_path)
    assert _rows(tmp_path / "results.csv") == ["method,level,restart,mse,mean_mse,status"]


def test_per_cell_failure_is_recorded_not_raised(tmp_path):
    res = run_experiment(_cfg(levels=(600, 5000)))
    bad = [c for c in res.cells if format_level(c.level) == "5000"]
    assert len(bad) == 2 and all("exceeds" in c.error for c in bad)
    assert all(c.ok for c in res.cells if format_level(c.level) == "600")
    emit_outputs(res, tmp_path)
    assert any("5000" in r and "exceeds" in r for r in _rows(tmp_path / "results.csv"))


def test_levels_are_independent():
    a = run_experiment(_cfg(levels=(300,), methods=("lasso",)))
    b = run_experiment(_cfg(levels=(300, 600), methods=("lasso",)))
    assert a.cell("lasso", 300).mean_mse == b.cell("lasso", 300).mean_mse


def test_rerun_is_byte_identical(tmp_path):
    cfg = _cfg(levels=(400,))
    emit_outputs(run_experiment(cfg), tmp_path / "a")
    emit_outputs(run_experiment(cfg), tmp_path / "b")
    names = sorted(os.listdir(tmp_path / "a"))
    assert names == sorted(os.listdir(tmp_path / "b"))
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert mismatch == [] and errors == []


@pytest.mark.parametrize("task", ["cs-gaussian", "cs-dct"])
def test_compressed_sensing_tasks(task):
    res = run_experiment(_cfg(task=task, levels=(256,)))
    assert [c.method for c in res.cells] == ["dip", "lasso"]
    assert all(c.ok and np.isfinite(c.mean_mse) for c in res.cells)
    assert res.levels[0].operator.kind == {"cs-gaussian": "gaussian", "cs-dct": "dct"}[task]


def test_denoise_uses_denoise_schedule():
    res = run_experiment(_cfg(task="denoise", levels=(0.2,), methods=("dip",),
                              recovery=FAST.replace(iterations=3000)))
    # denoise_config swaps in 300 steps and 8 filters at sigma 0.2
    assert res.cell("dip", 0.2).curves[0]["objective"].shape == (300,)


def test_denoise_sigma_zero_is_easy():
    sig = InputSpec("chirp", chirp=(4.0, 2.0, 1024, 1024.0))
    res = run_experiment(_cfg(task="denoise", input=sig, levels=(0.0,), methods=("dip",),
                              recovery=RecoveryConfig(restarts=1)))
    assert res.cell("dip", 0.0).mean_mse < 1e-2


def test_full_mask_recovers_exactly():
    # alpha > 0 shrinks every DCT coefficient by alpha * m, so exactness needs alpha = 0
    res = run_experiment(_cfg(levels=(1000,), methods=("lasso", "spline"), lasso=LassoConfig(alpha=0.0)))
    assert res.cell("spline", 1000).mean_mse < 1e-6
    assert res.cell("lasso", 1000).mean_mse < 1e-6


def test_full_mask_dip_fidelity_only():
    sig = InputSpec("chirp", chirp=(4.0, 2.0, 256, 256.0))
    cfg = _cfg(input=sig, levels=(256,), methods=("dip",),
               recovery=RecoveryConfig(restarts=1, iterations=3000, tv_lambda=0.0))
    assert run_experiment(cfg).cell("dip", 256).mean_mse < 1e-3


def test_gap_imputation_scores_gap_only():
    res = run_experiment(_cfg(levels=(50,), gap_start=400, methods=("spline",)))
    assert_allclose(res.levels[0].missing, np.arange(400, 450))
    assert np.isfinite(res.cell("spline", 50).mean_mse)


def test_external_results_are_merged(tmp_path):
    truth = run_experiment(_cfg(levels=(300,), methods=())).truth
    ext = tmp_path / "kalman.csv"
    save_csv(ext, {"300": truth + 0.1, "other": truth})
    res = run_experiment(_cfg(levels=(300, 600), methods=("lasso",),
                              external_results=(("kalman", str(ext)),)))
    kal = res.cell("kalman", 300)
    assert kal.ok and kal.mean_mse == pytest.approx(0.01, rel=1e-9)
    assert not res.cell("kalman", 600).ok  # no column for that level
    assert res.cell("lasso", 600).ok


def test_csv_with_gaps_imputes_observed_mask(tmp_path):
    t = np.arange(200)
    v = np.sin(t / 10.0)
    p = tmp_path / "sensor.csv"
    save_csv(p, {"v": np.where((t > 80) & (t < 90), np.nan, v)})
    cfg = _cfg(input=InputSpec("csv", str(p), "v"), levels=(), methods=("spline", "lasso"))
    res = run_experiment(cfg)
    assert [c.method for c in res.cells] == ["spline", "lasso"]
    rec = res.cell("spline", "observed").reconstruction
    assert rec.shape == (200,) and np.all(np.isfinite(rec))
    emit_outputs(res, tmp_path / "out")
    assert (tmp_path / "out" / "recon_spline_observed.csv").exists()


def test_csv_with_gaps_rejected_for_other_tasks(tmp_path):
    p = tmp_path / "sensor.csv"
    save_csv(p, {"v": [1.0, np.nan, 2.0, 3.0]})
    with pytest.raises(ConfigError):
        run_experiment(_cfg(task="cs-dct", input=InputSpec("csv", str(p), "v"), levels=(2,),
                            methods=("lasso",)))


def test_wav_input_with_decimation(tmp_path):
    from scipy.io import wavfile

    fs = 2000
    x = (np.sin(2 * np.pi * 30 * np.arange(2000) / fs) * 20000).astype(np.int16)
    p = tmp_path / "a.wav"
    wavfile.write(p, fs, x)
    cfg = _cfg(input=InputSpec("wav", str(p), decimate=2, length=900), levels=(450,),
               methods=("spline",))
    res = run_experiment(cfg)
    assert res.original_length == 900 and res.n == 1024
    assert res.cell("spline", 450).mean_mse < 1e-2


def test_noise_impedance_task(tmp_path):
    sig = InputSpec("chirp", chirp=(4.0, 2.0, 64, 64.0))
    res = run_experiment(_cfg(task="noise-impedance", input=sig, levels=(0.2,), methods=("dip",),
                              recovery=FAST.replace(iterations=12)))
    curves = res.impedance["0.2"]
    assert set(curves) == {"signal", "noise", "signal+noise"}
    emit_outputs(res, tmp_path)
    rows = _rows(tmp_path / "impedance_0.2.csv")
    assert rows[0] == "iteration,signal,noise,signal+noise" and len(rows) == 13


def test_config_text_round_trip(tmp_path):
    cfg = _cfg(gap_start=10, external_results=(("wavelet", "w.csv"),))
    again = load_config(config_to_text(cfg))
    assert again == cfg
    path = tmp_path / "exp.ini"
    path.write_text(config_to_text(_cfg(task="denoise", levels=(0.1, 0.15))))
    assert load_config(str(path)).levels == (0.1, 0.15)


def test_manifest_replays_to_same_config(tmp_path):
    cfg = _cfg(levels=(300,), methods=("lasso",))
    emit_outputs(run_experiment(cfg), tmp_path)
    assert load_config(str(tmp_path / "manifest.txt")) == cfg
    text = (tmp_path / "manifest.txt").read_text()
    assert "level.300.operator = mask" in text


def test_unknown_config_keys_rejected():
    with pytest.raises(ConfigError):
        load_config("[experiment]\ntask = impute\nlevels = 5\n[recovery]\nlearning_rat = 1\n")


def test_unwritable_output_dir_reports_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    res = run_experiment(_cfg(levels=(300,), methods=("lasso",)))
    with pytest.raises(OSError, match="file"):
        emit_outputs(res, blocker / "sub")
