import wave

import numpy as np
import pytest
import scipy.signal
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from dip1d.signal_io import (Signal, SignalFormatError, crop, decimate, gen_chirp, load_csv,
                             load_wav, lowpass_taps, normalize_unit_range, pad_to_valid_length,
                             save_csv, valid_length)


def _write_wav(path, frames, width, rate=8000, channels=1):
    """Reference writer: the standard library ``wave`` module."""
    frames = np.asarray(frames)
    if width == 1:
        raw = (frames.astype(np.int64) + 128).astype(np.uint8).tobytes()
    elif width == 3:
        v = frames.astype(np.int64).reshape(-1) & 0xFFFFFF
        raw = np.stack([v & 0xFF, (v >> 8) & 0xFF, (v >> 16) & 0xFF], axis=1).astype(np.uint8).tobytes()
    else:
        raw = frames.astype({2: "<i2", 4: "<i4"}[width]).tobytes()
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(width)
        w.setframerate(rate)
        w.writeframes(raw)


# -- WAV ----------------------------------------------------------------------


def test_wav_16bit_scaling(tmp_path):
    p = tmp_path / "a.wav"
    _write_wav(p, [0, 16384, -32768], 2, rate=16000)
    s = load_wav(p)
    assert_array_equal(s.samples, [0.0, 0.5, -1.0])
    assert s.sample_rate == 16000


def test_wav_stereo_is_averaged(tmp_path):
    p = tmp_path / "s.wav"
    _write_wav(p, np.array([[16384, 0], [0, 16384], [-32768, 0]]), 2, channels=2)
    assert_allclose(load_wav(p).samples, [0.25, 0.25, -0.5])


@pytest.mark.parametrize("width,bits", [(1, 8), (2, 16), (3, 24), (4, 32)])
def test_wav_round_trip_within_one_lsb(tmp_path, width, bits, rng):
    x = rng.uniform(-1, 1, 500)
    full = 2 ** (bits - 1)
    ints = np.clip(np.round(x * full), -full, full - 1)
    p = tmp_path / f"r{bits}.wav"
    _write_wav(p, ints, width)
    s = load_wav(p)
    assert np.max(np.abs(s.samples - x)) <= 1.0 / full
    assert_allclose(s.samples, ints / full, atol=1e-15)


def test_wav_float32(tmp_path, rng):
    from scipy.io import wavfile

    x = rng.uniform(-1, 1, 100).astype(np.float32)
    p = tmp_path / "f.wav"
    wavfile.write(p, 8192, x)
    assert_allclose(load_wav(p).samples, x)


def test_wav_malformed_rejected(tmp_path):
    p = tmp_path / "bad.wav"
    p.write_bytes(b"RIFF\x00\x00\x00\x00WAVEjunk")
    with pytest.raises(SignalFormatError):
        load_wav(p)
    with pytest.raises(SignalFormatError):
        load_wav(tmp_path / "missing.wav")


# -- CSV ----------------------------------------------------------------------


def test_csv_simple(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("v\n1\n2\n")
    s = load_csv(p, "v")
    assert_array_equal(s.samples, [1.0, 2.0])
    assert s.missing.size == 0


def test_csv_blank_cell_is_missing(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("t,v\n0,1\n1,\n2,3\n")
    s = load_csv(p, "v")
    assert s.samples[0] == 1.0 and np.isnan(s.samples[1])
    assert_array_equal(s.missing, [1])
    assert_array_equal(s.observed, [0, 2])
    assert_array_equal(load_csv(p, 0).samples, [0, 1, 2])


def test_csv_errors_have_location(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("v\n1\nabc\n")
    with pytest.raises(SignalFormatError, match="row 3"):
        load_csv(p, "v")
    with pytest.raises(SignalFormatError, match="no column"):
        load_csv(p, "w")


def test_csv_save_load_bitwise(tmp_path, rng):
    x = rng.standard_normal(1000) * 10.0 ** rng.integers(-8, 8, 1000)
    p = tmp_path / "x.csv"
    save_csv(p, {"x": x, "short": x[:3]})
    assert_array_equal(load_csv(p, "x").samples, x)
    raw = p.read_bytes()
    assert b"\r" not in raw and raw.startswith(b"x,short\n")
    assert load_csv(p, "short").missing.size == 997


# -- normalization ------------------------------------------------------------


def test_normalize_examples():
    s, m = normalize_unit_range(Signal([0.0, 5.0, 10.0]))
    assert_allclose(s.samples, [-1, 0, 1])
    s2, _ = normalize_unit_range(Signal([-1.0, 0.3, 1.0]))
    assert_allclose(s2.samples, [-1.0, 0.3, 1.0], atol=1e-15)
    assert m.scale == pytest.approx(0.2) and m.offset == pytest.approx(-1.0)


def test_normalize_constant_rejected():
    with pytest.raises(ValueError):
        normalize_unit_range(Signal([2.0, 2.0]))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 100), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_normalize_inverse_round_trip(n, shift, spread, seed):
    x = shift + spread * np.random.default_rng(seed).standard_normal(n)
    if np.ptp(x) == 0:
        return
    s, m = normalize_unit_range(Signal(x))
    assert s.samples.min() >= -1 and s.samples.max() <= 1
    assert_allclose(m.inverse(s.samples), x, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(x))))


def test_normalize_keeps_missing(tmp_path):
    s, _ = normalize_unit_range(Signal([0.0, np.nan, 4.0], missing=[1]))
    assert_array_equal(s.missing, [1])
    assert s.samples[2] == 1.0


# -- decimation ---------------------------------------------------------------


def test_decimate_factor_one_unchanged():
    s = Signal(np.arange(10.0), 100.0)
    assert decimate(s, 1) is s


def test_decimate_needs_rate():
    with pytest.raises(ValueError):
        decimate(Signal(np.zeros(10)), 2)


def test_lowpass_taps_shape():
    h = lowpass_taps(2)
    assert h.size == 17
    assert_allclose(h, h[::-1])
    assert h.sum() == pytest.approx(1.0)


def test_decimate_tone_passes():
    fs = 16384.0
    t = np.arange(16384) / fs
    s = decimate(Signal(np.sin(2 * np.pi * 100 * t), fs), 2)
    assert s.sample_rate == 8192.0
    ref = np.sin(2 * np.pi * 100 * np.arange(8192) / 8192.0)
    inner = slice(100, -100)
    assert np.max(np.abs(s.samples[inner] - ref[inner])) < 0.01


def test_decimate_attenuates_content_above_new_nyquist(rng):
    # white noise high-passed to the band that would alias
    fs = 16384.0
    noise = rng.standard_normal(1 << 16)
    hp = scipy.signal.firwin(401, 0.55, pass_zero=False)
    alias_band = np.convolve(noise, hp, mode="same")
    out = decimate(Signal(alias_band, fs), 2).samples
    in_power = np.mean(alias_band ** 2)
    out_power = np.mean(out[200:-200] ** 2)
    assert 10 * np.log10(out_power / in_power) <= -30


# -- chirps -------------------------------------------------------------------


def test_chirp_zero_sweep_is_tone():
    s = gen_chirp(100.0, 100.0, 8192, 8192.0)
    t = np.arange(8192) / 8192.0
    assert_allclose(s.samples, np.sin(2 * np.pi * 100 * t), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(1, 1000), st.floats(1, 1000), st.integers(1, 4000))
def test_chirp_starts_at_zero_and_bounded(f0, f1, n):
    s = gen_chirp(f0, f1, n, 4096.0)
    assert s.samples[0] == 0.0
    assert np.max(np.abs(s.samples)) <= 1.0


def test_chirp_rejects_aliasing():
    with pytest.raises(ValueError):
        gen_chirp(750.0, 250.0, 100, 1500.0)


def test_chirp_instantaneous_frequency_by_stft():
    fs, n = 8192.0, 16384
    x = gen_chirp(750.0, 250.0, n, fs).samples
    f, t, Z = scipy.signal.stft(x, fs=fs, nperseg=2048, noverlap=1536, boundary=None)
    T = n / fs
    for frac in (0.2, 0.5, 0.85):
        j = int(np.argmin(np.abs(t - frac * T)))
        expected = 750.0 + (250.0 - 750.0) * t[j] / T
        assert abs(f[np.argmax(np.abs(Z[:, j]))] - expected) < 10.0


# -- padding ------------------------------------------------------------------


def test_valid_lengths():
    assert valid_length(1024) == 1024
    assert valid_length(1000) == 1024
    assert valid_length(1025) == 2048
    assert valid_length(3) == 32


def test_pad_examples():
    s, n = pad_to_valid_length(Signal(np.ones(1024)))
    assert n == 1024 and len(s) == 1024
    s, n = pad_to_valid_length(Signal(np.ones(1000)))
    assert n == 1000 and len(s) == 1024
    assert_array_equal(s.samples[1000:], 0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(100, 2000), st.integers(0, 2**32 - 1))
def test_crop_pad_round_trip(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    s, orig = pad_to_valid_length(Signal(x))
    assert_array_equal(crop(s.samples, orig), x)
