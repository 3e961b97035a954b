"""Loading, normalizing and generating univariate signals."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.io import wavfile

from .generator import CANONICAL_LATENT


class SignalFormatError(ValueError):
    """Input file could not be parsed as a signal."""


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    sample_rate: float | None = None
    source: str = ""
    missing: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if s.size == 0:
            raise ValueError("a signal needs at least one sample")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "missing", np.asarray(self.missing, dtype=np.int64).reshape(-1))

    def __len__(self):
        return self.samples.size

    @property
    def observed(self) -> np.ndarray:
        """Indices of non-missing samples."""
        keep = np.ones(self.samples.size, dtype=bool)
        keep[self.missing] = False
        return np.flatnonzero(keep)


# ---------------------------------------------------------------------------
# WAV
# ---------------------------------------------------------------------------


def load_wav(path) -> Signal:
    """Read a PCM (8/16/24/32-bit integer or float) WAV file as mono in [-1, 1).

    Channels are averaged.  Integer data is divided by the magnitude of its
    type's minimum, e.g. 32768 for 16-bit; 8-bit data is unsigned and centred
    on 128 first.
    """
    path = os.fspath(path)
    try:
        rate, data = wavfile.read(path)
    except OSError as exc:
        raise SignalFormatError(f"{path}: {exc}") from exc
    except Exception as exc:  # scipy raises assorted types on malformed chunks
        raise SignalFormatError(f"{path}: not a readable PCM WAV file ({exc!r})") from exc
    if data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    elif np.issubdtype(data.dtype, np.signedinteger):
        # scipy returns other depths (e.g. 24-bit) left-justified in the container type
        x = data.astype(np.float64) / float(-np.iinfo(data.dtype).min)
    elif np.issubdtype(data.dtype, np.floating):
        x = data.astype(np.float64)
    else:
        raise SignalFormatError(f"{path}: unsupported sample type {data.dtype}")
    if x.ndim == 2:
        x = x.mean(axis=1)
    if x.size == 0:
        raise SignalFormatError(f"{path}: no samples")
    return Signal(x, float(rate), source=f"wav:{path}")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def load_csv(path, column=0) -> Signal:
    """Read one column of a comma-separated file with a header row.

    ``column`` is a header name or a 0-based index.  Blank cells become NaN
    and are listed in ``Signal.missing``.
    """
    path = os.fspath(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SignalFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if isinstance(column, str) and column in header:
        col = header.index(column)
    else:
        try:
            col = int(column)
        except (TypeError, ValueError):
            raise SignalFormatError(f"{path}: no column named {column!r} (have {header})") from None
        if not 0 <= col < len(header):
            raise SignalFormatError(f"{path}: column index {col} out of range ({len(header)} columns)")
    values, missing = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        cell = row[col].strip() if col < len(row) else ""
        if cell == "":
            missing.append(len(values))
            values.append(np.nan)
            continue
        try:
            values.append(float(cell))
        except ValueError:
            raise SignalFormatError(
                f"{path}: row {lineno}, column {header[col]!r}: cannot parse {cell!r}") from None
    if not values:
        raise SignalFormatError(f"{path}: column {header[col]!r} has no data rows")
    return Signal(np.array(values), None, source=f"csv:{path}:{header[col]}", missing=missing)


def _fmt(v) -> str:
    v = float(v)
    return "" if np.isnan(v) else format(v, ".17g")


def save_csv(path, columns: dict) -> None:
    """Write named columns (header row, 17 significant digits, LF endings).

    Shorter columns are padded with blank cells; NaN is written blank.
    """
    path = os.fspath(path)
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=np.float64).reshape(-1) for k in names]
    length = max((a.size for a in arrays), default=0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(length):
            w.writerow([_fmt(a[i]) if i < a.size else "" for a in arrays])


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitRangeMap:
    """Affine map ``x -> scale * x + offset`` taking [min, max] to [-1, 1]."""

    lo: float
    hi: float

    @property
    def scale(self) -> float:
        return 2.0 / (self.hi - self.lo)

    @property
    def offset(self) -> float:
        return -2.0 * self.lo / (self.hi - self.lo) - 1.0

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 2.0 * (x - self.lo) / (self.hi - self.lo) - 1.0

    def inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        return (y + 1.0) * 0.5 * (self.hi - self.lo) + self.lo


def normalize_unit_range(s: Signal):
    """Linearly map a signal onto [-1, 1]; returns ``(signal, UnitRangeMap)``."""
    lo, hi = float(np.nanmin(s.samples)), float(np.nanmax(s.samples))
    if not hi > lo:
        raise ValueError("cannot normalize a constant signal (zero range)")
    mapping = UnitRangeMap(lo, hi)
    out = np.clip(mapping.forward(s.samples), -1.0, 1.0)
    return replace(s, samples=out), mapping


def lowpass_taps(factor: int) -> np.ndarray:
    """Hamming-windowed sinc, ``8*factor + 1`` taps, cutoff 0.45/factor of Nyquist."""
    ntaps = 8 * factor + 1
    half = ntaps // 2
    cutoff = 0.45 / factor  # fraction of Nyquist
    k = np.arange(ntaps) - half
    h = cutoff * np.sinc(cutoff * k) * np.hamming(ntaps)
    return h / h.sum()


def decimate(s: Signal, factor: int) -> Signal:
    """Anti-alias filter (zero phase) and keep every ``factor``-th sample."""
    factor = int(factor)
    if factor < 1:
        raise ValueError(f"decimation factor must be >= 1, got {factor}")
    if s.sample_rate is None:
        raise ValueError("decimate needs a known sample rate")
    if factor == 1:
        return s
    h = lowpass_taps(factor)
    half = h.size // 2
    padded = np.pad(s.samples, half, mode="symmetric")
    filtered = np.convolve(padded, h, mode="valid")
    return Signal(filtered[::factor], s.sample_rate / factor, source=s.source)


def gen_chirp(f0: float, f1: float, n: int, fs: float) -> Signal:
    """Unit-amplitude linear chirp sweeping ``f0`` to ``f1`` Hz over ``n`` samples."""
    if not fs > 2 * max(f0, f1):
        raise ValueError(f"sample rate {fs} Hz aliases a sweep up to {max(f0, f1)} Hz")
    n = int(n)
    if n < 1:
        raise ValueError("chirp length must be positive")
    t = np.arange(n) / fs
    duration = n / fs
    phase = f0 * t + (f1 - f0) * t * t / (2.0 * duration)
    return Signal(np.sin(2.0 * np.pi * phase), float(fs), source=f"chirp:{f0:g},{f1:g},{n},{fs:g}")


def valid_length(n: int) -> int:
    """Smallest canonical generator length ``16 * 2**k`` (k >= 1) that is >= n."""
    target = 2 * CANONICAL_LATENT
    while target < n:
        target *= 2
    return target


def pad_to_valid_length(s: Signal):
    """Zero-pad to :func:`valid_length`; returns ``(signal, original_length)``."""
    n = len(s)
    target = valid_length(n)
    if target == n:
        return s, n
    samples = np.concatenate([s.samples, np.zeros(target - n)])
    return replace(s, samples=samples), n


def crop(x, original_length: int) -> np.ndarray:
    return np.asarray(x)[..., :original_length]
