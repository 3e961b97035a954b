"""Linear measurement processes ``y = A x + noise`` and the orthonormal DCT.

All operators are immutable and expose ``apply`` (A x) and ``adjoint``
(A^T r).  Random constructions draw from numpy's PCG64 bit generator seeded
through :func:`numpy.random.default_rng`; Gaussian variates come from numpy's
ziggurat sampler.  Both are stable across platforms, so an operator is fully
described by ``(kind, n, m, seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("mask", "gaussian", "dct", "identity")


# ---------------------------------------------------------------------------
# orthonormal DCT-II / DCT-III
# ---------------------------------------------------------------------------


def _is_pow2(n):
    return n >= 1 and n & (n - 1) == 0


def dct_matrix(n: int) -> np.ndarray:
    """Dense orthonormal DCT-II matrix (row k, column i)."""
    i = np.arange(n)
    k = i[:, None]
    mat = np.cos(np.pi * (2 * i[None, :] + 1) * k / (2 * n))
    mat *= np.sqrt(2.0 / n)
    mat[0] /= np.sqrt(2.0)
    return mat


def _dct_direct(x):
    return dct_matrix(x.shape[-1]) @ x


def _idct_direct(c):
    return dct_matrix(c.shape[-1]).T @ c


def _dct_fft(x):
    # Makhoul: reorder even/odd samples, one complex FFT, then twiddle.
    n = x.shape[-1]
    v = np.concatenate([x[0::2], x[1::2][::-1]])
    spec = np.fft.fft(v)
    k = np.arange(n)
    c = np.real(spec * np.exp(-1j * np.pi * k / (2 * n)))
    c *= np.sqrt(2.0 / n)
    c[0] /= np.sqrt(2.0)
    return c


def _idct_fft(c):
    n = c.shape[-1]
    k = np.arange(n)
    w = c * np.sqrt(n / 2.0)
    w = w.astype(np.complex128)
    w[0] *= np.sqrt(2.0)
    # rebuild the Hermitian spectrum of the reordered sequence
    rev = np.zeros(n, dtype=np.complex128)
    rev[1:] = c[1:][::-1] * np.sqrt(n / 2.0)
    spec = (w - 1j * rev) * np.exp(1j * np.pi * k / (2 * n))
    v = np.real(np.fft.ifft(spec))
    x = np.empty(n)
    half = (n + 1) // 2
    x[0::2] = v[:half]
    x[1::2] = v[half:][::-1]
    return x


def dct_forward(x) -> np.ndarray:
    """Orthonormal DCT-II; FFT-based for power-of-two lengths, direct otherwise."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("dct_forward expects a vector")
    return _dct_fft(x) if _is_pow2(x.size) else _dct_direct(x)


def dct_inverse(c) -> np.ndarray:
    """Inverse of :func:`dct_forward` (orthonormal DCT-III)."""
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1:
        raise ValueError("dct_inverse expects a vector")
    return _idct_fft(c) if _is_pow2(c.size) else _idct_direct(c)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    """A linear map from length-``n`` signals to ``m`` measurements.

    ``indices`` holds the kept samples (mask) or DCT rows (dct); ``matrix`` is
    set only for the Gaussian variant.  ``seed`` is recorded for replay.
    """

    kind: str
    n: int
    m: int
    indices: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind in ("mask", "dct"):
            idx = self.indices
            if idx is None or idx.ndim != 1 or idx.size != self.m:
                raise ValueError(f"{self.kind}: need exactly m={self.m} indices")
            if idx.size and (idx[0] < 0 or idx[-1] >= self.n or np.any(np.diff(idx) <= 0)):
                raise ValueError(f"{self.kind}: indices must be strictly increasing in [0, {self.n})")
        elif self.kind == "gaussian":
            if self.matrix is None or self.matrix.shape != (self.m, self.n):
                raise ValueError(f"gaussian: matrix must have shape ({self.m}, {self.n})")
        elif self.m != self.n:
            raise ValueError("identity operator needs m == n")
        for arr in (self.indices, self.matrix):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def shape(self):
        return (self.m, self.n)

    def apply(self, x) -> np.ndarray:
        return apply(self, x)

    def adjoint(self, r) -> np.ndarray:
        return adjoint(self, r)

    def describe(self) -> str:
        """Text form ``kind n m seed`` used in experiment manifests."""
        return f"{self.kind} n={self.n} m={self.m} seed={self.seed}"

    def to_dense(self) -> np.ndarray:
        return np.stack([self.apply(e) for e in np.eye(self.n)], axis=1)


def _check_nm(n, m, cap=True):
    n, m = int(n), int(m)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    if cap and m > n:
        raise ValueError(f"cannot keep m={m} of n={n} rows")
    return n, m


def _sample_rows(n, m, seed):
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=m, replace=False)).astype(np.int64)


def make_mask_operator(n: int, m: int, seed) -> MeasurementOperator:
    """Keep ``m`` uniformly chosen samples (rows of the identity)."""
    n, m = _check_nm(n, m)
    return MeasurementOperator("mask", n, m, indices=_sample_rows(n, m, seed), seed=seed)


def mask_from_indices(n: int, kept) -> MeasurementOperator:
    """Mask operator for an explicit set of observed sample positions."""
    kept = np.unique(np.asarray(kept, dtype=np.int64))
    return MeasurementOperator("mask", int(n), kept.size, indices=kept)


def make_gaussian_operator(n: int, m: int, seed) -> MeasurementOperator:
    """Dense iid N(0, 1/m) matrix."""
    n, m = _check_nm(n, m, cap=False)
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((m, n)) / np.sqrt(m)
    return MeasurementOperator("gaussian", n, m, matrix=mat, seed=seed)


def make_dct_operator(n: int, m: int, seed) -> MeasurementOperator:
    """Keep ``m`` uniformly chosen rows of the orthonormal DCT-II matrix."""
    n, m = _check_nm(n, m)
    return MeasurementOperator("dct", n, m, indices=_sample_rows(n, m, seed), seed=seed)


def identity_operator(n: int) -> MeasurementOperator:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return MeasurementOperator("identity", n, n)


def apply(op: MeasurementOperator, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != op.n:
        raise ValueError(f"{op.kind} operator expects length {op.n}, got {x.size}")
    if op.kind == "mask":
        return x[op.indices]
    if op.kind == "gaussian":
        return op.matrix @ x
    if op.kind == "dct":
        return dct_forward(x)[op.indices]
    return x.copy()


def adjoint(op: MeasurementOperator, r) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if r.size != op.m:
        raise ValueError(f"{op.kind} adjoint expects length {op.m}, got {r.size}")
    if op.kind == "mask":
        out = np.zeros(op.n)
        out[op.indices] = r
        return out
    if op.kind == "gaussian":
        return op.matrix.T @ r
    if op.kind == "dct":
        coeffs = np.zeros(op.n)
        coeffs[op.indices] = r
        return dct_inverse(coeffs)
    return r.copy()


def add_awgn(x, sigma: float, seed) -> np.ndarray:
    """``x + sigma * g`` with g iid standard normal."""
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    noise = np.random.default_rng(seed).standard_normal(x.shape)
    return x + sigma * noise


def make_operator(kind: str, n: int, m: int, seed) -> MeasurementOperator:
    """Dispatch on ``kind`` (``mask``, ``gaussian``, ``dct`` or ``identity``)."""
    if kind == "mask":
        return make_mask_operator(n, m, seed)
    if kind == "gaussian":
        return make_gaussian_operator(n, m, seed)
    if kind == "dct":
        return make_dct_operator(n, m, seed)
    if kind == "identity":
        return identity_operator(n)
    raise ValueError(f"unknown operator kind {kind!r}")
