"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba kernels are used when numba imports cleanly and the environment
variable ``DIP1D_NUMBA`` is not ``"0"``.  The convolution gather/scatter and
the elementwise kernels accumulate in the same order on both paths; the total
variation sum does not (numpy sums pairwise), so the two paths agree to
rounding there.  Each path is deterministic on its own.

Tap layout used by the convolution kernels: a stride-1 or strided convolution
of an (optionally nearest-upsampled) input is computed as::

    taps[t] = W[:, :, t] @ x            # shape (k, C_out, L_in)
    out[:, j] = b + sum_t taps[t][:, (j*stride + t - pad) // factor]

where the source index is only used when ``0 <= j*stride + t - pad <
factor*L_in``.  With ``factor == 1`` this is an ordinary zero-padded
cross-correlation; with ``factor > 1`` it equals nearest upsampling followed by
the convolution, at ``1/factor`` of the multiply cost.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _env_wants_numba() -> bool:
    return os.environ.get("DIP1D_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _valid_range(n_out, stride, offset, limit):
    """Range ``[lo, hi)`` of j in ``[0, n_out)`` with 0 <= j*stride + offset < limit."""
    lo = max(0, -(offset // stride))
    hi = min(n_out, (limit - 1 - offset) // stride + 1)
    return lo, hi


def _gather_np(taps, out, factor, stride, pad):
    k, _, n_in = taps.shape
    n_out = out.shape[1]
    limit = factor * n_in
    if stride == 1:
        for t in range(k):
            for r in range(factor):
                # output indices j = factor*i + r
                n_phase = (n_out - r + factor - 1) // factor
                if n_phase <= 0:
                    continue
                d = (r + t - pad) // factor
                # need 0 <= factor*i + r + t - pad < limit
                lo, hi = _valid_range(n_phase, factor, r + t - pad, limit)
                if hi <= lo:
                    continue
                out[:, r::factor][:, lo:hi] += taps[t][:, lo + d:hi + d]
        return out
    j = np.arange(n_out)
    for t in range(k):
        q = j * stride + t - pad
        ok = (q >= 0) & (q < limit)
        out[:, j[ok]] += taps[t][:, q[ok] // factor]
    return out


def _scatter_np(dout, dtaps, factor, stride, pad):
    k, _, n_in = dtaps.shape
    n_out = dout.shape[1]
    limit = factor * n_in
    if stride == 1:
        for t in range(k):
            for r in range(factor):
                n_phase = (n_out - r + factor - 1) // factor
                if n_phase <= 0:
                    continue
                d = (r + t - pad) // factor
                lo, hi = _valid_range(n_phase, factor, r + t - pad, limit)
                if hi <= lo:
                    continue
                dtaps[t][:, lo + d:hi + d] += dout[:, r::factor][:, lo:hi]
        return dtaps
    j = np.arange(n_out)
    for t in range(k):
        q = j * stride + t - pad
        ok = (q >= 0) & (q < limit)
        # source indices repeat when factor > stride
        np.add.at(dtaps[t].T, q[ok] // factor, dout[:, j[ok]].T)
    return dtaps


def _leaky_forward_np(x, slope):
    return np.maximum(x, slope * x)


def _leaky_backward_np(x, grad, slope):
    return np.where(x >= slope * x, grad, slope * grad)


def _tv_np(x):
    d = np.diff(x)
    s = np.sign(d)
    g = np.zeros_like(x)
    g[1:] += s
    g[:-1] -= s
    return float(np.abs(d).sum()), g


def _rmsprop_np(w, g, square_avg, momentum_buf, lr, momentum, weight_decay, rho, eps):
    if weight_decay != 0.0:
        g = g + weight_decay * w
    square_avg *= rho
    square_avg += (1.0 - rho) * g * g
    step = g / np.sqrt(square_avg + eps)
    if momentum != 0.0:
        momentum_buf *= momentum
        momentum_buf += step
        step = momentum_buf
    else:
        momentum_buf[...] = step
    w -= lr * step


NUMPY = SimpleNamespace(
    name="numpy",
    gather=_gather_np,
    scatter=_scatter_np,
    leaky_forward=_leaky_forward_np,
    leaky_backward=_leaky_backward_np,
    tv=_tv_np,
    rmsprop=_rmsprop_np,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _shift_table(factor, k, pad):
        shift = np.empty((factor, k), dtype=np.int64)
        for r in range(factor):
            for t in range(k):
                shift[r, t] = (r + t - pad) // factor
        return shift

    @njit(cache=True)
    def _gather_s1_nb(taps, out, factor, pad):
        # one pass over the output; per element: bias (already in out) + taps in t order
        k, n_ch, n_in = taps.shape
        n_out = out.shape[1]
        shift = _shift_table(factor, k, pad)
        lo_safe = max(0, -shift.min())
        hi_safe = min(n_in - max(0, shift.max()), n_out // factor)
        for c in range(n_ch):
            for i in range((n_out + factor - 1) // factor):
                if i >= lo_safe and i < hi_safe:
                    for r in range(factor):
                        j = i * factor + r
                        acc = out[c, j]
                        for t in range(k):
                            acc += taps[t, c, i + shift[r, t]]
                        out[c, j] = acc
                    continue
                for r in range(factor):
                    j = i * factor + r
                    if j >= n_out:
                        break
                    acc = out[c, j]
                    for t in range(k):
                        src = i + shift[r, t]
                        if src >= 0 and src < n_in:
                            acc += taps[t, c, src]
                    out[c, j] = acc
        return out

    @njit(cache=True)
    def _scatter_s1_nb(dout, dtaps, factor, pad):
        k, n_ch, n_in = dtaps.shape
        n_out = dout.shape[1]
        n_rows = (n_out + factor - 1) // factor
        shift = _shift_table(factor, k, pad)
        for t in range(k):
            lo_safe = max(0, shift[:, t].max())
            hi_safe = min(n_in, (n_out // factor) + shift[:, t].min())
            for c in range(n_ch):
                for s in range(n_in):
                    acc = dtaps[t, c, s]
                    if s >= lo_safe and s < hi_safe:
                        for r in range(factor):
                            acc += dout[c, (s - shift[r, t]) * factor + r]
                    else:
                        for r in range(factor):
                            i = s - shift[r, t]
                            j = i * factor + r
                            if i >= 0 and i < n_rows and j < n_out:
                                acc += dout[c, j]
                    dtaps[t, c, s] = acc
        return dtaps

    @njit(cache=True)
    def _gather_strided_nb(taps, out, factor, stride, pad):
        k, n_ch, n_in = taps.shape
        n_out = out.shape[1]
        limit = factor * n_in
        for t in range(k):
            for c in range(n_ch):
                for j in range(n_out):
                    q = j * stride + t - pad
                    if q >= 0 and q < limit:
                        out[c, j] += taps[t, c, q // factor]
        return out

    @njit(cache=True)
    def _scatter_strided_nb(dout, dtaps, factor, stride, pad):
        k, n_ch, n_in = dtaps.shape
        n_out = dout.shape[1]
        limit = factor * n_in
        for t in range(k):
            for c in range(n_ch):
                for j in range(n_out):
                    q = j * stride + t - pad
                    if q >= 0 and q < limit:
                        dtaps[t, c, q // factor] += dout[c, j]
        return dtaps

    @njit(cache=True)
    def _gather_up2k3_nb(taps, out):
        # factor 2, kernel 3, pad 1:
        #   out[2i]   += taps0[i-1] + taps1[i] + taps2[i]
        #   out[2i+1] += taps0[i]   + taps1[i] + taps2[i+1]
        n_ch, n_in = taps.shape[1], taps.shape[2]
        for c in range(n_ch):
            t0 = taps[0, c]
            t1 = taps[1, c]
            t2 = taps[2, c]
            o = out[c]
            o[0] = o[0] + t1[0] + t2[0]
            for i in range(1, n_in):
                o[2 * i] = o[2 * i] + t0[i - 1] + t1[i] + t2[i]
            for i in range(n_in - 1):
                o[2 * i + 1] = o[2 * i + 1] + t0[i] + t1[i] + t2[i + 1]
            last = n_in - 1
            o[2 * last + 1] = o[2 * last + 1] + t0[last] + t1[last]
        return out

    @njit(cache=True)
    def _scatter_up2k3_nb(dout, dtaps):
        n_ch, n_in = dtaps.shape[1], dtaps.shape[2]
        for c in range(n_ch):
            g = dout[c]
            d0 = dtaps[0, c]
            d1 = dtaps[1, c]
            d2 = dtaps[2, c]
            for s in range(n_in - 1):
                d0[s] = d0[s] + g[2 * s + 2] + g[2 * s + 1]
            d0[n_in - 1] = d0[n_in - 1] + g[2 * n_in - 1]
            for s in range(n_in):
                d1[s] = d1[s] + g[2 * s] + g[2 * s + 1]
            d2[0] = d2[0] + g[0]
            for s in range(1, n_in):
                d2[s] = d2[s] + g[2 * s] + g[2 * s - 1]
        return dtaps

    def _gather_nb(taps, out, factor, stride, pad):
        if stride == 1 and factor == 2 and pad == 1 and taps.shape[0] == 3 and out.shape[1] == 2 * taps.shape[2]:
            return _gather_up2k3_nb(taps, out)
        if stride == 1:
            return _gather_s1_nb(taps, out, factor, pad)
        return _gather_strided_nb(taps, out, factor, stride, pad)

    def _scatter_nb(dout, dtaps, factor, stride, pad):
        if stride == 1 and factor == 2 and pad == 1 and dtaps.shape[0] == 3 and dout.shape[1] == 2 * dtaps.shape[2]:
            return _scatter_up2k3_nb(dout, dtaps)
        if stride == 1:
            return _scatter_s1_nb(dout, dtaps, factor, pad)
        return _scatter_strided_nb(dout, dtaps, factor, stride, pad)

    @njit(cache=True)
    def _leaky_forward_nb(x, slope):
        out = np.empty_like(x)
        xf = x.ravel()
        of = out.ravel()
        for i in range(xf.size):
            v = xf[i]
            sv = slope * v
            of[i] = v if v >= sv else sv
        return out

    @njit(cache=True)
    def _leaky_backward_nb(x, grad, slope):
        out = np.empty_like(grad)
        xf = x.ravel()
        gf = grad.ravel()
        of = out.ravel()
        for i in range(xf.size):
            v = xf[i]
            of[i] = gf[i] if v >= slope * v else slope * gf[i]
        return out

    @njit(cache=True)
    def _tv_nb(x):
        n = x.size
        g = np.zeros_like(x)
        total = 0.0
        for i in range(n - 1):
            d = x[i + 1] - x[i]
            if d > 0:
                total += d
                g[i + 1] += 1.0
                g[i] -= 1.0
            elif d < 0:
                total -= d
                g[i + 1] -= 1.0
                g[i] += 1.0
        return total, g

    @njit(cache=True)
    def _rmsprop_kernel(w, g, s, u, lr, momentum, weight_decay, rho, eps):
        wf = w.ravel()
        gf = g.ravel()
        sf = s.ravel()
        uf = u.ravel()
        for i in range(wf.size):
            gi = gf[i] + weight_decay * wf[i]
            si = rho * sf[i] + (1.0 - rho) * gi * gi
            sf[i] = si
            step = gi / np.sqrt(si + eps)
            ui = momentum * uf[i] + step
            uf[i] = ui
            wf[i] -= lr * ui

    def _rmsprop_nb(w, g, square_avg, momentum_buf, lr, momentum, weight_decay, rho, eps):
        _rmsprop_kernel(w, g, square_avg, momentum_buf, float(lr), float(momentum),
                        float(weight_decay), float(rho), float(eps))

    def _tv_nb_wrapped(x):
        total, g = _tv_nb(np.ascontiguousarray(x))
        return float(total), g

    NUMBA = SimpleNamespace(
        name="numba",
        gather=_gather_nb,
        scatter=_scatter_nb,
        leaky_forward=_leaky_forward_nb,
        leaky_backward=_leaky_backward_nb,
        tv=_tv_nb_wrapped,
        rmsprop=_rmsprop_nb,
    )
else:  # pragma: no cover
    NUMBA = None


_active = NUMBA if (HAVE_NUMBA and _env_wants_numba()) else NUMPY


def backend() -> str:
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    return _active.name


def set_backend(name: str) -> None:
    """Switch kernels at runtime; mostly for tests and benchmarks."""
    global _active
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        _active = NUMBA
    elif name == "numpy":
        _active = NUMPY
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------


def conv_taps_forward(x, weight, bias, factor=1, stride=1, pad=0):
    """Forward pass of (upsample-by-``factor`` then) convolution.

    Returns ``(out, None)``; ``x`` has shape (C_in, L), ``weight`` (C_out,
    C_in, k).  Output length is ``(factor*L + 2*pad - k)//stride + 1``.
    """
    c_out, c_in, k = weight.shape
    n_in = x.shape[1]
    n_out = (factor * n_in + 2 * pad - k) // stride + 1
    wstack = np.ascontiguousarray(weight.transpose(2, 0, 1)).reshape(k * c_out, c_in)
    taps = (wstack @ x).reshape(k, c_out, n_in)
    out = np.empty((c_out, n_out))
    out[...] = bias[:, None]
    _active.gather(taps, out, factor, stride, pad)
    return out


def conv_taps_backward(x, weight, dout, factor=1, stride=1, pad=0):
    """Gradients ``(dx, dweight, dbias)`` matching :func:`conv_taps_forward`."""
    c_out, c_in, k = weight.shape
    n_in = x.shape[1]
    dtaps = np.zeros((k, c_out, n_in))
    _active.scatter(np.ascontiguousarray(dout), dtaps, factor, stride, pad)
    flat = dtaps.reshape(k * c_out, n_in)
    wstack = np.ascontiguousarray(weight.transpose(2, 0, 1)).reshape(k * c_out, c_in)
    dx = wstack.T @ flat
    dweight = (flat @ x.T).reshape(k, c_out, c_in).transpose(1, 2, 0).copy()
    dbias = dout.sum(axis=1)
    return dx, dweight, dbias


def leaky_forward(x, slope):
    return _active.leaky_forward(x, float(slope))


def leaky_backward(x, grad, slope):
    return _active.leaky_backward(x, grad, float(slope))


def tv_value_and_grad(x):
    """Total variation ``sum |x[i] - x[i-1]|`` and its subgradient (sign(0)=0)."""
    return _active.tv(np.ascontiguousarray(x, dtype=np.float64))


def rmsprop_update(w, g, square_avg, momentum_buf, lr, momentum, weight_decay, rho, eps):
    """In-place RMSProp step with coupled L2 weight decay."""
    _active.rmsprop(w, g, square_avg, momentum_buf, lr, momentum, weight_decay, rho, eps)
