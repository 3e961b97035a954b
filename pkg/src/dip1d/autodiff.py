"""Tape-based reverse-mode differentiation over (channels x length) arrays.

Only the handful of operations the generator and its losses need are
provided.  A :class:`Tape` records every operation in execution order, so node
ids are already a topological order and :func:`backward` is a single reverse
sweep.

>>> tape = Tape()
>>> x = tape.leaf(np.array([[0.0, 1.0, 0.0]]))
>>> loss = tv_loss(x)
>>> loss.item()
2.0
>>> backward(tape, loss)[0]
array([[-1.,  2., -1.]])
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels


class ShapeError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class Tensor:
    """A (channels x length) float64 array living on a tape."""

    __slots__ = ("value", "tape", "node", "requires_grad", "grad")

    def __init__(self, value, tape: "Tape", node: int, requires_grad: bool = False):
        self.value = value
        self.tape = tape
        self.node = node
        self.requires_grad = requires_grad
        self.grad = None

    @property
    def channels(self) -> int:
        return self.value.shape[0]

    @property
    def length(self) -> int:
        return self.value.shape[1]

    @property
    def shape(self):
        return self.value.shape

    def item(self) -> float:
        if self.value.size != 1:
            raise ShapeError(f"item() needs a scalar tensor, got shape {self.shape}")
        return float(self.value.reshape(()))

    def __repr__(self):
        return f"Tensor(shape={self.shape}, node={self.node})"


@dataclass
class Node:
    kind: str
    inputs: tuple
    backward: Callable | None
    tensor: Tensor | None = None


@dataclass
class Tape:
    """Ordered record of executed operations."""

    nodes: list = field(default_factory=list)

    def __len__(self):
        return len(self.nodes)

    def _push(self, kind, inputs, value, backward, requires_grad) -> Tensor:
        node_id = len(self.nodes)
        t = Tensor(value, self, node_id, requires_grad)
        self.nodes.append(Node(kind, tuple(inputs), backward, t))
        return t

    def leaf(self, value, requires_grad: bool = True) -> Tensor:
        """Register an input array; parameters use ``requires_grad=True``."""
        value = _as_2d(value)
        return self._push("leaf", (), value, None, requires_grad)

    def constant(self, value) -> Tensor:
        return self.leaf(value, requires_grad=False)

    def record(self, kind: str, inputs: Sequence[Tensor], value, backward) -> Tensor:
        for t in inputs:
            if t.tape is not self:
                raise ValueError(f"{kind}: operand recorded on a different tape")
        needs = any(t.requires_grad for t in inputs)
        return self._push(kind, [t.node for t in inputs], value, backward, needs)

    @property
    def parameters(self) -> list:
        return [n.tensor for n in self.nodes if n.kind == "leaf" and n.tensor.requires_grad]

    def clear(self) -> None:
        """Drop all recorded nodes.

        Nodes and tensors reference each other, so a discarded tape is only
        reclaimed by the cycle collector; clearing frees the activations now.
        """
        for node in self.nodes:
            node.tensor.tape = None
            node.tensor.grad = None
        self.nodes.clear()


def _as_2d(value) -> np.ndarray:
    # signals are (channels x length); convolution kernels keep their 3 axes
    a = np.asarray(value, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    elif a.ndim > 3:
        raise ShapeError(f"unsupported tensor rank {a.ndim}")
    return a


def _lift(tape: Tape, x) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return tape.constant(x)


def _tape_of(*xs) -> Tape:
    for x in xs:
        if isinstance(x, Tensor):
            return x.tape
    raise ValueError("at least one operand must be a Tensor")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def conv1d(x, weight, bias, stride: int = 1, padding: int = 0) -> Tensor:
    """Zero-padded 1-D cross-correlation.

    ``x`` is (C_in, L), ``weight`` (C_out, C_in, k) and ``bias`` (C_out,).
    """
    tape = _tape_of(x, weight, bias)
    x, weight, bias = _lift(tape, x), _lift(tape, weight), _lift(tape, bias)
    return _conv_common("conv1d", tape, x, weight, bias, 1, int(stride), int(padding))


def upsample_conv1d(x, weight, bias, factor: int) -> Tensor:
    """Nearest upsampling by ``factor`` fused with a stride-1 "same" convolution.

    Numerically equal to ``conv1d(upsample_nearest(x, factor), weight, bias,
    padding=(k-1)//2)`` but the multiplies run at the input resolution.
    """
    tape = _tape_of(x, weight, bias)
    x, weight, bias = _lift(tape, x), _lift(tape, weight), _lift(tape, bias)
    k = weight.value.shape[-1]
    if k % 2 != 1:
        raise ShapeError(f"same-padding fused convolution needs an odd kernel, got k={k}")
    if factor < 1:
        raise ValueError(f"upsample factor must be >= 1, got {factor}")
    return _conv_common("upsample_conv1d", tape, x, weight, bias, int(factor), 1, (k - 1) // 2)


def _conv_common(kind, tape, x, weight, bias, factor, stride, padding):
    w = weight.value
    if w.ndim != 3:
        raise ShapeError(f"{kind}: kernel must be (C_out, C_in, k), got shape {w.shape}")
    c_out, c_in, k = w.shape
    if c_in != x.channels:
        raise ShapeError(f"{kind}: kernel expects {c_in} input channels, input has {x.channels}")
    b = bias.value.reshape(-1)
    if b.shape[0] != c_out:
        raise ShapeError(f"{kind}: bias has {b.shape[0]} entries for {c_out} output channels")
    if stride < 1 or padding < 0:
        raise ValueError(f"{kind}: need stride >= 1 and padding >= 0")
    n_up = factor * x.length
    if k > n_up + 2 * padding:
        raise ShapeError(f"{kind}: kernel size {k} exceeds padded length {n_up + 2 * padding}")
    xv = x.value
    out = kernels.conv_taps_forward(xv, w, b, factor=factor, stride=stride, pad=padding)

    def back(g):
        dx, dw, db = kernels.conv_taps_backward(xv, w, g, factor=factor, stride=stride, pad=padding)
        return dx, dw, db.reshape(bias.value.shape)

    return tape.record(kind, (x, weight, bias), out, back)


def upsample_nearest(x: Tensor, factor: int) -> Tensor:
    """Repeat every sample ``factor`` times along the length axis."""
    factor = int(factor)
    if factor < 1:
        raise ValueError(f"upsample factor must be >= 1, got {factor}")
    c, n = x.shape
    out = np.repeat(x.value, factor, axis=1)

    def back(g):
        return (g.reshape(c, n, factor).sum(axis=2),)

    return x.tape.record("upsample_nearest", (x,), out, back)


def leaky_relu(x: Tensor, slope: float) -> Tensor:
    """Elementwise ``max(x, slope*x)``; the subgradient at 0 is 1."""
    xv = x.value
    out = kernels.leaky_forward(xv, slope)

    def back(g):
        return (kernels.leaky_backward(xv, g, slope),)

    return x.tape.record("leaky_relu", (x,), out, back)


def mse_loss(prediction: Tensor, target) -> Tensor:
    """Sum of squared errors ``||prediction - target||^2`` (not the mean)."""
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    pred = prediction.value.reshape(-1)
    if pred.shape != target.shape:
        raise ShapeError(f"mse_loss: prediction has {pred.size} entries, target has {target.size}")
    diff = pred - target
    out = np.array([[diff @ diff]])
    shape = prediction.shape

    def back(g):
        return ((2.0 * g.item()) * diff.reshape(shape),)

    return prediction.tape.record("mse_loss", (prediction,), out, back)


def tv_loss(signal: Tensor) -> Tensor:
    """Total variation: sum of absolute first differences."""
    if signal.value.size < 2:
        raise ShapeError("tv_loss needs at least 2 samples")
    shape = signal.shape
    total, grad = kernels.tv_value_and_grad(signal.value.reshape(-1))
    out = np.array([[total]])

    def back(g):
        return ((g.item() * grad).reshape(shape),)

    return signal.tape.record("tv_loss", (signal,), out, back)


def linear_map(x: Tensor, forward: Callable, adjoint: Callable, kind: str = "linear_map") -> Tensor:
    """Apply a linear operator given as a forward/adjoint pair of vector maps."""
    shape = x.shape
    out = np.asarray(forward(x.value.reshape(-1)), dtype=np.float64).reshape(1, -1)

    def back(g):
        return (np.asarray(adjoint(g.reshape(-1)), dtype=np.float64).reshape(shape),)

    return x.tape.record(kind, (x,), out, back)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} differ")
    return a.tape.record("add", (a, b), a.value + b.value, lambda g: (g, g))


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return a.tape.record("scale", (a,), c * a.value, lambda g: (c * g,))


# ---------------------------------------------------------------------------
# reverse sweep
# ---------------------------------------------------------------------------


def backward(tape: Tape, loss: Tensor) -> list:
    """Populate ``.grad`` on every node reaching ``loss``; return parameter grads.

    The returned list follows the creation order of the tape's parameter
    leaves (``tape.parameters``).
    """
    if loss.tape is not tape:
        raise ValueError("loss was recorded on a different tape")
    if loss.value.size != 1:
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    grads: list = [None] * len(tape.nodes)
    grads[loss.node] = np.ones_like(loss.value)
    for node_id in range(loss.node, -1, -1):
        g = grads[node_id]
        if g is None:
            continue
        node = tape.nodes[node_id]
        node.tensor.grad = g
        if node.backward is None or not node.tensor.requires_grad:
            continue
        for i, gi in zip(node.inputs, node.backward(g)):
            if not tape.nodes[i].tensor.requires_grad:
                continue
            if grads[i] is None:
                grads[i] = gi
            else:
                grads[i] = grads[i] + gi
    return [p.grad for p in tape.parameters]
