"""The one-dimensional convolutional generator G(z, w)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad

#: Latent lengths allowed by :func:`default_spec`.
LATENT_RANGE = (8, 64)
CANONICAL_LATENT = 16


@dataclass(frozen=True)
class GeneratorSpec:
    output_length: int
    filters_per_layer: int = 64
    num_blocks: int = 6
    kernel_size: int = 3
    upsample_factor: int = 2
    latent_channels: int = 32
    latent_length: int = 16
    leaky_slope: float = 0.2

    def __post_init__(self):
        for name in ("output_length", "filters_per_layer", "num_blocks", "kernel_size",
                     "upsample_factor", "latent_channels", "latent_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"GeneratorSpec.{name} must be positive")
        if self.kernel_size % 2 != 1:
            raise ValueError(f"kernel_size must be odd for same padding, got {self.kernel_size}")
        grown = self.latent_length * self.upsample_factor ** self.num_blocks
        if grown != self.output_length:
            raise ValueError(
                f"latent_length {self.latent_length} x {self.upsample_factor}^{self.num_blocks}"
                f" = {grown} != output_length {self.output_length}")

    def layer_shapes(self):
        """Kernel shapes ``(C_out, C_in, k)`` of every convolution, final layer last."""
        shapes = []
        c_in = self.latent_channels
        for _ in range(self.num_blocks):
            shapes.append((self.filters_per_layer, c_in, self.kernel_size))
            c_in = self.filters_per_layer
        shapes.append((1, c_in, self.kernel_size))
        return shapes


def _factorize(n):
    """All (latent_length, num_blocks) with n = latent_length * 2**num_blocks, num_blocks >= 1."""
    out = []
    blocks = 1
    while n % 2 ** blocks == 0:
        latent = n // 2 ** blocks
        if LATENT_RANGE[0] <= latent <= LATENT_RANGE[1]:
            out.append((latent, blocks))
        blocks += 1
    return out


def is_valid_length(n: int) -> bool:
    return n >= 1 and bool(_factorize(n))


def default_spec(n: int, filters: int = 64) -> GeneratorSpec:
    """Canonical architecture for output length ``n``.

    ``n`` must factor as ``latent_length * 2**num_blocks`` with a latent length
    in [8, 64].  When several factorizations exist the latent length closest to
    16 wins (ties go to the shorter latent).
    """
    n = int(n)
    options = _factorize(n) if n >= 1 else []
    if not options:
        raise ValueError(
            f"length {n} is not latent_length * 2**k with latent_length in "
            f"[{LATENT_RANGE[0]}, {LATENT_RANGE[1]}]; zero-pad the signal first "
            f"(see dip1d.signal_io.pad_to_valid_length)")
    latent, blocks = min(options, key=lambda lb: (abs(lb[0] - CANONICAL_LATENT), lb[0]))
    return GeneratorSpec(output_length=n, filters_per_layer=int(filters), num_blocks=blocks,
                         latent_length=latent)


@dataclass
class GeneratorNet:
    spec: GeneratorSpec
    weights: list
    biases: list
    latent: np.ndarray = field(repr=False)

    def parameters(self):
        """Trainable arrays in tape order: w0, b0, w1, b1, ..."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    @property
    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())


def init_generator(spec: GeneratorSpec, seed) -> GeneratorNet:
    """Fan-in scaled Gaussian kernels, zero biases, frozen uniform latent.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for c_out, c_in, k in spec.layer_shapes():
        std = np.sqrt(2.0 / (c_in * k))
        weights.append(rng.standard_normal((c_out, c_in, k)) * std)
        biases.append(np.zeros(c_out))
    latent = rng.uniform(0.0, 0.1, size=(spec.latent_channels, spec.latent_length))
    latent.setflags(write=False)
    return GeneratorNet(spec, weights, biases, latent)


def forward(net: GeneratorNet, tape: ad.Tape) -> ad.Tensor:
    """Record G(z, w) on ``tape``; returns a (1 x n) tensor.

    Each block is nearest upsampling, a same-padded convolution and a leaky
    ReLU; a final one-channel convolution has no activation.  Upsampling and
    convolution run as one fused operation.
    """
    spec = net.spec
    h = tape.constant(net.latent)
    params = [tape.leaf(p) for p in net.parameters()]
    for block in range(spec.num_blocks):
        w, b = params[2 * block], params[2 * block + 1]
        h = ad.upsample_conv1d(h, w, b, spec.upsample_factor)
        h = ad.leaky_relu(h, spec.leaky_slope)
    w, b = params[-2], params[-1]
    pad = (spec.kernel_size - 1) // 2
    return ad.conv1d(h, w, b, stride=1, padding=pad)


def forward_unfused(net: GeneratorNet, tape: ad.Tape) -> ad.Tensor:
    """Same as :func:`forward` with explicit upsample and convolution nodes."""
    spec = net.spec
    pad = (spec.kernel_size - 1) // 2
    h = tape.constant(net.latent)
    params = [tape.leaf(p) for p in net.parameters()]
    for block in range(spec.num_blocks):
        h = ad.upsample_nearest(h, spec.upsample_factor)
        h = ad.conv1d(h, params[2 * block], params[2 * block + 1], padding=pad)
        h = ad.leaky_relu(h, spec.leaky_slope)
    return ad.conv1d(h, params[-2], params[-1], padding=pad)


def generate(net: GeneratorNet) -> np.ndarray:
    """Convenience: the generator output as a flat length-n vector."""
    return forward(net, ad.Tape()).value.reshape(-1).copy()
