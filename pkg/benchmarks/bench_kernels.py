"""Compare the numba and pure-numpy kernel backends.

Times each hot kernel on the largest generator layer for a given output
length, then one full objective + backward + RMSProp iteration.  Both
backends are warmed up first so numba compilation is not counted.

    python benchmarks/bench_kernels.py --n 16384 --filters 64 --repeat 20
"""

import argparse
import timeit

import numpy as np

from dip1d import autodiff as ad
from dip1d import generator as gen
from dip1d import kernels
from dip1d.measurements import identity_operator
from dip1d.recovery import RecoveryConfig, RMSPropState, objective, rmsprop_step


def kernel_cases(n, filters, rng):
    half = n // 2
    x = rng.standard_normal((filters, half))
    w = rng.standard_normal((filters, filters, 3))
    b = rng.standard_normal(filters)
    dout = rng.standard_normal((filters, n))
    act = rng.standard_normal((filters, n))
    sig = rng.standard_normal(n)
    p = rng.standard_normal((filters, filters, 3))
    g = rng.standard_normal(p.shape)
    s, u = np.zeros_like(p), np.zeros_like(p)
    return {
        "upsample+conv forward": lambda: kernels.conv_taps_forward(x, w, b, 2, 1, 1),
        "upsample+conv backward": lambda: kernels.conv_taps_backward(x, w, dout, 2, 1, 1),
        "leaky relu forward": lambda: kernels.leaky_forward(act, 0.2),
        "leaky relu backward": lambda: kernels.leaky_backward(act, dout, 0.2),
        "total variation": lambda: kernels.tv_value_and_grad(sig),
        "rmsprop update": lambda: kernels.rmsprop_update(p, g, s, u, 1e-4, 0.9, 1.0, 0.99, 1e-8),
    }


def iteration_case(n, filters):
    net = gen.init_generator(gen.default_spec(n, filters), 0)
    params = net.parameters()
    state = RMSPropState.zeros_like(params)
    cfg = RecoveryConfig()
    op = identity_operator(n)
    y = np.sin(np.linspace(0, 200, n))

    def step():
        tape = ad.Tape()
        loss = objective(net, op, y, cfg.tv_lambda, tape)
        grads = ad.backward(tape, loss)
        tape.clear()
        rmsprop_step(params, grads, state, cfg)

    return step


def bench(fn, repeat):
    fn()  # warm-up (numba compiles here)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16384)
    ap.add_argument("--filters", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    before = kernels.backend()
    rows = {}
    for name in ("numpy", "numba"):
        kernels.set_backend(name)
        cases = kernel_cases(args.n, args.filters, np.random.default_rng(0))
        cases["full iteration"] = iteration_case(args.n, args.filters)
        for label, fn in cases.items():
            rows.setdefault(label, {})[name] = bench(fn, args.repeat)
    kernels.set_backend(before)

    print(f"n={args.n} filters={args.filters} best of {args.repeat}")
    print(f"{'kernel':<24}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for label, t in rows.items():
        print(f"{label:<24}{1e3 * t['numpy']:>12.3f}{1e3 * t['numba']:>12.3f}"
              f"{t['numpy'] / t['numba']:>9.2f}x")


if __name__ == "__main__":
    main()
