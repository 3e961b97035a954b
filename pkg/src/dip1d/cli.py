"""Command line entry point: ``dip1d <task> ...`` or ``dip1d run --config FILE``."""

from __future__ import annotations

import argparse
import logging
import sys

from .baselines import LassoConfig
from .harness import (TASKS, ConfigError, ExperimentConfig, InputSpec, default_output_dir,
                      emit_outputs, load_config, run_experiment)
from .recovery import RecoveryConfig


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _names(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _external(text):
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected name=path, got {text!r}")
    return name.strip(), path.strip()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dip1d", description="Deep-prior recovery of 1-D signals.")
    p.add_argument("task", choices=TASKS + ("run",), help="experiment family, or 'run' to replay a config file")
    src = p.add_argument_group("input")
    src.add_argument("--input", help="WAV file, or CSV file together with --column")
    src.add_argument("--column", default="0", help="CSV column name or index (default 0)")
    src.add_argument("--chirp", type=_floats, metavar="F0,F1,N,FS", help="generate a linear chirp")
    src.add_argument("--decimate", type=int, default=1, help="anti-aliased downsampling factor")
    src.add_argument("--length", type=int, help="keep only the first LENGTH samples")
    sweep = p.add_argument_group("sweep")
    sweep.add_argument("--m", type=_ints, help="measurement counts, comma separated")
    sweep.add_argument("--sigma", type=_floats, help="noise levels, comma separated")
    sweep.add_argument("--gap", type=_ints, metavar="LENGTHS",
                       help="impute contiguous gaps of these lengths instead of random masks")
    sweep.add_argument("--gap-start", type=int, help="first missing index for --gap (default: centred)")
    p.add_argument("--methods", type=_names, help="subset of dip,lasso,spline")
    p.add_argument("--external", type=_external, action="append", default=[], metavar="NAME=PATH",
                   help="score third-party reconstructions (one CSV column per level)")
    p.add_argument("--seed", type=int, help="root seed (default 0)")
    p.add_argument("--out", help="output directory (default $DIP1D_OUTPUT_DIR or ./dip1d-results)")
    p.add_argument("--config", help="INI experiment file; command line flags override it")
    opt = p.add_argument_group("optimizer")
    opt.add_argument("--iterations", type=int)
    opt.add_argument("--restarts", type=int)
    opt.add_argument("--filters", type=int)
    opt.add_argument("--lr", type=float)
    opt.add_argument("--tv-lambda", type=float)
    opt.add_argument("--weight-decay", type=float)
    opt.add_argument("--alpha", type=float, help="Lasso L1 weight")
    opt.add_argument("--lasso-iterations", type=int)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _input_spec(args, base: InputSpec | None) -> InputSpec:
    if args.input and args.chirp:
        raise ConfigError("use either --input or --chirp")
    if args.input:
        kind = "csv" if args.input.lower().endswith(".csv") else "wav"
        return InputSpec(kind, args.input, args.column, decimate=args.decimate, length=args.length)
    if args.chirp:
        if len(args.chirp) != 4:
            raise ConfigError("--chirp needs f0,f1,n,fs")
        return InputSpec("chirp", chirp=args.chirp, decimate=args.decimate, length=args.length)
    if base is not None:
        return base
    raise ConfigError("no input: give --input, --chirp or --config")


def config_from_args(args) -> ExperimentConfig:
    base = load_config(args.config) if args.config else None
    task = args.task if args.task != "run" else (base.task if base else None)
    if task is None:
        raise ConfigError("'run' needs --config")
    inp = _input_spec(args, base.input if base else None)

    rec = base.recovery if base else RecoveryConfig()
    overrides = {"iterations": args.iterations, "restarts": args.restarts,
                 "filters_per_layer": args.filters, "learning_rate": args.lr,
                 "tv_lambda": args.tv_lambda, "weight_decay": args.weight_decay}
    rec = rec.replace(**{k: v for k, v in overrides.items() if v is not None})
    lasso = base.lasso if base else LassoConfig()
    if args.alpha is not None or args.lasso_iterations is not None:
        lasso = LassoConfig(alpha=lasso.alpha if args.alpha is None else args.alpha,
                            max_iterations=lasso.max_iterations if args.lasso_iterations is None
                            else args.lasso_iterations,
                            tolerance=lasso.tolerance)

    gap_start = base.gap_start if base else None
    if args.m is not None:
        levels = args.m
    elif args.sigma is not None:
        levels = args.sigma
    elif args.gap is not None:
        levels = args.gap
        gap_start = args.gap_start
        if gap_start is None:
            from .harness import load_input
            n = len(load_input(inp))
            gap_start = max(0, (n - max(levels)) // 2)
    elif base is not None:
        levels = base.levels
    else:
        raise ConfigError("no sweep levels: give --m, --sigma or --gap")

    if args.methods is not None:
        methods = args.methods
    elif base is not None:
        methods = base.methods
    else:
        methods = ("dip",) if task == "noise-impedance" else ("dip", "lasso")
    external = tuple(base.external_results if base else ()) + tuple(args.external)
    seed = args.seed if args.seed is not None else (base.seed if base else 0)
    out = args.out or (base.output_dir if base else None) or default_output_dir()
    return ExperimentConfig(task=task, input=inp, levels=tuple(levels), recovery=rec, lasso=lasso,
                            methods=tuple(methods), external_results=external, output_dir=out,
                            seed=seed, gap_start=gap_start)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except (ConfigError, ValueError, OSError) as exc:
        parser.error(str(exc))  # exits with status 2
    try:
        result = run_experiment(config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"dip1d: {exc}", file=sys.stderr)
        return 2
    emit_outputs(result, config.output_dir)
    for method, level, mean, error in result.table():
        status = "FAILED " + error if error else f"mean_mse={mean:.6g}"
        print(f"{method:>10}  {level:>8}  {status}")
    print(f"outputs written to {config.output_dir}")
    return 1 if result.failed else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
