"""Command-line entry point: ``ztdyn <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import couplings, dynamics, experiments
from .experiments import ExperimentConfig

EXIT_CONFIG = 2
EXIT_IO = 3

_POLICIES = {"fair": "fair_coin", "minus": "always_minus", "plus": "always_plus"}


class ConfigError(Exception):
    pass


def _common(suppress: bool) -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; the subcommand
    # copies suppress their defaults so they cannot clobber earlier values
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(0), help="master seed (64-bit unsigned)")
    p.add_argument("--threads", type=int, default=d(1))
    p.add_argument("--out", default=d(None), help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=d("csv"))
    p.add_argument("--trials", type=int, default=d(1))
    return p


def _model_flags(p: argparse.ArgumentParser, default_model="bernoulli") -> None:
    p.add_argument("--model", choices=["bernoulli", "pareto", "constant"], default=default_model)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--value", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="ztdyn", description=__doc__.splitlines()[0],
                                     parents=[_common(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="zero-temperature runs, one per trial")
    _model_flags(sim)
    sim.add_argument("--m0", default="uniform", help='int, "auto:EPS" or "uniform"')
    sim.add_argument("--policy", choices=list(_POLICIES), default="fair")
    sim.add_argument("--max-steps", type=int, default=None)
    sim.add_argument("--trace-stride", type=int, default=None)
    sim.add_argument("--dump-couplings", default=None, help="write trial-0 couplings to FILE")
    sim.add_argument("--couplings-file", default=None, help="use couplings from FILE for every trial")

    qd = sub.add_parser("qd", parents=[common], help="dynamical order parameter")
    _model_flags(qd)
    qd.add_argument("--replicas", type=int, default=2)
    qd.add_argument("--m0", default="uniform")
    qd.add_argument("--policy", choices=list(_POLICIES), default="fair")
    qd.add_argument("--estimator", choices=["site", "full"], default="site")
    qd.add_argument("--max-steps", type=int, default=None)

    mc = sub.add_parser("mincut", parents=[common], help="greedy local MINCUT search on G(n, p)")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--p", type=float, default=0.5)
    mc.add_argument("--max-iters", type=int, default=None)
    mc.add_argument("--start", choices=["uniform", "half"], default="uniform")

    bl = sub.add_parser("bully", parents=[common], help="bully-bond census for Pareto couplings")
    bl.add_argument("--n", type=int, required=True)
    bl.add_argument("--alpha", type=float, default=0.5)
    bl.add_argument("--scale", type=float, default=1.0)

    en = sub.add_parser("enumerate", parents=[common], help="exhaustive landscape census (n <= 22)")
    en.add_argument("--couplings-file", required=True)

    m0 = sub.add_parser("mag0", parents=[common], help="tail of the initial magnetization")
    m0.add_argument("--n", type=int, required=True)
    m0.add_argument("--epsilon", type=float, required=True)

    dr = sub.add_parser("drift", parents=[common], help="early-time positive-field frequency")
    dr.add_argument("--n", type=int, required=True)
    dr.add_argument("--p", type=float, default=0.5)
    dr.add_argument("--epsilon", type=float, default=0.1)
    dr.add_argument("--m0", default=None, help="default auto:EPSILON")
    dr.add_argument("--window", type=int, default=None)
    dr.add_argument("--policy", choices=list(_POLICIES), default="fair")
    return parser


def _config(args, **extra) -> ExperimentConfig:
    fields = dict(n=args.n, trials=args.trials, seed=args.seed, threads=args.threads)
    model = getattr(args, "model", "bernoulli")
    fields.update(family=model)
    if model == "bernoulli":
        fields.update(p=args.p)
    elif model == "pareto":
        fields.update(p=None, alpha=args.alpha, scale=args.scale)
    else:
        fields.update(p=None, value=args.value)
    if hasattr(args, "policy"):
        fields["policy"] = _POLICIES[args.policy]
    fields.update(extra)
    try:
        return ExperimentConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _announce(config: dict) -> None:
    print(json.dumps(config, sort_keys=True), file=sys.stderr)


def _write(result, args) -> None:
    if args.out is not None:
        experiments.emit(result, args.out, args.format)
    elif args.format == "json":
        sys.stdout.write(experiments.json_text(result))
    else:
        experiments.write_csv(result, sys.stdout)


def _m0_arg(text):
    if text is None or text == "uniform":
        return None
    if text.startswith("auto:"):
        return text
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"cannot parse --m0 {text!r}") from None


def _run(args) -> None:
    cmd = args.command
    if cmd == "simulate":
        J = None
        if args.couplings_file:
            J = couplings.load(args.couplings_file)
        config = _config(args, m0=_m0_arg(args.m0), max_steps=args.max_steps,
                         trace_stride=args.trace_stride)
        experiments.resolve_m0(config.n, config.m0)
        _announce(config.echo())
        if args.dump_couplings:
            couplings.dump(J if J is not None else config.couplings_for(0), args.dump_couplings)
        _write(experiments.simulate(config, J), args)
    elif cmd == "qd":
        config = _config(args, m0=_m0_arg(args.m0), replicas=args.replicas, estimator=args.estimator,
                         max_steps=args.max_steps)
        if config.replicas < 2:
            raise ConfigError("--replicas must be >= 2")
        _announce(config.echo())
        _write(experiments.qd_result(config), args)
    elif cmd == "mincut":
        config = _config(args, max_steps=args.max_iters, start=args.start)
        _announce(config.echo())
        _write(experiments.mincut_experiment(config), args)
    elif cmd == "bully":
        args.model = "pareto"
        config = _config(args)
        _announce(config.echo())
        _write(experiments.bully_experiment(config), args)
    elif cmd == "enumerate":
        J = couplings.load(args.couplings_file)
        if J.n > dynamics.LANDSCAPE_MAX_N:
            raise ConfigError(f"enumerate is capped at n = {dynamics.LANDSCAPE_MAX_N}")
        _announce({"couplings_file": args.couplings_file, "n": J.n})
        text = json.dumps(dynamics.enumerate_landscape(J).summary(), sort_keys=True) + "\n"
        if args.out is None:
            sys.stdout.write(text)
        else:
            try:
                with open(args.out, "w") as fh:
                    fh.write(text)
            except OSError as exc:
                raise OSError(exc.errno, f"cannot write {args.out}: {exc.strerror}") from exc
    elif cmd == "mag0":
        if not 0 < args.epsilon < 0.5:
            raise ConfigError("--epsilon must lie in (0, 0.5)")
        _announce({"n": args.n, "epsilon": args.epsilon, "trials": args.trials, "seed": args.seed})
        _write(experiments.mag0_result(args.n, args.epsilon, args.trials, args.seed, args.threads), args)
    elif cmd == "drift":
        m0 = _m0_arg(args.m0) if args.m0 is not None else f"auto:{args.epsilon}"
        config = _config(args, m0=m0, epsilon=args.epsilon, window=args.window)
        _announce(config.echo())
        _write(experiments.drift_result(config), args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _run(args)
    except ConfigError as exc:
        print(f"ztdyn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"ztdyn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"ztdyn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
