"""Command-line entry point: ``run``, ``single`` and ``selftest``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .checks import oracle_dominance, stepwise_identity_errors
from .experiment import load_config, run_experiment, write_csv
from .model import SystemParams, WiretapError, generate_channels
from .selector import SelectorConfig, run_stepwise


def _cmd_run(args):
    config = load_config(args.config, seed=args.seed, trials=args.trials, out=args.out)
    result = run_experiment(config)
    write_csv(result, config.output_path)
    print(f"wrote {len(result.cells)} rows to {config.output_path}")
    return 0


def _cmd_single(args):
    params = SystemParams(args.m, args.k, args.n, args.lmax, p_max=args.pmax,
                          sigma2_main=args.sigma2, sigma2_eve=args.sigma2)
    ch = generate_channels(args.m, args.k, args.n, np.random.default_rng(args.seed))
    trace = run_stepwise(ch, params, SelectorConfig(enforce_stc=not args.no_stc))
    print(f"{'l':>3} {'antenna':>7} {'growth':>12} {'power':>10} {'rate':>10}")
    for r in trace.steps:
        growth = "-" if r.growth is None else f"{r.growth:.6f}"
        print(f"{r.step:>3} {r.index:>7} {growth:>12} {r.power:>10.6f} {r.rate:>10.6f}")
    if trace.stop_growth is not None:
        print(f"stopped: {trace.stop_reason} (best growth {trace.stop_growth:.6g})")
    else:
        print(f"stopped: {trace.stop_reason}")
    print(f"L = {trace.size}, P = {trace.power:.6g}, rate = {trace.rate:.6f} bits")
    return 0


def _cmd_selftest(args):
    rng = np.random.default_rng(args.seed)
    errs = stepwise_identity_errors(args.instances, rng)
    ok_identity = max(errs.values()) < 1e-9
    print(f"stepwise identities over {args.instances} instances: "
          + ", ".join(f"{k} max rel err {v:.2e}" for k, v in errs.items())
          + (" PASS" if ok_identity else " FAIL"))
    rows = oracle_dominance(args.oracle_instances, rng)
    ok_oracle = bool(np.all(rows[:, 0] >= rows[:, 1] - 1e-9)
                     and np.all(rows[:, 1] >= rows[:, 2] - 1e-9))
    print(f"oracle dominance over {args.oracle_instances} instances: "
          f"mean exhaustive {rows[:, 0].mean():.4f}, stepwise {rows[:, 1].mean():.4f}, "
          f"random {rows[:, 2].mean():.4f}" + (" PASS" if ok_oracle else " FAIL"))
    return 0 if ok_identity and ok_oracle else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wiretap-tas",
        description="Stepwise antenna selection for MIMO wiretap channels")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--out")
    run.set_defaults(func=_cmd_run)

    single = sub.add_parser("single", help="one realization, print the step log")
    single.add_argument("--m", type=int, default=64)
    single.add_argument("--k", type=int, default=4)
    single.add_argument("--n", type=int, default=8)
    single.add_argument("--lmax", type=int, default=64)
    single.add_argument("--pmax", type=float, default=1.0)
    single.add_argument("--sigma2", type=float, default=0.1)
    single.add_argument("--seed", type=int, default=0)
    single.add_argument("--no-stc", action="store_true")
    single.set_defaults(func=_cmd_single)

    st = sub.add_parser("selftest", help="randomized identity and oracle checks")
    st.add_argument("--instances", type=int, default=200)
    st.add_argument("--oracle-instances", type=int, default=20)
    st.add_argument("--seed", type=int, default=0)
    st.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (WiretapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
