"""Command-line entry point: ``gmminit <subcommand> [--config FILE] [overrides]``."""
from __future__ import annotations

import argparse
import json
import sys

import yaml

from . import commands
from .config import ConfigError, load_config
from .hamiltonians import ObservableFileError

SUBCOMMANDS = ("verify", "gradscan", "train", "bound", "tfim-gen")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmminit",
        description="Observable-adaptive initialization for layered variational circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "run the invariant suite and print a pass/fail table",
        "gradscan": "Monte-Carlo scan of initial gradient norms, written as CSV",
        "train": "optimise the circuit and write the cost trace as CSV",
        "bound": "evaluate the closed-form gradient-norm lower bounds",
        "tfim-gen": "write a transverse-field Ising observable file",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--n-qubits", type=int)
        p.add_argument("--blocks", type=int)
        p.add_argument("--strategy", action="append",
                       help="strategy kind; repeat for several (replaces the config list)")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(
            n_qubits=args.n_qubits, n_blocks=args.blocks, strategies=args.strategy,
            seed=args.seed, n_samples=args.samples, workers=args.workers, out=args.out,
        )
        if args.command == "verify":
            results, ok = commands.cmd_verify(cfg)
            print(commands.checks.format_report(results))
            return 0 if ok else 1
        if args.command == "gradscan":
            text = commands.cmd_gradscan(cfg)
            if not cfg.out:
                sys.stdout.write(text)
            return 0
        if args.command == "train":
            trace = commands.cmd_train(cfg)
            if not cfg.out:
                sys.stdout.write(trace.to_csv())
            print(json.dumps(trace.summary, indent=2), file=sys.stderr if not cfg.out else sys.stdout)
            return 0
        if args.command == "bound":
            print(json.dumps(commands.cmd_bound(cfg), indent=2))
            return 0
        obs = commands.cmd_tfim_gen(cfg)
        if not cfg.out:
            sys.stdout.write(yaml.safe_dump(
                {"n_qubits": obs.n_qubits,
                 "terms": [{"coeff": c, "pauli": p.word} for c, p in obs.terms]},
                sort_keys=False))
        return 0
    except (ConfigError, ObservableFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except commands.TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
