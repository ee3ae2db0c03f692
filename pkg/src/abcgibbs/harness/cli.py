"""Command-line entry point: ``abcgibbs {run,probe,oracle} CONFIG``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .runner import run_oracle, run_probe, run_sweep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abcgibbs", description="Seeded ABC-Gibbs experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "run the configured samplers and write results"),
        ("probe", "estimate the contraction constant of an ABC conditional"),
        ("oracle", "write exact posterior densities (Normal-Normal only)"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", type=Path, help="TOML experiment config")
        sp.add_argument("--seed", type=int, help="override [experiment].seed")
        sp.add_argument("--out-dir", type=Path, default=None, help="output directory (default results/<name>)")
        if name == "run":
            sp.add_argument("--replicates", type=int, help="override [experiment].replicates")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw.setdefault("experiment", {})["seed"] = args.seed
    if getattr(args, "replicates", None) is not None:
        if args.replicates < 1:
            print("error: --replicates must be >= 1", file=sys.stderr)
            return 2
        cfg.replicates = args.replicates
        cfg.raw.setdefault("experiment", {})["replicates"] = args.replicates
    out = args.out_dir or Path("results") / cfg.name
    try:
        if args.command == "run":
            results = run_sweep(cfg, out)
            for tag, res in results.items():
                head = f"[{tag}] " if tag else ""
                print(head + json.dumps(res.summary["aggregate"], sort_keys=True))
        elif args.command == "probe":
            d = run_probe(cfg, out)
            print(f"kappa={d['kappa']:.4f} margin={d['margin']:.4f} passed={d['passed']}")
        else:
            grids = run_oracle(cfg, out)
            for b, g in grids.items():
                print(f"{b}: mean={g.mean():.6f} sd={g.sd():.6f}")
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"results written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
