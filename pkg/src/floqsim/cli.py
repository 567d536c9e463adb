"""Command-line entry point: `sim <experiment> [flags]`.

Flag precedence: experiment defaults, then the --config JSON document, then
explicit flags.  Exit codes: 0 success, 2 configuration error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, DivergenceError, NumericError
from .harness import EXPERIMENTS, default_config, run_experiment


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Driven disordered Ising chain experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, default=None,
                       help="JSON file of defaults, overridden by flags")
        p.add_argument("--L", type=int)
        p.add_argument("--J", type=float)
        p.add_argument("--F", type=float)
        p.add_argument("--W", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--m", type=int)
        p.add_argument("--D", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--envelope", choices=["sinusoidal", "constant-half", "zero"])
        p.add_argument("--no-modulation", action="store_true",
                       help="shorthand for --envelope constant-half")
        p.add_argument("--digital", action=argparse.BooleanOptionalAction, default=None,
                       help="also run the random-circuit baseline (supremacy)")
        p.add_argument("--substeps", type=int)
        p.add_argument("--convergence-tol", type=float, dest="convergence_tol")
        p.add_argument("--auto-substeps", action=argparse.BooleanOptionalAction,
                       default=None, dest="auto_substeps")
        p.add_argument("--bins", type=int)
        p.add_argument("--x-max", type=float, dest="x_max")
        p.add_argument("--W-list", type=_float_list, dest="W_list")
        p.add_argument("--omega-list", type=_float_list, dest="omega_list")
        p.add_argument("--temperature", type=float)
        p.add_argument("--n-samples", type=int, dest="n_samples")
        p.add_argument("--datasets", type=int)
        p.add_argument("--m-max", type=int, dest="m_max")
        p.add_argument("--shots", type=int)
        p.add_argument("--dm-max", type=int, dest="dm_max")
        p.add_argument("--m-ref-lo", type=int, dest="m_ref_lo")
        p.add_argument("--m-ref-hi", type=int, dest="m_ref_hi")
        p.add_argument("--workers", type=int)
        p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every")
    return parser


def resolve_from_args(args: argparse.Namespace):
    overrides: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            document = json.load(fh)
        if not isinstance(document, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in document.items():
            if key in ("W_list", "omega_list") and value is not None:
                value = tuple(value)
            overrides[key] = value
    skip = {"experiment", "config", "no_modulation"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        overrides[key] = value
    if args.no_modulation:
        overrides["envelope"] = "constant-half"
    return default_config(args.experiment, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_from_args(args)
        written = run_experiment(config)
    except (NumericError, DivergenceError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    for label, path in sorted(written.items()):
        print(f"{label}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
