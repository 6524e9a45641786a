"""
Mather Hull - command line entry point

    python main.py solve --builtin standard_fk --K 0.5 --omega 0.6180339887498949 --N 610
    python main.py critical --K 2 --omega 0.6180339887498949 --N 610 --shift-by-one
    python main.py verify --configuration window.csv --omega 0.5 --omega-birkhoff

Exit codes: 0 ok, 1 configuration error, 2 not converged, 3 model
validation failure, 4 degenerate barrier, 5 pair not comparable,
6 certificate failure.
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from commands import COMMANDS
from commands.common import parse_floats
from config import settings
from errors import ConfigError, HullError
from exports import load_json
from schemas import RunConfig
from utils import log

MODEL_KEYS = {"builtin", "K", "dim"}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's exit 2"""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run configuration; flags override its entries")
    parser.add_argument("--builtin", help="built-in model name (standard_fk)")
    parser.add_argument("--K", type=float, help="coupling constant")
    parser.add_argument("--dim", type=int, help="number of interaction terms")
    parser.add_argument("--omega", type=parse_floats, help="frequencies, comma-separated")
    parser.add_argument("--N", type=int, help="grid size")
    parser.add_argument("--method", choices=["flow", "projected_descent", "lattice_descent"])
    parser.add_argument("--tol", type=float, help="residual tolerance")
    parser.add_argument("--max-steps", type=int)
    parser.add_argument("--dt-init", type=float)
    parser.add_argument("--reproject-every", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", dest="output_dir", help=f"output directory (default {settings.OUTPUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mather-hull", description="Percival hull-function solvers for twist-coupled lattice models")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, handler in COMMANDS.items():
        sub = subparsers.add_parser(name, help=handler.HELP, description=handler.HELP)
        _add_common(sub)
        handler.add_arguments(sub)
    return parser


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Config file entries first, then every flag that was given"""
    merged: Dict[str, Any] = {}
    if args.config:
        merged = load_json(args.config)
        model = merged.pop("model", None)
        if model is not None:
            if not isinstance(model, dict):
                raise ConfigError("'model' must be an object like {\"builtin\": \"standard_fk\", \"K\": 1.0}")
            unknown = set(model) - MODEL_KEYS
            if unknown:
                raise ConfigError(f"Unsupported model keys: {sorted(unknown)}")
            merged.update(model)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        merged[key] = value
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"Invalid configuration: {problems}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = build_run_config(args)
        log(f"{settings.APP_NAME} {args.command}", "DEBUG")
        return COMMANDS[args.command].run(cfg)
    except HullError as e:
        log(e.detail, "ERROR")
        return e.exit_code
    except Exception as e:
        log(f"Unexpected error: {e}", "ERROR")
        return 1


if __name__ == "__main__":
    sys.exit(main())
