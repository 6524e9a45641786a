"""
Shared helpers for the command handlers
"""
import argparse
import os
from typing import List, Optional

from config import settings
from errors import ConfigError
from exports import write_metadata
from models import Model, load_model_spec, make_shiftset, validate_model
from schemas import RunConfig, ShiftSet
from utils import generate_run_id, log


def parse_floats(text: str) -> List[float]:
    """'0.3,0.7' -> [0.3, 0.7]"""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_model(cfg: RunConfig, K: Optional[float] = None, dim: Optional[int] = None) -> Model:
    """Model from the config, validated before any computation"""
    model = load_model_spec({
        "builtin": cfg.builtin,
        "K": cfg.K if K is None else K,
        "dim": cfg.dim if dim is None else dim,
    })
    validate_model(model, samples_per_axis=settings.VALIDATION_SAMPLES)
    return model


def build_shifts(cfg: RunConfig, model: Model) -> ShiftSet:
    if not cfg.omega:
        raise ConfigError("omega is required (--omega)")
    if cfg.N is None:
        raise ConfigError("grid size is required (--N)")
    return make_shiftset(cfg.omega, cfg.N, model.dim)


def output_dir(cfg: RunConfig) -> str:
    out = cfg.output_dir or settings.OUTPUT_DIR
    os.makedirs(out, exist_ok=True)
    return out


def finish(out: str, command: str, exit_code: int) -> int:
    write_metadata(out, command, generate_run_id(command.upper()), {"exit_code": exit_code})
    log(f"{command} finished with exit code {exit_code}; results in {out}", "OK" if exit_code == 0 else "WARNING")
    return exit_code
