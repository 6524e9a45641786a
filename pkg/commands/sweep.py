"""
sweep: minimizers along an ascending K grid
"""
import os

from commands.common import build_model, build_shifts, finish, output_dir, parse_floats
from errors import ConfigError
from exports import write_json, write_sweep_csv
from schemas import RunConfig
from solvers import sweep

HELP = "Warm-started minimization over a K grid (pinning transition data)"


def add_arguments(parser):
    parser.add_argument("--K-grid", type=parse_floats, help="ascending K values, comma-separated")


def run(cfg: RunConfig) -> int:
    if not cfg.K_grid:
        raise ConfigError("sweep needs a non-empty K grid (--K-grid)")
    # the strongest coupling is the one most likely to break validation
    model = build_model(cfg, K=max(cfg.K_grid))
    shifts = build_shifts(cfg, model)
    records = sweep(cfg.K_grid, shifts, cfg.solve_options(), builtin=cfg.builtin)
    out = output_dir(cfg)
    sweep_csv = write_sweep_csv(records, os.path.join(out, "sweep.csv"))
    converged = all(r.converged for r in records)
    write_json({"records": [r.model_dump() for r in records], "converged": converged, "sweep_csv": sweep_csv},
               os.path.join(out, "result.json"))
    return finish(out, "sweep", 0 if converged else 2)
