"""
solve: minimize the Percival energy and write hull, history and result files
"""
import os

from commands.common import build_model, build_shifts, finish, output_dir
from exports import read_hull_csv, write_history_csv, write_hull_csv, write_json, write_residual_csv
from hull import detect_gaps
from percival import el_residual
from schemas import RunConfig, SolveReport
from solvers import minimize

HELP = "Minimize the Percival Lagrangian over monotone hull functions"


def add_arguments(parser):
    parser.add_argument("--hull", help="initial hull CSV (theta,h); identity when omitted")


def write_result(result, shifts, model, out: str) -> SolveReport:
    write_hull_csv(result.hull, os.path.join(out, "hull.csv"))
    write_residual_csv(el_residual(model, shifts, result.hull), os.path.join(out, "residual.csv"))
    history_csv = write_history_csv(result.history, os.path.join(out, "history.csv"))
    largest_gap = detect_gaps(result.hull, threshold=2.0 / shifts.grid_size).largest_gap \
        if result.hull.monotone_flag else float("nan")
    report = SolveReport(
        energy=result.energy,
        residual_sup=result.residual_sup,
        converged=result.converged,
        N=shifts.grid_size,
        largest_gap=largest_gap,
        steps_taken=result.steps_taken,
        history_csv=history_csv,
    )
    write_json(report, os.path.join(out, "result.json"))
    return report


def run(cfg: RunConfig) -> int:
    model = build_model(cfg)
    shifts = build_shifts(cfg, model)
    h0 = read_hull_csv(cfg.hull) if cfg.hull else None
    result = minimize(model, shifts, h0, cfg.solve_options())
    out = output_dir(cfg)
    write_result(result, shifts, model, out)
    return finish(out, "solve", 0 if result.converged else 2)
