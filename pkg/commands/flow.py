"""
flow: integrate the gradient flow for a fixed time
"""
from commands.common import build_model, build_shifts, finish, output_dir
from commands.solve import write_result
from exports import read_hull_csv
from hull import identity_hull
from schemas import RunConfig
from solvers import integrate_flow

HELP = "Integrate dh/dt = -X(h) for time T from the identity or a given hull (exit 2 if not at rest by then)"


def add_arguments(parser):
    parser.add_argument("--T", type=float, help="flow time (default 50)")
    parser.add_argument("--hull", help="initial hull CSV (theta,h)")


def run(cfg: RunConfig) -> int:
    model = build_model(cfg)
    shifts = build_shifts(cfg, model)
    h0 = read_hull_csv(cfg.hull) if cfg.hull else identity_hull(shifts.grid_size)
    result = integrate_flow(model, shifts, h0, cfg.T, cfg.solve_options())
    out = output_dir(cfg)
    write_result(result, shifts, model, out)
    return finish(out, "flow", 0 if result.converged else 2)
