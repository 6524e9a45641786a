"""
critical: mountain-pass critical point between two ordered minimizers
"""
import os

from commands.common import build_model, build_shifts, finish, output_dir
from critical import mountain_pass
from errors import ConfigError
from exports import read_hull_csv, write_hull_csv, write_json, write_profile_csv
from hull import shift_integer
from percival import energy
from schemas import BarrierReport, RunConfig
from solvers import minimize
from utils import log

HELP = "Find the critical point between h- and h+ (two hull CSVs, or a minimizer and its unit shift)"


def add_arguments(parser):
    parser.add_argument("--hull-minus", help="lower minimizer CSV; solved for when omitted")
    parser.add_argument("--hull-plus", help="upper minimizer CSV")
    parser.add_argument("--shift-by-one", action="store_true", default=None, help="use h+ = h- + 1")
    parser.add_argument("--s-grid", type=int, help="number of interpolation samples")
    parser.add_argument("--T-flow", type=float, help="flow time per interpolant")
    parser.add_argument("--refine-rounds", type=int, help="bisection rounds on the basin boundary")
    parser.add_argument("--critical-tol", type=float, help="residual tolerance for the critical point")


def run(cfg: RunConfig) -> int:
    if not cfg.hull_plus and not cfg.shift_by_one:
        raise ConfigError("critical needs --hull-plus or --shift-by-one")
    model = build_model(cfg)
    shifts = build_shifts(cfg, model)

    if cfg.hull_minus:
        h_minus = read_hull_csv(cfg.hull_minus)
    else:
        solved = minimize(model, shifts, None, cfg.solve_options())
        if not solved.converged:
            log("Lower minimizer did not converge; continuing with the best iterate", "WARNING")
        h_minus = solved.hull
    h_plus = shift_integer(h_minus, 1) if cfg.shift_by_one else read_hull_csv(cfg.hull_plus)

    result = mountain_pass(model, shifts, h_minus, h_plus, cfg.mountain_pass_options())
    out = output_dir(cfg)
    write_hull_csv(result.hull, os.path.join(out, "critical_hull.csv"))
    profile_csv = write_profile_csv(result.profile, os.path.join(out, "profile.csv"))
    report = BarrierReport(
        barrier=result.barrier,
        s_star=result.s_star,
        residual_sup=result.residual_sup,
        energy=result.energy,
        minimizer_energy=energy(model, shifts, h_minus),
        strict_fraction=result.strict_fraction,
        case=result.case,
        dichotomy=result.dichotomy,
        converged=result.converged,
        profile_csv=profile_csv,
    )
    write_json(report, os.path.join(out, "barrier.json"))

    if result.case == "degenerate":
        code = 4
    else:
        code = 0 if result.converged else 2
    return finish(out, "critical", code)
