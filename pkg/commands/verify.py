"""
verify: certify a configuration window
"""
import os

from commands.common import build_model, finish, output_dir
from configurations import birkhoff_check, discrete_el_certificate, ground_state_test, omega_birkhoff_check
from errors import ConfigError
from exports import read_window_csv, write_json
from schemas import RunConfig, VerifyReport
from utils import log

HELP = "Run Birkhoff, omega-Birkhoff, Euler-Lagrange and ground-state certificates on a window CSV"


def add_arguments(parser):
    parser.add_argument("--configuration", help="window CSV with columns i_1..i_d,u")
    parser.add_argument("--omega-birkhoff", action="store_true", default=None, help="also run the omega-Birkhoff check")
    parser.add_argument("--k-range", type=int)
    parser.add_argument("--l-range", type=int)
    parser.add_argument("--box", type=int, help="ground-state box half-width")
    parser.add_argument("--trials", type=int, help="random perturbation trials")
    parser.add_argument("--amplitude", type=float, help="perturbation amplitude")
    parser.add_argument("--el-tol", type=float, help="Euler-Lagrange residual tolerance")


def run(cfg: RunConfig) -> int:
    if not cfg.configuration:
        raise ConfigError("verify needs --configuration")
    if cfg.omega_birkhoff and not cfg.omega:
        raise ConfigError("--omega-birkhoff needs --omega")
    u = read_window_csv(cfg.configuration, omega_hint=cfg.omega or None)
    if cfg.omega and len(cfg.omega) != u.dim:
        raise ConfigError(f"omega has {len(cfg.omega)} components for a {u.dim}-d window")
    model = build_model(cfg, dim=u.dim)

    certificates = [birkhoff_check(u, cfg.k_range, cfg.l_range)]
    if cfg.omega_birkhoff:
        certificates.append(omega_birkhoff_check(u, cfg.omega, cfg.k_range, cfg.l_range, tol=0.0))
    el = discrete_el_certificate(model, u, cfg.el_tol)
    certificates.append(el)
    certificates.append(ground_state_test(model, u, cfg.box, cfg.trials, cfg.amplitude, cfg.seed))

    for c in certificates:
        log(f"{c.kind}: {'passed' if c.passed else 'FAILED'} (margin {c.margin:.3e})", "OK" if c.passed else "WARNING")
    report = VerifyReport(passed=all(c.passed for c in certificates), certificates=certificates,
                          el_residual_max=el.margin)
    out = output_dir(cfg)
    write_json(report, os.path.join(out, "certificates.json"))
    return finish(out, "verify", 0 if report.passed else 6)
