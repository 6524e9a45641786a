"""
Acceptance runs for the hull solvers

Runs the ten acceptance checks on the golden-mean approximant 377/610 and
prints an [OK]/[FAIL] line per check. test_acceptance.py runs the same
checks under pytest.

Usage:
    python verify_acceptance.py            # all checks
    python verify_acceptance.py 1 7 8      # selected checks
"""
import math
import sys
import time
from functools import lru_cache

import numpy as np

from configurations import (
    birkhoff_check,
    ground_state_test,
    hull_from_configuration,
    interior_el_residuals,
    omega_birkhoff_check,
    sample_configuration,
)
from critical import mountain_pass
from hull import detect_gaps, from_values, identical, join, random_monotone, shift_integer, translate
from models import make_shiftset, standard_fk
from percival import energy, residual_array, submodularity_defect
from schemas import SolveOptions
from solvers import flow_step, integrate_flow, lattice_descent, minimize, minimize_orbit_action, stable_dt, sweep
from utils import make_rng

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GRID = 610


@lru_cache(maxsize=None)
def golden_shifts():
    return make_shiftset([GOLDEN], GRID)


@lru_cache(maxsize=None)
def ground_state(K: float):
    """Converged minimizer of standard_fk(K) on the 377/610 grid, started from the identity"""
    result = minimize(standard_fk(K), golden_shifts(), None, SolveOptions(residual_tol=1e-9, max_steps=200000))
    assert result.converged, f"K={K}: minimizer did not converge (residual {result.residual_sup:.3e})"
    return result


# ============================================
# Checks
# ============================================

def check_integrable_exactness() -> str:
    shifts = golden_shifts()
    result = minimize(standard_fk(0.0), shifts)
    offset = result.hull.values - np.arange(GRID) / GRID
    deviation = float(np.max(np.abs(offset - np.mean(offset))))
    assert deviation <= 1e-10, f"hull deviates from an affine one by {deviation:.3e}"
    expected = (377 / 610) ** 2 / 2
    assert abs(result.energy - expected) <= 1e-12, f"energy {result.energy!r} != {expected!r}"
    return f"affine deviation {deviation:.1e}, energy {result.energy:.15g}"


def check_euler_lagrange() -> str:
    shifts = golden_shifts()
    model = standard_fk(0.5)
    result = ground_state(0.5)
    assert result.residual_sup <= 1e-8, f"residual {result.residual_sup:.3e}"

    rng = make_rng(2)
    eps = 1e-6
    worst = 0.0
    for _ in range(100):
        values = random_monotone(GRID, rng).values
        k = int(rng.integers(GRID))
        bump = np.zeros(GRID)
        bump[k] = eps
        plus = energy(model, shifts, from_values(values + bump, monotone_flag=False))
        minus = energy(model, shifts, from_values(values - bump, monotone_flag=False))
        X = residual_array(model, shifts.approximants, values)[k]
        worst = max(worst, abs(X - GRID * (plus - minus) / (2 * eps)) / max(1.0, abs(X)))
    assert worst <= 1e-6, f"gradient mismatch {worst:.3e}"
    return f"residual {result.residual_sup:.1e} after {result.steps_taken} steps, gradient mismatch {worst:.1e}"


def check_fundamental_inequality() -> str:
    shifts = golden_shifts()
    model = standard_fk(1.0)
    rng = make_rng(3)
    worst = -math.inf
    for _ in range(1000):
        h, g = random_monotone(GRID, rng), random_monotone(GRID, rng)
        worst = max(worst, submodularity_defect(model, shifts, h, g))
    assert worst <= 1e-12, f"submodularity defect {worst:.3e}"
    return f"largest defect {worst:.3e}"


def check_strong_comparison() -> str:
    shifts = golden_shifts()
    model = standard_fk(1.0)
    rng = make_rng(4)
    opts = SolveOptions(residual_tol=1e-30, max_steps=100000)
    worst = 0.0
    for _ in range(100):
        low = random_monotone(GRID, rng)
        high = join(low, random_monotone(GRID, rng))
        a = integrate_flow(model, shifts, low, 10.0, opts).hull.values
        b = integrate_flow(model, shifts, high, 10.0, opts).hull.values
        worst = max(worst, float(np.max(a - b)))
    assert worst <= 1e-12, f"order violated by {worst:.3e}"
    return f"largest order violation {worst:.1e}"


def check_flow_equivariance() -> str:
    shifts = golden_shifts()
    model = standard_fk(1.0)
    rng = make_rng(5)
    opts = SolveOptions(residual_tol=1e-30)
    worst = 0.0
    for _ in range(20):
        h0 = random_monotone(GRID, rng)
        p = int(rng.integers(1, GRID))
        base = integrate_flow(model, shifts, h0, 5.0, opts).hull
        lifted = integrate_flow(model, shifts, shift_integer(h0, 1), 5.0, opts).hull
        moved = integrate_flow(model, shifts, translate(h0, p), 5.0, opts).hull
        assert identical(lifted, shift_integer(base, 1)), "flow(h + 1) != flow(h) + 1"
        assert identical(moved, translate(base, p)), f"flow does not commute with the shift by {p}/N"

        # the same symmetries on explicit arrays, where rounding differs
        dt = stable_dt(model, opts)
        a, b, c = h0, from_values(h0.values + 1.0), from_values(translate(h0, p).values)
        for _ in range(20):
            a, b, c = (flow_step(model, shifts, x, dt) for x in (a, b, c))
        worst = max(worst, float(np.max(np.abs(b.values - a.values - 1.0))),
                    float(np.max(np.abs(c.values - translate(a, p).values))))
    assert worst <= 1e-12, f"explicit arrays drift apart by {worst:.3e}"
    return f"20 initials, bitwise equal; explicit arrays within {worst:.1e}"


def check_certification() -> str:
    model = standard_fk(0.5)
    omega = golden_shifts().grid_omega
    u = sample_configuration(ground_state(0.5).hull, omega, 16)
    omega_report = omega_birkhoff_check(u, omega, 4, 4, tol=0.0)
    assert omega_report.passed, f"omega-Birkhoff witnesses {omega_report.witnesses[:3]}"
    assert birkhoff_check(u, 4, 4).passed, "Birkhoff check failed"
    el = float(np.max(np.abs(interior_el_residuals(model, u))))
    assert el <= 1e-7, f"interior Euler-Lagrange residual {el:.3e}"
    ground = ground_state_test(model, u, box=3, trials=1000, amplitude=0.5, seed=0)
    assert ground.passed and ground.margin >= -1e-10, f"ground-state margin {ground.margin:.3e}"
    return f"EL residual {el:.1e}, ground-state margin {ground.margin:.3e}"


def check_pinning_transition() -> str:
    shifts = golden_shifts()
    sliding, pinned = sweep([0.3, 2.0], shifts, SolveOptions(residual_tol=1e-9, max_steps=200000))
    assert sliding.converged and pinned.converged, "sweep did not converge"
    assert sliding.excess_gap < 1e-3, f"K=0.3 excess gap {sliding.excess_gap:.3e}"
    assert pinned.largest_gap > 0.1, f"K=2 largest gap {pinned.largest_gap:.3e}"

    for record in (sliding, pinned):
        oracle = minimize_orbit_action(standard_fk(record.K), shifts, restarts=50, seed=7)
        assert abs(oracle.energy - record.energy) <= 1e-9, \
            f"K={record.K}: orbit oracle energy {oracle.energy!r} vs sweep {record.energy!r}"
        gaps = detect_gaps(oracle.hull, 2.0 / GRID)
        assert abs(gaps.largest_gap - record.largest_gap) <= 1e-6, \
            f"K={record.K}: orbit oracle gap {gaps.largest_gap:.6g} vs sweep {record.largest_gap:.6g}"
    return f"excess gap {sliding.excess_gap:.1e} at K=0.3, largest gap {pinned.largest_gap:.4f} at K=2"


def check_mountain_pass() -> str:
    shifts = golden_shifts()
    model = standard_fk(2.0)
    h_minus = ground_state(2.0).hull
    h_plus = shift_integer(h_minus, 1)
    result = mountain_pass(model, shifts, h_minus, h_plus)
    e_minus = energy(model, shifts, h_minus)
    assert result.case == "mountain_pass", f"case {result.case} ({result.dichotomy})"
    assert result.residual_sup <= 1e-6, f"residual {result.residual_sup:.3e}"
    assert result.barrier > 0 and result.energy > e_minus + 1e-6, f"barrier {result.barrier:.3e}"
    values = result.hull.values
    assert np.all(values >= h_minus.values - 1e-12) and np.all(values <= h_plus.values + 1e-12), \
        "critical hull leaves [h-, h+]"
    assert result.strict_fraction >= 0.99, f"strict fraction {result.strict_fraction:.3f}"
    peak = max(result.profile, key=lambda p: p.limiting_energy)
    assert result.profile[0].s < peak.s < result.profile[-1].s, "profile maximum sits at an end point"
    return f"barrier {result.barrier:.6e} at s={result.s_star:.6f}, residual {result.residual_sup:.1e}"


def check_round_trip() -> str:
    N = 89
    shifts = make_shiftset([GOLDEN], N)
    omega = shifts.grid_omega
    radius = (N - 1) // 2
    rng = make_rng(9)
    worst = 0.0
    for _ in range(20):
        K = float(rng.uniform(0.5, 2.5))
        h = minimize(standard_fk(K), shifts, random_monotone(N, rng)).hull
        u = sample_configuration(h, omega, radius)
        rebuilt = hull_from_configuration(u, omega, N)
        again = sample_configuration(rebuilt, omega, radius)
        # the rebuilt hull is normalized with h(1/N) > 0, hence h(0) = 0 and the window comes back less u_0
        worst = max(worst, float(np.max(np.abs(again.values + u[[0]] - u.values))))
    assert worst <= 1e-12, f"round trip error {worst:.3e}"
    return f"largest round trip error {worst:.1e}"


def check_lattice_descent() -> str:
    shifts = golden_shifts()
    model = standard_fk(0.5)
    h = ground_state(0.5).hull
    E = energy(model, shifts, h)
    rng = make_rng(10)
    for _ in range(50):
        pool = [translate(h, int(p)) for p in rng.choice(GRID, size=4, replace=False)]
        pooled = lattice_descent(model, shifts, pool, SolveOptions(pool_tol=1.0))
        assert abs(pooled.energy - E) <= 1e-12, f"translates pooled to {pooled.energy!r}, expected {E!r}"

    model = standard_fk(1.0)
    for _ in range(50):
        pool = [random_monotone(GRID, rng) for _ in range(4)]
        best = min(energy(model, shifts, g) for g in pool)
        pooled = lattice_descent(model, shifts, pool, SolveOptions(pool_tol=1.0))
        assert pooled.energy <= best + 1e-12, f"pool minimum rose from {best!r} to {pooled.energy!r}"
    return "100 pools"


CHECKS = [
    ("Integrable exactness", check_integrable_exactness),
    ("Euler-Lagrange criticality", check_euler_lagrange),
    ("Fundamental inequality", check_fundamental_inequality),
    ("Strong comparison", check_strong_comparison),
    ("Flow equivariance", check_flow_equivariance),
    ("Ground-state and Birkhoff certification", check_certification),
    ("Pinning transition", check_pinning_transition),
    ("Mountain pass", check_mountain_pass),
    ("Hull/configuration round trip", check_round_trip),
    ("Lattice descent", check_lattice_descent),
]


def run_checks(selected=None) -> bool:
    print("=" * 70)
    print("MATHER HULL ACCEPTANCE RUNS")
    print("=" * 70)
    all_passed = True
    for number, (name, check) in enumerate(CHECKS, 1):
        if selected and number not in selected:
            continue
        start = time.time()
        try:
            detail = check()
            print(f"[OK] {number:2d}. {name}: {detail} ({time.time() - start:.1f}s)")
        except AssertionError as e:
            all_passed = False
            print(f"[FAIL] {number:2d}. {name}: {e} ({time.time() - start:.1f}s)")
    print("=" * 70)
    print("[SUCCESS] All acceptance checks passed" if all_passed else "[ERROR] Some acceptance checks failed")
    return all_passed


if __name__ == "__main__":
    chosen = {int(arg) for arg in sys.argv[1:]}
    sys.exit(0 if run_checks(chosen) else 1)
