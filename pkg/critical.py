"""
Strict ordering of minimizers and the mountain-pass critical point between them

mountain_pass flows the interpolants h^s = (1-s) h- + s h+ to rest, bisects
for the s where the limit switches between basins and follows the flow from
there to the critical point sitting on the basin boundary.
"""
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import DegeneratePair, GridMismatch, NotComparable
from hull import HullFunction, from_values
from models import Model
from percival import el_residual, energy
from schemas import CriticalPointResult, MinimizerResult, MountainPassOptions, ProfilePoint, ShiftSet, SolveOptions
from solvers import approach_saddle, integrate_flow, polish_critical_point
from utils import calculate_fraction, log, parallel_map

ORDER_TOL = 1e-12
STRICT_GAP = 1e-10
PAIR_ENERGY_TOL = 1e-6
# limits further apart than this lie in different basins
BASIN_TOL = 1e-6
SANDWICH_TOL = 1e-10
# the approach ends once the residual is this many times its minimum
DEPARTURE = 10.0


def _ordered_values(h_minus: HullFunction, h_plus: HullFunction) -> Tuple[np.ndarray, np.ndarray]:
    if h_minus.N != h_plus.N:
        raise GridMismatch(f"Grid sizes differ: {h_minus.N} vs {h_plus.N}")
    lower, upper = h_minus.values, h_plus.values
    violation = float(np.max(lower - upper))
    if violation > ORDER_TOL:
        raise NotComparable(f"h_minus exceeds h_plus by up to {violation:.3e}")
    return lower, upper


def strict_fraction(lower: np.ndarray, middle: np.ndarray, upper: np.ndarray) -> float:
    inside = (middle - lower > STRICT_GAP) & (upper - middle > STRICT_GAP)
    return calculate_fraction(int(np.count_nonzero(inside)), len(middle))


def check_strict_order(model: Model, shifts: ShiftSet, h_minus: HullFunction, h_plus: HullFunction,
                       t_probe: float, opts: Optional[SolveOptions] = None) -> Tuple[bool, float]:
    """Flow both hulls for t_probe and report (still ordered, fraction strictly ordered)"""
    _ordered_values(h_minus, h_plus)
    opts = opts or SolveOptions()
    lower = integrate_flow(model, shifts, h_minus, t_probe, opts).hull.values
    upper = integrate_flow(model, shifts, h_plus, t_probe, opts).hull.values
    gap = upper - lower
    ordered = bool(np.all(gap >= -ORDER_TOL))
    fraction = calculate_fraction(int(np.count_nonzero(gap > STRICT_GAP)), len(gap))
    return ordered, fraction


def _classify_degenerate(limits: List[MinimizerResult], lower: np.ndarray, upper: np.ndarray,
                         opts: MountainPassOptions) -> str:
    """Which alternative of the zero-barrier case the sampled flows show"""
    labels = []
    for result in limits:
        values = result.hull.values
        near_lower = float(np.max(np.abs(values - lower))) <= opts.tol
        near_upper = float(np.max(np.abs(values - upper))) <= opts.tol
        if near_lower and not near_upper:
            labels.append("-")
        elif near_upper and not near_lower:
            labels.append("+")
        elif result.residual_sup <= opts.tol:
            labels.append("c")
        else:
            labels.append("?")

    interior = labels[1:-1]
    if "c" in interior:
        return "intermediate_critical_points"
    switches = sum(1 for x, y in zip(labels, labels[1:]) if x != y and "?" not in (x, y))
    if "?" not in labels and switches == 1:
        return "basin_split"
    if switches > 1:
        return "oscillating"
    return "undetermined"


def _distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def _polish(model: Model, shifts: ShiftSet, approach: MinimizerResult, lower: np.ndarray,
            upper: np.ndarray, e_minus: float) -> MinimizerResult:
    """Newton on the closest approach; kept only if it lowers the residual without changing the point"""
    try:
        polished = polish_critical_point(model, shifts, approach.hull)
    except (ValueError, np.linalg.LinAlgError) as e:
        log(f"Newton polish failed: {e}", "WARNING")
        return approach
    values = polished.hull.values
    inside = bool(np.all(values >= lower - SANDWICH_TOL) and np.all(values <= upper + SANDWICH_TOL))
    # Newton may jump to a lower critical point, e.g. one of the minimizers
    kept_height = polished.energy - e_minus >= 0.5 * (approach.energy - e_minus)
    if polished.residual_sup < approach.residual_sup and inside and kept_height:
        log(f"Newton polish: residual {approach.residual_sup:.3e} -> {polished.residual_sup:.3e}", "DEBUG")
        return polished
    log(f"Newton polish rejected (residual {polished.residual_sup:.3e}, inside {inside}, "
        f"energy {polished.energy:.12g})", "DEBUG")
    return approach


def mountain_pass(model: Model, shifts: ShiftSet, h_minus: HullFunction, h_plus: HullFunction,
                  opts: Optional[MountainPassOptions] = None,
                  flow_opts: Optional[SolveOptions] = None) -> CriticalPointResult:
    """Critical point between two strictly ordered minimizers of equal energy.

    The interpolants h^s = (1-s) h- + s h+ are flowed to rest on an s grid.
    Where neighbouring limits differ, s sits on both sides of a basin
    boundary; the switching pair nearest s = 1/2 is bisected, the flow from
    the boundary point shadows the stable manifold of a critical point and
    its closest approach is finished by Newton's method.
    """
    opts = opts or MountainPassOptions()
    lower, upper = _ordered_values(h_minus, h_plus)
    if float(np.min(upper - lower)) <= ORDER_TOL:
        raise NotComparable("h_minus and h_plus must be strictly ordered at every grid point")
    e_minus, e_plus = energy(model, shifts, h_minus), energy(model, shifts, h_plus)
    if abs(e_minus - e_plus) > PAIR_ENERGY_TOL:
        raise DegeneratePair(f"Minimizer energies differ by {abs(e_minus - e_plus):.3e}")
    if flow_opts is None:
        flow_opts = SolveOptions(residual_tol=min(1e-9, opts.tol * 1e-2), max_steps=200000)

    def interpolant(s: float) -> HullFunction:
        return from_values((1.0 - s) * lower + s * upper)

    def relax(s: float, stall_rate: float) -> MinimizerResult:
        return integrate_flow(model, shifts, interpolant(s), opts.T_flow, flow_opts, stall_rate=stall_rate)

    profile: Dict[float, Tuple[float, float]] = {}
    s_grid = [float(s) for s in np.linspace(0.0, 1.0, opts.s_grid)]
    limits = parallel_map(lambda s: relax(s, opts.stall_rate), s_grid)
    for s, result in zip(s_grid, limits):
        profile[s] = (result.energy, result.residual_sup)
    log(f"Mountain pass: sampled {opts.s_grid} interpolants, max limiting energy "
        f"{max(r.energy for r in limits):.12g}", "DEBUG")

    switches = [i for i in range(len(s_grid) - 1)
                if _distance(limits[i].hull.values, limits[i + 1].hull.values) > BASIN_TOL]
    if not switches:
        raise DegeneratePair("Every interpolant flows to the same rest point")
    i = min(switches, key=lambda k: (abs(s_grid[k] + s_grid[k + 1] - 1.0), k))
    a, b = s_grid[i], s_grid[i + 1]
    lo, hi = limits[i].hull.values, limits[i + 1].hull.values

    # no stall exit here: flows started near the boundary linger at the critical point
    for _ in range(opts.refine_rounds):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        result = relax(mid, 0.0)
        profile[mid] = (result.energy, result.residual_sup)
        values = result.hull.values
        if _distance(values, lo) <= _distance(values, hi):
            a, lo = mid, values
        else:
            b, hi = mid, values
    log(f"Mountain pass: basin boundary bracketed in [{a:.15g}, {b:.15g}]", "DEBUG")

    approach = approach_saddle(model, shifts, interpolant(a), opts.T_flow, flow_opts, departure=DEPARTURE)
    critical_point = approach
    if approach.residual_sup > flow_opts.residual_tol:
        critical_point = _polish(model, shifts, approach, lower, upper, e_minus)

    hull = critical_point.hull
    values = hull.values
    B = energy(model, shifts, hull)
    residual = el_residual(model, shifts, hull).sup_norm
    barrier = B - e_minus
    s_star = a
    profile[s_star] = (B, residual)

    dichotomy = None
    if barrier <= opts.barrier_tol:
        case = "degenerate"
        dichotomy = _classify_degenerate(limits, lower, upper, opts)
        log(f"Barrier {barrier:.3e} is within tolerance; flows show {dichotomy}", "WARNING")
    elif residual <= opts.tol:
        case = "mountain_pass"
        log(f"Mountain pass at s={s_star:.12g}: barrier {barrier:.12g}, residual {residual:.3e}", "OK")
    else:
        case = "unresolved"
        log(f"Closest approach to the critical point has residual {residual:.3e} > {opts.tol:g}; "
            f"barrier estimate {barrier:.12g}", "WARNING")

    return CriticalPointResult(
        hull=hull,
        energy=B,
        residual_sup=residual,
        barrier=barrier,
        s_star=s_star,
        strict_fraction=strict_fraction(lower, values, upper),
        case=case,
        dichotomy=dichotomy,
        converged=residual <= opts.tol,
        profile=[ProfilePoint(s=s, limiting_energy=e, residual_sup=r) for s, (e, r) in sorted(profile.items())],
    )
