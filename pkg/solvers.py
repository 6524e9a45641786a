"""
Minimizers of the discretized Percival Lagrangian

Gradient flow dh/dt = -X(h) by explicit RK4, projected descent, lattice
descent by iterated meets, K sweeps with warm starts, and the direct
period-N orbit minimization used to cross-check the hull solvers.

All iterations run on the base samples of a HullFunction and hand the
result back with the input's rotation and lift, so the flow commutes with
h -> h + n and h -> h o T_{p/N} bit for bit.
"""
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import optimize

from config import settings
from errors import ConfigError, GridMismatch, StepRejected
from hull import (
    HullFunction,
    detect_gaps,
    from_values,
    identity_hull,
    is_monotone,
    join,
    meet,
    monotone_envelope,
    normalize,
    project_monotone,
    project_monotone_array,
    random_monotone,
    with_base,
)
from models import BUILTINS, Model, validate_model
from percival import el_residual, energy, energy_array, residual_array, residual_jacobian
from schemas import HistoryEntry, MinimizerResult, ShiftSet, SolveOptions, SweepRecord
from utils import log, make_rng, parallel_map

# energy may rise by this much in an accepted step (rounding)
ENERGY_SLACK = 1e-12
MIN_DT = 1e-15
DT_GROWTH = 2.0
# dt * (diagonal bound of DX) stays below this, which keeps an RK4 step order preserving
STABILITY_FACTOR = 0.9
ARMIJO = 1e-4
# lattice descent stops when no pair changes the pool by more than this
POOL_CHANGE_TOL = 1e-13

Velocity = Callable[[np.ndarray], np.ndarray]


def _check_inputs(model: Model, shifts: ShiftSet, h: HullFunction) -> None:
    if h.N != shifts.grid_size:
        raise GridMismatch(f"Hull has N={h.N} but shifts were built for N={shifts.grid_size}")
    if model.dim != shifts.dim:
        raise GridMismatch(f"Model has {model.dim} terms but {shifts.dim} shifts were given")


def stable_dt(model: Model, opts: SolveOptions) -> float:
    """Largest flow step allowed for this model"""
    report = validate_model(model, samples_per_axis=settings.VALIDATION_SAMPLES, weak=True)
    return min(opts.dt_max, STABILITY_FACTOR / max(report.diagonal_bound, 1e-300))


def _velocity(model: Model, approximants: Sequence[int]) -> Velocity:
    def velocity(values: np.ndarray) -> np.ndarray:
        return -residual_array(model, approximants, values)
    return velocity


def _rk4(velocity: Velocity, values: np.ndarray, dt: float, k1: Optional[np.ndarray] = None) -> np.ndarray:
    if k1 is None:
        k1 = velocity(values)
    k2 = velocity(values + 0.5 * dt * k1)
    k3 = velocity(values + 0.5 * dt * k2)
    k4 = velocity(values + dt * k3)
    return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _accepted_step(velocity: Velocity, model: Model, approximants: Sequence[int], values: np.ndarray,
                   current_energy: float, dt: float, k1: Optional[np.ndarray] = None):
    """One RK4 step, halving dt until the energy does not rise"""
    while True:
        new_values = _rk4(velocity, values, dt, k1)
        new_energy = energy_array(model, approximants, new_values)
        if new_energy <= current_energy + ENERGY_SLACK:
            return new_values, new_energy, dt
        log(f"Flow step rejected at dt={dt:.3e}, energy rose by {new_energy - current_energy:.3e}", "DEBUG")
        dt *= 0.5
        if dt < MIN_DT:
            raise StepRejected(f"Flow step size fell below {MIN_DT:g} without decreasing the energy")


# ============================================
# Gradient flow
# ============================================

def flow_step(model: Model, shifts: ShiftSet, h: HullFunction, dt: float) -> HullFunction:
    """One RK4 step of dh/dt = -X(h)"""
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    _check_inputs(model, shifts, h)
    m = shifts.approximants
    E = energy_array(model, m, h.base)
    values, _, _ = _accepted_step(_velocity(model, m), model, m, h.base, E, dt)
    return with_base(h, values)


def _run_flow(model: Model, shifts: ShiftSet, h0: HullFunction, T: float, opts: SolveOptions,
              stall_rate: float = 0.0, departure: float = 0.0) -> MinimizerResult:
    if T <= 0:
        raise ConfigError(f"Flow time T must be positive, got {T}")
    _check_inputs(model, shifts, h0)
    m = shifts.approximants
    velocity = _velocity(model, m)
    dt_cap = stable_dt(model, opts)
    dt = min(opts.dt_init, dt_cap)
    reproject = opts.reproject_every > 0 and h0.monotone_flag

    values = np.array(h0.base)
    E = energy_array(model, m, values)
    t = 0.0
    steps = 0
    reprojection_max = 0.0
    history: List[HistoryEntry] = []
    best_residual, best_values, best_energy = math.inf, values, E
    converged = False

    while True:
        k1 = velocity(values)
        residual = float(np.max(np.abs(k1)))
        history.append(HistoryEntry(step=steps, time=t, energy=E, residual_sup=residual))
        if residual < best_residual:
            best_residual, best_values, best_energy = residual, values, E
        if residual <= opts.residual_tol:
            converged = True
            break
        if departure > 0 and residual > departure * best_residual:
            log(f"Flow turned away at t={t:.4g}; closest approach residual {best_residual:.3e}", "DEBUG")
            break
        if steps >= opts.max_steps or T - t <= 1e-12 * T:
            break

        new_values, new_energy, used = _accepted_step(velocity, model, m, values, E, min(dt, T - t), k1)
        steps += 1
        t += used
        stalled = stall_rate > 0 and (E - new_energy) < stall_rate * used
        values, E = new_values, new_energy
        dt = min(dt * DT_GROWTH, dt_cap) if used >= dt else used

        if reproject and steps % opts.reproject_every == 0:
            projected = project_monotone_array(values)
            correction = float(np.max(np.abs(projected - values)))
            if correction > 0:
                reprojection_max = max(reprojection_max, correction)
                values = projected
                E = energy_array(model, m, values)
        if stalled:
            residual = float(np.max(np.abs(velocity(values))))
            history.append(HistoryEntry(step=steps, time=t, energy=E, residual_sup=residual))
            if residual < best_residual:
                best_residual, best_values, best_energy = residual, values, E
            converged = residual <= opts.residual_tol
            log(f"Flow stalled at t={t:.4g} with residual {residual:.3e}", "DEBUG")
            break

    if departure > 0:
        values, E, residual = best_values, best_energy, best_residual
    if reproject and not is_monotone(values):
        projected = project_monotone_array(values)
        reprojection_max = max(reprojection_max, float(np.max(np.abs(projected - values))))
        values = projected
        E = energy_array(model, m, values)
        residual = float(np.max(np.abs(velocity(values))))

    return MinimizerResult(
        hull=with_base(h0, values),
        energy=E,
        residual_sup=residual,
        steps_taken=steps,
        converged=converged,
        history=history,
        time=t,
        reprojection_max=reprojection_max,
    )


def integrate_flow(model: Model, shifts: ShiftSet, h0: HullFunction, T: float,
                   opts: Optional[SolveOptions] = None, stall_rate: float = 0.0) -> MinimizerResult:
    """Flow for time T or until sup|X| <= opts.residual_tol.

    Running out of steps or time is reported through converged=False. With
    stall_rate > 0 the flow also stops once the energy falls by less than
    stall_rate per unit time.
    """
    opts = opts or SolveOptions()
    result = _run_flow(model, shifts, h0, T, opts, stall_rate=stall_rate)
    if result.reprojection_max > 0:
        log(f"Monotone reprojection moved the hull by up to {result.reprojection_max:.3e}", "DEBUG")
    return result


def approach_saddle(model: Model, shifts: ShiftSet, h0: HullFunction, T: float,
                    opts: Optional[SolveOptions] = None, departure: float = 10.0) -> MinimizerResult:
    """Follow the flow from a point on a basin boundary and return its closest approach to rest.

    The run ends once sup|X| has grown to `departure` times its smallest
    value, i.e. when the trajectory leaves the critical point it was
    shadowing; the lowest-residual iterate is returned.
    """
    opts = opts or SolveOptions()
    if departure <= 1.0:
        raise ConfigError(f"departure must exceed 1, got {departure}")
    return _run_flow(model, shifts, h0, T, opts, departure=departure)


def polish_critical_point(model: Model, shifts: ShiftSet, h: HullFunction,
                          residual_tol: float = 1e-12) -> MinimizerResult:
    """Newton iteration on X(h) = 0 from a nearby iterate (MINPACK hybrid method, exact Jacobian)"""
    _check_inputs(model, shifts, h)
    m = shifts.approximants

    def system(values: np.ndarray):
        return residual_array(model, m, values), residual_jacobian(model, m, values)

    found = optimize.root(system, np.array(h.base), jac=True, method="hybr",
                          options={"xtol": 1e-15, "maxfev": 200})
    values = found.x
    residual = float(np.max(np.abs(residual_array(model, m, values))))
    return MinimizerResult(
        hull=with_base(h, values),
        energy=energy_array(model, m, values),
        residual_sup=residual,
        steps_taken=int(getattr(found, "nfev", 0)),
        converged=residual <= residual_tol,
    )



# ============================================
# Projected descent
# ============================================

def projected_descent(model: Model, shifts: ShiftSet, h0: HullFunction,
                      opts: Optional[SolveOptions] = None) -> MinimizerResult:
    """h <- P(h - alpha X(h)) with Armijo backtracking on alpha.

    alpha stays below the stable flow step; sufficient decrease is measured
    by the projected step |h - P(h - alpha X)|^2 / alpha, which stays
    positive at the cone boundary where X . (h - P(...)) can vanish.
    """
    opts = opts or SolveOptions()
    _check_inputs(model, shifts, h0)
    m = shifts.approximants
    N = h0.N
    values = project_monotone_array(h0.base)
    E = energy_array(model, m, values)
    cap = stable_dt(model, opts)
    alpha = min(opts.dt_init, cap)
    t = 0.0
    history: List[HistoryEntry] = []
    converged = False
    steps = 0

    while True:
        X = residual_array(model, m, values)
        residual = float(np.max(np.abs(X)))
        history.append(HistoryEntry(step=steps, time=t, energy=E, residual_sup=residual))
        if residual <= opts.residual_tol:
            converged = True
            break
        if steps >= opts.max_steps:
            break
        while True:
            candidate = project_monotone_array(values - alpha * X)
            candidate_energy = energy_array(model, m, candidate)
            moved = values - candidate
            decrease = float(np.dot(moved, moved)) / (alpha * N)
            if candidate_energy <= E - ARMIJO * decrease + ENERGY_SLACK:
                break
            alpha *= 0.5
            if alpha < MIN_DT:
                break
        if alpha < MIN_DT:
            log("Projected descent could not find a decreasing step", "WARNING")
            break
        values, E = candidate, candidate_energy
        steps += 1
        t += alpha
        alpha = min(alpha * DT_GROWTH, cap)

    return MinimizerResult(
        hull=with_base(h0, values, monotone_flag=True),
        energy=E,
        residual_sup=residual,
        steps_taken=steps,
        converged=converged,
        history=history,
        time=t,
    )


# ============================================
# Lattice descent
# ============================================

def _into_the_cone(model: Model, shifts: ShiftSet, h: HullFunction, pool_minimum: float,
                   opts: SolveOptions) -> HullFunction:
    """A monotone hull no higher than the pool minimum, starting from a non-monotone best member.

    The envelope comes first; when it raises the energy, the projection is
    flowed down instead. The lower of the two is kept if neither gets back
    under the pool minimum.
    """
    envelope = monotone_envelope(h)
    envelope_energy = energy(model, shifts, envelope)
    if envelope_energy <= pool_minimum + ENERGY_SLACK:
        return envelope
    log(f"Monotone envelope raised the energy by {envelope_energy - pool_minimum:.3e}; "
        "flowing the projection instead", "DEBUG")
    flowed = integrate_flow(model, shifts, project_monotone(h), opts.time_horizon, opts)
    if flowed.energy <= pool_minimum + ENERGY_SLACK:
        return flowed.hull
    log(f"Neither the envelope nor the flowed projection reached the pool minimum "
        f"{pool_minimum:.15g}", "WARNING")
    return flowed.hull if flowed.energy < envelope_energy else envelope


def lattice_descent(model: Model, shifts: ShiftSet, candidates: List[HullFunction],
                    opts: Optional[SolveOptions] = None) -> MinimizerResult:
    """Iterated meets of near-minimal candidates, then envelope and normalization.

    A pair (a, b) from the near-minimal part of the pool is replaced by
    (a meet b, a join b) whenever that lowers their summed energy; by
    submodularity this never raises the pool. The best pool member ever
    seen is returned.
    """
    opts = opts or SolveOptions()
    if not candidates:
        raise ConfigError("lattice_descent needs at least one candidate")
    for h in candidates:
        _check_inputs(model, shifts, h)

    pool = list(candidates)
    energies = [energy(model, shifts, h) for h in pool]
    best = int(np.argmin(energies))
    best_hull, best_energy = pool[best], energies[best]
    history: List[HistoryEntry] = []
    passes = 0

    while passes < opts.max_steps:
        passes += 1
        changed = False
        floor = min(energies)
        near = [i for i in np.argsort(energies, kind="stable") if energies[i] <= floor + opts.pool_tol]
        for a_pos, a in enumerate(near):
            for b in near[a_pos + 1:]:
                low, high = meet(pool[a], pool[b]), join(pool[a], pool[b])
                e_low, e_high = energy(model, shifts, low), energy(model, shifts, high)
                if e_low + e_high < energies[a] + energies[b] - POOL_CHANGE_TOL:
                    pool[a], pool[b] = low, high
                    energies[a], energies[b] = e_low, e_high
                    changed = True
                    if e_low < best_energy:
                        best_hull, best_energy = low, e_low
        history.append(HistoryEntry(step=passes, time=0.0, energy=best_energy, residual_sup=math.nan))
        if not changed:
            break

    hull = best_hull if best_hull.monotone_flag else _into_the_cone(model, shifts, best_hull, best_energy, opts)
    hull = normalize(hull)
    residual = el_residual(model, shifts, hull).sup_norm
    history[-1] = HistoryEntry(step=passes, time=0.0, energy=best_energy, residual_sup=residual)
    return MinimizerResult(
        hull=hull,
        energy=energy(model, shifts, hull),
        residual_sup=residual,
        steps_taken=passes,
        converged=residual <= opts.residual_tol,
        history=history,
    )


# ============================================
# Minimize and sweep
# ============================================

def minimize(model: Model, shifts: ShiftSet, h0: Optional[HullFunction] = None,
             opts: Optional[SolveOptions] = None) -> MinimizerResult:
    opts = opts or SolveOptions()
    if h0 is None:
        h0 = identity_hull(shifts.grid_size)
    _check_inputs(model, shifts, h0)
    log(f"Minimizing {model.name} {model.params} at N={shifts.grid_size} with {opts.method}")

    if opts.method == "flow":
        result = integrate_flow(model, shifts, h0, opts.time_horizon, opts)
    elif opts.method == "projected_descent":
        result = projected_descent(model, shifts, h0, opts)
    else:
        rng = make_rng(opts.seed)
        candidates = [h0] + [random_monotone(shifts.grid_size, rng) for _ in range(opts.n_candidates)]
        pooled = lattice_descent(model, shifts, candidates, opts)
        result = integrate_flow(model, shifts, pooled.hull, opts.time_horizon, opts)
        result.steps_taken += pooled.steps_taken
        result.history = pooled.history + result.history

    if result.hull.monotone_flag:
        result.hull = normalize(result.hull)
    else:
        log("Minimizer left the monotone cone; returned without normalization", "WARNING")

    if result.converged:
        log(f"Converged in {result.steps_taken} steps: energy {result.energy:.15g}, "
            f"residual {result.residual_sup:.3e}", "OK")
    else:
        log(f"Not converged after {result.steps_taken} steps: residual {result.residual_sup:.3e}", "WARNING")
    return result


def sweep(K_grid: Sequence[float], shifts: ShiftSet, opts: Optional[SolveOptions] = None,
          builtin: str = "standard_fk", h0: Optional[HullFunction] = None) -> List[SweepRecord]:
    """Minimize along an ascending K grid, warm-starting each solve from the previous minimizer"""
    opts = opts or SolveOptions()
    if len(K_grid) == 0:
        raise ConfigError("K grid is empty")
    if any(b < a for a, b in zip(K_grid, K_grid[1:])):
        raise ConfigError("K grid must be sorted ascending")
    if builtin not in BUILTINS:
        raise ConfigError(f"Unknown builtin model: {builtin!r}")

    records: List[SweepRecord] = []
    h = h0
    for K in K_grid:
        model = BUILTINS[builtin](float(K), shifts.dim)
        result = minimize(model, shifts, h, opts)
        gaps = detect_gaps(result.hull, threshold=2.0 / shifts.grid_size)
        records.append(SweepRecord(
            K=float(K),
            energy=result.energy,
            residual_sup=result.residual_sup,
            largest_gap=gaps.largest_gap,
            excess_gap=gaps.excess_gap,
            converged=result.converged,
            steps_taken=result.steps_taken,
        ))
        log(f"K={K}: energy {result.energy:.12g}, largest gap {gaps.largest_gap:.6g}")
        h = result.hull
    return records


# ============================================
# Direct orbit minimization
# ============================================

def minimize_orbit_action(model: Model, shifts: ShiftSet, restarts: int = 50, seed: int = 0,
                          perturbation: float = 0.5, residual_tol: float = 1e-8) -> MinimizerResult:
    """Minimize the period-N orbit action sum_i H(x_i, x_{i+1}), x_{i+N} = x_i + m.

    L-BFGS from the rigid orbit x_i = m i / N and from `restarts` random
    perturbations of it; the best orbit is read back as a hull through
    theta_i = (m i mod N) / N and projected into the monotone cone, which
    absorbs the optimizer's rounding-level disorder.
    Works on a single term with m coprime to N.
    """
    if model.dim != 1 or shifts.dim != 1:
        raise ConfigError("Orbit minimization supports one interaction term")
    N = shifts.grid_size
    m = shifts.approximants[0]
    if math.gcd(m, N) != 1:
        raise ConfigError(f"m={m} and N={N} must be coprime for a single orbit to cover the grid")
    term = model.terms[0]

    def action(x: np.ndarray):
        nxt = np.append(x[1:], x[0] + m)
        prev = np.append(x[-1] - m, x[:-1])
        return float(np.sum(term.energy(x, nxt))), term.d1(x, nxt) + term.d2(prev, x)

    rng = make_rng(seed)
    rigid = m * np.arange(N) / N
    starts = [rigid] + [rigid + rng.uniform(-perturbation, perturbation, size=N) for _ in range(restarts)]

    def run(x0: np.ndarray):
        return optimize.minimize(action, x0, jac=True, method="L-BFGS-B",
                                 options={"maxiter": 50000, "gtol": 1e-11, "ftol": 1e-16})

    runs = parallel_map(run, starts)
    best = min(runs, key=lambda r: r.fun)
    log(f"Orbit action: best of {len(starts)} starts {best.fun / N:.15g}", "DEBUG")

    phase = (m * np.arange(N)) % N
    values = np.empty(N)
    values[phase] = best.x - (m * np.arange(N)) // N
    hull = from_values(values)
    if not hull.monotone_flag:
        projected = project_monotone(hull)
        log(f"Orbit readout was out of order by up to {float(np.max(np.abs(projected.values - values))):.3e}; "
            "projected into the monotone cone", "DEBUG")
        hull = projected
    hull = normalize(hull)
    residual = el_residual(model, shifts, hull).sup_norm
    return MinimizerResult(
        hull=hull,
        energy=energy(model, shifts, hull),
        residual_sup=residual,
        steps_taken=int(sum(r.nit for r in runs)),
        converged=residual <= residual_tol,
    )
