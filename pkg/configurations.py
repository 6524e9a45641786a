"""
Lattice configurations u: Z^d -> R on finite windows, and their certificates

Windows are boxes |i|_inf <= R. Every certificate is a "no counterexample in
the stated ranges" statement; the ranges are echoed in the report.
"""
import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from errors import ConfigError, NotOmegaBirkhoff, WindowTooSmall
from hull import HullFunction, evaluate, from_values, normalize
from models import Model
from schemas import CertificateReport
from utils import make_rng

# |omega.k + l| below this counts as zero
RESONANCE_TOL = 1e-12
# hull_from_configuration tolerates this much non-monotonicity
MONOTONE_TOL = 1e-10
GROUND_STATE_TOL = 1e-10
TRIAL_CHUNK = 256
MAX_RELAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class ConfigurationWindow:
    values: np.ndarray
    omega_hint: Optional[List[float]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        side = values.shape[0] if values.ndim else 0
        if values.ndim < 1 or side % 2 == 0 or any(n != side for n in values.shape):
            raise ConfigError(f"Window must be a cube of odd side, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("Window values must be finite")
        if self.omega_hint is not None and len(self.omega_hint) != values.ndim:
            raise ConfigError(f"omega_hint has {len(self.omega_hint)} entries for a {values.ndim}-d window")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def radius(self) -> int:
        return (self.values.shape[0] - 1) // 2

    def __getitem__(self, site: Sequence[int]) -> float:
        return float(self.values[tuple(int(c) + self.radius for c in site)])

    def sites(self) -> np.ndarray:
        """Integer coordinates of every site, shape (d, 2R+1, ..., 2R+1)"""
        return np.indices(self.values.shape) - self.radius


def window_from_function(fn, dim: int, radius: int, omega_hint: Optional[List[float]] = None) -> ConfigurationWindow:
    """Window with u_i = fn(i) for |i|_inf <= radius; fn gets the (d, ...) site array"""
    sites = np.indices((2 * radius + 1,) * dim) - radius
    return ConfigurationWindow(values=np.asarray(fn(sites), dtype=float), omega_hint=omega_hint)


def _check_omega(u: ConfigurationWindow, omega: Sequence[float]) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (u.dim,):
        raise ConfigError(f"omega needs {u.dim} components, got {list(omega)}")
    return omega


def _pair_slices(k: Sequence[int], R: int) -> Tuple[Tuple[slice, ...], Tuple[slice, ...]]:
    """Slices picking u_i and u_{i+k} over all i with both sites in the window"""
    side = 2 * R + 1
    here, there = [], []
    for kj in k:
        lo = max(0, -kj)
        hi = side - max(0, kj)
        here.append(slice(lo, hi))
        there.append(slice(lo + kj, hi + kj))
    return tuple(here), tuple(there)


def _offsets(dim: int, k_range: int):
    return itertools.product(range(-k_range, k_range + 1), repeat=dim)


def _rounding_slack(u: ConfigurationWindow, l: int) -> float:
    return 8.0 * np.finfo(float).eps * (float(np.max(np.abs(u.values))) + abs(l) + 1.0)


def _check_ranges(u: ConfigurationWindow, k_range: int, l_range: int) -> None:
    if k_range < 0 or l_range < 0:
        raise ConfigError("k_range and l_range must be non-negative")
    if k_range > 2 * u.radius:
        raise WindowTooSmall(f"k_range={k_range} leaves no site pairs in a radius {u.radius} window")


# ============================================
# Sampling
# ============================================

def sample_configuration(h: HullFunction, omega: Sequence[float], radius: int, phase: float = 0.0) -> ConfigurationWindow:
    """u_i = h(phase + omega . i) for |i|_inf <= radius"""
    if radius < 0:
        raise ConfigError(f"radius must be non-negative, got {radius}")
    omega = np.asarray(omega, dtype=float)
    sites = np.indices((2 * radius + 1,) * len(omega)) - radius
    theta = phase + np.tensordot(omega, sites, axes=1)
    return ConfigurationWindow(values=evaluate(h, theta), omega_hint=omega.tolist())


def rotation_vector(u: ConfigurationWindow) -> Tuple[List[float], float]:
    """Average drift along each axis and the largest deviation |u_{i+kn} - u_i - n omega.k|"""
    R = u.radius
    if R < 4:
        raise WindowTooSmall(f"rotation_vector needs radius >= 4, got {R}")
    omega_hat = []
    for j in range(u.dim):
        e = np.zeros(u.dim, dtype=int)
        e[j] = R
        omega_hat.append((u[e] - u[-e]) / (2 * R))

    deviation = 0.0
    for j in range(u.dim):
        for n in range(1, 2 * R + 1):
            k = [0] * u.dim
            k[j] = n
            here, there = _pair_slices(k, R)
            drift = u.values[there] - u.values[here] - n * omega_hat[j]
            deviation = max(deviation, float(np.max(np.abs(drift))))
    return omega_hat, deviation


# ============================================
# Order certificates
# ============================================

def birkhoff_check(u: ConfigurationWindow, k_range: int, l_range: int) -> CertificateReport:
    """For every (k, l) the differences u_{i+k} + l - u_i must not take both strict signs"""
    _check_ranges(u, k_range, l_range)
    witnesses: List[Dict] = []
    margin = math.inf
    for k in _offsets(u.dim, k_range):
        here, there = _pair_slices(k, u.radius)
        base = u.values[there] - u.values[here]
        if base.size == 0:
            continue
        for l in range(-l_range, l_range + 1):
            D = base + l
            slack = _rounding_slack(u, l)
            top, bottom = float(D.max()), float(D.min())
            if top > slack and bottom < -slack:
                i_plus = np.unravel_index(int(np.argmax(D)), D.shape)
                i_minus = np.unravel_index(int(np.argmin(D)), D.shape)
                offset = [s.start - u.radius for s in here]
                witnesses.append({
                    "k": list(k),
                    "l": l,
                    "i_above": [int(c) + o for c, o in zip(i_plus, offset)],
                    "i_below": [int(c) + o for c, o in zip(i_minus, offset)],
                    "magnitude": min(top, -bottom),
                })
                margin = min(margin, top, -bottom)
    return CertificateReport(
        kind="birkhoff",
        passed=not witnesses,
        witnesses=witnesses,
        margin=0.0 if not witnesses else margin,
        ranges={"k_range": k_range, "l_range": l_range, "radius": u.radius},
    )


def omega_birkhoff_check(u: ConfigurationWindow, omega: Sequence[float], k_range: int, l_range: int,
                         tol: float = 0.0) -> CertificateReport:
    """omega.k + l >= 0 must force u_{i+k} + l >= u_i, and <= 0 must force <="""
    _check_ranges(u, k_range, l_range)
    omega = _check_omega(u, omega)
    witnesses: List[Dict] = []
    worst = 0.0
    for k in _offsets(u.dim, k_range):
        here, there = _pair_slices(k, u.radius)
        base = u.values[there] - u.values[here]
        if base.size == 0:
            continue
        drift = float(np.dot(omega, k))
        for l in range(-l_range, l_range + 1):
            s = drift + l
            if abs(s) <= RESONANCE_TOL:
                s = 0.0
            D = base + l
            allowance = tol + _rounding_slack(u, l)
            offset = [sl.start - u.radius for sl in here]
            checks = []
            if s >= 0:
                checks.append((">=", -allowance - D))
            if s <= 0:
                checks.append(("<=", D - allowance))
            for relation, excess in checks:
                if float(excess.max()) > 0:
                    idx = np.unravel_index(int(np.argmax(excess)), excess.shape)
                    witnesses.append({
                        "k": list(k),
                        "l": l,
                        "i": [int(c) + o for c, o in zip(idx, offset)],
                        "required": f"u[i+k] + l {relation} u[i]",
                        "difference": float(D[idx]),
                    })
                    worst = max(worst, float(excess.max()))
    return CertificateReport(
        kind="omega_birkhoff",
        passed=not witnesses,
        witnesses=witnesses,
        margin=worst,
        ranges={"k_range": k_range, "l_range": l_range, "radius": u.radius, "tol": tol,
                "omega": omega.tolist()},
    )


# ============================================
# Hull reconstruction
# ============================================

def hull_from_configuration(u: ConfigurationWindow, omega: Sequence[float], N: int) -> HullFunction:
    """Monotone grid hull through the points (frac(omega.i), u_i - floor(omega.i) - u_0).

    Grid values are the left-continuous step extension: h(k/N) is the
    ordinate of the first point at or after k/N, and the hull comes back
    normalized. The site i = 0 sits at (0, 0), so normalizing is a no-op
    unless h(1/N) = 0 too; then h(0) = 0 is kept only up to a grid translation.
    """
    omega = _check_omega(u, omega)
    if N < 1:
        raise ConfigError(f"N must be positive, got {N}")
    theta = np.tensordot(omega, u.sites(), axes=1).ravel()
    # phases within 1e-12 below a period boundary belong to the next period
    carry = np.floor(theta + 1e-12)
    frac = np.maximum(theta - carry, 0.0)
    y = u.values.ravel() - carry - u[[0] * u.dim]

    order = np.lexsort((y, frac))
    frac, y = frac[order], y[order]
    jumps = np.diff(y)
    same_phase = np.diff(frac) <= 1e-12
    violation = max(
        float(-jumps.min()) if jumps.size else 0.0,
        float(np.abs(jumps[same_phase]).max()) if same_phase.any() else 0.0,
        float(y[-1] - y[0] - 1.0),
    )
    if violation > MONOTONE_TOL:
        raise NotOmegaBirkhoff(f"Window is not of hull form for omega={omega.tolist()} "
                               f"(order violated by {violation:.3e})")

    grid = np.arange(N) / N
    pos = np.searchsorted(frac, grid - 1e-12, side="left")
    wrapped = pos >= len(frac)
    values = np.where(wrapped, y[0] + 1.0, y[np.minimum(pos, len(frac) - 1)])
    # clear the tolerated disorder so the result is in Y exactly
    values = np.maximum.accumulate(values)
    values = np.minimum(values, values[0] + 1.0)
    return normalize(from_values(values, monotone_flag=True))


# ============================================
# Euler-Lagrange and ground state tests
# ============================================

def _check_model(model: Model, u: ConfigurationWindow) -> None:
    if model.dim != u.dim:
        raise ConfigError(f"Model has {model.dim} terms but the window is {u.dim}-dimensional")


def discrete_el_residual(model: Model, u: ConfigurationWindow, i: Sequence[int]) -> float:
    """sum_j d1_j(u_i, u_{i+e_j}) + d2_j(u_{i-e_j}, u_i)"""
    _check_model(model, u)
    i = [int(c) for c in i]
    if len(i) != u.dim:
        raise ConfigError(f"Site {i} does not match a {u.dim}-d window")
    if any(abs(c) + 1 > u.radius for c in i):
        raise WindowTooSmall(f"Site {i} has neighbours outside the radius {u.radius} window")
    total = 0.0
    for j, term in enumerate(model.terms):
        ahead, behind = list(i), list(i)
        ahead[j] += 1
        behind[j] -= 1
        total += float(term.d1(u[i], u[ahead])) + float(term.d2(u[behind], u[i]))
    return total


def interior_el_residuals(model: Model, u: ConfigurationWindow) -> np.ndarray:
    """discrete_el_residual at every site |i|_inf <= R - 1"""
    _check_model(model, u)
    if u.radius < 1:
        raise WindowTooSmall("A radius 0 window has no interior sites")
    inner = (slice(1, -1),) * u.dim
    total = np.zeros(u.values[inner].shape)
    for j, term in enumerate(model.terms):
        ahead = [slice(1, -1)] * u.dim
        behind = [slice(1, -1)] * u.dim
        ahead[j] = slice(2, None)
        behind[j] = slice(None, -2)
        centre = u.values[inner]
        total = total + term.d1(centre, u.values[tuple(ahead)]) + term.d2(u.values[tuple(behind)], centre)
    return total


def _bond_energy(model: Model, w: np.ndarray, batch: bool) -> np.ndarray:
    """Total bond energy inside a block; a leading trial axis is kept when batch is set"""
    shift = 1 if batch else 0
    total = 0.0
    for j, term in enumerate(model.terms):
        axis = j + shift
        lo = [slice(None)] * w.ndim
        hi = [slice(None)] * w.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        e = term.energy(w[tuple(lo)], w[tuple(hi)])
        total = total + (e.reshape(e.shape[0], -1).sum(axis=1) if batch else e.sum())
    return total


def _site_energy(model: Model, w: np.ndarray, site: Tuple[int, ...], value: float) -> float:
    """Energy of the bonds touching one site, with the site set to value"""
    total = 0.0
    for j, term in enumerate(model.terms):
        ahead, behind = list(site), list(site)
        ahead[j] += 1
        behind[j] -= 1
        total += float(term.energy(value, w[tuple(ahead)])) + float(term.energy(w[tuple(behind)], value))
    return total


def ground_state_test(model: Model, u: ConfigurationWindow, box: int, trials: int, amplitude: float,
                      seed: int) -> CertificateReport:
    """Finite-box class-A test.

    Perturbations phi live on |i|_inf < box; the action is summed over the
    bonds of the block |i|_inf <= box + 1. Random trials come first, then
    coordinate descent on the perturbed sites, each within +-amplitude of u.
    """
    _check_model(model, u)
    if box < 1:
        raise ConfigError(f"box must be at least 1, got {box}")
    if box + 1 > u.radius:
        raise WindowTooSmall(f"box={box} needs a window of radius >= {box + 1}, got {u.radius}")
    if amplitude <= 0:
        raise ConfigError(f"amplitude must be positive, got {amplitude}")

    R = u.radius
    block = u.values[(slice(R - box - 1, R + box + 2),) * u.dim]
    support = (slice(2, -2),) * u.dim
    support_shape = block[support].shape
    e_block = _bond_energy(model, block, batch=False)

    rng = make_rng(seed)
    witnesses: List[Dict] = []
    margin = math.inf
    done = 0
    while done < trials:
        count = min(TRIAL_CHUNK, trials - done)
        perturbed = np.repeat(block[None, ...], count, axis=0)
        perturbed[(slice(None),) + support] += rng.uniform(-amplitude, amplitude, size=(count,) + support_shape)
        delta = _bond_energy(model, perturbed, batch=True) - e_block
        worst = int(np.argmin(delta))
        if delta[worst] < margin:
            margin = float(delta[worst])
            if margin < -GROUND_STATE_TOL:
                witnesses = [{"phase": "random", "trial": done + worst, "delta_action": margin}]
        done += count

    relaxed = np.array(block)
    sites = list(itertools.product(range(2, 2 * box + 1), repeat=u.dim))
    moved = set()
    for _ in range(MAX_RELAX_SWEEPS):
        gained = 0.0
        for site in sites:
            centre = block[site]
            current = _site_energy(model, relaxed, site, relaxed[site])
            found = optimize.minimize_scalar(
                lambda x: _site_energy(model, relaxed, site, x),
                bounds=(centre - amplitude, centre + amplitude),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if found.fun < current:
                gained += current - found.fun
                relaxed[site] = found.x
                moved.add(site)
        if gained < 1e-15:
            break
    relaxed_delta = float(_bond_energy(model, relaxed, batch=False) - e_block)
    if relaxed_delta < margin:
        margin = relaxed_delta
        if margin < -GROUND_STATE_TOL:
            witnesses = [{"phase": "coordinate_descent", "delta_action": margin, "sites_moved": len(moved)}]

    return CertificateReport(
        kind="ground_state",
        passed=margin >= -GROUND_STATE_TOL,
        witnesses=witnesses if margin < -GROUND_STATE_TOL else [],
        margin=margin,
        ranges={"box": box, "trials": trials, "amplitude": amplitude, "seed": seed},
    )


def discrete_el_certificate(model: Model, u: ConfigurationWindow, tol: float) -> CertificateReport:
    """Interior Euler-Lagrange residuals below tol"""
    residuals = interior_el_residuals(model, u)
    worst = float(np.max(np.abs(residuals))) if residuals.size else 0.0
    witnesses = []
    if worst > tol:
        idx = np.unravel_index(int(np.argmax(np.abs(residuals))), residuals.shape)
        witnesses.append({"i": [int(c) - (u.radius - 1) for c in idx], "residual": float(residuals[idx])})
    return CertificateReport(
        kind="discrete_el",
        passed=not witnesses,
        witnesses=witnesses,
        margin=worst,
        ranges={"radius": u.radius, "tol": tol},
    )
