"""
Hull functions on a periodic grid

A hull function h is sampled at theta = k/N, k = 0..N-1, and extended by the
lift rule h(theta + 1) = h(theta) + 1. Between grid points it is the
left-continuous step function, so eval(h, theta) = h(ceil(theta N) / N).

The stored form is symmetry-reduced: one period of base samples plus an
integer rotation p and integer lift n, meaning

    h_k = base_lifted(k + p) + n,   base_lifted(j) = base[j mod N] + floor(j / N)

so h + n and h o T_{p/N} never touch the floating point samples.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from errors import GridMismatch, NotMonotone
from schemas import GapItem, GapReport

# Two grid indices closer than this (in units of 1/N) are the same point
GRID_SNAP = 1e-9
# normalize treats h_k <= NORMALIZE_TOL as "not above zero"
NORMALIZE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HullFunction:
    base: np.ndarray
    monotone_flag: bool
    rotation: int = 0
    lift: int = 0

    def __post_init__(self):
        base = np.array(self.base, dtype=float)
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        N = len(base)
        if N < 1:
            raise ValueError("A hull function needs at least one sample")
        # keep 0 <= rotation < N; the carry goes into the lift
        q, r = divmod(int(self.rotation), N)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "lift", int(self.lift) + q)

    @property
    def N(self) -> int:
        return len(self.base)

    @property
    def values(self) -> np.ndarray:
        """Samples h_0..h_{N-1}"""
        if self.rotation == 0 and self.lift == 0:
            return self.base
        return self.at(np.arange(self.N))

    def at(self, index) -> np.ndarray:
        """Lifted samples h_j for arbitrary integer indices j"""
        j = np.asarray(index) + self.rotation
        q, r = np.divmod(j, self.N)
        return self.base[r] + (q + self.lift)

    def __repr__(self) -> str:
        return (f"HullFunction(N={self.N}, monotone={self.monotone_flag}, "
                f"rotation={self.rotation}, lift={self.lift})")


# ============================================
# Construction
# ============================================

def is_monotone(values: np.ndarray) -> bool:
    """Y membership on the grid, including the wrap values[N-1] <= values[0] + 1"""
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) >= 0) and values[-1] <= values[0] + 1.0)


def from_values(values, monotone_flag: Optional[bool] = None) -> HullFunction:
    values = np.asarray(values, dtype=float)
    if monotone_flag is None:
        monotone_flag = is_monotone(values)
    return HullFunction(base=values, monotone_flag=monotone_flag)


def identity_hull(N: int) -> HullFunction:
    return HullFunction(base=np.arange(N) / N, monotone_flag=True)


def random_monotone(N: int, rng: np.random.Generator, spread: float = 1.0) -> HullFunction:
    """Random element of Y: sorted uniform samples on [0, spread) plus a random offset"""
    spread = min(max(spread, 0.0), 1.0)
    values = np.sort(rng.uniform(0.0, spread, size=N)) + rng.uniform(-0.5, 0.5)
    return HullFunction(base=values, monotone_flag=True)


def with_base(h: HullFunction, base: np.ndarray, monotone_flag: Optional[bool] = None) -> HullFunction:
    """Same rotation and lift as h, new base samples"""
    if monotone_flag is None:
        monotone_flag = is_monotone(base)
    return HullFunction(base=base, monotone_flag=monotone_flag, rotation=h.rotation, lift=h.lift)


def shift_integer(h: HullFunction, n: int) -> HullFunction:
    """h + n (symmetry (a))"""
    return HullFunction(base=h.base, monotone_flag=h.monotone_flag, rotation=h.rotation, lift=h.lift + n)


def translate(h: HullFunction, p: int) -> HullFunction:
    """h o T_{p/N}, i.e. theta -> h(theta + p/N) (symmetry (b) on the grid)"""
    return HullFunction(base=h.base, monotone_flag=h.monotone_flag, rotation=h.rotation + p, lift=h.lift)


def identical(h: HullFunction, g: HullFunction) -> bool:
    """Bitwise equality of the stored form"""
    return (h.N == g.N and h.rotation == g.rotation and h.lift == g.lift
            and np.array_equal(h.base, g.base))


def _check_grid(h: HullFunction, g: HullFunction) -> None:
    if h.N != g.N:
        raise GridMismatch(f"Grid sizes differ: {h.N} vs {g.N}")


def _check_monotone(h: HullFunction, operation: str) -> None:
    if not h.monotone_flag:
        raise NotMonotone(f"{operation} needs a monotone hull function")


# ============================================
# Evaluation
# ============================================

def grid_index(theta, N: int):
    """ceil(theta N) with grid points snapped, the left-continuous sample index"""
    x = np.asarray(theta, dtype=float) * N
    nearest = np.rint(x)
    snapped = np.abs(x - nearest) <= GRID_SNAP * np.maximum(1.0, np.abs(x))
    return np.where(snapped, nearest, np.ceil(x)).astype(np.int64)


def evaluate(h: HullFunction, theta):
    """h(theta) for scalar or array theta"""
    result = h.at(grid_index(theta, h.N))
    if np.ndim(result) == 0:
        return float(result)
    return result


# ============================================
# Lattice operations
# ============================================

def meet(h: HullFunction, g: HullFunction) -> HullFunction:
    _check_grid(h, g)
    return HullFunction(base=np.minimum(h.values, g.values), monotone_flag=h.monotone_flag and g.monotone_flag)


def join(h: HullFunction, g: HullFunction) -> HullFunction:
    _check_grid(h, g)
    return HullFunction(base=np.maximum(h.values, g.values), monotone_flag=h.monotone_flag and g.monotone_flag)


# ============================================
# Graph distance
# ============================================

def _graph_points(h: HullFunction, densify: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points along the polygonal graph over one period"""
    v = h.values
    nxt = np.append(v[1:], v[0] + 1.0)
    t = np.arange(densify) / densify
    theta = (np.arange(h.N)[:, None] + t[None, :]) / h.N
    y = v[:, None] + t[None, :] * (nxt - v)[:, None]
    return theta.ravel(), y.ravel()


def _directed_distance(a: Tuple[np.ndarray, np.ndarray], b: Tuple[np.ndarray, np.ndarray]) -> float:
    a_theta, a_y = a
    b_theta, b_y = b
    chunk = max(1, 4_000_000 // len(b_theta))
    worst = 0.0
    for start in range(0, len(a_theta), chunk):
        dt = a_theta[start:start + chunk, None] - b_theta[None, :]
        dy = a_y[start:start + chunk, None] - b_y[None, :]
        # graphs live on the quotient (theta, y) ~ (theta + 1, y + 1); the best
        # representative shift is the integer nearest the parabola's vertex
        n = np.rint(-(dt + dy) / 2.0)
        d = np.hypot(dt + n, dy + n)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


def graph_distance(h: HullFunction, g: HullFunction, densify: int = 2) -> float:
    """Hausdorff distance between the closed graphs, jumps filled by segments"""
    _check_grid(h, g)
    _check_monotone(h, "graph_distance")
    _check_monotone(g, "graph_distance")
    a = _graph_points(h, densify)
    b = _graph_points(g, densify)
    return max(_directed_distance(a, b), _directed_distance(b, a))


# ============================================
# Monotone envelope and projection
# ============================================

def monotone_envelope(h: HullFunction) -> HullFunction:
    """h~(k/N) = min of h over the next period [k/N, k/N + 1)"""
    v = h.values
    lifted = np.concatenate([v, v + 1.0])
    # samples beyond the window exceed their in-window counterparts by 1,
    # so the plain suffix minimum equals the windowed minimum
    suffix_min = np.minimum.accumulate(lifted[::-1])[::-1]
    return HullFunction(base=suffix_min[:h.N], monotone_flag=True)


def _pool_adjacent_violators(sequence: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit; monotone input comes back unchanged"""
    sums: List[float] = []
    counts: List[int] = []
    for value in sequence:
        s, c = float(value), 1
        # merge out of order blocks
        while sums and sums[-1] / counts[-1] > s / c:
            s += sums.pop()
            c += counts.pop()
        sums.append(s)
        counts.append(c)
    means = [s / c for s, c in zip(sums, counts)]
    return np.repeat(means, counts)


def project_monotone_array(values: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x_0 <= ... <= x_{N-1} <= x_0 + 1}.

    Some cyclic constraint is slack at the optimum (the increments over a
    period add up to 1), so the answer is the path fit of the lifted window
    that starts right after a slack constraint.
    """
    values = np.asarray(values, dtype=float)
    N = len(values)
    fit = _pool_adjacent_violators(values)
    if fit[-1] <= fit[0] + 1.0:
        return fit

    lifted = np.concatenate([values, values + 1.0])
    gaps = lifted[1:N] - lifted[:N - 1]
    # try window starts after the widest gaps first
    for start in np.argsort(-gaps, kind="stable") + 1:
        window = _pool_adjacent_violators(lifted[start:start + N])
        if window[-1] <= window[0] + 1.0 + 1e-12:
            positions = np.arange(start, start + N)
            out = np.empty(N)
            out[positions % N] = window - (positions >= N)
            # undo the rounding of the -1 carry so the result is in Y exactly
            out = np.maximum.accumulate(out)
            return np.minimum(out, out[0] + 1.0)
    return np.full(N, float(np.mean(values)))


def project_monotone(h: HullFunction) -> HullFunction:
    return HullFunction(base=project_monotone_array(h.values), monotone_flag=True)


# ============================================
# Normalization and gaps
# ============================================

def normalization_shift(h: HullFunction) -> int:
    """Largest lifted index p with h_p <= 0; h o T_{p/N} is then normalized"""
    v = h.values
    r = np.arange(h.N)
    q = np.floor(NORMALIZE_TOL - v).astype(np.int64)
    return int(np.max(r + h.N * q))


def normalize(h: HullFunction) -> HullFunction:
    """Move h into the slab h(theta) <= 0 for theta <= 0 < h(theta) at grid resolution.

    Only the integer rotation and lift change, so the energy is untouched.
    """
    _check_monotone(h, "normalize")
    return translate(h, normalization_shift(h))


def detect_gaps(h: HullFunction, threshold: float) -> GapReport:
    _check_monotone(h, "detect_gaps")
    v = h.values
    diffs = np.append(np.diff(v), v[0] + 1.0 - v[-1])
    over = np.nonzero(diffs > threshold)[0]
    order = over[np.argsort(-diffs[over], kind="stable")]
    gaps = [GapItem(index=int(k), size=float(diffs[k])) for k in order]
    largest = float(diffs.max())
    return GapReport(
        gaps=gaps,
        largest_gap=largest,
        excess_gap=largest - 1.0 / h.N,
        total_variation_in_jumps=float(sum(g.size for g in gaps)),
        threshold=threshold,
    )
