"""
Interaction models for Mather Hull

A model is an ordered family of two-site energies H_j(u, v), one per shift
label j. Energies and derivatives are numpy-vectorized callables.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from errors import ConfigError, DegenerateShift, DerivativeMismatch, PeriodicityViolation, TwistViolation
from schemas import ShiftSet, ValidationReport
from utils import log

Pair = Callable[[np.ndarray, np.ndarray], np.ndarray]

PERIODICITY_TOL = 1e-9
DERIVATIVE_TOL = 1e-6
FD_STEP = 1e-5


@dataclass(frozen=True)
class InteractionTerm:
    """One two-site energy H(u, v) with its first and second partials"""
    energy: Pair
    d1: Pair
    d2: Pair
    d11: Pair
    d12: Pair
    d22: Pair
    label: str = "H"


@dataclass(frozen=True)
class Model:
    terms: List[InteractionTerm]
    name: str = "model"
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.terms) < 1:
            raise ConfigError("A model needs at least one interaction term")

    @property
    def dim(self) -> int:
        return len(self.terms)


# ============================================
# Built-in models
# ============================================

def _standard_term(K: float, label: str) -> InteractionTerm:
    two_pi = 2.0 * math.pi
    pot = K / (4.0 * math.pi ** 2)
    force = K / two_pi

    def energy(u, v):
        return 0.5 * (v - u) ** 2 + pot * (1.0 - np.cos(two_pi * u))

    def d1(u, v):
        return -(v - u) + force * np.sin(two_pi * u)

    def d2(u, v):
        return v - u

    def d11(u, v):
        return 1.0 + K * np.cos(two_pi * u) + 0.0 * v

    def d12(u, v):
        return np.full(np.broadcast(u, v).shape, -1.0)

    def d22(u, v):
        return np.ones(np.broadcast(u, v).shape)

    return InteractionTerm(energy=energy, d1=d1, d2=d2, d11=d11, d12=d12, d22=d22, label=label)


def standard_fk(K: float, dim: int = 1) -> Model:
    """Standard Frenkel-Kontorova chain H(u,v) = (v-u)^2/2 + K/(4 pi^2) (1 - cos 2 pi u).

    With dim > 1 the substrate potential is split evenly over the dim terms,
    so the d-dimensional model at K=0 is a sum of independent quadratic chains.
    """
    if K < 0:
        raise ConfigError(f"K must be non-negative, got {K}")
    if dim < 1:
        raise ConfigError(f"dim must be at least 1, got {dim}")
    terms = [_standard_term(K / dim, f"standard_fk[{j}]") for j in range(dim)]
    return Model(terms=terms, name="standard_fk", params={"K": float(K), "dim": dim})


BUILTINS = {"standard_fk": standard_fk}


def load_model_spec(spec: Dict) -> Model:
    """Build a model from {"builtin": "standard_fk", "K": 1.0, "dim": 1}"""
    if "terms" in spec:
        raise ConfigError("Custom term expressions are not supported; use a builtin model")
    name = spec.get("builtin")
    if name not in BUILTINS:
        raise ConfigError(f"Unknown builtin model: {name!r} (known: {sorted(BUILTINS)})")
    unknown = set(spec) - {"builtin", "K", "dim"}
    if unknown:
        raise ConfigError(f"Unknown model keys: {sorted(unknown)}")
    return BUILTINS[name](float(spec.get("K", 0.0)), int(spec.get("dim", 1)))


# ============================================
# Validation
# ============================================

def _sample_grid(samples_per_axis: int):
    # periodicity reduces u to one period; v covers the band |v - u| <= 2
    u = np.arange(samples_per_axis) / samples_per_axis
    t = np.linspace(-2.0, 2.0, 2 * samples_per_axis + 1)
    U, T = np.meshgrid(u, t, indexing="ij")
    return U, U + T


def _derivative_defect(term: InteractionTerm, U: np.ndarray, V: np.ndarray) -> float:
    h = FD_STEP
    fd1 = (term.energy(U + h, V) - term.energy(U - h, V)) / (2 * h)
    fd2 = (term.energy(U, V + h) - term.energy(U, V - h)) / (2 * h)
    fd12 = (term.d1(U, V + h) - term.d1(U, V - h)) / (2 * h)
    defects = [
        np.abs(fd1 - term.d1(U, V)) / np.maximum(1.0, np.abs(fd1)),
        np.abs(fd2 - term.d2(U, V)) / np.maximum(1.0, np.abs(fd2)),
        np.abs(fd12 - term.d12(U, V)) / np.maximum(1.0, np.abs(fd12)),
    ]
    return float(max(d.max() for d in defects))


def validate_model(model: Model, samples_per_axis: int = 64, weak: bool = False) -> ValidationReport:
    """Check (H1) periodicity, (H2) twist and (H3) lower bound by dense sampling.

    With weak=True the summed cross derivative sum_j d12_j is required to be
    negative instead of every d12_j (weak twist for terms sharing a site).
    """
    if samples_per_axis < 16:
        raise ConfigError(f"samples_per_axis must be at least 16, got {samples_per_axis}")
    U, V = _sample_grid(samples_per_axis)

    h1_defect = 0.0
    twist_bound = -math.inf
    lower_bound = math.inf
    lipschitz = 1.0
    derivative_defect = 0.0
    diagonal_bound = 0.0
    d12_sum = np.zeros_like(U)
    for term in model.terms:
        E = term.energy(U, V)
        h1_defect = max(h1_defect, float(np.max(np.abs(term.energy(U + 1.0, V + 1.0) - E))))
        d12 = term.d12(U, V)
        d12_sum = d12_sum + d12
        twist_bound = max(twist_bound, float(np.max(d12)))
        lower_bound = min(lower_bound, float(np.min(E)))
        lipschitz = max(lipschitz, float(np.max(np.abs(term.d1(U, V)))), float(np.max(np.abs(term.d2(U, V)))))
        derivative_defect = max(derivative_defect, _derivative_defect(term, U, V))
        diagonal_bound += float(np.max(np.abs(term.d11(U, V)))) + float(np.max(np.abs(term.d22(U, V))))
    weak_twist_bound = float(np.max(d12_sum))

    accepted = twist_bound < 0 or (weak and weak_twist_bound < 0)
    if not accepted:
        bound = weak_twist_bound if weak else twist_bound
        raise TwistViolation(f"Model {model.name}: cross derivative reaches {bound:.6g} >= 0")
    if h1_defect > PERIODICITY_TOL:
        raise PeriodicityViolation(f"Model {model.name}: H(u+1,v+1) != H(u,v), defect {h1_defect:.3e}")
    if derivative_defect > DERIVATIVE_TOL:
        raise DerivativeMismatch(
            f"Model {model.name}: supplied derivatives disagree with finite differences ({derivative_defect:.3e})"
        )

    log(f"Model {model.name} accepted: twist {twist_bound:.6g}, M {lipschitz:.6g}", "DEBUG")
    return ValidationReport(
        h1_defect=h1_defect,
        twist_bound=twist_bound,
        weak_twist_bound=weak_twist_bound,
        lower_bound_estimate=lower_bound,
        lipschitz_M=lipschitz,
        derivative_defect=derivative_defect,
        diagonal_bound=diagonal_bound,
        samples_per_axis=samples_per_axis,
        accepted=accepted,
    )


# ============================================
# Shifts
# ============================================

def make_shiftset(omega: List[float], N: int, dim: Optional[int] = None) -> ShiftSet:
    """Approximate each omega_j by m_j/N with m_j = round(omega_j N)"""
    if N < 2:
        raise ConfigError(f"Grid size N must be at least 2, got {N}")
    if not omega:
        raise ConfigError("omega must have at least one component")
    if dim is not None and len(omega) != dim:
        raise ConfigError(f"omega has {len(omega)} components but the model has {dim} terms")

    approximants = [int(math.floor(w * N + 0.5)) for w in omega]
    for w, m in zip(omega, approximants):
        if m % N == 0:
            raise DegenerateShift(f"omega={w} lands on a whole period at N={N} (m={m}); the term is constant")
    approx_error = max(abs(w - m / N) for w, m in zip(omega, approximants))

    subperiod = len(omega) == 1 and math.gcd(approximants[0], N) > 1
    if subperiod:
        log(f"m={approximants[0]} and N={N} share the factor {math.gcd(approximants[0], N)}; "
            "the grid splits into independent sub-orbits", "WARNING")
    return ShiftSet(
        omega=[float(w) for w in omega],
        grid_size=N,
        approximants=approximants,
        approx_error=approx_error,
        subperiod_warning=subperiod,
    )
