"""
Pydantic schemas for options, reports, results and run configuration
"""
from pydantic import BaseModel, Field, model_validator
from typing import Any, Dict, List, Literal, Optional

# ============================================
# Shift Schemas
# ============================================

class ShiftSet(BaseModel):
    """Frequencies (or cocycle values) per term and their grid approximants m_j/N"""
    omega: List[float]
    grid_size: int = Field(gt=0)
    approximants: List[int]
    approx_error: float
    subperiod_warning: bool = False

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def grid_omega(self) -> List[float]:
        """The exactly representable frequencies m_j/N"""
        return [m / self.grid_size for m in self.approximants]

    class Config:
        frozen = True

# ============================================
# Model Validation Schemas
# ============================================

class ValidationReport(BaseModel):
    h1_defect: float
    twist_bound: float
    weak_twist_bound: float
    lower_bound_estimate: float
    lipschitz_M: float
    derivative_defect: float
    # sup over samples of sum_j |d11_j| + |d22_j|; bounds the diagonal of DX
    diagonal_bound: float
    samples_per_axis: int
    accepted: bool

# ============================================
# Hull Diagnostics Schemas
# ============================================

class GapItem(BaseModel):
    index: int
    size: float

class GapReport(BaseModel):
    gaps: List[GapItem]
    largest_gap: float
    excess_gap: float
    total_variation_in_jumps: float
    threshold: float

class ResidualField(BaseModel):
    N: int
    values: List[float]
    sup_norm: float
    l2_norm: float

# ============================================
# Solver Schemas
# ============================================

class SolveOptions(BaseModel):
    method: Literal["flow", "projected_descent", "lattice_descent"] = "flow"
    max_steps: int = Field(default=20000, ge=1)
    residual_tol: float = Field(default=1e-8, gt=0)
    dt_init: float = Field(default=0.1, gt=0)
    dt_max: float = Field(default=1.0, gt=0)
    reproject_every: int = Field(default=10, ge=0)
    seed: int = 0
    # flow time budget used by minimize
    time_horizon: float = Field(default=1e5, gt=0)
    # lattice descent: random monotone candidates added to h0, and the pool window
    n_candidates: int = Field(default=8, ge=0)
    pool_tol: float = Field(default=1e-9, ge=0)

class HistoryEntry(BaseModel):
    step: int
    time: float
    energy: float
    residual_sup: float

class MinimizerResult(BaseModel):
    hull: Any
    energy: float
    residual_sup: float
    steps_taken: int
    converged: bool
    history: List[HistoryEntry] = []
    time: float = 0.0
    # sup-norm of all monotone reprojection corrections (discretization diagnostic)
    reprojection_max: float = 0.0

    class Config:
        arbitrary_types_allowed = True

class SweepRecord(BaseModel):
    K: float
    energy: float
    residual_sup: float
    largest_gap: float
    excess_gap: float
    converged: bool
    steps_taken: int

# ============================================
# Critical Point Schemas
# ============================================

class MountainPassOptions(BaseModel):
    s_grid: int = Field(default=16, ge=2)
    T_flow: float = Field(default=200.0, gt=0)
    refine_rounds: int = Field(default=40, ge=0)
    tol: float = Field(default=1e-6, gt=0)
    barrier_tol: float = Field(default=1e-10, ge=0)
    # |dE/dt| below this counts as a stalled flow
    stall_rate: float = Field(default=1e-12, gt=0)

class ProfilePoint(BaseModel):
    s: float
    limiting_energy: float
    residual_sup: float

class CriticalPointResult(BaseModel):
    hull: Any
    energy: float
    residual_sup: float
    barrier: float
    s_star: float = Field(ge=0, le=1)
    strict_fraction: float = Field(ge=0, le=1)
    case: Literal["mountain_pass", "degenerate", "unresolved"]
    dichotomy: Optional[Literal["intermediate_critical_points", "basin_split", "oscillating", "undetermined"]] = None
    converged: bool
    profile: List[ProfilePoint] = []

    class Config:
        arbitrary_types_allowed = True

# ============================================
# Certificate Schemas
# ============================================

class CertificateReport(BaseModel):
    kind: Literal["birkhoff", "omega_birkhoff", "ground_state", "discrete_el"]
    passed: bool
    witnesses: List[Dict[str, Any]] = []
    margin: float = 0.0
    # the explicit ranges the certificate covers
    ranges: Dict[str, Any] = {}

    @model_validator(mode="after")
    def passed_iff_no_witness(self):
        if self.passed == bool(self.witnesses):
            raise ValueError("passed must hold exactly when no witness was found")
        return self

# ============================================
# Run Configuration Schemas
# ============================================

class RunConfig(BaseModel):
    """Merged config file + flags; unknown keys are rejected"""
    builtin: str = "standard_fk"
    K: float = Field(default=0.0, ge=0)
    dim: int = Field(default=1, ge=1)
    omega: List[float] = []
    N: Optional[int] = Field(default=None, ge=2)
    method: Literal["flow", "projected_descent", "lattice_descent"] = "flow"
    max_steps: int = Field(default=20000, ge=1)
    tol: float = Field(default=1e-8, gt=0)
    dt_init: float = Field(default=0.1, gt=0)
    reproject_every: int = Field(default=10, ge=0)
    seed: int = 0
    output_dir: Optional[str] = None
    # flow
    T: float = Field(default=50.0, gt=0)
    hull: Optional[str] = None
    # sweep
    K_grid: List[float] = []
    # critical
    hull_minus: Optional[str] = None
    hull_plus: Optional[str] = None
    shift_by_one: bool = False
    s_grid: int = Field(default=16, ge=2)
    T_flow: float = Field(default=200.0, gt=0)
    refine_rounds: int = Field(default=40, ge=0)
    critical_tol: float = Field(default=1e-6, gt=0)
    # verify
    configuration: Optional[str] = None
    omega_birkhoff: bool = False
    k_range: int = Field(default=2, ge=0)
    l_range: int = Field(default=2, ge=0)
    box: int = Field(default=3, ge=1)
    trials: int = Field(default=1000, ge=0)
    amplitude: float = Field(default=0.5, gt=0)
    el_tol: float = Field(default=1e-7, gt=0)

    class Config:
        extra = "forbid"

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            method=self.method,
            max_steps=self.max_steps,
            residual_tol=self.tol,
            dt_init=self.dt_init,
            reproject_every=self.reproject_every,
            seed=self.seed,
        )

    def mountain_pass_options(self) -> MountainPassOptions:
        return MountainPassOptions(
            s_grid=self.s_grid,
            T_flow=self.T_flow,
            refine_rounds=self.refine_rounds,
            tol=self.critical_tol,
        )

# ============================================
# Output Schemas
# ============================================

class SolveReport(BaseModel):
    energy: float
    residual_sup: float
    converged: bool
    N: int
    largest_gap: float
    steps_taken: int
    history_csv: str

class BarrierReport(BaseModel):
    barrier: float
    s_star: float
    residual_sup: float
    energy: float
    minimizer_energy: float
    strict_fraction: float
    case: str
    dichotomy: Optional[str] = None
    converged: bool
    profile_csv: str

class VerifyReport(BaseModel):
    passed: bool
    certificates: List[CertificateReport]
    el_residual_max: Optional[float] = None
