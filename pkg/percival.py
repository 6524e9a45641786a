"""
Discretized Percival Lagrangian

energy(h)   = (1/N) sum_k sum_j H_j(h_k, h_{k+m_j})
X(h)_k      = sum_j d1_j(h_k, h_{k+m_j}) + d2_j(h_{k-m_j}, h_k)

so X(h) = N * grad energy. The *_array helpers work on one period of
samples and are what the solvers iterate on; the public functions take
HullFunctions.
"""
from typing import Sequence

import numpy as np

from errors import GridMismatch
from hull import HullFunction, join, meet
from models import Model
from schemas import ResidualField, ShiftSet


def lifted(values: np.ndarray, shift: int) -> np.ndarray:
    """h_{k+shift} for k = 0..N-1 with the integer carry of wrapped indices"""
    N = len(values)
    q, r = np.divmod(np.arange(N) + shift, N)
    return values[r] + q


def _check_shifts(shifts: ShiftSet, h: HullFunction, model: Model = None) -> None:
    if h.N != shifts.grid_size:
        raise GridMismatch(f"Hull has N={h.N} but shifts were built for N={shifts.grid_size}")
    if model is not None and model.dim != shifts.dim:
        raise GridMismatch(f"Model has {model.dim} terms but {shifts.dim} shifts were given")


def energy_array(model: Model, approximants: Sequence[int], values: np.ndarray) -> float:
    total = np.zeros(len(values))
    for term, m in zip(model.terms, approximants):
        total = total + term.energy(values, lifted(values, m))
    # np.sum is pairwise on contiguous float arrays
    return float(np.sum(total) / len(values))


def residual_array(model: Model, approximants: Sequence[int], values: np.ndarray) -> np.ndarray:
    X = np.zeros(len(values))
    for term, m in zip(model.terms, approximants):
        X = X + term.d1(values, lifted(values, m)) + term.d2(lifted(values, -m), values)
    return X


def residual_jacobian(model: Model, approximants: Sequence[int], values: np.ndarray) -> np.ndarray:
    """dX_k/dh_l on one period; N times the Hessian of the energy, so symmetric"""
    N = len(values)
    k = np.arange(N)
    J = np.zeros((N, N))
    for term, m in zip(model.terms, approximants):
        up, down = lifted(values, m), lifted(values, -m)
        np.add.at(J, (k, k), term.d11(values, up) + term.d22(down, values))
        np.add.at(J, (k, (k + m) % N), term.d12(values, up))
        np.add.at(J, (k, (k - m) % N), term.d12(down, values))
    return J


def residual_field(X: np.ndarray) -> ResidualField:
    X = np.asarray(X, dtype=float)
    return ResidualField(
        N=len(X),
        values=X.tolist(),
        sup_norm=float(np.max(np.abs(X))),
        l2_norm=float(np.sqrt(np.mean(X ** 2))),
    )


def energy(model: Model, shifts: ShiftSet, h: HullFunction) -> float:
    """Percival energy per unit theta.

    Evaluated on the stored base samples: rotation and lift leave the value
    unchanged by the periodicity of H, so h + n and h o T_{p/N} give the
    same bits as h.
    """
    _check_shifts(shifts, h, model)
    return energy_array(model, shifts.approximants, h.base)


def el_residual(model: Model, shifts: ShiftSet, h: HullFunction) -> ResidualField:
    _check_shifts(shifts, h, model)
    X = residual_array(model, shifts.approximants, h.base)
    if h.rotation:
        X = X[(np.arange(h.N) + h.rotation) % h.N]
    return residual_field(X)


def submodularity_defect(model: Model, shifts: ShiftSet, h: HullFunction, g: HullFunction) -> float:
    """P(h meet g) + P(h join g) - P(h) - P(g); non-positive under the twist condition"""
    _check_shifts(shifts, h, model)
    _check_shifts(shifts, g, model)
    return (energy(model, shifts, meet(h, g)) + energy(model, shifts, join(h, g))
            - energy(model, shifts, h) - energy(model, shifts, g))
