"""
Tests for the discretized Percival Lagrangian and its gradient

Usage:
    pytest test_percival.py
    python test_percival.py
"""
import sys

import numpy as np
import pytest

from errors import GridMismatch
from hull import from_values, identity_hull, random_monotone, shift_integer, translate
from models import make_shiftset, standard_fk, validate_model
from percival import el_residual, energy, residual_array, residual_jacobian, submodularity_defect
from conftest import GOLDEN


def test_energy_of_identity_without_potential():
    shifts = make_shiftset([0.5], 10)
    assert energy(standard_fk(0.0), shifts, identity_hull(10)) == pytest.approx(0.125, abs=1e-15)


def test_energy_of_identity_with_potential():
    # the cosine averages out over a full grid period
    shifts = make_shiftset([0.3], 10)
    expected = 0.3 ** 2 / 2 + 1.0 / (4 * np.pi ** 2)
    assert energy(standard_fk(1.0), shifts, identity_hull(10)) == pytest.approx(expected, abs=1e-12)


def test_energy_two_dimensional():
    shifts = make_shiftset([0.3, 0.7], 10)
    assert energy(standard_fk(0.0, dim=2), shifts, identity_hull(10)) == pytest.approx(0.29, abs=1e-12)


def test_energy_grid_mismatch():
    with pytest.raises(GridMismatch):
        energy(standard_fk(0.0), make_shiftset([0.5], 10), identity_hull(12))
    with pytest.raises(GridMismatch):
        energy(standard_fk(0.0, dim=2), make_shiftset([0.5], 10), identity_hull(10))


def test_energy_symmetries_are_exact(rng):
    model = standard_fk(1.0)
    shifts = make_shiftset([GOLDEN], 34)
    h = random_monotone(34, rng)
    E = energy(model, shifts, h)
    assert energy(model, shifts, shift_integer(h, 1)) == E
    assert energy(model, shifts, shift_integer(h, -3)) == E
    assert energy(model, shifts, translate(h, 5)) == E


def test_residual_vanishes_on_affine_hulls():
    shifts = make_shiftset([0.3], 10)
    field = el_residual(standard_fk(0.0), shifts, identity_hull(10))
    assert field.sup_norm == pytest.approx(0.0, abs=1e-12)
    assert field.N == 10


def test_residual_of_identity_is_the_substrate_force():
    N, K = 10, 1.0
    shifts = make_shiftset([0.3], N)
    field = el_residual(standard_fk(K), shifts, identity_hull(N))
    expected = K / (2 * np.pi) * np.sin(2 * np.pi * np.arange(N) / N)
    np.testing.assert_allclose(field.values, expected, atol=1e-12)


def test_residual_is_the_scaled_energy_gradient(rng):
    N, eps = 20, 1e-6
    model = standard_fk(1.0)
    shifts = make_shiftset([0.35], N)
    for _ in range(100):
        values = random_monotone(N, rng).values
        k = int(rng.integers(N))
        bump = np.zeros(N)
        bump[k] = eps
        fd = N * (energy(model, shifts, from_values(values + bump))
                  - energy(model, shifts, from_values(values - bump))) / (2 * eps)
        X = residual_array(model, shifts.approximants, values)[k]
        assert abs(X - fd) <= 1e-6 * max(1.0, abs(X))


def test_residual_follows_translation(rng):
    model = standard_fk(1.5)
    shifts = make_shiftset([GOLDEN], 34)
    h = random_monotone(34, rng)
    X = np.array(el_residual(model, shifts, h).values)
    shifted = np.array(el_residual(model, shifts, translate(h, 7)).values)
    np.testing.assert_array_equal(shifted, X[(np.arange(34) + 7) % 34])


def test_submodularity_on_random_pairs(rng):
    model = standard_fk(1.0)
    shifts = make_shiftset([GOLDEN], 55)
    for _ in range(1000):
        h, g = random_monotone(55, rng), random_monotone(55, rng)
        assert submodularity_defect(model, shifts, h, g) <= 1e-12


def test_submodularity_trivial_pairs(rng):
    model = standard_fk(1.0)
    shifts = make_shiftset([GOLDEN], 55)
    h = random_monotone(55, rng)
    assert submodularity_defect(model, shifts, h, h) == 0.0
    assert submodularity_defect(model, shifts, h, shift_integer(h, 1)) == pytest.approx(0.0, abs=1e-12)


def test_energy_is_lipschitz_in_the_mean_distance(rng):
    model = standard_fk(1.0)
    N = 34
    shifts = make_shiftset([GOLDEN], N)
    M = validate_model(model).lipschitz_M
    for _ in range(100):
        h, g = random_monotone(N, rng), random_monotone(N, rng)
        gap = np.mean(np.abs(h.values - g.values))
        assert abs(energy(model, shifts, h) - energy(model, shifts, g)) <= 2 * M * gap + 1e-12


def test_residual_jacobian_matches_finite_differences(rng):
    model = standard_fk(1.5)
    shifts = make_shiftset([GOLDEN], 13)
    m = shifts.approximants
    values = random_monotone(13, rng).values
    J = residual_jacobian(model, m, values)
    step = 1e-6
    numeric = np.empty_like(J)
    for j in range(13):
        e = np.zeros(13)
        e[j] = step
        numeric[:, j] = (residual_array(model, m, values + e) - residual_array(model, m, values - e)) / (2 * step)
    np.testing.assert_allclose(J, numeric, rtol=0, atol=1e-7)
    np.testing.assert_allclose(J, J.T, rtol=0, atol=1e-14)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
