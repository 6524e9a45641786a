"""
Tests for strict ordering and the mountain-pass critical point

Usage:
    pytest test_critical.py
    python test_critical.py
"""
import sys

import numpy as np
import pytest

from critical import check_strict_order, mountain_pass, strict_fraction
from errors import DegeneratePair, GridMismatch, NotComparable
from hull import from_values, identity_hull, shift_integer
from models import make_shiftset, standard_fk
from percival import energy
from schemas import MountainPassOptions, SolveOptions
from solvers import minimize


def test_strict_fraction_counts_interior_points():
    lower = np.array([0.0, 0.0, 0.0, 0.0])
    upper = np.ones(4)
    middle = np.array([0.0, 0.5, 0.5, 1.0])
    assert strict_fraction(lower, middle, upper) == 0.5


def test_order_of_a_hull_and_its_shift():
    shifts = make_shiftset([0.3], 10)
    h = identity_hull(10)
    ordered, fraction = check_strict_order(standard_fk(0.0), shifts, h, shift_integer(h, 1), 1.0)
    assert ordered
    assert fraction == 1.0


def test_equal_hulls_are_ordered_but_not_strictly():
    shifts = make_shiftset([0.3], 10)
    h = identity_hull(10)
    ordered, fraction = check_strict_order(standard_fk(0.0), shifts, h, h, 1.0)
    assert ordered
    assert fraction == 0.0


def test_unordered_pair_is_not_comparable():
    shifts = make_shiftset([0.3], 10)
    h = identity_hull(10)
    with pytest.raises(NotComparable) as exc:
        check_strict_order(standard_fk(0.0), shifts, from_values(h.values + 0.5), h, 1.0)
    assert exc.value.exit_code == 5


def test_order_needs_one_grid():
    with pytest.raises(GridMismatch):
        check_strict_order(standard_fk(0.0), make_shiftset([0.3], 10), identity_hull(10), identity_hull(12), 1.0)


def test_pinned_minimizer_and_its_shift_are_strictly_ordered(pinned_minimizer_89, golden_89):
    h = pinned_minimizer_89.hull
    ordered, fraction = check_strict_order(standard_fk(2.0), golden_89, h, shift_integer(h, 1), 10.0)
    assert ordered
    assert fraction == 1.0


# ============================================
# Mountain pass
# ============================================

def test_integrable_case_is_degenerate():
    shifts = make_shiftset([0.3], 10)
    h = identity_hull(10)
    result = mountain_pass(standard_fk(0.0), shifts, h, shift_integer(h, 1), MountainPassOptions(s_grid=5))
    assert result.case == "degenerate"
    assert result.barrier == pytest.approx(0.0, abs=1e-10)
    assert result.dichotomy == "intermediate_critical_points"


def test_mountain_pass_in_the_pinned_phase(pinned_minimizer_89, golden_89):
    model = standard_fk(2.0)
    h_minus = pinned_minimizer_89.hull
    h_plus = shift_integer(h_minus, 1)
    result = mountain_pass(model, golden_89, h_minus, h_plus)
    e_minus = energy(model, golden_89, h_minus)

    assert result.case == "mountain_pass"
    assert result.converged
    assert result.residual_sup <= MountainPassOptions().tol
    assert result.barrier > 0
    assert result.energy > e_minus + 1e-6
    assert 0.0 < result.s_star < 1.0
    assert result.strict_fraction >= 0.99
    values = result.hull.values
    assert np.all(values >= h_minus.values - 1e-12)
    assert np.all(values <= h_plus.values + 1e-12)

    profile = result.profile
    assert [p.s for p in profile] == sorted(p.s for p in profile)
    peak = max(profile, key=lambda p: p.limiting_energy)
    assert profile[0].s < peak.s < profile[-1].s
    assert peak.limiting_energy > profile[0].limiting_energy


def test_unconverged_critical_point_is_not_reported_as_a_mountain_pass(pinned_minimizer_89, golden_89):
    h_minus = pinned_minimizer_89.hull
    opts = MountainPassOptions(s_grid=6, refine_rounds=30, T_flow=50.0, tol=1e-30)
    result = mountain_pass(standard_fk(2.0), golden_89, h_minus, shift_integer(h_minus, 1), opts)
    assert result.residual_sup > opts.tol
    assert result.case == "unresolved"
    assert not result.converged
    assert result.barrier > 0


def test_mountain_pass_needs_strict_order():
    shifts = make_shiftset([0.3], 10)
    h = identity_hull(10)
    with pytest.raises(NotComparable):
        mountain_pass(standard_fk(0.0), shifts, h, h)
    with pytest.raises(NotComparable):
        mountain_pass(standard_fk(0.0), shifts, shift_integer(h, 1), h)


def test_mountain_pass_needs_equal_energies():
    model = standard_fk(1.0)
    shifts = make_shiftset([0.3], 10)
    solved = minimize(model, shifts, None, SolveOptions())
    with pytest.raises(DegeneratePair):
        mountain_pass(model, shifts, identity_hull(10), shift_integer(solved.hull, 1))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
