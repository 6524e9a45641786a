"""
Acceptance runs on the 377/610 grid under pytest (slow: several minutes in total)

Usage:
    pytest test_acceptance.py
    python verify_acceptance.py     # same checks with a printed summary
"""
import sys

import pytest

import verify_acceptance as acceptance


def test_integrable_exactness():
    acceptance.check_integrable_exactness()


def test_euler_lagrange_criticality():
    acceptance.check_euler_lagrange()


def test_fundamental_inequality():
    acceptance.check_fundamental_inequality()


def test_strong_comparison():
    acceptance.check_strong_comparison()


def test_flow_equivariance():
    acceptance.check_flow_equivariance()


def test_ground_state_and_birkhoff_certification():
    acceptance.check_certification()


def test_pinning_transition():
    acceptance.check_pinning_transition()


def test_mountain_pass():
    acceptance.check_mountain_pass()


def test_hull_configuration_round_trip():
    acceptance.check_round_trip()


def test_lattice_descent():
    acceptance.check_lattice_descent()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
