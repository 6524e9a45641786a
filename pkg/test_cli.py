"""
End-to-end tests for the command line

Usage:
    pytest test_cli.py
    python test_cli.py
"""
import json
import sys

import numpy as np
import pandas as pd
import pytest

from errors import TwistViolation
from main import main
from conftest import GOLDEN


def _read(path):
    with open(path) as f:
        return json.load(f)


def _window_csv(path, values, radius):
    pd.DataFrame({"i_1": np.arange(-radius, radius + 1), "u": values}).to_csv(path, index=False)
    return str(path)


# ============================================
# solve / flow / sweep
# ============================================

def test_solve_integrable_case(tmp_path):
    code = main(["solve", "--K", "0", "--omega", "0.5", "--N", "10", "--out", str(tmp_path)])
    assert code == 0
    result = _read(tmp_path / "result.json")
    assert result["energy"] == pytest.approx(0.125, abs=1e-12)
    assert result["converged"]
    for name in ("hull.csv", "residual.csv", "history.csv", "metadata.json"):
        assert (tmp_path / name).exists()


def test_solve_is_deterministic(tmp_path):
    args = ["solve", "--K", "1", "--omega", str(GOLDEN), "--N", "34", "--out", str(tmp_path)]
    assert main(args) == 0
    first = (tmp_path / "result.json").read_bytes()
    assert main(args) == 0
    assert (tmp_path / "result.json").read_bytes() == first


def test_solve_out_of_steps(tmp_path):
    code = main(["solve", "--K", "0.5", "--omega", str(GOLDEN), "--N", "89", "--max-steps", "1",
                 "--out", str(tmp_path)])
    assert code == 2
    assert not _read(tmp_path / "result.json")["converged"]


def test_solve_from_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"model": {"builtin": "standard_fk", "K": 0.0}, "omega": [0.5], "N": 10}))
    assert main(["solve", "--config", str(config), "--out", str(tmp_path / "out")]) == 0


def test_flags_override_the_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"K": 5.0, "omega": [0.5], "N": 10}))
    assert main(["solve", "--config", str(config), "--K", "0", "--out", str(tmp_path / "out")]) == 0
    assert _read(tmp_path / "out" / "result.json")["energy"] == pytest.approx(0.125, abs=1e-12)


def test_flow_command(tmp_path):
    code = main(["flow", "--K", "0", "--omega", "0.3", "--N", "10", "--T", "5", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "hull.csv").exists()


def test_flow_command_reports_a_flow_still_moving(tmp_path):
    code = main(["flow", "--K", "1", "--omega", "0.3", "--N", "10", "--T", "0.5", "--out", str(tmp_path)])
    assert code == 2
    assert _read(tmp_path / "metadata.json")["exit_code"] == 2
    assert (tmp_path / "hull.csv").exists()


def test_sweep_single_point(tmp_path):
    code = main(["sweep", "--K-grid", "0", "--omega", "0.5", "--N", "10", "--out", str(tmp_path)])
    assert code == 0
    records = _read(tmp_path / "result.json")["records"]
    assert len(records) == 1
    assert records[0]["largest_gap"] == pytest.approx(0.1)
    assert (tmp_path / "sweep.csv").exists()


def test_sweep_without_grid(tmp_path):
    assert main(["sweep", "--omega", "0.5", "--N", "10", "--out", str(tmp_path)]) == 1


# ============================================
# Configuration errors
# ============================================

@pytest.mark.parametrize("content", ["{oops", json.dumps({"colour": "blue"}), json.dumps({"model": {"terms": []}})])
def test_bad_config_file(tmp_path, content):
    config = tmp_path / "run.json"
    config.write_text(content)
    assert main(["solve", "--config", str(config), "--omega", "0.5", "--N", "10", "--out", str(tmp_path)]) == 1


@pytest.mark.parametrize("args", [
    ["solve", "--omega", "0.5"],
    ["solve", "--N", "10"],
    ["solve", "--omega", "x", "--N", "10"],
    ["solve", "--omega", "1.0", "--N", "10"],
    ["solve", "--omega", "0.5", "--N", "10", "--K", "-1"],
    ["unknown"],
])
def test_usage_errors_exit_one(tmp_path, args):
    assert main(args + ["--out", str(tmp_path)]) == 1


def test_model_validation_failure_exits_three(tmp_path, monkeypatch):
    def reject(*args, **kwargs):
        raise TwistViolation("cross derivative is positive")

    monkeypatch.setattr("commands.common.validate_model", reject)
    assert main(["solve", "--omega", "0.5", "--N", "10", "--out", str(tmp_path)]) == 3


# ============================================
# critical
# ============================================

def test_critical_integrable_case_is_degenerate(tmp_path):
    code = main(["critical", "--K", "0", "--omega", "0.3", "--N", "10", "--shift-by-one", "--s-grid", "5",
                 "--out", str(tmp_path)])
    assert code == 4
    report = _read(tmp_path / "barrier.json")
    assert report["case"] == "degenerate"
    assert (tmp_path / "profile.csv").exists()


def test_critical_unordered_pair(tmp_path):
    theta = np.arange(10) / 10
    pd.DataFrame({"theta": theta, "h": theta + 0.5}).to_csv(tmp_path / "minus.csv", index=False)
    pd.DataFrame({"theta": theta, "h": theta}).to_csv(tmp_path / "plus.csv", index=False)
    code = main(["critical", "--K", "0", "--omega", "0.3", "--N", "10",
                 "--hull-minus", str(tmp_path / "minus.csv"), "--hull-plus", str(tmp_path / "plus.csv"),
                 "--out", str(tmp_path / "out")])
    assert code == 5


def test_critical_needs_an_upper_hull(tmp_path):
    assert main(["critical", "--K", "0", "--omega", "0.3", "--N", "10", "--out", str(tmp_path)]) == 1


# ============================================
# verify
# ============================================

def test_verify_affine_window(tmp_path):
    path = _window_csv(tmp_path / "u.csv", 0.5 * np.arange(-8, 9), 8)
    code = main(["verify", "--configuration", path, "--omega", "0.5", "--omega-birkhoff", "--trials", "200",
                 "--out", str(tmp_path / "out")])
    assert code == 0
    report = _read(tmp_path / "out" / "certificates.json")
    assert report["passed"]
    assert [c["kind"] for c in report["certificates"]] == ["birkhoff", "omega_birkhoff", "discrete_el", "ground_state"]


def test_verify_displaced_site(tmp_path):
    values = 0.5 * np.arange(-8, 9)
    values[8] = 0.3
    path = _window_csv(tmp_path / "u.csv", values, 8)
    code = main(["verify", "--configuration", path, "--trials", "200", "--out", str(tmp_path / "out")])
    assert code == 6
    report = _read(tmp_path / "out" / "certificates.json")
    assert not report["passed"]
    failed = [c for c in report["certificates"] if not c["passed"]]
    assert all(c["witnesses"] for c in failed)


def test_verify_omega_birkhoff_needs_omega(tmp_path):
    path = _window_csv(tmp_path / "u.csv", 0.5 * np.arange(-8, 9), 8)
    assert main(["verify", "--configuration", path, "--omega-birkhoff", "--out", str(tmp_path / "out")]) == 1


def test_verify_malformed_csv(tmp_path):
    path = tmp_path / "u.csv"
    path.write_text("i_1,u\n0,abc\n")
    assert main(["verify", "--configuration", str(path), "--out", str(tmp_path / "out")]) == 1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
