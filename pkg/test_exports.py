"""
Tests for CSV and JSON import/export

Usage:
    pytest test_exports.py
    python test_exports.py
"""
import json
import os
import sys

import numpy as np
import pandas as pd
import pytest

from configurations import window_from_function
from errors import ConfigError
from exports import (
    hull_from_dict,
    hull_to_dict,
    load_json,
    read_hull_csv,
    read_window_csv,
    write_history_csv,
    write_hull_csv,
    write_json,
    write_metadata,
    write_window_csv,
)
from hull import identical, random_monotone, translate
from schemas import HistoryEntry, SweepRecord


def test_hull_csv_is_bit_exact(tmp_path, rng):
    h = translate(random_monotone(55, rng), 7)
    path = write_hull_csv(h, str(tmp_path / "hull.csv"))
    back = read_hull_csv(path)
    np.testing.assert_array_equal(back.values, h.values)
    assert back.monotone_flag


def test_hull_json_is_bit_exact(tmp_path, rng):
    h = random_monotone(21, rng)
    path = write_json(hull_to_dict(h), str(tmp_path / "hull.json"))
    assert identical(hull_from_dict(load_json(path)), h)


def test_hull_csv_needs_the_uniform_grid(tmp_path):
    path = tmp_path / "bad.csv"
    pd.DataFrame({"theta": [0.0, 0.3], "h": [0.0, 0.5]}).to_csv(path, index=False)
    with pytest.raises(ConfigError):
        read_hull_csv(str(path))


def test_hull_csv_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    pd.DataFrame({"theta": [0.0, 0.5]}).to_csv(path, index=False)
    with pytest.raises(ConfigError):
        read_hull_csv(str(path))


def test_missing_file():
    with pytest.raises(ConfigError):
        read_hull_csv("does/not/exist.csv")


def test_hull_dict_size_mismatch():
    with pytest.raises(ConfigError):
        hull_from_dict({"N": 3, "values": [0.0, 0.5]})


def test_window_csv_round_trip(tmp_path):
    u = window_from_function(lambda i: 0.3 * i[0] + 0.7 * i[1], 2, 3)
    path = write_window_csv(u, str(tmp_path / "window.csv"))
    back = read_window_csv(path)
    assert back.dim == 2
    assert back.radius == 3
    np.testing.assert_array_equal(back.values, u.values)


def test_window_csv_rows_may_come_in_any_order(tmp_path):
    path = tmp_path / "window.csv"
    pd.DataFrame({"i_1": [1, -1, 0], "u": [0.5, -0.5, 0.0]}).to_csv(path, index=False)
    np.testing.assert_array_equal(read_window_csv(str(path)).values, [-0.5, 0.0, 0.5])


def test_window_csv_with_a_hole(tmp_path):
    path = tmp_path / "window.csv"
    pd.DataFrame({"i_1": [-1, 0, 0], "u": [-0.5, 0.0, 0.0]}).to_csv(path, index=False)
    with pytest.raises(ConfigError):
        read_window_csv(str(path))


def test_history_csv_columns(tmp_path):
    history = [HistoryEntry(step=0, time=0.0, energy=1.0, residual_sup=0.5),
               HistoryEntry(step=1, time=0.1, energy=0.9, residual_sup=0.4)]
    df = pd.read_csv(write_history_csv(history, str(tmp_path / "history.csv")))
    assert list(df.columns) == ["step", "time", "energy", "residual_sup"]
    assert len(df) == 2


def test_write_json_accepts_schemas(tmp_path):
    record = SweepRecord(K=0.5, energy=0.1, residual_sup=1e-9, largest_gap=0.01, excess_gap=0.0,
                         converged=True, steps_taken=10)
    path = write_json(record, str(tmp_path / "out" / "record.json"))
    assert load_json(path)["K"] == 0.5


def test_malformed_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_json(str(path))
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_json(str(path))


def test_metadata_has_a_timestamp(tmp_path):
    path = write_metadata(str(tmp_path), "solve", "SOLVE-1", {"exit_code": 0})
    with open(path) as f:
        payload = json.load(f)
    assert payload["command"] == "solve"
    assert payload["exit_code"] == 0
    assert "timestamp" in payload
    assert os.path.basename(path) == "metadata.json"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
