"""
CSV and JSON export/import

Tables go through pandas with settings.FLOAT_FORMAT (17 significant digits)
and are read back with the round-trip float parser, so hull samples survive
a write/read cycle bit for bit. JSON floats use Python's shortest repr.
"""
import json
import os
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from config import settings
from configurations import ConfigurationWindow
from errors import ConfigError
from hull import HullFunction, from_values
from schemas import HistoryEntry, ProfilePoint, ResidualField, SweepRecord
from utils import log


def _write_table(df: pd.DataFrame, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    df.to_csv(path, index=False, float_format=settings.FLOAT_FORMAT)
    log(f"Wrote {path}", "DEBUG")
    return path


def _read_table(path: str, required: Iterable[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ConfigError(f"Could not parse {path}: {e}")
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ConfigError(f"{path} is missing columns {missing}")
    return df


def _records(items: Iterable[BaseModel]) -> List[Dict[str, Any]]:
    return [item.model_dump() for item in items]


# ============================================
# Hulls and residuals
# ============================================

def write_hull_csv(h: HullFunction, path: str) -> str:
    return _write_table(pd.DataFrame({"theta": np.arange(h.N) / h.N, "h": h.values}), path)


def read_hull_csv(path: str) -> HullFunction:
    df = _read_table(path, ["theta", "h"])
    if len(df) < 1:
        raise ConfigError(f"{path} has no rows")
    try:
        theta = df["theta"].to_numpy(dtype=float)
        values = df["h"].to_numpy(dtype=float)
    except ValueError as e:
        raise ConfigError(f"{path} has non-numeric entries: {e}")
    N = len(df)
    if not np.allclose(theta, np.arange(N) / N, rtol=0, atol=1e-12):
        raise ConfigError(f"{path}: theta column must be the uniform grid k/{N}")
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"{path}: hull values must be finite")
    return from_values(values)


def hull_to_dict(h: HullFunction) -> Dict[str, Any]:
    return {"N": h.N, "values": h.values.tolist()}


def hull_from_dict(data: Dict[str, Any]) -> HullFunction:
    try:
        N = int(data["N"])
        values = np.asarray(data["values"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed hull JSON: {e}")
    if values.shape != (N,):
        raise ConfigError(f"Hull JSON declares N={N} but has {values.size} values")
    return from_values(values)


def write_residual_csv(field: ResidualField, path: str) -> str:
    return _write_table(pd.DataFrame({"theta": np.arange(field.N) / field.N, "X": field.values}), path)


# ============================================
# Configuration windows
# ============================================

def write_window_csv(u: ConfigurationWindow, path: str) -> str:
    sites = u.sites().reshape(u.dim, -1)
    columns = {f"i_{j + 1}": sites[j] for j in range(u.dim)}
    columns["u"] = u.values.ravel()
    return _write_table(pd.DataFrame(columns), path)


def read_window_csv(path: str, omega_hint: Optional[List[float]] = None) -> ConfigurationWindow:
    """Rows (i_1, ..., i_d, u) covering a full box |i|_inf <= R in any order"""
    df = _read_table(path, ["u"])
    index_columns = sorted((c for c in df.columns if c.startswith("i_")), key=lambda c: int(c[2:]))
    if not index_columns or index_columns != [f"i_{j + 1}" for j in range(len(index_columns))]:
        raise ConfigError(f"{path}: expected index columns i_1..i_d")
    d = len(index_columns)
    try:
        sites = df[index_columns].to_numpy(dtype=float)
        u = df["u"].to_numpy(dtype=float)
    except ValueError as e:
        raise ConfigError(f"{path} has non-numeric entries: {e}")
    if not np.all(sites == np.round(sites)):
        raise ConfigError(f"{path}: site indices must be integers")
    sites = sites.astype(int)
    R = int(np.abs(sites).max()) if len(sites) else 0
    side = 2 * R + 1
    if len(df) != side ** d:
        raise ConfigError(f"{path}: {len(df)} rows do not fill the radius {R} box ({side ** d} sites)")
    values = np.full((side,) * d, np.nan)
    values[tuple((sites + R).T)] = u
    if np.isnan(values).any():
        raise ConfigError(f"{path}: some sites of the radius {R} box are missing or repeated")
    return ConfigurationWindow(values=values, omega_hint=omega_hint)


# ============================================
# Histories, profiles, sweeps
# ============================================

def write_history_csv(history: List[HistoryEntry], path: str) -> str:
    return _write_table(pd.DataFrame(_records(history), columns=["step", "time", "energy", "residual_sup"]), path)


def write_profile_csv(profile: List[ProfilePoint], path: str) -> str:
    return _write_table(pd.DataFrame(_records(profile), columns=["s", "limiting_energy", "residual_sup"]), path)


def write_sweep_csv(records: List[SweepRecord], path: str) -> str:
    columns = ["K", "energy", "residual_sup", "largest_gap", "excess_gap", "converged", "steps_taken"]
    return _write_table(pd.DataFrame(_records(records), columns=columns), path)


# ============================================
# JSON
# ============================================

def write_json(payload: Any, path: str) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump()
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    log(f"Wrote {path}", "DEBUG")
    return path


def load_json(path: str) -> Dict[str, Any]:
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Malformed JSON in {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    return data


def write_metadata(out_dir: str, command: str, run_id: str, extra: Optional[Dict[str, Any]] = None) -> str:
    """Timestamps and environment live here, away from the deterministic result files"""
    payload = {
        "command": command,
        "run_id": run_id,
        "timestamp": datetime.now().isoformat(),
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "threads": settings.THREADS,
    }
    payload.update(extra or {})
    return write_json(payload, os.path.join(out_dir, "metadata.json"))
