"""
Flat-file outputs. CSVs carry 17 significant digits with LF endings and no
timestamps, so identical runs give identical bytes.
"""
import json
import math
import os
from typing import Any, Dict

import numpy as np

from config.defaults import CSV_FORMAT
from core.state import Trajectory


TRAJECTORY_HEADER = "theta,re,im,abs2"
PAINLEVE_HEADER = "z,v,dv"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_table(path: str, header: str, columns: list[np.ndarray]) -> str:
    _ensure_parent(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as f:
        np.savetxt(f, data, fmt=CSV_FORMAT, delimiter=",", header=header, comments="")
    return path


def write_trajectory_csv(traj: Trajectory, path: str) -> str:
    """theta,re,im,abs2 for a primary-equation trajectory; z,v,dv for a layer trajectory."""
    if traj.independent_var == "z":
        return write_table(path, PAINLEVE_HEADER, [traj.points, traj.states[:, 0], traj.states[:, 1]])
    re, im = traj.states[:, 0], traj.states[:, 1]
    return write_table(path, TRAJECTORY_HEADER, [traj.points, re, im, re ** 2 + im ** 2])


def read_table(path: str) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; complex becomes [re, im] and non-finite floats null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(payload), indent=2, allow_nan=False)


def write_json(payload: Dict[str, Any], path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="\n") as f:
        f.write(dumps(payload))
        f.write("\n")
    return path
