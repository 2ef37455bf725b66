"""JSON and CSV artifacts: writers with fixed formatting, and loaders."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .profile import ManifoldSeries, WaveProfile

CSV_FORMAT = "{:.12g}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return None if math.isnan(val) else val
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    # repr-based floats round-trip exactly (at most 17 significant digits)
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return CSV_FORMAT.format(float(v))
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path) -> dict:
    """Columns of a numeric CSV as float arrays keyed by header name."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    cols = {}
    for i, name in enumerate(header):
        vals = [row[i] for row in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = vals
    return cols


def write_profile(path, profile: WaveProfile) -> Path:
    path = Path(path)
    if path.suffix == ".csv":
        return write_csv(path, ["z", "u", "v"], zip(profile.z, profile.u, profile.v))
    return write_json(path, profile.to_dict())


def load_profile(path, c: float | None = None) -> WaveProfile:
    """Read a profile written by :func:`write_profile`; CSV needs ``c``."""
    path = Path(path)
    if path.suffix == ".csv":
        if c is None:
            raise ValueError("the wave speed must be supplied for CSV profiles")
        cols = read_csv(path)
        return WaveProfile(c=c, z=cols["z"], u=cols["u"], v=cols["v"])
    return WaveProfile.from_dict(read_json(path))


def write_series(path, series: ManifoldSeries) -> Path:
    path = Path(path)
    if path.suffix == ".csv":
        return write_csv(path, ["j", "a_j"], zip(range(2, series.order + 1), series.coeffs))
    return write_json(path, series.to_dict())


def load_series(path, nu: float | None = None) -> ManifoldSeries:
    path = Path(path)
    if path.suffix == ".csv":
        if nu is None:
            raise ValueError("nu must be supplied for CSV series")
        cols = read_csv(path)
        return ManifoldSeries(nu=nu, coeffs=cols["a_j"])
    return ManifoldSeries.from_dict(read_json(path))
