"""Long-format CSV output plus JSON metadata sidecars.

One schema for every artifact:

    x, xname, observable, i, j, k, l, phi, stat, value

Index and phase columns are blank where an observable does not use them;
``stat`` is ``value`` for single runs and ``mean``/``std`` for ensembles.
Floats are written with full repr precision, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .config import ExperimentConfig, config_dict, config_hash
from .evolution import Trajectory
from .protocols import EnsembleResult

CSV_COLUMNS = ("x", "xname", "observable", "i", "j", "k", "l", "phi", "stat", "value")


def _fmt(val) -> str:
    if isinstance(val, (float, np.floating)):
        return repr(float(val))
    return str(val)


def _key_fields(key) -> tuple[str, list]:
    """Map an internal column key to (observable name, [i, j, k, l, phi])."""
    name = key[0]
    idx = ["", "", "", "", ""]
    if name == "n":
        idx[0] = key[1]
        return "n", idx
    if name == "n_total":
        return "n_total", idx
    if name == "g2":
        idx[:4] = list(key[1])
        return "g2", idx
    if name == "var":
        sites, phi = key[1], key[2]
        idx[: len(sites)] = list(sites)
        idx[4] = phi
        return "var" if len(sites) == 1 else "var2", idx
    if name in ("phi_min", "var_min"):
        sites = key[1]
        idx[: len(sites)] = list(sites)
        return name if len(sites) == 1 else name + "2", idx
    if name == "m_abs":
        idx[:2] = list(key[1])
        return "m_abs", idx
    raise ValueError(f"unknown column key {key!r}")


def _rows_for(x, xname, key, values, stat):
    name, idx = _key_fields(key)
    out = []
    complex_vals = np.iscomplexobj(values)
    for xi, vi in zip(x, values):
        if complex_vals:
            out.append([_fmt(xi), xname, name + "_re", *map(_fmt, idx), stat,
                        _fmt(float(np.real(vi)))])
            out.append([_fmt(xi), xname, name + "_im", *map(_fmt, idx), stat,
                        _fmt(float(np.imag(vi)))])
        else:
            out.append([_fmt(xi), xname, name, *map(_fmt, idx), stat, _fmt(float(vi))])
    return out


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    xname = traj.meta.get("xname", "z")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for key in sorted(traj.columns, key=repr):
            writer.writerows(_rows_for(traj.z, xname, key, traj.columns[key], "value"))
    return path


def write_ensemble_csv(res: EnsembleResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    xname = res.meta.get("xname", "uz_int")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for key in sorted(res.mean, key=repr):
            writer.writerows(_rows_for(res.x, xname, key, res.mean[key], "mean"))
            writer.writerows(_rows_for(res.x, xname, key, res.std[key], "std"))
    return path


def write_band_csv(sweep, path: str | Path) -> Path:
    """One row per (delta, state): energy and IPR."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("delta", "state", "energy", "ipr"))
        for delta, result in sweep:
            for k in range(len(result.energies)):
                writer.writerow((_fmt(delta), k, _fmt(result.energies[k]),
                                 _fmt(result.ipr[k])))
    return path


def write_meta(path: str | Path, cfg: ExperimentConfig, extra: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "package": "sshlight",
        "version": _version,
        "config": config_dict(cfg),
        "config_hash": config_hash(cfg),
        "csv_columns": list(CSV_COLUMNS),
    }
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
                    + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)
