"""Render publication-style figures from sshlight CSV + JSON metadata outputs.

Reads only the serialized artifacts (long-format CSV with columns
``x, xname, observable, i, j, k, l, phi, stat, value`` plus a ``.meta.json``
sidecar); never imports the simulation engine.  Rendering is deterministic:
byte-identical inputs produce identical image bytes.

Kinds:
    heatmap        waveguide x propagation map of the photon number
    lines          one observable vs x, one line per index combination
    band-ipr       energies vs coupling ratio, IPR color-coded
    ensemble-band  ensemble mean with a +-1 std shaded band
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sshlight-figures"
import matplotlib.pyplot as plt  # noqa: E402

CSV_COLUMNS = ["x", "xname", "observable", "i", "j", "k", "l", "phi", "stat", "value"]
BAND_COLUMNS = ["delta", "state", "energy", "ipr"]
KINDS = ("heatmap", "lines", "band-ipr", "ensemble-band")
VACUUM_VARIANCE = 0.25

AXIS_LABELS = {
    "z": "z (cm)",
    "uz_int": r"$u\,z_\mathrm{int}$ (dimensionless)",
}


class FigureInputError(ValueError):
    """Bad or mismatched input artifacts."""


@dataclass(frozen=True)
class FigureJob:
    kind: str
    csv_path: Path
    out_path: Path
    observable: str = "n"
    as_db: bool = False
    title: str = ""
    dpi: int = 150
    styling: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureInputError(f"unknown figure kind {self.kind!r}")


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

def _parse_float(text: str, row_num: int, column: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise FigureInputError(
            f"row {row_num}: column {column!r} has non-numeric value {text!r}") from exc


def read_rows(path: Path) -> list[dict]:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureInputError(f"{path}: empty file") from None
        if header != CSV_COLUMNS:
            raise FigureInputError(
                f"{path}: header {header} does not match the documented schema "
                f"{CSV_COLUMNS}")
        rows = []
        for num, raw in enumerate(reader, start=2):
            if len(raw) != len(CSV_COLUMNS):
                raise FigureInputError(f"row {num}: expected {len(CSV_COLUMNS)} "
                                       f"columns, got {len(raw)}")
            row = dict(zip(CSV_COLUMNS, raw))
            row["x"] = _parse_float(row["x"], num, "x")
            row["value"] = _parse_float(row["value"], num, "value")
            rows.append(row)
    if not rows:
        raise FigureInputError(f"{path}: no data rows")
    return rows


def check_metadata(csv_path: Path) -> dict:
    """Load the sidecar and refuse inputs whose config hash does not match."""
    meta_path = csv_path.parent / (csv_path.name[: -len(".csv")] + ".meta.json")
    if not meta_path.exists():
        raise FigureInputError(f"missing metadata sidecar {meta_path}")
    meta = json.loads(meta_path.read_text())
    payload = json.dumps(meta["config"], sort_keys=True, default=list)
    digest = hashlib.sha256(payload.encode()).hexdigest()[:16]
    if digest != meta["config_hash"]:
        raise FigureInputError(
            f"{meta_path}: declared config hash {meta['config_hash']} does not "
            f"match the config echo ({digest})")
    return meta


def _series(rows: list[dict], observable: str, stat: str = "value"):
    """Group rows of one observable into {(i,j,k,l,phi): (x array, values)}."""
    out: dict = {}
    for row in rows:
        if row["observable"] != observable or row["stat"] != stat:
            continue
        key = (row["i"], row["j"], row["k"], row["l"], row["phi"])
        out.setdefault(key, ([], []))
        out[key][0].append(row["x"])
        out[key][1].append(row["value"])
    return {k: (np.array(xs), np.array(vs)) for k, (xs, vs) in out.items()}


def _xname(rows: list[dict]) -> str:
    return rows[0]["xname"]


def _maybe_db(values: np.ndarray, as_db: bool) -> np.ndarray:
    if not as_db:
        return values
    return 10.0 * np.log10(np.maximum(values, 1e-300) / VACUUM_VARIANCE)


def _label_for(key) -> str:
    idx = [p for p in key[:4] if p != ""]
    tag = ",".join(idx)
    lab = f"({tag})" if tag else ""
    if key[4] != "":
        lab += f" phi={float(key[4]):.3f}"
    return lab


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------

def _render_heatmap(job: FigureJob, rows: list[dict], ax):
    series = _series(rows, "n")
    if not series:
        raise FigureInputError("no photon-number rows to draw a heatmap from")
    sites = sorted(int(k[0]) for k in series)
    x = next(iter(series.values()))[0]
    grid = np.vstack([series[(str(s), "", "", "", "")][1] for s in sites])
    im = ax.imshow(grid, aspect="auto", origin="lower", cmap="magma",
                   extent=(x[0], x[-1], sites[0] - 0.5, sites[-1] + 0.5))
    ax.set_xlabel(AXIS_LABELS.get(_xname(rows), _xname(rows)))
    ax.set_ylabel("waveguide")
    plt.colorbar(im, ax=ax, label="photon number")


def _render_lines(job: FigureJob, rows: list[dict], ax):
    series = _series(rows, job.observable)
    if not series:
        raise FigureInputError(f"no rows for observable {job.observable!r}")
    for key in sorted(series):
        x, vals = series[key]
        ax.plot(x, _maybe_db(vals, job.as_db), label=_label_for(key))
    ax.set_xlabel(AXIS_LABELS.get(_xname(rows), _xname(rows)))
    ax.set_ylabel("squeezing (dB)" if job.as_db else job.observable)
    if len(series) > 1:
        ax.legend(fontsize=8)


def _render_ensemble(job: FigureJob, rows: list[dict], ax):
    means = _series(rows, job.observable, stat="mean")
    stds = _series(rows, job.observable, stat="std")
    if not means:
        raise FigureInputError(f"no ensemble rows for observable {job.observable!r}")
    for key in sorted(means):
        x, mean = means[key]
        ax.plot(x, mean, label=_label_for(key))
        if key in stds:
            _, sd = stds[key]
            ax.fill_between(x, mean - sd, mean + sd, alpha=0.3)
    ax.set_xlabel(AXIS_LABELS.get(_xname(rows), _xname(rows)))
    ax.set_ylabel(job.observable + " (mean, +-1 std)")
    if len(means) > 1:
        ax.legend(fontsize=8)


def _render_band_ipr(job: FigureJob, ax):
    with job.csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != BAND_COLUMNS:
            raise FigureInputError(
                f"{job.csv_path}: header {header} does not match {BAND_COLUMNS}")
        deltas, energies, iprs = [], [], []
        for num, raw in enumerate(reader, start=2):
            if len(raw) != 4:
                raise FigureInputError(f"row {num}: expected 4 columns")
            deltas.append(_parse_float(raw[0], num, "delta"))
            energies.append(_parse_float(raw[2], num, "energy"))
            iprs.append(_parse_float(raw[3], num, "ipr"))
    if not deltas:
        raise FigureInputError(f"{job.csv_path}: no data rows")
    sc = ax.scatter(deltas, energies, c=iprs, s=6, cmap="viridis",
                    vmin=0.0, vmax=max(iprs))
    ax.set_xlabel(r"coupling ratio $\delta = v/u$")
    ax.set_ylabel(r"energy (cm$^{-1}$)")
    plt.colorbar(sc, ax=ax, label="IPR")


def render(job: FigureJob) -> Path:
    """Render one figure; returns the output path."""
    fig, ax = plt.subplots(figsize=job.styling.get("figsize", (6.0, 4.0)))
    try:
        if job.kind == "band-ipr":
            check_metadata(job.csv_path)
            _render_band_ipr(job, ax)
        else:
            check_metadata(job.csv_path)
            rows = read_rows(job.csv_path)
            if job.kind == "heatmap":
                _render_heatmap(job, rows, ax)
            elif job.kind == "lines":
                _render_lines(job, rows, ax)
            else:
                _render_ensemble(job, rows, ax)
        if job.title:
            ax.set_title(job.title)
        fig.tight_layout()
        job.out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(job.out_path, dpi=job.dpi, metadata=_clean_metadata(job.out_path))
    finally:
        plt.close(fig)
    return job.out_path


def _clean_metadata(path: Path) -> dict | None:
    # strip timestamps so identical inputs give identical bytes
    if path.suffix == ".svg":
        return {"Date": None}
    if path.suffix == ".png":
        return {"Software": None}
    return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures", description="Render figures from sshlight CSV outputs")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="csv_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    parser.add_argument("--observable", default="n",
                        help="observable name for lines/ensemble-band")
    parser.add_argument("--db", action="store_true",
                        help="show variances as squeezing in dB")
    parser.add_argument("--title", default="")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    job = FigureJob(kind=args.kind, csv_path=Path(args.csv_path),
                    out_path=Path(args.out_path), observable=args.observable,
                    as_db=args.db, title=args.title, dpi=args.dpi)
    try:
        out = render(job)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
