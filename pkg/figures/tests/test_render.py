"""Figure rendering against hand-built artifacts in the documented schema."""

import hashlib
import json
from pathlib import Path

import pytest

from sshfigures.render import FigureInputError, FigureJob, render

HEADER = "x,xname,observable,i,j,k,l,phi,stat,value"


def config_hash(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=list)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def write_artifact(tmp_path: Path, name: str, lines: list[str],
                   config=None, tamper_hash=False) -> Path:
    csv_path = tmp_path / f"{name}.csv"
    csv_path.write_text("\n".join([HEADER] + lines) + "\n")
    config = config if config is not None else {"label": name, "dz": 0.001}
    digest = config_hash(config)
    if tamper_hash:
        digest = "0" * 16
    meta = {"package": "sshlight", "config": config, "config_hash": digest}
    (tmp_path / f"{name}.meta.json").write_text(json.dumps(meta))
    return csv_path


def transport_lines(n_sites=4, n_z=6):
    rows = []
    for k in range(n_z):
        z = 0.1 * k
        for i in range(n_sites):
            val = 1.0 if i == 1 else 0.01 * k
            rows.append(f"{z!r},z,n,{i},,,,,value,{val!r}")
        rows.append(f"{z!r},z,var_min,1,,,,,value,{0.04 + 0.001 * k!r}")
    return rows


def ensemble_lines(n_x=5):
    rows = []
    for k in range(n_x):
        x = 0.2 * k
        for stat, val in (("mean", 0.7 + 0.05 * k), ("std", 0.02 * k)):
            rows.append(f"{x!r},uz_int,n,13,,,,,{stat},{val!r}")
    return rows


def test_heatmap_renders(tmp_path):
    csv_path = write_artifact(tmp_path, "run", transport_lines())
    out = render(FigureJob(kind="heatmap", csv_path=csv_path,
                           out_path=tmp_path / "fig.svg"))
    assert out.exists() and out.stat().st_size > 1000
    assert b"waveguide" in out.read_bytes()


def test_lines_with_db_transform(tmp_path):
    csv_path = write_artifact(tmp_path, "run", transport_lines())
    out = render(FigureJob(kind="lines", csv_path=csv_path,
                           out_path=tmp_path / "sq.svg", observable="var_min",
                           as_db=True))
    assert b"squeezing (dB)" in out.read_bytes()


def test_ensemble_band_renders(tmp_path):
    csv_path = write_artifact(tmp_path, "ens", ensemble_lines())
    out = render(FigureJob(kind="ensemble-band", csv_path=csv_path,
                           out_path=tmp_path / "band.svg", observable="n"))
    assert out.exists() and b"mean" in out.read_bytes()


def test_band_ipr_renders(tmp_path):
    csv_path = tmp_path / "bands.csv"
    rows = ["delta,state,energy,ipr"]
    for d in (1.0, 2.0):
        for k in range(5):
            rows.append(f"{d!r},{k},{(k - 2) * d!r},{0.1 * (k + 1)!r}")
    csv_path.write_text("\n".join(rows) + "\n")
    config = {"label": "bands"}
    meta = {"config": config, "config_hash": config_hash(config)}
    (tmp_path / "bands.meta.json").write_text(json.dumps(meta))
    out = render(FigureJob(kind="band-ipr", csv_path=csv_path,
                           out_path=tmp_path / "bands.svg"))
    assert b"IPR" in out.read_bytes()


def test_byte_identical_rendering(tmp_path):
    csv_path = write_artifact(tmp_path, "run", transport_lines())
    outs = []
    for name in ("a.svg", "b.svg"):
        render(FigureJob(kind="heatmap", csv_path=csv_path,
                         out_path=tmp_path / name))
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_hash_mismatch_refused(tmp_path):
    csv_path = write_artifact(tmp_path, "run", transport_lines(), tamper_hash=True)
    with pytest.raises(FigureInputError, match="hash"):
        render(FigureJob(kind="heatmap", csv_path=csv_path,
                         out_path=tmp_path / "fig.svg"))


def test_missing_sidecar_refused(tmp_path):
    csv_path = tmp_path / "lonely.csv"
    csv_path.write_text(HEADER + "\n" + "\n".join(transport_lines()) + "\n")
    with pytest.raises(FigureInputError, match="sidecar"):
        render(FigureJob(kind="heatmap", csv_path=csv_path,
                         out_path=tmp_path / "fig.svg"))


def test_schema_mismatch_reports_row(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "\n0.0,z,n,0,,,,,value,1.0\n0.1,z,n,0,,,,,value,oops\n")
    config = {"label": "bad"}
    meta = {"config": config, "config_hash": config_hash(config)}
    (tmp_path / "bad.meta.json").write_text(json.dumps(meta))
    with pytest.raises(FigureInputError, match="row 3"):
        render(FigureJob(kind="heatmap", csv_path=bad,
                         out_path=tmp_path / "fig.svg"))


def test_wrong_header_refused(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    config = {"label": "bad"}
    meta = {"config": config, "config_hash": config_hash(config)}
    (tmp_path / "bad.meta.json").write_text(json.dumps(meta))
    with pytest.raises(FigureInputError, match="schema"):
        render(FigureJob(kind="lines", csv_path=bad, out_path=tmp_path / "f.svg"))


def test_empty_selection_refused_no_file(tmp_path):
    csv_path = write_artifact(tmp_path, "run", transport_lines())
    out_path = tmp_path / "nothing.svg"
    with pytest.raises(FigureInputError, match="no rows"):
        render(FigureJob(kind="lines", csv_path=csv_path, out_path=out_path,
                         observable="does_not_exist"))
    assert not out_path.exists()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(FigureInputError):
        FigureJob(kind="pie", csv_path=tmp_path / "x.csv",
                  out_path=tmp_path / "x.svg")


def test_cli_end_to_end(tmp_path):
    from sshfigures.render import main
    csv_path = write_artifact(tmp_path, "run", transport_lines())
    out = tmp_path / "cli.svg"
    rc = main(["heatmap", "--in", str(csv_path), "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = main(["lines", "--in", str(csv_path), "--out", str(tmp_path / "x.svg"),
               "--observable", "nope"])
    assert rc == 1
