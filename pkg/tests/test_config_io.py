"""Configuration loading, presets, CSV/JSON serialization, CLI determinism."""

import json
from dataclasses import replace

import numpy as np
import pytest

from sshlight.cli import main as cli_main
from sshlight.config import (ConfigError, config_from_dict, config_hash,
                             load_config, preset)
from sshlight.protocols import transport_experiment
from sshlight.serialize import CSV_COLUMNS, write_meta, write_trajectory_csv


def test_presets_build_valid_specs():
    for name in ("topo32", "trivial32", "topo31", "bs32"):
        cfg = preset(name)
        spec = cfg.spec()
        assert spec.n_sites in (31, 32)
    assert preset("topo32").spec().delta > 1
    assert preset("trivial32").spec().delta < 1


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        preset("nope")


def test_yaml_round_trip(tmp_path):
    text = """
label: custom-run
lattice:
  sites: 20
  u: 0.69
  v: 3.22
  dw_positions: [9]
z_m: 4.0
s: 2.0
dz: 0.002
state:
  kind: squeezed
  site: dw0
  r: 0.55
schedule:
  kind: transport
  moves: [[0, left]]
disorder:
  kind: onsite
  delta: 0.4
  repetitions: 5
  seed: 99
"""
    path = tmp_path / "run.yaml"
    path.write_text(text)
    cfg = load_config(path)
    assert cfg.label == "custom-run"
    assert cfg.spec().n_sites == 20
    assert cfg.state.r == 0.55
    assert cfg.schedule.moves == ((0, "left"),)
    assert cfg.disorder.seed == 99


def test_json_config_with_preset_override(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "preset": "topo32",
        "dz": 0.005,
        "state": {"kind": "coherent", "alpha_mag": 0.5},
    }))
    cfg = load_config(path)
    assert cfg.dz == 0.005
    assert cfg.state.kind == "coherent"
    assert cfg.lattice.sites == 32


def test_unknown_override_field_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"preset": "topo32", "bogus": 1})


def test_config_hash_tracks_content():
    a = preset("topo32")
    b = replace(a, dz=2e-3)
    assert config_hash(a) == config_hash(preset("topo32"))
    assert config_hash(a) != config_hash(b)


def small_cfg():
    cfg = preset("topo32")
    return replace(cfg, lattice=replace(cfg.lattice, sites=18, dw_positions=(9,)),
                   z_m=1.5, dz=5e-3, sample_every=100)


def test_trajectory_csv_schema_and_determinism(tmp_path):
    traj = transport_experiment(small_cfg())
    p1 = write_trajectory_csv(traj, tmp_path / "a.csv")
    p2 = write_trajectory_csv(transport_experiment(small_cfg()), tmp_path / "b.csv")
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_meta_sidecar_contains_hash(tmp_path):
    cfg = small_cfg()
    path = write_meta(tmp_path / "a.meta.json", cfg, {"command": "transport"})
    data = json.loads(path.read_text())
    assert data["config_hash"] == config_hash(cfg)
    assert data["config"]["lattice"]["sites"] == 18
    assert data["csv_columns"] == list(CSV_COLUMNS)


def test_cli_transport_and_bands(tmp_path):
    out = tmp_path / "out"
    rc = cli_main(["transport", "--config", "topo32", "--out", str(out),
                   "--dz", "0.01"])
    assert rc == 0
    assert (out / "topo32_transport.csv").exists()
    meta = json.loads((out / "topo32_transport.meta.json").read_text())
    assert meta["config"]["dz"] == 0.01
    rc = cli_main(["bands", "--config", "topo31", "--out", str(out),
                   "--delta-count", "5"])
    assert rc == 0
    lines = (out / "topo31_bands.csv").read_text().splitlines()
    assert lines[0] == "delta,state,energy,ipr"
    assert len(lines) == 1 + 5 * 31


def test_cli_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("lattice: {sites: 4}\n")
    rc = cli_main(["transport", "--config", str(bad), "--out", str(tmp_path)])
    assert rc == 2


def test_cli_trajectory_output_is_deterministic(tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        cli_main(["transport", "--config", "topo32", "--out", str(out),
                  "--dz", "0.01"])
        outs.append((out / "topo32_transport.csv").read_bytes())
    assert outs[0] == outs[1]


def test_distances_block_derives_couplings(tmp_path):
    path = tmp_path / "dist.yaml"
    path.write_text("""
label: from-distances
lattice:
  sites: 20
  u: 0.0
  v: 0.0
  dw_positions: [9]
  distances: {d_u: 22.0, d_v: 10.0, c1: 0.1283704200789291, c2: 11.624158483598714}
""")
    cfg = load_config(path)
    assert cfg.lattice.u == pytest.approx(0.69, rel=1e-9)
    assert cfg.lattice.v == pytest.approx(3.22, rel=1e-9)


def test_observables_block_feeds_the_plan(tmp_path):
    path = tmp_path / "obs.json"
    path.write_text(json.dumps({
        "preset": "topo32",
        "dz": 0.01,
        "observables": {
            "photon_sites": [15, 17],
            "g2": [[15, 15, 17, 17]],
            "quadratures": [{"sites": ["dw0"], "phases": [0.0, 0.5]}],
        },
    }))
    cfg = load_config(path)
    traj = transport_experiment(cfg)
    assert ("n", 15) in traj.columns and ("n", 16) not in traj.columns
    assert ("g2", (15, 15, 17, 17)) in traj.columns
    assert ("var", (15,), 0.5) in traj.columns
