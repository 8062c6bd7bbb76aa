#!/usr/bin/env python3
"""Reproduce the wall-transport runs for all four input states plus the
trivial-wall contrast, one CSV + metadata sidecar per run."""

import json
import sys
import tempfile
from pathlib import Path

from sshlight.cli import main

CONFIGS = [
    {"preset": "topo32", "label": "topo32_single_photon"},
    {"preset": "topo32", "label": "topo32_coherent",
     "state": {"kind": "coherent", "alpha_mag": 1.0}},
    {"preset": "topo32", "label": "topo32_squeezed",
     "state": {"kind": "squeezed"}},
    {"preset": "topo32", "label": "topo32_two_mode",
     "state": {"kind": "two_mode_squeezed", "site": "edge", "site_b": "dw0"}},
    {"preset": "trivial32", "label": "trivial32_single_photon"},
]


def run(out="out/transport"):
    for cfg in CONFIGS:
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(cfg, fh)
            path = fh.name
        rc = main(["transport", "--config", path, "--out", out])
        Path(path).unlink()
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:]))
