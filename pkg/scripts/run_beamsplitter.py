#!/usr/bin/env python3
"""Interaction-length sweeps of the two-wall splitter for the three inputs."""

import json
import sys
import tempfile
from pathlib import Path

from sshlight.cli import main

CONFIGS = [
    {"preset": "bs32", "label": "bs32_single_photon"},
    {"preset": "bs32", "label": "bs32_coherent",
     "state": {"kind": "coherent", "alpha_mag": 1.0}},
    {"preset": "bs32", "label": "bs32_squeezed_pair",
     "state": {"kind": "squeezed_pair", "site": "dw0", "site_b": "dw1"}},
]


def run(out="out/beamsplitter"):
    for cfg in CONFIGS:
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(cfg, fh)
            path = fh.name
        rc = main(["beamsplitter", "--config", path, "--out", out])
        Path(path).unlink()
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:]))
