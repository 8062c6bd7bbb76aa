#!/usr/bin/env python3
"""Coupling and on-site disorder ensembles over the beam splitter (20 reps)."""

import json
import sys
import tempfile
from pathlib import Path

from sshlight.cli import main


def run(out="out/disorder", reps="20"):
    for kind in ("coupling", "onsite"):
        cfg = {
            "preset": "bs32",
            "label": "bs32_squeezed",
            "state": {"kind": "squeezed_pair", "site": "dw0", "site_b": "dw1"},
            "disorder": {"kind": kind, "delta": 1.3, "repetitions": int(reps),
                         "seed": 2024},
        }
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(cfg, fh)
            path = fh.name
        rc = main(["disorder", "--config", path, "--out", out])
        Path(path).unlink()
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:]))
