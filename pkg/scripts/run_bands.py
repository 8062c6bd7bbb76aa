#!/usr/bin/env python3
"""Band structure and IPR of the 31-site wall lattice vs the coupling ratio."""

import sys

from sshlight.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/bands"
    sys.exit(main(["bands", "--config", "topo31", "--out", out,
                   "--delta-min", "0.2", "--delta-max", "6.0",
                   "--delta-count", "59"]))
