#!/usr/bin/env python3
"""Run the structural invariant suite for both benchmarks.

Exits nonzero if any check fails.

Usage: python scripts/run_verification.py [OUT_DIR]
"""

import sys

from metriplectic_rom.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/verify"
    rc_gas = main(["verify", "--benchmark", "gas", "--out", f"{out}/gas"])
    rc_rod = main(["verify", "--benchmark", "rod", "--out", f"{out}/rod"])
    sys.exit(rc_gas or rc_rod)
