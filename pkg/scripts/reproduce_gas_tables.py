#!/usr/bin/env python3
"""Gas-container benchmark: train the basis, then tabulate all three reduced
models at n = 2, 3, 4 over horizons T = 8 and T = 32.

Writes <out>/gas_report.csv plus comparison SVGs under <out>/plots/.

Usage: python scripts/reproduce_gas_tables.py [OUT_DIR]
"""

import sys

from metriplectic_rom.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/gas"
    rc = main(["train", "--benchmark", "gas", "--out", out])
    sys.exit(rc or main(["compare", "--benchmark", "gas", "--out", out]))
