#!/usr/bin/env python3
"""Thermoelastic-rod benchmark: train the basis, run the mid-scale accuracy
grid (n = 10, 20, 40 over T = 8, 16, 48, 96), then the long-time stability
sweep (n = 5, 10, 20 over T = 8 ... 512, doubling).

Writes <out>/rod_report.csv, <out>/rod_stability.csv and SVGs under
<out>/plots/.  The stability sweep integrates to T = 512 and takes several
minutes; non-converging cells appear as dashes.

Usage: python scripts/reproduce_rod_tables.py [OUT_DIR]
"""

import dataclasses
import sys
from pathlib import Path

from metriplectic_rom.cli import main
from metriplectic_rom.config import default_config
from metriplectic_rom.pipelines import run_compare
from metriplectic_rom.report import emit_report


def stability_sweep(out: str) -> int:
    config = default_config("rod")
    config = dataclasses.replace(
        config,
        output_dir=out,
        evaluation=dataclasses.replace(
            config.evaluation,
            horizons=(8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0),
            n_values=(5, 10, 20),
        ),
    ).validate()
    rows = run_compare(config, emit_csv=False, emit_svg=False)
    path = Path(out) / "rod_stability.csv"
    path.write_text(emit_report(rows, "csv"), newline="\n")
    print(emit_report(rows, "aligned-table"), end="")
    print(f"stability sweep written to {path}")
    return 0


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/rod"
    rc = main(["train", "--benchmark", "rod", "--out", out])
    rc = rc or main(["compare", "--benchmark", "rod", "--out", out])
    sys.exit(rc or stability_sweep(out))
