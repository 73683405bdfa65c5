"""Per-run report rows and their CSV / aligned-table rendering.

CSV follows RFC-4180 conventions (UTF-8, LF line endings) with the fixed
header ``method,n,T,rel_err_pct,max_err,energy_drift,wall_seconds,converged``.
Cells that do not apply (FOM error columns, metrics of non-converged runs)
render as "-"; the FOM ``n`` field is empty.  ``parse_report`` inverts
``emit_report`` exactly for finite rows; the in-memory-only
``last_good_time`` metadata of failed runs is not serialized.
"""

from dataclasses import dataclass
from typing import List, Optional

CSV_HEADER = "method,n,T,rel_err_pct,max_err,energy_drift,wall_seconds,converged"
_COLUMNS = ("method", "n", "T", "rel_err_pct", "max_err", "energy_drift",
            "wall_seconds", "converged")


@dataclass(frozen=True)
class ReportRow:
    method: str  # FOM | SP-ROM | EH-ROM | G-ROM
    n: Optional[int]  # absent for the FOM
    T: float
    rel_err_pct: Optional[float]
    max_err: Optional[float]
    energy_drift: Optional[float]
    wall_seconds: float
    converged: bool
    last_good_time: Optional[float] = None

    def __post_init__(self):
        for label, value in (("rel_err_pct", self.rel_err_pct), ("max_err", self.max_err)):
            if value is not None and value < 0:
                raise ValueError(f"{label} must be nonnegative")


def _cell(value) -> str:
    if value is None:
        return "-"
    return repr(float(value))


def _parse_cell(text: str) -> Optional[float]:
    return None if text == "-" else float(text)


def emit_report(rows: List[ReportRow], fmt: str = "csv") -> str:
    """Render rows as ``csv`` or a console ``aligned-table``."""
    if not rows:
        raise ValueError("need at least one report row")
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        r.method,
                        "" if r.n is None else str(r.n),
                        repr(float(r.T)),
                        _cell(r.rel_err_pct),
                        _cell(r.max_err),
                        _cell(r.energy_drift),
                        repr(float(r.wall_seconds)),
                        "true" if r.converged else "false",
                    ]
                )
            )
        return "\n".join(lines) + "\n"
    if fmt == "aligned-table":
        table = [_COLUMNS]
        for r in rows:
            table.append(
                (
                    r.method,
                    "-" if r.n is None else str(r.n),
                    f"{r.T:g}",
                    "-" if r.rel_err_pct is None else f"{r.rel_err_pct:.4g}",
                    "-" if r.max_err is None else f"{r.max_err:.4g}",
                    "-" if r.energy_drift is None else f"{r.energy_drift:.4g}",
                    f"{r.wall_seconds:.4g}",
                    "yes" if r.converged else "NO",
                )
            )
        widths = [max(len(row[i]) for row in table) for i in range(len(_COLUMNS))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                 for row in table]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> List[ReportRow]:
    """Parse CSV text produced by :func:`emit_report`."""
    lines = [line for line in text.split("\n") if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(_COLUMNS):
            raise ValueError(f"malformed row: {line!r}")
        rows.append(
            ReportRow(
                method=cells[0],
                n=None if cells[1] == "" else int(cells[1]),
                T=float(cells[2]),
                rel_err_pct=_parse_cell(cells[3]),
                max_err=_parse_cell(cells[4]),
                energy_drift=_parse_cell(cells[5]),
                wall_seconds=float(cells[6]),
                converged=cells[7] == "true",
            )
        )
    return rows
