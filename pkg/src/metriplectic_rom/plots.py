"""SVG figure emission for trajectory comparisons and spectra.

One self-contained SVG per requested quantity.  Line styles follow the
benchmark figures: FOM solid, SP-ROM dash-dot, EH-ROM dashed, G-ROM dotted.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from .integrate import Trajectory
from .metrics import energy_samples, entropy_samples
from .systems import MetriplecticSystem

QUANTITIES = ("state-component", "entropy", "energy-deviation",
              "singular-values", "phase-portrait")

_STYLE = {
    "FOM": {"linestyle": "-", "color": "black"},
    "SP-ROM": {"linestyle": "-.", "color": "tab:blue"},
    "EH-ROM": {"linestyle": "--", "color": "tab:orange"},
    "G-ROM": {"linestyle": ":", "color": "tab:red"},
}
_FALLBACK_STYLES = ("-", "--", "-.", ":")


def _style(label: str, index: int) -> dict:
    if label in _STYLE:
        return dict(_STYLE[label])
    return {"linestyle": _FALLBACK_STYLES[index % len(_FALLBACK_STYLES)]}


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot(111)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def _save(fig, ax, path: Path) -> Path:
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    return path


def emit_plots(system: MetriplecticSystem,
               labeled_trajectories: Sequence[Tuple[str, Trajectory]],
               quantities: Sequence[str],
               out_dir,
               singular_values: Optional[np.ndarray] = None,
               state_index: int = 0,
               phase_pair: Tuple[int, int] = (0, 1),
               prefix: str = "") -> List[Path]:
    """Write one SVG per quantity into ``out_dir``; returns the paths.

    Trajectories must hold full-order (lifted) states on consistent grids.
    ``singular-values`` plots each sigma_j^2 as a percentage of the total and
    requires ``singular_values``.
    """
    if not labeled_trajectories:
        raise ValueError("need at least one labeled trajectory")
    unknown = set(quantities) - set(QUANTITIES)
    if unknown:
        raise ValueError(f"unknown plot quantities: {sorted(unknown)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for quantity in quantities:
        path = out_dir / f"{prefix}{quantity}.svg"
        if quantity == "state-component":
            fig, ax = _new_axes(f"state component {state_index}", "t", f"x[{state_index}]")
            for i, (label, traj) in enumerate(labeled_trajectories):
                ax.plot(traj.times, traj.states[:, state_index], label=label,
                        **_style(label, i))
        elif quantity == "entropy":
            fig, ax = _new_axes("entropy", "t", "S")
            for i, (label, traj) in enumerate(labeled_trajectories):
                ax.plot(traj.times, entropy_samples(system, traj), label=label,
                        **_style(label, i))
        elif quantity == "energy-deviation":
            fig, ax = _new_axes("energy deviation", "t", "E - E0")
            for i, (label, traj) in enumerate(labeled_trajectories):
                e = energy_samples(system, traj)
                ax.plot(traj.times, e - e[0], label=label, **_style(label, i))
        elif quantity == "phase-portrait":
            i0, i1 = phase_pair
            fig, ax = _new_axes("phase portrait", f"x[{i0}]", f"x[{i1}]")
            for i, (label, traj) in enumerate(labeled_trajectories):
                ax.plot(traj.states[:, i0], traj.states[:, i1], label=label,
                        **_style(label, i))
        elif quantity == "singular-values":
            if singular_values is None:
                raise ValueError("singular-values plot requires the spectrum")
            sq = np.asarray(singular_values, dtype=float) ** 2
            fig, ax = _new_axes("snapshot spectrum", "mode index",
                                "percent of total energy")
            ax.semilogy(np.arange(1, sq.size + 1), 100.0 * sq / np.sum(sq),
                        marker=".", linestyle="-", label="sigma_j^2")
        written.append(_save(fig, ax, path))
    return written
