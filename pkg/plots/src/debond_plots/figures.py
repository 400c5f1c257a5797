"""Figure builders over the simulator's CSV/JSON artifacts.

Each builder is a pure function of the files in one input directory: fixed
style, fixed colors, no timestamps, so identical inputs render identical
images.  The package never invokes the simulator; it only reads the CSV and
JSON files the simulator's command line writes.

Expected inputs per figure kind
-------------------------------
``front_convergence``  fronts.csv (epsilon, t, ell), front_qs.csv (t, lam)
``energy_decay``       fronts.csv (epsilon, t, etilde), summary.json
                       (epsilon, decay_m lists)
``jump_diagram``       jump.csv (t, ell), jump_legs.csv (epsilon, t, ell),
                       summary.json (ell1)

Header-only CSVs render an axes-only figure; missing columns or files raise
:class:`SchemaError` listing what was expected.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.4, 4.2)
DPI = 150
LOG_FLOOR = 1e-18
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22")


class SchemaError(Exception):
    """An input file is missing, or lacks required columns or keys."""

    def __init__(self, path: Path, expected: Sequence[str], found: Sequence[str]):
        self.path = str(path)
        self.expected = list(expected)
        self.found = list(found)
        super().__init__(
            f"{path}: expected columns {sorted(expected)}, found {sorted(found)}")

    def to_json(self) -> dict:
        return {"error": "SchemaError", "message": str(self),
                "expected": sorted(self.expected)}


def read_table(path: Path, required: Sequence[str]) -> dict[str, np.ndarray]:
    """CSV columns as float arrays; header must cover the required names."""
    if not path.is_file():
        raise SchemaError(path, required, [])
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    header = tuple(rows[0]) if rows else ()
    if any(name not in header for name in required):
        raise SchemaError(path, required, header)
    data = rows[1:]
    return {name: np.array([float(row[i]) for row in data])
            for i, name in enumerate(header)}


def read_summary(path: Path, required: Sequence[str]) -> dict:
    if not path.is_file():
        raise SchemaError(path, required, [])
    summary = json.loads(path.read_text(encoding="utf-8"))
    if any(key not in summary for key in required):
        raise SchemaError(path, required, sorted(summary))
    return summary


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig = Figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_subplot(111)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _by_epsilon(table: dict[str, np.ndarray]):
    # sweep order: decreasing epsilon
    eps_vals = sorted(set(table["epsilon"].tolist()), reverse=True)
    for i, eps in enumerate(eps_vals):
        mask = table["epsilon"] == eps
        yield eps, mask, PALETTE[i % len(PALETTE)]


def front_convergence(in_dir: Path) -> Figure:
    """Front trajectories of every epsilon over the quasistatic reference."""
    fronts = read_table(in_dir / "fronts.csv", ("epsilon", "t", "ell"))
    reference = read_table(in_dir / "front_qs.csv", ("t", "lam"))
    fig, ax = _new_axes("Front convergence to the quasistatic limit",
                        "t", "front position")
    for eps, mask, color in _by_epsilon(fronts):
        ax.plot(fronts["t"][mask], fronts["ell"][mask], color=color,
                linewidth=1.2, label=f"eps = {eps:g}")
    if reference["t"].size:
        ax.plot(reference["t"], reference["lam"], color="black",
                linestyle="--", linewidth=1.5, label="quasistatic")
    if ax.lines:
        ax.legend(loc="lower right", fontsize=8)
    return fig


def energy_decay(in_dir: Path) -> Figure:
    """Modified energy per epsilon on a log scale, with decay envelopes."""
    fronts = read_table(in_dir / "fronts.csv", ("epsilon", "t", "etilde"))
    summary = read_summary(in_dir / "summary.json", ("epsilon", "decay_m"))
    rates = {float(eps): m for eps, m in
             zip(summary["epsilon"], summary["decay_m"])}
    fig, ax = _new_axes("Modified energy decay", "t", "modified energy")
    ax.set_yscale("log")
    for eps, mask, color in _by_epsilon(fronts):
        t = fronts["t"][mask]
        etilde = np.maximum(fronts["etilde"][mask], LOG_FLOOR)
        ax.plot(t, etilde, color=color, linewidth=1.2, label=f"eps = {eps:g}")
        m = rates.get(eps)
        if m is not None and math.isfinite(m) and t.size:
            envelope = 4.0 * etilde[0] * np.exp(-m * (t - t[0]) / eps)
            ax.plot(t, np.maximum(envelope, LOG_FLOOR), color=color,
                    linestyle="--", linewidth=0.9,
                    label=f"envelope m = {m:g}")
    if ax.lines:
        ax.legend(loc="upper right", fontsize=8)
    return fig


def jump_diagram(in_dir: Path) -> Figure:
    """Unrescaled front with its limit plateau and the early-time legs."""
    track = read_table(in_dir / "jump.csv", ("t", "ell"))
    legs = read_table(in_dir / "jump_legs.csv", ("epsilon", "t", "ell"))
    summary = read_summary(in_dir / "summary.json", ("ell1",))
    fig, ax = _new_axes("Initial jump of the debonding front",
                        "t", "front position")
    if track["t"].size:
        ax.plot(track["t"], track["ell"], color="black", linewidth=1.4,
                label="unrescaled run")
        ell1 = summary["ell1"]
        if ell1 is not None and math.isfinite(ell1):
            ax.axhline(ell1, color="gray", linestyle=":", linewidth=1.2,
                       label=f"limit = {ell1:.4f}")
    for eps, mask, color in _by_epsilon(legs):
        ax.plot(legs["t"][mask], legs["ell"][mask], color=color,
                linewidth=1.0, label=f"eps = {eps:g}")
    if ax.lines:
        ax.legend(loc="lower right", fontsize=8)
    return fig


def save_figure(fig: Figure, out: Path) -> Path:
    """Write the figure with fixed metadata so re-renders are byte-identical."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Software": "debond-plots"})
    return out


BUILDERS = {
    "front_convergence": front_convergence,
    "energy_decay": energy_decay,
    "jump_diagram": jump_diagram,
}
