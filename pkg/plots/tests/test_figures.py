"""Tests for the figure builders and the plots command line.

All inputs are synthetic files written by the tests themselves; nothing here
invokes the simulator.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from debond_plots.cli import main
from debond_plots.figures import (
    SchemaError,
    energy_decay,
    front_convergence,
    jump_diagram,
    read_table,
)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def sweep_inputs(tmp_path, eps_list=(0.2, 0.1, 0.05, 0.025)):
    tmp_path.mkdir(parents=True, exist_ok=True)
    rows = []
    t = np.linspace(0.0, 2.0, 9)
    for eps in eps_list:
        ell = 1.0 + 0.3 * t + eps * np.sin(t)
        etilde = 0.5 * np.exp(-0.25 * t / eps) + 1e-12
        rows += [(eps, tk, lk, ek) for tk, lk, ek in zip(t, ell, etilde)]
    write_csv(tmp_path / "fronts.csv", ("epsilon", "t", "ell", "etilde"), rows)
    write_csv(tmp_path / "front_qs.csv", ("t", "lam"),
              [(tk, 1.0 + 0.3 * tk) for tk in t])
    summary = {"epsilon": list(eps_list), "decay_m": [0.25] * len(eps_list)}
    (tmp_path / "summary.json").write_text(json.dumps(summary), encoding="utf-8")
    return tmp_path


def jump_inputs(tmp_path):
    tmp_path.mkdir(parents=True, exist_ok=True)
    t = np.linspace(0.0, 12.0, 25)
    ell = np.minimum(1.0 + 0.4 * t, 2.42)
    write_csv(tmp_path / "jump.csv", ("t", "ell"), list(zip(t, ell)))
    legs = []
    for eps in (0.05, 0.025):
        ts = np.linspace(0.0, 0.4, 9)
        legs += [(eps, tk, min(1.0 + 8.0 * tk, 2.43)) for tk in ts]
    write_csv(tmp_path / "jump_legs.csv", ("epsilon", "t", "ell"), legs)
    (tmp_path / "summary.json").write_text(json.dumps({"ell1": 2.42}),
                                           encoding="utf-8")
    return tmp_path


# -- builders ----------------------------------------------------------------

def test_front_convergence_curve_count(tmp_path):
    fig = front_convergence(sweep_inputs(tmp_path))
    # 4 epsilon curves + 1 quasistatic reference
    assert len(fig.axes[0].lines) == 5
    labels = [line.get_label() for line in fig.axes[0].lines]
    assert "quasistatic" in labels
    assert "eps = 0.2" in labels


def test_energy_decay_envelope_slope(tmp_path):
    fig = energy_decay(sweep_inputs(tmp_path, eps_list=(0.1,)))
    ax = fig.axes[0]
    # one energy curve plus one envelope, log scale
    assert len(ax.lines) == 2
    assert ax.get_yscale() == "log"
    envelope = next(line for line in ax.lines
                    if line.get_label().startswith("envelope"))
    t = envelope.get_xdata()
    y = envelope.get_ydata()
    # slope on the log axis is -m/eps with m = 0.25 read from summary.json
    slope = (math.log(y[-1]) - math.log(y[0])) / (t[-1] - t[0])
    assert slope == pytest.approx(-0.25 / 0.1, rel=1e-9)
    assert y[0] == pytest.approx(4.0 * (0.5 + 1e-12), rel=1e-9)


def test_energy_decay_skips_envelope_without_rate(tmp_path):
    sweep_inputs(tmp_path, eps_list=(0.1,))
    summary = {"epsilon": [0.1], "decay_m": [None]}
    (tmp_path / "summary.json").write_text(json.dumps(summary), encoding="utf-8")
    fig = energy_decay(tmp_path)
    assert len(fig.axes[0].lines) == 1


def test_jump_diagram_curve_count(tmp_path):
    fig = jump_diagram(jump_inputs(tmp_path))
    # unrescaled run + plateau line + two epsilon legs
    assert len(fig.axes[0].lines) == 4
    plateau = next(line for line in fig.axes[0].lines
                   if line.get_label().startswith("limit"))
    assert plateau.get_ydata()[0] == pytest.approx(2.42)


def test_empty_tables_render_axes_only(tmp_path):
    write_csv(tmp_path / "fronts.csv", ("epsilon", "t", "ell", "etilde"), [])
    write_csv(tmp_path / "front_qs.csv", ("t", "lam"), [])
    fig = front_convergence(tmp_path)
    assert len(fig.axes[0].lines) == 0


# -- schema errors -----------------------------------------------------------

def test_missing_column_raises(tmp_path):
    write_csv(tmp_path / "fronts.csv", ("epsilon", "t"), [(0.1, 0.0)])
    with pytest.raises(SchemaError) as err:
        read_table(tmp_path / "fronts.csv", ("epsilon", "t", "ell"))
    assert "ell" in err.value.expected


def test_missing_file_raises(tmp_path):
    with pytest.raises(SchemaError):
        front_convergence(tmp_path)


# -- command line ------------------------------------------------------------

def test_cli_renders_all_kinds(tmp_path):
    # sweep and jump artifacts live in separate directories, as emitted
    sweep_dir = sweep_inputs(tmp_path / "sweep")
    jump_dir = jump_inputs(tmp_path / "jump")
    for kind, in_dir in (("front_convergence", sweep_dir),
                         ("energy_decay", sweep_dir),
                         ("jump_diagram", jump_dir)):
        out = tmp_path / f"{kind}.png"
        assert main([kind, "--in", str(in_dir), "--out", str(out)]) == 0
        assert out.stat().st_size > 0


def test_cli_is_deterministic(tmp_path):
    sweep_inputs(tmp_path)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert main(["front_convergence", "--in", str(tmp_path),
                 "--out", str(a)]) == 0
    assert main(["front_convergence", "--in", str(tmp_path),
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_empty_csv_exits_zero(tmp_path):
    write_csv(tmp_path / "fronts.csv", ("epsilon", "t", "ell", "etilde"), [])
    write_csv(tmp_path / "front_qs.csv", ("t", "lam"), [])
    out = tmp_path / "empty.png"
    assert main(["front_convergence", "--in", str(tmp_path),
                 "--out", str(out)]) == 0
    assert out.exists()


def test_cli_schema_error_exits_one(tmp_path, capsys):
    write_csv(tmp_path / "fronts.csv", ("epsilon", "t"), [(0.1, 0.0)])
    write_csv(tmp_path / "front_qs.csv", ("t", "lam"), [])
    code = main(["front_convergence", "--in", str(tmp_path),
                 "--out", str(tmp_path / "x.png")])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SchemaError"
    assert "ell" in err["expected"]
