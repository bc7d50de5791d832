"""Trace CSV, metrics JSON and SVG plots for one or more runs."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ParseError
from .sim import COLUMNS, EgoTrace, MetricsReport

_INT_COLS = {"occl_flag"}
_STR_COLS = {"status"}


def write_trace(trace: EgoTrace, path: str | Path) -> None:
    """One row per step in :data:`~occpf.sim.COLUMNS` order. Floats use ``repr`` so they round-trip."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for row in trace.rows:
            w.writerow([repr(c) if isinstance(c, float) else c for c in row])


def read_trace(path: str | Path) -> dict[str, list]:
    """Column-oriented view of a trace CSV."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ParseError(f"{path}: header does not match the trace column contract")
    cols: dict[str, list] = {name: [] for name in COLUMNS}
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(COLUMNS):
            raise ParseError(f"{path}:{line_no}: expected {len(COLUMNS)} fields, got {len(row)}")
        for name, cell in zip(COLUMNS, row):
            try:
                if name in _STR_COLS:
                    cols[name].append(cell)
                elif name in _INT_COLS:
                    cols[name].append(int(cell))
                else:
                    cols[name].append(float(cell))
            except ValueError:
                raise ParseError(f"{path}:{line_no}: bad value {cell!r} in column {name}") from None
    return cols


def write_metrics(metrics: Mapping[str, MetricsReport], path: str | Path, extra: dict | None = None) -> None:
    doc = {name: asdict(m) for name, m in metrics.items()}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


_PANELS = (
    ("trajectory", "x [m]", "y [m]", None),
    ("speed", "t [s]", "v [m/s]", ("v",)),
    ("sideslip", "t [s]", "sideslip [deg]", ("beta_deg",)),
    ("yaw", "t [s]", "yaw [deg]", ("psi_deg",)),
    ("steer", "t [s]", "steer [deg]", ("delta_deg",)),
    ("forces", "t [s]", "virtual force", ("fx", "fy")),
    ("alpha", "t [s]", "alpha", ("alpha1", "alpha2")),
    ("occlusion", "t [s]", "occlusion flag", ("occl_flag",)),
)


def render_plots(traces: Mapping[str, Mapping[str, Sequence]], out_dir: str | Path) -> list[Path]:
    """One SVG per panel; every trace in ``traces`` (label -> columns) is overlaid."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, xlabel, ylabel, series in _PANELS:
        fig, ax = plt.subplots(figsize=(7, 3.2))
        for label, cols in traces.items():
            if series is None:
                ax.plot(cols["x"], cols["y"], label=label)
                continue
            for col in series:
                tag = label if len(series) == 1 else f"{label} {col}"
                if col == "occl_flag":
                    ax.step(cols["t"], cols[col], where="post", label=tag)
                else:
                    ax.plot(cols["t"], cols[col], label=tag)
        if name == "speed":
            for label, cols in traces.items():
                ax.plot(cols["t"], cols["v_star"], linestyle="--", linewidth=0.8, label=f"{label} v*")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, linewidth=0.3)
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = out_dir / f"{name}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        written.append(path)
    return written
