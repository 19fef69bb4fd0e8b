"""Report generation: per-trial CSV, condition-aggregate CSV, summary figures.

The aggregate groups trials by condition cell (technique x object size x
rotation magnitude) and reports mean and sample standard deviation for each
of the seven measures. Figures render one grouped bar chart per measure
(mean with SD whiskers, one bar group per size/rotation cell, one bar per
technique) as PNG files next to the CSVs.
"""

from __future__ import annotations

import csv
import json
import statistics
from pathlib import Path

from .errors import SchemaError
from .metrics import MEASURE_FIELDS

TRIAL_COLUMNS = (
    "trial",
    "technique",
    "block",
    "object_size_deg",
    "rotation_magnitude_deg",
    "displacement_dir",
    "axis_pair",
    *MEASURE_FIELDS,
)

CONDITION_COLUMNS = ("technique", "object_size_deg", "rotation_magnitude_deg")


def read_results(results_path: Path) -> list[dict]:
    if not results_path.exists():
        raise SchemaError("no results.jsonl found", path=str(results_path))
    rows = []
    with open(results_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise SchemaError(
                    f"line {lineno}: invalid JSON: {exc.msg}", path=str(results_path)
                ) from None
    return rows


def write_trial_csv(rows: list[dict], out_path: Path) -> None:
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRIAL_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def aggregate_rows(rows: list[dict]) -> list[dict]:
    cells: dict[tuple, list[dict]] = {}
    for row in rows:
        key = tuple(row[c] for c in CONDITION_COLUMNS)
        cells.setdefault(key, []).append(row)
    out = []
    for key in sorted(cells, key=lambda k: tuple(str(v) for v in k)):
        members = cells[key]
        agg = dict(zip(CONDITION_COLUMNS, key))
        agg["n"] = len(members)
        for measure in MEASURE_FIELDS:
            values = [float(m[measure]) for m in members]
            agg[f"{measure}_mean"] = statistics.fmean(values)
            agg[f"{measure}_sd"] = statistics.stdev(values) if len(values) > 1 else 0.0
        out.append(agg)
    return out


def write_aggregate_csv(aggregates: list[dict], out_path: Path) -> None:
    columns = [*CONDITION_COLUMNS, "n"]
    for measure in MEASURE_FIELDS:
        columns += [f"{measure}_mean", f"{measure}_sd"]
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in aggregates:
            writer.writerow(row)


def render_figures(aggregates: list[dict], figures_dir: Path) -> list[Path]:
    """One PNG per measure: grouped bars by condition cell, split by technique."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    figures_dir.mkdir(parents=True, exist_ok=True)
    techniques = sorted({row["technique"] for row in aggregates})
    cells = sorted(
        {(row["object_size_deg"], row["rotation_magnitude_deg"]) for row in aggregates}
    )
    lookup = {
        (row["technique"], row["object_size_deg"], row["rotation_magnitude_deg"]): row
        for row in aggregates
    }
    written = []
    for measure in MEASURE_FIELDS:
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        width = 0.8 / max(1, len(techniques))
        for ti, technique in enumerate(techniques):
            xs, means, sds = [], [], []
            for ci, cell in enumerate(cells):
                row = lookup.get((technique, *cell))
                if row is None:
                    continue
                xs.append(ci + ti * width)
                means.append(row[f"{measure}_mean"])
                sds.append(row[f"{measure}_sd"])
            ax.bar(xs, means, width=width, yerr=sds, capsize=3, label=technique)
        ax.set_xticks([ci + 0.4 - width / 2 for ci in range(len(cells))])
        ax.set_xticklabels([f"{size}° / {rot}°" for size, rot in cells])
        ax.set_xlabel("object size / rotation magnitude")
        ax.set_ylabel(measure)
        ax.set_title(measure.replace("_", " "))
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = figures_dir / f"{measure}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written


def write_report(results_path: Path, out_path: Path, figures: bool = True) -> dict:
    """Produce the per-trial CSV, the aggregate CSV, and (optionally) figures.

    Returns a manifest of written paths.
    """
    rows = read_results(results_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_trial_csv(rows, out_path)
    aggregates = aggregate_rows(rows)
    aggregate_path = out_path.with_name(out_path.stem + "_aggregate" + out_path.suffix)
    write_aggregate_csv(aggregates, aggregate_path)
    manifest = {
        "trials_csv": str(out_path),
        "aggregate_csv": str(aggregate_path),
        "figures": [],
        "trial_count": len(rows),
        "condition_cells": len(aggregates),
    }
    if figures:
        written = render_figures(aggregates, out_path.parent / "figures")
        manifest["figures"] = [str(p) for p in written]
    return manifest
