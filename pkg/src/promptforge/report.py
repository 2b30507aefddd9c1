"""Cross-run comparison artifacts: per-metric CSV tables, SVG trend charts,
and a plain-text improvement summary.

Everything here is a pure function of the run directories: identical inputs
produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import COMBOS
from .engine import METRICS_LABEL_MANUAL, metrics_labels

METRICS = ("mean", "max", "similarity")

COMBO_ORDER = tuple(COMBOS)


class ReportError(ValueError):
    """Run directories missing, malformed, or mutually inconsistent."""


@dataclass(frozen=True)
class RunMetrics:
    """One run's metrics table, parsed and validated."""

    run_dir: Path
    task: str
    combo: str
    iterations: int
    labels: tuple[str, ...]
    mean: tuple[float, ...]
    max: tuple[float, ...]
    similarity: tuple[float | None, ...]

    def column(self, metric: str) -> tuple:
        assert metric in METRICS
        return getattr(self, metric)


@dataclass(frozen=True)
class ComparisonSeries:
    """One metric across combos, on a shared label axis."""

    metric: str
    labels: tuple[str, ...]
    combos: tuple[str, ...]
    columns: tuple[tuple[float | None, ...], ...]

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if len(self.combos) != len(self.columns):
            raise ValueError("one column per combo required")
        for column in self.columns:
            if len(column) != len(self.labels):
                raise ValueError("all combos must share the label axis")


def improvement(baseline_mean: float, achieved_mean: float) -> float:
    """Percent change of achieved over baseline, to 2 decimals."""
    if baseline_mean <= 0:
        raise ValueError("baseline mean must be positive")
    return round(100.0 * (achieved_mean - baseline_mean) / baseline_mean, 2)


def _read_json(path: Path) -> dict:
    if not path.is_file():
        raise ReportError(f"{path}: no such file")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportError(f"{path}: unreadable: {exc}") from exc
    if not isinstance(obj, dict):
        raise ReportError(f"{path}: expected an object")
    return obj


def _parse_cell(raw: str, path: Path, what: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ReportError(f"{path}: non-numeric {what} cell {raw!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise ReportError(f"{path}: {what} value {value} outside [0, 1]")
    return value


def load_run_metrics(run_dir: str | Path) -> RunMetrics:
    """Read one run directory's config and metrics table, validating shape."""
    run_dir = Path(run_dir)
    config = _read_json(run_dir / "config.json")
    for key in ("task", "combo", "iterations"):
        if key not in config:
            raise ReportError(f"{run_dir}/config.json: missing {key!r}")
    status = _read_json(run_dir / "status.json")
    if status.get("status") != "completed":
        raise ReportError(
            f"{run_dir}: run status is {status.get('status')!r}, expected completed"
        )

    path = run_dir / "metrics.csv"
    if not path.is_file():
        raise ReportError(f"{path}: no such file")
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["label", "mean", "max", "similarity"]:
        raise ReportError(f"{path}: unexpected header")
    labels, means, maxes, sims = [], [], [], []
    for row in rows[1:]:
        if len(row) != 4:
            raise ReportError(f"{path}: malformed row {row!r}")
        labels.append(row[0])
        means.append(_parse_cell(row[1], path, "mean"))
        maxes.append(_parse_cell(row[2], path, "max"))
        sims.append(None if row[3] == "" else _parse_cell(row[3], path, "similarity"))
    expected = metrics_labels(int(config["iterations"]))
    if labels != expected:
        raise ReportError(f"{path}: labels {labels} do not match expected {expected}")
    return RunMetrics(
        run_dir=run_dir,
        task=config["task"],
        combo=config["combo"],
        iterations=int(config["iterations"]),
        labels=tuple(labels),
        mean=tuple(means),
        max=tuple(maxes),
        similarity=tuple(sims),
    )


def _check_consistent(runs: Sequence[RunMetrics]) -> None:
    if not runs:
        raise ReportError("no run directories given")
    first = runs[0]
    seen = set()
    for run in runs:
        if run.task != first.task:
            raise ReportError(
                f"{run.run_dir}: task {run.task!r} differs from {first.task!r}"
            )
        if run.iterations != first.iterations:
            raise ReportError(
                f"{run.run_dir}: iteration count {run.iterations} differs from {first.iterations}"
            )
        if run.combo in seen:
            raise ReportError(f"{run.run_dir}: duplicate combo {run.combo!r}")
        seen.add(run.combo)


def _ordered(runs: Sequence[RunMetrics]) -> list[RunMetrics]:
    def key(run: RunMetrics):
        try:
            return (COMBO_ORDER.index(run.combo), run.combo)
        except ValueError:
            return (len(COMBO_ORDER), run.combo)

    return sorted(runs, key=key)


def build_series(runs: Sequence[RunMetrics], metric: str) -> ComparisonSeries:
    ordered = _ordered(runs)
    return ComparisonSeries(
        metric=metric,
        labels=ordered[0].labels,
        combos=tuple(run.combo for run in ordered),
        columns=tuple(run.column(metric) for run in ordered),
    )


def _write_table(series: ComparisonSeries, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", *series.combos])
        for i, label in enumerate(series.labels):
            cells = [
                "" if column[i] is None else f"{column[i]:.3f}"
                for column in series.columns
            ]
            writer.writerow([label, *cells])


# Chart geometry. Fixed y domain [0, 1]: every metric is a score in that range.
_WIDTH, _HEIGHT = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 150, 24, 44
_PALETTE = ("#255a9b", "#c23b22", "#2e7d32", "#8e44ad")


def _x(i: int, count: int) -> float:
    span = _WIDTH - _LEFT - _RIGHT
    if count == 1:
        return _LEFT + span / 2
    return _LEFT + span * i / (count - 1)


def _y(value: float) -> float:
    return _TOP + (_HEIGHT - _TOP - _BOTTOM) * (1.0 - value)


def _segments(column: Sequence[float | None]) -> list[list[tuple[int, float]]]:
    """Split a column into runs of consecutive present values (chart gaps)."""
    out: list[list[tuple[int, float]]] = []
    current: list[tuple[int, float]] = []
    for i, value in enumerate(column):
        if value is None:
            if current:
                out.append(current)
                current = []
        else:
            current.append((i, value))
    if current:
        out.append(current)
    return out


def render_chart(series: ComparisonSeries) -> str:
    """Self-contained SVG line chart: one line per combo, gaps where absent."""
    count = len(series.labels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_LEFT}" y="16" font-size="14">{series.metric}</text>',
    ]
    for tick in range(0, 11, 2):
        value = tick / 10
        y = _y(value)
        parts.append(
            f'<line x1="{_LEFT}" y1="{y:.1f}" x2="{_WIDTH - _RIGHT}" y2="{y:.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8}" y="{y + 4:.1f}" text-anchor="end">{value:.1f}</text>'
        )
    for i, label in enumerate(series.labels):
        x = _x(i, count)
        parts.append(
            f'<text x="{x:.1f}" y="{_HEIGHT - _BOTTOM + 18}" text-anchor="middle">{label}</text>'
        )
    parts.append(
        f'<line x1="{_LEFT}" y1="{_y(0.0):.1f}" x2="{_WIDTH - _RIGHT}" y2="{_y(0.0):.1f}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    for c, (combo, column) in enumerate(zip(series.combos, series.columns)):
        color = _PALETTE[c % len(_PALETTE)]
        for segment in _segments(column):
            if len(segment) == 1:
                i, value = segment[0]
                parts.append(
                    f'<circle cx="{_x(i, count):.1f}" cy="{_y(value):.1f}" r="3" fill="{color}"/>'
                )
            else:
                points = " ".join(
                    f"{_x(i, count):.1f},{_y(value):.1f}" for i, value in segment
                )
                parts.append(
                    f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>'
                )
        legend_y = _TOP + 16 * c
        parts.append(
            f'<line x1="{_WIDTH - _RIGHT + 12}" y1="{legend_y}" x2="{_WIDTH - _RIGHT + 36}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_WIDTH - _RIGHT + 42}" y="{legend_y + 4}">{combo}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _summary_text(runs: Sequence[RunMetrics]) -> str:
    ordered = _ordered(runs)
    first = ordered[0]
    lines = [
        f"task: {first.task}",
        f"iterations: {first.iterations}",
        "",
    ]
    base_index = first.labels.index(METRICS_LABEL_MANUAL)
    for run in ordered:
        baseline = run.mean[base_index]
        iteration_rows = [
            (label, value)
            for label, value in zip(run.labels, run.mean)
            if label.isdigit()
        ]
        if not iteration_rows:
            lines.append(f"{run.combo}: no iterations")
            continue
        best_label, best_mean = max(iteration_rows, key=lambda pair: pair[1])
        gain = improvement(baseline, best_mean)
        lines.append(
            f"{run.combo}: best iteration {best_label}, mean {best_mean:.3f}, "
            f"improvement over manual mean {gain:.2f}%"
        )
    return "\n".join(lines) + "\n"


def report(run_dirs: Sequence[str | Path], out_dir: str | Path) -> list[Path]:
    """Compare completed runs and write tables, charts, and the summary.

    Rows are the shared label axis, columns the combos in canonical order.
    """
    runs = [load_run_metrics(d) for d in run_dirs]
    _check_consistent(runs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for metric in METRICS:
        series = build_series(runs, metric)
        table_path = out / f"{metric}.csv"
        _write_table(series, table_path)
        chart_path = out / f"{metric}.svg"
        chart_path.write_text(render_chart(series), encoding="utf-8")
        written += [table_path, chart_path]
    summary_path = out / "summary.txt"
    summary_path.write_text(_summary_text(runs), encoding="utf-8")
    written.append(summary_path)
    return written
