"""Report emission: CSV tables, self-contained SVG charts, and a
markdown summary, bundled per experiment.

Everything here is pure string construction from already-computed
analysis results, so emitting the same results twice yields
byte-identical files.  Numbers are formatted at 6 significant digits,
and chart geometry is computed from the formatted values, so every
plotted point is exactly a value printed in the tables.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analysis import BackgroundScore, DegradationCurve, symmetry_index
from .errors import AnalysisError
from .dataset import CaptureConfig
from .exposure import ExposureLabel

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
)

_WIDTH = 760
_HEIGHT = 420
_MARGIN_LEFT = 76
_MARGIN_RIGHT = 170
_MARGIN_TOP = 42
_MARGIN_BOTTOM = 64


@dataclass(frozen=True)
class ReportBundle:
    """Named tables (CSV text), named charts (SVG text), and a summary."""

    tables: tuple[tuple[str, str], ...]
    charts: tuple[tuple[str, str], ...]
    summary: str


def format_number(value: float) -> str:
    """Fixed formatting used by tables and charts: 6 significant digits."""
    return f"{value:.6g}"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if count < 2:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + step * i for i in range(count)]


def line_chart(
    title: str,
    x_labels: Sequence[str],
    series: Sequence[tuple[str, Sequence[float | None]]],
    y_label: str,
) -> str:
    """Hand-emitted SVG line chart.

    Each series is (name, values) with one value (or None for a gap)
    per x label.  Values should already be round-tripped through the
    table formatting so chart and table agree exactly.
    """
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    values = [v for _, vs in series for v in vs if v is not None]
    if values:
        lo, hi = min(values), max(values)
    else:
        lo, hi = 0.0, 1.0
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    else:
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad

    def x_at(index: int) -> float:
        if len(x_labels) == 1:
            return _MARGIN_LEFT + plot_w / 2.0
        return _MARGIN_LEFT + plot_w * index / (len(x_labels) - 1)

    def y_at(value: float) -> float:
        return _MARGIN_TOP + plot_h * (1.0 - (value - lo) / (hi - lo))

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    parts.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>')
    parts.append(
        f'<text x="{_MARGIN_LEFT}" y="24" font-family="sans-serif" font-size="15" '
        f'font-weight="bold">{_esc(title)}</text>'
    )

    axis_bottom = _MARGIN_TOP + plot_h
    axis_right = _MARGIN_LEFT + plot_w
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" '
        f'y2="{axis_bottom}" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_bottom}" x2="{axis_right}" '
        f'y2="{axis_bottom}" stroke="#333333" stroke-width="1"/>'
    )

    for tick in _ticks(lo, hi):
        y = y_at(tick)
        parts.append(
            f'<line x1="{_MARGIN_LEFT - 4}" y1="{y:.2f}" x2="{axis_right}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_esc(format_number(tick))}</text>'
        )

    for index, label in enumerate(x_labels):
        x = x_at(index)
        parts.append(
            f'<line x1="{x:.2f}" y1="{axis_bottom}" x2="{x:.2f}" y2="{axis_bottom + 4}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{axis_bottom + 16}" font-family="sans-serif" '
            f'font-size="10" text-anchor="middle" transform="rotate(30 {x:.2f} '
            f'{axis_bottom + 16})">{_esc(label)}</text>'
        )

    parts.append(
        f'<text x="16" y="{_MARGIN_TOP + plot_h / 2:.2f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle" transform="rotate(-90 16 '
        f'{_MARGIN_TOP + plot_h / 2:.2f})">{_esc(y_label)}</text>'
    )

    for series_index, (name, points) in enumerate(series):
        color = _PALETTE[series_index % len(_PALETTE)]
        segment: list[str] = []
        segments: list[list[str]] = []
        for index, value in enumerate(points):
            if value is None:
                if segment:
                    segments.append(segment)
                segment = []
                continue
            segment.append(f"{x_at(index):.2f},{y_at(value):.2f}")
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                x, y = seg[0].split(",")
                parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
            else:
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                    f'points="{" ".join(seg)}"/>'
                )
        for index, value in enumerate(points):
            if value is not None:
                parts.append(
                    f'<circle cx="{x_at(index):.2f}" cy="{y_at(value):.2f}" r="2.5" '
                    f'fill="{color}"/>'
                )
        legend_y = _MARGIN_TOP + 16 * series_index + 8
        legend_x = axis_right + 14
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y}" x2="{legend_x + 18}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{legend_x + 24}" y="{legend_y + 4}" font-family="sans-serif" '
            f'font-size="11">{_esc(name)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _condition_key(capture: CaptureConfig) -> tuple[str, str, str]:
    return (
        capture.lamp.value,
        capture.intensity.value,
        capture.light_angle.value if capture.light_angle else "",
    )


def _condition_label(key: tuple[str, str, str]) -> str:
    return "/".join(part for part in key if part)


def emit_background_report(scores: Sequence[BackgroundScore]) -> ReportBundle:
    """Bundle for a background ranking: one detail row per (background,
    condition), aggregate rows, one chart per camera, and a summary."""
    header = [
        "row_type",
        "background",
        "camera",
        "lamp",
        "intensity",
        "light_angle",
        "exposure",
        "uqi",
        "uqi_std",
        "rank",
        "n_conditions",
    ]
    rows: list[list[str]] = []
    ordered = sorted(scores, key=lambda s: s.rank)
    for score in ordered:
        for capture, value in score.per_condition:
            rows.append(
                [
                    "detail",
                    score.background.value,
                    capture.camera.value,
                    capture.lamp.value,
                    capture.intensity.value,
                    capture.light_angle.value if capture.light_angle else "",
                    capture.exposure.value,
                    format_number(value),
                    "",
                    "",
                    "",
                ]
            )
    for score in ordered:
        rows.append(
            [
                "aggregate",
                score.background.value,
                "",
                "",
                "",
                "",
                "",
                format_number(score.mean),
                format_number(score.std),
                str(score.rank),
                str(len(score.per_condition)),
            ]
        )
    table = _csv_text(header, rows)

    cameras = sorted(
        {capture.camera.value for score in scores for capture, _ in score.per_condition}
    )
    charts: list[tuple[str, str]] = []
    for camera in cameras:
        keys = sorted(
            {
                _condition_key(capture)
                for score in scores
                for capture, _ in score.per_condition
                if capture.camera.value == camera
            }
        )
        series = []
        for score in ordered:
            lookup = {
                _condition_key(capture): float(format_number(value))
                for capture, value in score.per_condition
                if capture.camera.value == camera
            }
            series.append(
                (score.background.value, [lookup.get(key) for key in keys])
            )
        chart = line_chart(
            title=f"Background featurelessness ({camera} camera)",
            x_labels=[_condition_label(key) for key in keys],
            series=series,
            y_label="stabilized UQI vs black",
        )
        charts.append((f"background_uqi_{camera}", chart))

    lines = ["# Background featurelessness ranking", ""]
    lines.append("| rank | background | mean UQI | std | conditions |")
    lines.append("| --- | --- | --- | --- | --- |")
    for score in ordered:
        lines.append(
            f"| {score.rank} | {score.background.value} | {format_number(score.mean)} "
            f"| {format_number(score.std)} | {len(score.per_condition)} |"
        )
    lines.append("")
    lines.append(
        "Scores are stabilized universal quality indices against a synthetic "
        "black reference; higher means closer to featureless black."
    )
    summary = "\n".join(lines) + "\n"

    return ReportBundle(tables=(("background_scores", table),), charts=tuple(charts), summary=summary)


def emit_exposure_report(curves: Sequence[DegradationCurve]) -> ReportBundle:
    """Bundle for exposure degradation: the per-step score table, one
    shared-axes chart with a series per (camera, lamp), and a summary
    carrying each group's symmetry index."""
    header = ["camera", "lamp", "label", "ev", "ms_ssim"]
    rows = []
    ordered = sorted(curves, key=lambda c: (c.camera.value, c.lamp.value))
    for curve in ordered:
        for point in curve.points:
            rows.append(
                [
                    curve.camera.value,
                    curve.lamp.value,
                    point.label.value,
                    format_number(point.ev),
                    format_number(point.score),
                ]
            )
    table = _csv_text(header, rows)

    present = {point.label for curve in ordered for point in curve.points}
    labels = [label for label in ExposureLabel if label in present]  # EV descending
    x_labels = [label.value for label in labels]
    series = []
    for curve in ordered:
        lookup = {point.label: float(format_number(point.score)) for point in curve.points}
        series.append(
            (
                f"{curve.camera.value}/{curve.lamp.value}",
                [lookup.get(label) for label in labels],
            )
        )
    chart = line_chart(
        title="Exposure degradation (similarity vs EX0)",
        x_labels=x_labels,
        series=series,
        y_label="MS-SSIM",
    )

    lines = ["# Exposure degradation", ""]
    lines.append("| camera | lamp | symmetry index |")
    lines.append("| --- | --- | --- |")
    for curve in ordered:
        try:
            index_text = format_number(symmetry_index(curve))
        except AnalysisError:
            # curve lacks an under/over pair; reporting must not fail
            index_text = "n/a"
        lines.append(
            f"| {curve.camera.value} | {curve.lamp.value} | {index_text} |"
        )
    lines.append("")
    lines.append(
        "Each curve scores the ladder steps against the group's EX0 capture; "
        "the symmetry index is the mean absolute under/over score gap."
    )
    summary = "\n".join(lines) + "\n"

    return ReportBundle(
        tables=(("exposure_curves", table),), charts=(("exposure_degradation", chart),), summary=summary
    )


def write_bundle(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Write a bundle under out_dir; returns the created file paths."""
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name, text in bundle.tables:
        path = target / f"{name}.csv"
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)
    for name, text in bundle.charts:
        path = target / f"{name}.svg"
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)
    summary_path = target / "summary.md"
    summary_path.write_text(bundle.summary, encoding="utf-8", newline="")
    written.append(summary_path)
    return written
