"""Analysis pipelines: background featurelessness ranking and exposure
degradation curves.

Both pipelines validate their manifest first and reject any fatal
finding.  Per-capture metric evaluations are independent, so they may
run on a thread pool (``jobs``); results are folded in manifest order,
which keeps every output bit-identical regardless of parallelism.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .dataset import (
    Background,
    Camera,
    CaptureConfig,
    ExperimentKind,
    Lamp,
    Manifest,
    load_captures,
    validate,
)
from .errors import AnalysisError
from .exposure import ExposureLabel, ladder_ev
from .imaging import Image
from .metrics import ms_ssim, uqi_stabilized

_T = TypeVar("_T")
_U = TypeVar("_U")


@dataclass(frozen=True)
class BackgroundScore:
    """Aggregate featurelessness of one background across conditions.

    per_condition holds (capture, score) pairs in manifest order;
    mean/std are population statistics of those scores; rank 1 is the
    most featureless (highest mean score against the black reference).
    """

    background: Background
    per_condition: tuple[tuple[CaptureConfig, float], ...]
    mean: float
    std: float
    rank: int


@dataclass(frozen=True)
class CurvePoint:
    """One exposure ladder step: label, its EV, and the similarity score."""

    label: ExposureLabel
    ev: float
    score: float


@dataclass(frozen=True)
class DegradationCurve:
    """Similarity against the EX0 reference for one (camera, lamp) group.

    Points are ordered by EV descending (EEU first, EEO last) and
    always include EX0 at exactly 1.0.
    """

    camera: Camera
    lamp: Lamp
    points: tuple[CurvePoint, ...]


def _effective_jobs(jobs: int | None) -> int:
    if jobs is None:
        return max(os.cpu_count() or 1, 1)
    if jobs < 1:
        raise AnalysisError(f"jobs must be >= 1, got {jobs}")
    return jobs


def _map_ordered(fn: Callable[[_T], _U], items: Sequence[_T], jobs: int | None) -> list[_U]:
    """Apply fn to items, optionally in parallel, preserving order."""
    n = _effective_jobs(jobs)
    if n == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def _checked_manifest(manifest: Manifest, expected: ExperimentKind) -> None:
    if manifest.kind is not expected:
        raise AnalysisError(
            f"manifest kind {manifest.kind.value} unsuitable: expected {expected.value}"
        )
    report = validate(manifest)
    if not report.ok:
        details = "; ".join(
            f"{f.capture or 'manifest'}: {f.message}" for f in report.fatal
        )
        raise AnalysisError(f"manifest rejected by validation: {details}")


def background_rank(manifest: Manifest, jobs: int | None = None) -> list[BackgroundScore]:
    """Score every capture against a synthetic black reference and rank
    backgrounds by mean featurelessness.

    Ranks are assigned by mean score descending; ties break toward the
    lower standard deviation, then the background id.  The returned
    list is ordered by rank and ranks form a permutation of 1..N.
    """
    _checked_manifest(manifest, ExperimentKind.BACKGROUND_TEST)
    loaded = load_captures(manifest)

    def score(pair: tuple[CaptureConfig, Image]) -> float:
        _, image = pair
        black = Image(luma=np.zeros_like(image.luma))
        return uqi_stabilized(image, black).value

    values = _map_ordered(score, loaded, jobs)

    grouped: dict[Background, list[tuple[CaptureConfig, float]]] = {}
    for (capture, _), value in zip(loaded, values):
        grouped.setdefault(capture.background, []).append((capture, value))

    aggregates = []
    for background in sorted(grouped, key=lambda b: b.value):
        rows = grouped[background]
        scores = np.array([v for _, v in rows], dtype=np.float64)
        mean = float(scores.mean())
        std = float(math.sqrt(float(((scores - mean) ** 2).mean())))
        aggregates.append((background, rows, mean, std))

    # Highest mean first; ties by lower spread, then id.
    aggregates.sort(key=lambda item: (-item[2], item[3], item[0].value))
    return [
        BackgroundScore(
            background=background,
            per_condition=tuple(rows),
            mean=mean,
            std=std,
            rank=position,
        )
        for position, (background, rows, mean, std) in enumerate(aggregates, start=1)
    ]


_LADDER_ORDER = tuple(ExposureLabel)  # EEU .. EEO, EV descending


def exposure_curve(manifest: Manifest, jobs: int | None = None) -> list[DegradationCurve]:
    """Per (camera, lamp) group, multi-scale similarity of every ladder
    step against the group's EX0 capture.

    Curves are returned sorted by (camera, lamp); points are ordered by
    EV descending.  A group without an EX0 capture is an error (also
    caught by validation).
    """
    _checked_manifest(manifest, ExperimentKind.EXPOSURE_TEST)
    loaded = load_captures(manifest)

    groups: dict[tuple[Camera, Lamp], list[tuple[CaptureConfig, Image]]] = {}
    for capture, image in loaded:
        groups.setdefault((capture.camera, capture.lamp), []).append((capture, image))

    tasks: list[tuple[Camera, Lamp, ExposureLabel, Image, Image]] = []
    layout: list[tuple[tuple[Camera, Lamp], list[ExposureLabel]]] = []
    for (camera, lamp), members in sorted(
        groups.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
    ):
        by_label: dict[ExposureLabel, Image] = {}
        for capture, image in members:
            if capture.exposure in by_label:
                raise AnalysisError(
                    f"group ({camera.value}, {lamp.value}) has duplicate "
                    f"{capture.exposure.value} captures"
                )
            by_label[capture.exposure] = image
        if ExposureLabel.EX0 not in by_label:
            raise AnalysisError(
                f"group ({camera.value}, {lamp.value}) has no EX0 reference capture"
            )
        reference = by_label[ExposureLabel.EX0]
        labels = [label for label in _LADDER_ORDER if label in by_label]
        layout.append(((camera, lamp), labels))
        for label in labels:
            tasks.append((camera, lamp, label, by_label[label], reference))

    def score(task: tuple[Camera, Lamp, ExposureLabel, Image, Image]) -> float:
        _, _, _, image, reference = task
        return ms_ssim(image, reference).value

    values = _map_ordered(score, tasks, jobs)

    curves: list[DegradationCurve] = []
    cursor = 0
    for (camera, lamp), labels in layout:
        points = []
        for label in labels:
            points.append(CurvePoint(label=label, ev=ladder_ev(label), score=values[cursor]))
            cursor += 1
        curves.append(DegradationCurve(camera=camera, lamp=lamp, points=tuple(points)))
    return curves


# Under/over ladder pairs at equal stop distance from EX0.
SYMMETRY_PAIRS: tuple[tuple[ExposureLabel, ExposureLabel], ...] = (
    (ExposureLabel.EEU, ExposureLabel.EEO),
    (ExposureLabel.EU3, ExposureLabel.EO3),
    (ExposureLabel.EU2, ExposureLabel.EO2),
    (ExposureLabel.EU1, ExposureLabel.EO1),
)


def symmetry_index(curve: DegradationCurve) -> float:
    """Mean absolute score gap across the four under/over pairs.

    Zero means degradation is perfectly symmetric about EX0; larger
    values mean one side of the ladder degrades faster.
    """
    by_label = {point.label: point.score for point in curve.points}
    gaps = []
    for under, over in SYMMETRY_PAIRS:
        if under not in by_label or over not in by_label:
            raise AnalysisError(
                f"symmetry index needs both {under.value} and {over.value} points"
            )
        gaps.append(abs(by_label[under] - by_label[over]))
    return float(sum(gaps) / len(gaps))
