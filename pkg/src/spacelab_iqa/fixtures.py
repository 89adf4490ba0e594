"""Synthetic test scenes: flats, gradients, checkerboards, and a composite
satellite-like scene, plus exposure sweeps derived from them.

Determinism contract: identical scene spec (kind, parameters, size)
produces byte-identical images on every run and platform.  The only
randomness source is a counter-based hash (splitmix64 finalizer over
``seed XOR counter * GOLDEN``), fully specified below, so independent
reimplementations can reproduce fixtures exactly:

    z = (seed ^ (counter * 0x9E3779B97F4A7C15)) mod 2^64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    z =  (z ^ (z >> 31))
    unit = z / 2^64                    # uniform in [0, 1)

Pixel counters are ``row * width + column``; scene-level draws use
fixed counter offsets of 2^40 and above so they never collide with
pixel noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .dataset import (
    REFERENCE_EX0_PER_GROUP,
    REFERENCE_SYNTHETIC_BLACK,
    WHITE_BALANCE_GAINS,
    Background,
    Camera,
    CaptureConfig,
    ExperimentKind,
    Lamp,
    LightAngle,
    LightIntensity,
    LightPosition,
    Manifest,
    render_manifest,
)
from .errors import DomainError, ShapeError
from .exposure import STOP_OFFSET, ExposureLabel, simulate_exposure
from .imaging import Image, encode_raster

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

# Counter blocks for scene-level (non-pixel) draws.
_CTR_VERTEX_ANGLE = 1 << 40
_CTR_VERTEX_RADIUS = 2 << 40
_CTR_FACET_LEVEL = 3 << 40


def hash_unit(seed: int, counter: int) -> float:
    """Scalar reference implementation of the counter hash (see module doc)."""
    z = (seed ^ ((counter * _GOLDEN) & _MASK)) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    z = z ^ (z >> 31)
    return z / 2.0**64


def _hash_unit_array(seed: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized counter hash; bit-identical to hash_unit per element."""
    z = np.uint64(seed) ^ (counters.astype(np.uint64) * np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return z.astype(np.float64) / 2.0**64


@dataclass(frozen=True)
class Flat:
    """Uniform field at a single level."""

    level: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.level <= 1.0:
            raise DomainError(f"flat level {self.level} outside [0, 1]")


@dataclass(frozen=True)
class LinearGradient:
    """Linear ramp from lo to hi along one axis ('horizontal' or 'vertical').

    Along an axis of extent n, sample i sits at lo + (hi-lo) * i/(n-1);
    a single-sample extent degenerates to all-lo.
    """

    lo: float
    hi: float
    axis: str = "horizontal"

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= 1.0 and 0.0 <= self.hi <= 1.0):
            raise DomainError("gradient endpoints must lie in [0, 1]")
        if self.axis not in ("horizontal", "vertical"):
            raise DomainError(f"gradient axis must be horizontal|vertical, got {self.axis!r}")


@dataclass(frozen=True)
class Checker:
    """Checkerboard of square cells alternating between two levels."""

    cell: int
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.cell < 1:
            raise DomainError(f"checker cell must be >= 1, got {self.cell}")
        if not (0.0 <= self.lo <= 1.0 and 0.0 <= self.hi <= 1.0):
            raise DomainError("checker levels must lie in [0, 1]")


@dataclass(frozen=True)
class CompositeScene:
    """Bright faceted polygon over a near-black noisy field, seeded."""

    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")


SceneKind = Union[Flat, LinearGradient, Checker, CompositeScene]


@dataclass(frozen=True)
class SceneSpec:
    """A scene recipe plus raster size."""

    kind: SceneKind
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ShapeError(f"scene size must be >= 1x1, got {self.width}x{self.height}")


def _ramp(n: int, lo: float, hi: float) -> np.ndarray:
    if n == 1:
        return np.full(1, lo)
    return lo + (hi - lo) * (np.arange(n, dtype=np.float64) / (n - 1))


def _composite_field(spec: SceneSpec, scene: CompositeScene) -> np.ndarray:
    w, h = spec.width, spec.height
    seed = scene.seed
    cols, rows = np.meshgrid(np.arange(w), np.arange(h))

    # Near-black field with per-pixel noise; amplitude spans several
    # 8-bit levels so quantized copies keep non-zero variance everywhere.
    counters = (rows * w + cols).astype(np.uint64)
    field = 0.012 + 0.025 * _hash_unit_array(seed, counters)

    # Star-shaped faceted polygon (a fan of K triangles around a center).
    k = 6
    cx, cy = 0.5 * (w - 1), 0.45 * (h - 1)
    radius = 0.30 * min(w, h)
    angles = np.empty(k)
    radii = np.empty(k)
    for i in range(k):
        jitter = (hash_unit(seed, _CTR_VERTEX_ANGLE + i) - 0.5) * (np.pi / 9.0)
        angles[i] = 2.0 * np.pi * i / k + jitter
        radii[i] = radius * (0.75 + 0.25 * hash_unit(seed, _CTR_VERTEX_RADIUS + i))
    vx = cx + radii * np.cos(angles)
    vy = cy + radii * np.sin(angles)

    px = cols.astype(np.float64)
    py = rows.astype(np.float64)
    dist = np.hypot(px - cx, py - cy)
    shade = 0.78 + 0.22 * np.clip(dist / radius, 0.0, 1.0)

    out = field
    for i in range(k):
        j = (i + 1) % k
        # Point-in-triangle (center, vertex i, vertex j) via two
        # half-plane tests against the fan edges plus the outer edge.
        ax, ay = cx, cy
        bx, by = vx[i], vy[i]
        qx, qy = vx[j], vy[j]
        d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        d2 = (qx - bx) * (py - by) - (qy - by) * (px - bx)
        d3 = (ax - qx) * (py - qy) - (ay - qy) * (px - qx)
        inside = ((d1 >= 0) & (d2 >= 0) & (d3 >= 0)) | ((d1 <= 0) & (d2 <= 0) & (d3 <= 0))
        level = 0.5 + 0.4 * hash_unit(seed, _CTR_FACET_LEVEL + i)
        out = np.where(inside, level * shade, out)
    return np.clip(out, 0.0, 1.0)


def generate(spec: SceneSpec) -> Image:
    """Render a scene spec to an Image (luma only)."""
    w, h = spec.width, spec.height
    kind = spec.kind
    if isinstance(kind, Flat):
        grid = np.full((h, w), kind.level, dtype=np.float64)
    elif isinstance(kind, LinearGradient):
        if kind.axis == "horizontal":
            grid = np.tile(_ramp(w, kind.lo, kind.hi), (h, 1))
        else:
            grid = np.tile(_ramp(h, kind.lo, kind.hi)[:, None], (1, w))
    elif isinstance(kind, Checker):
        ys, xs = np.meshgrid(np.arange(h) // kind.cell, np.arange(w) // kind.cell, indexing="ij")
        grid = np.where((ys + xs) % 2 == 0, kind.lo, kind.hi).astype(np.float64)
    elif isinstance(kind, CompositeScene):
        grid = _composite_field(spec, kind)
    else:
        raise DomainError(f"unknown scene kind {kind!r}")
    return Image(luma=grid)


def exposure_sweep(spec: SceneSpec, offsets: list[float] | tuple[float, ...]) -> list[tuple[float, Image]]:
    """Render the scene once and return (offset, exposed image) pairs.

    Each frame is the base scene pushed by the given stop offset
    (scaled by 2**offset in linear light, clamped to [0, 1]).
    """
    base = generate(spec)
    return [(float(off), simulate_exposure(base, float(off))) for off in offsets]


def quantize(image: Image, bits: int) -> Image:
    """Requantize samples to the given bit depth (models sensor depth)."""
    if not 1 <= bits <= 16:
        raise DomainError(f"bits must be within 1..16, got {bits}")
    levels = float(2**bits - 1)
    luma = np.rint(image.luma * levels) / levels
    rgb = np.rint(image.rgb * levels) / levels if image.rgb is not None else None
    return Image(luma=luma, rgb=rgb, bit_depth_source=image.bit_depth_source)


# --- ready-to-analyze synthetic suites --------------------------------------

# Base luminance per background, darkest first: the ground-truth ranking
# of a synthetic suite is BG0 (best) .. BG4 (worst) by construction.
_SUITE_BASE_LEVEL = {
    "BG0": 0.02,
    "BG1": 0.06,
    "BG2": 0.12,
    "BG3": 0.22,
    "BG4": 0.35,
}
# Per-condition brightness factors; applied multiplicatively they keep
# the background ordering intact under every condition.
_SUITE_INTENSITY_FACTOR = {"LIH": 1.0, "LIL": 0.4}
_SUITE_LAMP_FACTOR = {"LAMP0": 1.0, "LAMP1": 0.85, "LAMP2": 0.7}
_SUITE_ANGLE_FACTOR = {"LA0": 1.0, "LA1": 0.9, "LA2": 0.8, "LA3": 0.7, "LA4": 0.6}

# Simulated sensor depth per camera: the high-quality camera keeps
# 8-bit samples, the low-quality one only 6, so its sweeps lose
# structure at least as fast at every offset.
_SUITE_CAMERA_BITS = {"HQ": 8, "LQ": 6}


def write_background_suite(out_dir: str | Path, size: int = 64) -> Path:
    """Write a synthetic background test: 5 backgrounds x 30 conditions.

    Each capture is a flat field at base_level(background) x
    condition_factor, written as 8-bit P5 under ``images/``, plus a
    ready manifest ``background_suite.toml``.  Returns the manifest path.
    """
    root = Path(out_dir)
    (root / "images").mkdir(parents=True, exist_ok=True)
    captures = []
    for bg_token, base in _SUITE_BASE_LEVEL.items():
        for lamp_token, lamp_factor in _SUITE_LAMP_FACTOR.items():
            for li_token, li_factor in _SUITE_INTENSITY_FACTOR.items():
                for la_token, la_factor in _SUITE_ANGLE_FACTOR.items():
                    level = base * lamp_factor * li_factor * la_factor
                    name = f"{bg_token}_{li_token}_{lamp_token}_{la_token}_EX0"
                    rel = f"images/{name.lower()}.pgm"
                    image = generate(SceneSpec(kind=Flat(level=level), width=size, height=size))
                    (root / rel).write_bytes(encode_raster(image))
                    captures.append(
                        CaptureConfig(
                            name=name,
                            camera=Camera.LQ,
                            background=Background(bg_token),
                            lamp=Lamp(lamp_token),
                            intensity=LightIntensity(li_token),
                            exposure=ExposureLabel.EX0,
                            image_path=rel,
                            light_angle=LightAngle(la_token),
                            wb_gains=WHITE_BALANCE_GAINS[Camera.LQ],
                        )
                    )
    manifest = Manifest(
        experiment_id="background-suite",
        kind=ExperimentKind.BACKGROUND_TEST,
        reference=REFERENCE_SYNTHETIC_BLACK,
        captures=tuple(captures),
        base_dir=root,
    )
    manifest_path = root / "background_suite.toml"
    manifest_path.write_text(render_manifest(manifest), encoding="utf-8", newline="")
    return manifest_path


def write_exposure_suite(out_dir: str | Path, size: int = 256, seed: int = 11) -> Path:
    """Write a synthetic exposure test: 2 cameras x 9 ladder steps.

    Both cameras sweep the same composite scene from -4 to +4 stops;
    the HQ capture chain quantizes to 8 bits, LQ to 6 (coarser sensor
    depth).  Returns the path of ``exposure_suite.toml``.
    """
    root = Path(out_dir)
    (root / "images").mkdir(parents=True, exist_ok=True)
    spec = SceneSpec(kind=CompositeScene(seed=seed), width=size, height=size)
    frames = exposure_sweep(spec, [STOP_OFFSET[label] for label in ExposureLabel])
    captures = []
    for camera_token, bits in _SUITE_CAMERA_BITS.items():
        camera = Camera(camera_token)
        for label, (_, frame) in zip(ExposureLabel, frames):
            name = f"{camera_token}_LAMP0_LI0_LP0_{label.value}"
            rel = f"images/{name.lower()}.pgm"
            (root / rel).write_bytes(encode_raster(quantize(frame, bits)))
            captures.append(
                CaptureConfig(
                    name=name,
                    camera=camera,
                    background=Background.BG0,
                    lamp=Lamp.LAMP0,
                    intensity=LightIntensity.LI0,
                    exposure=label,
                    image_path=rel,
                    light_position=LightPosition.LP0,
                    wb_gains=WHITE_BALANCE_GAINS[camera],
                )
            )
    manifest = Manifest(
        experiment_id="exposure-suite",
        kind=ExperimentKind.EXPOSURE_TEST,
        reference=REFERENCE_EX0_PER_GROUP,
        captures=tuple(captures),
        base_dir=root,
    )
    manifest_path = root / "exposure_suite.toml"
    manifest_path.write_text(render_manifest(manifest), encoding="utf-8", newline="")
    return manifest_path


def parse_scene_spec(text: str) -> SceneSpec:
    """Parse the CLI scene grammar.

    Forms (all fields separated by ':'):

    * ``flat:LEVEL:WxH``
    * ``gradient:LO:HI:h|v:WxH``
    * ``checker:CELL:LO:HI:WxH``
    * ``composite:SEED:WxH``
    """
    parts = text.strip().split(":")
    try:
        kind_name = parts[0]
        if kind_name == "flat" and len(parts) == 3:
            kind: SceneKind = Flat(level=float(parts[1]))
        elif kind_name == "gradient" and len(parts) == 5:
            axis = {"h": "horizontal", "v": "vertical"}[parts[3]]
            kind = LinearGradient(lo=float(parts[1]), hi=float(parts[2]), axis=axis)
        elif kind_name == "checker" and len(parts) == 5:
            kind = Checker(cell=int(parts[1]), lo=float(parts[2]), hi=float(parts[3]))
        elif kind_name == "composite" and len(parts) == 3:
            kind = CompositeScene(seed=int(parts[1]))
        else:
            raise DomainError(
                f"unrecognized scene descriptor {text!r} "
                "(expected flat:|gradient:|checker:|composite:)"
            )
        size = parts[-1].lower().split("x")
        if len(size) != 2:
            raise DomainError(f"scene size must look like WxH, got {parts[-1]!r}")
        return SceneSpec(kind=kind, width=int(size[0]), height=int(size[1]))
    except (ValueError, KeyError) as exc:
        raise DomainError(f"cannot parse scene descriptor {text!r}: {exc}") from exc
