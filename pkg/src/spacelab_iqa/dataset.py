"""Capture metadata, dataset manifests, and ingestion.

The lab geometry and condition vocabulary is defined once, here:

* cameras ``LQ`` / ``HQ`` with fixed white-balance gains,
* backgrounds ``BG0..BG4``,
* lamps ``LAMP0`` (collimator), ``LAMP1`` (reflector), ``LAMP2`` (bare),
* intensities ``LIL`` (10 %), ``LIH`` (100 %), and the per-lamp
  reference level ``LI0`` (75 / 25 / 30 % for LAMP0/1/2),
* elevation angles ``LA0..LA4`` at 90/70/50/30/10 degrees,
* azimuth positions ``LP0..LP8`` (30/45/90/150/180/330/360 degrees,
  plus top and under placements).

A manifest is a human-editable UTF-8 text file.  Grammar: ``#`` starts
a comment; the file opens with top-level ``key = value`` pairs
(``experiment_id``, ``kind``, ``reference``) and then one
``[capture]`` (or ``[[capture]]``) section per capture, each holding
``key = value`` pairs.  Values are quoted strings, bare tokens, or
numbers.  Image paths are resolved relative to the manifest location.

Capture names follow an underscore-token convention, e.g.
``CP0_LIH_EX0_LA0``: each token is looked up against the condition
vocabulary (camera, background, lamp, intensity, angle, position,
exposure label, and the fixed camera-position anchor ``CP0``).
Unrecognized tokens are reported, not fatal; a name with no
recognizable token at all is an error.  Parsed names are a
convenience only - manifest fields are authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import (
    BoundsError,
    IngestError,
    ManifestError,
    NameConventionError,
    ParseError,
    UnsupportedFormat,
)
from .exposure import ExposureLabel
from .imaging import CropRect, Image, crop, decode_raster, to_luma


class Camera(str, Enum):
    LQ = "LQ"
    HQ = "HQ"


class Background(str, Enum):
    BG0 = "BG0"  # black velvet fabric
    BG1 = "BG1"  # musou paint
    BG2 = "BG2"  # black 3.0 paint
    BG3 = "BG3"  # black paper
    BG4 = "BG4"  # neewer fabric


class Lamp(str, Enum):
    LAMP0 = "LAMP0"  # collimator head
    LAMP1 = "LAMP1"  # reflector head
    LAMP2 = "LAMP2"  # bare bulb


class LightIntensity(str, Enum):
    LIL = "LIL"  # low, 10 %
    LIH = "LIH"  # high, 100 %
    LI0 = "LI0"  # per-lamp reference level


class LightAngle(str, Enum):
    LA0 = "LA0"
    LA1 = "LA1"
    LA2 = "LA2"
    LA3 = "LA3"
    LA4 = "LA4"

    @property
    def degrees(self) -> int:
        return LIGHT_ANGLE_DEGREES[self]


class LightPosition(str, Enum):
    LP0 = "LP0"
    LP1 = "LP1"
    LP2 = "LP2"
    LP3 = "LP3"
    LP4 = "LP4"
    LP5 = "LP5"
    LP6 = "LP6"
    LP7 = "LP7"
    LP8 = "LP8"

    @property
    def degrees(self) -> int | None:
        return LIGHT_POSITION_DEGREES[self]

    @property
    def style(self) -> str:
        return LIGHT_POSITION_STYLE[self]


class ExperimentKind(str, Enum):
    BACKGROUND_TEST = "BackgroundTest"
    EXPOSURE_TEST = "ExposureTest"
    LIGHTING_TEST = "LightingTest"


LIGHT_ANGLE_DEGREES: dict[LightAngle, int] = {
    LightAngle.LA0: 90,
    LightAngle.LA1: 70,
    LightAngle.LA2: 50,
    LightAngle.LA3: 30,
    LightAngle.LA4: 10,
}

LIGHT_POSITION_DEGREES: dict[LightPosition, int | None] = {
    LightPosition.LP0: 30,
    LightPosition.LP1: 45,
    LightPosition.LP2: 90,
    LightPosition.LP3: 150,
    LightPosition.LP4: 180,
    LightPosition.LP5: 330,
    LightPosition.LP6: 360,
    LightPosition.LP7: None,  # overhead placement
    LightPosition.LP8: None,  # under placement
}

LIGHT_POSITION_STYLE: dict[LightPosition, str] = {
    LightPosition.LP0: "Loop",
    LightPosition.LP1: "Rembrandt",
    LightPosition.LP2: "Side",
    LightPosition.LP3: "Rim",
    LightPosition.LP4: "Back",
    LightPosition.LP5: "Broad",
    LightPosition.LP6: "Front",
    LightPosition.LP7: "Top",
    LightPosition.LP8: "Under",
}

# Dimmer setting (percent) that equalizes the lamps' delivered light.
LI0_PERCENT_BY_LAMP: dict[Lamp, float] = {
    Lamp.LAMP0: 75.0,
    Lamp.LAMP1: 25.0,
    Lamp.LAMP2: 30.0,
}

_FIXED_INTENSITY_PERCENT: dict[LightIntensity, float] = {
    LightIntensity.LIL: 10.0,
    LightIntensity.LIH: 100.0,
}

WHITE_BALANCE_GAINS: dict[Camera, tuple[float, float]] = {
    Camera.LQ: (1.4883, 1.2539),  # (red, blue)
    Camera.HQ: (3.1484, 1.5781),
}

# Rig distances, centimeters (camera->object, object->background, camera->background).
CAMERA_TO_OBJECT_CM = 140.0
OBJECT_TO_BACKGROUND_CM = 56.0
CAMERA_TO_BACKGROUND_CM = 196.0

# The fixed camera mount token recognized in capture names.
CAMERA_POSITION_ANCHOR = "CP0"

REFERENCE_SYNTHETIC_BLACK = "synthetic-black"
REFERENCE_EX0_PER_GROUP = "ex0-per-group"


def intensity_percent(intensity: LightIntensity, lamp: Lamp) -> float:
    """Dimmer percentage of an intensity code (LI0 depends on the lamp)."""
    if intensity is LightIntensity.LI0:
        return LI0_PERCENT_BY_LAMP[lamp]
    return _FIXED_INTENSITY_PERCENT[intensity]


@dataclass(frozen=True)
class CaptureConfig:
    """Full acquisition condition of one capture."""

    name: str
    camera: Camera
    background: Background
    lamp: Lamp
    intensity: LightIntensity
    exposure: ExposureLabel
    image_path: str
    light_angle: LightAngle | None = None
    light_position: LightPosition | None = None
    wb_gains: tuple[float, float] | None = None
    crop: CropRect | None = None


@dataclass(frozen=True)
class Manifest:
    """One experiment: id, kind, reference policy, and its captures."""

    experiment_id: str
    kind: ExperimentKind
    reference: str
    captures: tuple[CaptureConfig, ...]
    base_dir: Path = field(default=Path("."), compare=False)

    def resolve_image_path(self, capture: CaptureConfig) -> Path:
        return self.base_dir / capture.image_path


@dataclass(frozen=True)
class ParsedCaptureName:
    """Fields recovered from an underscore-token capture name."""

    camera: Camera | None = None
    background: Background | None = None
    lamp: Lamp | None = None
    intensity: LightIntensity | None = None
    light_angle: LightAngle | None = None
    light_position: LightPosition | None = None
    exposure: ExposureLabel | None = None
    recognized: tuple[str, ...] = ()
    unrecognized: tuple[str, ...] = ()


def parse_capture_name(name: str) -> ParsedCaptureName:
    """Recover condition fields from a token-coded capture name.

    Later duplicate tokens of the same family overwrite earlier ones.
    Raises NameConventionError when nothing at all is recognizable.
    """
    tokens = [t for t in name.strip().split("_") if t]
    fields: dict[str, object] = {}
    recognized: list[str] = []
    unrecognized: list[str] = []
    families: list[tuple[str, type[Enum]]] = [
        ("camera", Camera),
        ("background", Background),
        ("lamp", Lamp),
        ("intensity", LightIntensity),
        ("light_angle", LightAngle),
        ("light_position", LightPosition),
        ("exposure", ExposureLabel),
    ]
    for token in tokens:
        if token == CAMERA_POSITION_ANCHOR:
            recognized.append(token)  # fixed rig anchor, carries no field
            continue
        for field_name, enum_type in families:
            try:
                fields[field_name] = enum_type(token)
            except ValueError:
                continue
            recognized.append(token)
            break
        else:
            unrecognized.append(token)
    if not recognized:
        raise NameConventionError(
            f"capture name {name!r} contains no recognizable condition tokens"
        )
    return ParsedCaptureName(
        recognized=tuple(recognized), unrecognized=tuple(unrecognized), **fields
    )


def render_capture_name(parsed: ParsedCaptureName) -> str:
    """Canonical name for the populated fields (parse round-trips it)."""
    tokens = [
        enum_member.value
        for enum_member in (
            parsed.camera,
            parsed.background,
            parsed.lamp,
            parsed.intensity,
            parsed.exposure,
            parsed.light_angle,
            parsed.light_position,
        )
        if enum_member is not None
    ]
    if not tokens:
        raise NameConventionError("cannot render a name from zero populated fields")
    return "_".join(tokens)


# --- manifest text grammar -------------------------------------------------


def _parse_scalar(raw: str, key: str, line_no: int) -> str:
    value = raw.strip()
    if value.startswith('"') and value.endswith('"') and len(value) >= 2:
        return value[1:-1]
    if value.startswith('"') or value.endswith('"'):
        raise ManifestError(f"line {line_no}: unbalanced quotes in value for {key!r}")
    return value


def _strip_comment(line: str) -> str:
    out = []
    in_quotes = False
    for ch in line:
        if ch == '"':
            in_quotes = not in_quotes
        if ch == "#" and not in_quotes:
            break
        out.append(ch)
    return "".join(out)


def _build_capture(raw: dict[str, str], base_dir: Path, ordinal: int) -> CaptureConfig:
    where = raw.get("name") or f"capture #{ordinal}"

    def need(key: str) -> str:
        if key not in raw:
            raise ManifestError(f"{where}: missing required key {key!r}")
        return raw[key]

    def as_enum(enum_type: type[Enum], key: str) -> Enum:
        token = need(key)
        try:
            return enum_type(token)
        except ValueError as exc:
            raise ManifestError(f"{where}: bad {key} token {token!r}") from exc

    camera = as_enum(Camera, "camera")
    background = as_enum(Background, "background")
    lamp = as_enum(Lamp, "lamp")
    intensity = as_enum(LightIntensity, "intensity")
    exposure = as_enum(ExposureLabel, "exposure")
    image_path = need("image")

    light_angle = None
    if "light_angle" in raw:
        light_angle = as_enum(LightAngle, "light_angle")
    light_position = None
    if "light_position" in raw:
        light_position = as_enum(LightPosition, "light_position")

    wb_gains = None
    if "wb_red" in raw or "wb_blue" in raw:
        try:
            wb_gains = (float(need("wb_red")), float(need("wb_blue")))
        except ValueError as exc:
            raise ManifestError(f"{where}: white-balance gains must be numeric") from exc

    crop_rect = None
    if "crop" in raw:
        parts = [p.strip() for p in raw["crop"].split(",")]
        if len(parts) != 4:
            raise ManifestError(f"{where}: crop must be 'x0,y0,width,height'")
        try:
            crop_rect = CropRect(*(int(p) for p in parts))
        except ValueError as exc:
            raise ManifestError(f"{where}: bad crop rectangle: {exc}") from exc

    name = raw.get("name") or Path(image_path).stem
    return CaptureConfig(
        name=name,
        camera=camera,
        background=background,
        lamp=lamp,
        intensity=intensity,
        exposure=exposure,
        image_path=image_path,
        light_angle=light_angle,
        light_position=light_position,
        wb_gains=wb_gains,
        crop=crop_rect,
    )


def parse_manifest(text: str, base_dir: str | Path = ".") -> Manifest:
    """Parse manifest text (see module docstring for the grammar)."""
    base = Path(base_dir)
    top: dict[str, str] = {}
    sections: list[dict[str, str]] = []
    current: dict[str, str] | None = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if line.startswith("["):
            header = line.strip("[]").strip()
            if header != "capture":
                raise ManifestError(f"line {line_no}: unknown section [{header}]")
            current = {}
            sections.append(current)
            continue
        if "=" not in line:
            raise ManifestError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        if not key:
            raise ManifestError(f"line {line_no}: empty key")
        value = _parse_scalar(raw_value, key, line_no)
        target = top if current is None else current
        if key in target:
            raise ManifestError(f"line {line_no}: duplicate key {key!r}")
        target[key] = value

    if "experiment_id" not in top or not top["experiment_id"]:
        raise ManifestError("manifest must declare experiment_id")
    if "kind" not in top:
        raise ManifestError("manifest must declare kind")
    try:
        kind = ExperimentKind(top["kind"])
    except ValueError as exc:
        raise ManifestError(f"unknown experiment kind {top['kind']!r}") from exc
    default_reference = (
        REFERENCE_EX0_PER_GROUP
        if kind is ExperimentKind.EXPOSURE_TEST
        else REFERENCE_SYNTHETIC_BLACK
    )
    reference = top.get("reference", default_reference)

    captures = tuple(
        _build_capture(section, base, ordinal)
        for ordinal, section in enumerate(sections, start=1)
    )
    return Manifest(
        experiment_id=top["experiment_id"],
        kind=kind,
        reference=reference,
        captures=captures,
        base_dir=base,
    )


def load_manifest(path: str | Path) -> Manifest:
    """Read and parse a manifest file; image paths resolve against it."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_manifest(text, base_dir=p.parent)


def render_manifest(manifest: Manifest) -> str:
    """Serialize a manifest back to its text grammar."""
    lines = [
        f'experiment_id = "{manifest.experiment_id}"',
        f'kind = "{manifest.kind.value}"',
        f'reference = "{manifest.reference}"',
        "",
    ]
    for capture in manifest.captures:
        lines.append("[capture]")
        lines.append(f'name = "{capture.name}"')
        lines.append(f'camera = "{capture.camera.value}"')
        lines.append(f'background = "{capture.background.value}"')
        lines.append(f'lamp = "{capture.lamp.value}"')
        lines.append(f'intensity = "{capture.intensity.value}"')
        if capture.light_angle is not None:
            lines.append(f'light_angle = "{capture.light_angle.value}"')
        if capture.light_position is not None:
            lines.append(f'light_position = "{capture.light_position.value}"')
        lines.append(f'exposure = "{capture.exposure.value}"')
        lines.append(f'image = "{capture.image_path}"')
        if capture.wb_gains is not None:
            lines.append(f"wb_red = {capture.wb_gains[0]!r}")
            lines.append(f"wb_blue = {capture.wb_gains[1]!r}")
        if capture.crop is not None:
            c = capture.crop
            lines.append(f'crop = "{c.x0},{c.y0},{c.width},{c.height}"')
        lines.append("")
    return "\n".join(lines)


# --- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    """One validation observation."""

    severity: str  # "fatal" | "warning"
    capture: str | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not any(f.severity == "fatal" for f in self.findings)

    @property
    def fatal(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "fatal")


def validate(manifest: Manifest) -> ValidationReport:
    """Check a manifest against the experiment-kind rules.

    Deterministic and order-independent: findings depend only on the
    set of captures, not their order (the report is sorted).  Fatal
    findings make downstream analysis reject the manifest.
    """
    findings: list[Finding] = []

    def fatal(capture: str | None, message: str) -> None:
        findings.append(Finding(severity="fatal", capture=capture, message=message))

    def warn(capture: str | None, message: str) -> None:
        findings.append(Finding(severity="warning", capture=capture, message=message))

    if not manifest.captures:
        fatal(None, "manifest contains no captures")

    names = [c.name for c in manifest.captures]
    for name in sorted({n for n in names if names.count(n) > 1}):
        fatal(None, f"duplicate capture name {name!r}")

    kind = manifest.kind
    if kind is ExperimentKind.BACKGROUND_TEST and manifest.reference != REFERENCE_SYNTHETIC_BLACK:
        fatal(None, f"background test requires reference '{REFERENCE_SYNTHETIC_BLACK}'")
    if kind is ExperimentKind.EXPOSURE_TEST and manifest.reference != REFERENCE_EX0_PER_GROUP:
        fatal(None, f"exposure test requires reference '{REFERENCE_EX0_PER_GROUP}'")

    for capture in manifest.captures:
        if kind is ExperimentKind.BACKGROUND_TEST:
            if capture.light_angle is None:
                fatal(capture.name, "background test captures need light_angle")
            if capture.light_position is not None:
                fatal(capture.name, "background test captures must not set light_position")
        else:
            if capture.light_position is None:
                fatal(capture.name, f"{kind.value} captures need light_position")
            if capture.light_angle is not None:
                fatal(capture.name, f"{kind.value} captures must not set light_angle")

        if kind is ExperimentKind.EXPOSURE_TEST and capture.intensity is not LightIntensity.LI0:
            warn(capture.name, "exposure test normally runs at the LI0 reference intensity")

        if capture.wb_gains is not None:
            expected = WHITE_BALANCE_GAINS[capture.camera]
            if capture.wb_gains != expected:
                fatal(
                    capture.name,
                    f"white-balance gains {capture.wb_gains} do not match "
                    f"{capture.camera.value} calibration {expected}",
                )

        path = manifest.resolve_image_path(capture)
        if not path.is_file():
            fatal(capture.name, f"image file not found: {path}")
            continue
        try:
            image = decode_raster(path.read_bytes())
        except (ParseError, UnsupportedFormat, OSError) as exc:
            fatal(capture.name, f"image not decodable: {exc}")
            continue
        if capture.crop is not None:
            rect = capture.crop
            if rect.x0 + rect.width > image.width or rect.y0 + rect.height > image.height:
                fatal(
                    capture.name,
                    f"crop {rect} exceeds image bounds {image.width}x{image.height}",
                )

    if kind is ExperimentKind.EXPOSURE_TEST:
        groups: dict[tuple[str, str], list[CaptureConfig]] = {}
        for capture in manifest.captures:
            groups.setdefault((capture.camera.value, capture.lamp.value), []).append(capture)
        for (camera, lamp), members in sorted(groups.items()):
            ex0 = [c for c in members if c.exposure is ExposureLabel.EX0]
            if not ex0:
                fatal(None, f"group ({camera}, {lamp}) has no EX0 reference capture")
            elif len(ex0) > 1:
                fatal(None, f"group ({camera}, {lamp}) has {len(ex0)} EX0 captures")

    if manifest.reference.startswith("capture:"):
        target = manifest.reference.split(":", 1)[1]
        if target not in names:
            fatal(None, f"reference capture {target!r} not present in manifest")
    elif manifest.reference not in (REFERENCE_SYNTHETIC_BLACK, REFERENCE_EX0_PER_GROUP):
        fatal(None, f"unknown reference spec {manifest.reference!r}")

    ordered = sorted(findings, key=lambda f: (f.capture or "", f.severity, f.message))
    return ValidationReport(findings=tuple(ordered))


def load_captures(manifest: Manifest) -> list[tuple[CaptureConfig, Image]]:
    """Decode every capture: read, decode, crop if requested, reduce to luma.

    Returns (config, image) pairs in manifest order.  Any failure is
    wrapped in IngestError naming the capture.
    """
    out: list[tuple[CaptureConfig, Image]] = []
    for capture in manifest.captures:
        path = manifest.resolve_image_path(capture)
        try:
            image = decode_raster(path.read_bytes())
            if capture.crop is not None:
                image = crop(image, capture.crop)
            image = to_luma(image)
        except (OSError, ParseError, UnsupportedFormat, BoundsError) as exc:
            raise IngestError(f"capture {capture.name!r}: {exc}") from exc
        out.append((capture, image))
    return out
