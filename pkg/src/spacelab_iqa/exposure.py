"""Exposure-value arithmetic and the nine-step exposure ladder.

The exposure value of a camera setting (aperture N, shutter time t in
seconds, sensitivity ISO) is::

    ev = log2(N^2 / t) - log2(ISO / 100)

so one photographic stop equals exactly one EV: halving the shutter
time adds +1, doubling the ISO subtracts 1, and multiplying the
aperture number by sqrt(2) adds +1.

The ladder runs from four stops under to four stops over a reference
exposure, all at f/2 and ISO 100, varying only the shutter:

    ======  ========  ===========
    label   shutter   EV (nearest)
    ======  ========  ===========
    EEU     1/500     11
    EU3     1/250     10
    EU2     1/125      9
    EU1     1/60       8
    EX0     1/30       7   (reference)
    EO1     1/15       6
    EO2     1/8        5
    EO3     1/4        4
    EEO     1/2        3
    ======  ========  ===========
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .imaging import Image


@dataclass(frozen=True)
class ExposureTuple:
    """One camera setting: aperture number, shutter seconds, ISO."""

    aperture_n: float
    shutter_s: float
    iso: float

    def __post_init__(self) -> None:
        for name in ("aperture_n", "shutter_s", "iso"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")


def ev(t: ExposureTuple) -> float:
    """Exposure value of a setting (real-valued; see round_ev)."""
    return math.log2(t.aperture_n * t.aperture_n / t.shutter_s) - math.log2(t.iso / 100.0)


def round_ev(value: float) -> int:
    """Round an EV to the nearest integer, ties away from zero."""
    if not math.isfinite(value):
        raise DomainError(f"cannot round non-finite EV {value!r}")
    return int(math.floor(abs(value) + 0.5)) * (1 if value >= 0 else -1)


def stops_between(a: ExposureTuple, b: ExposureTuple) -> float:
    """Signed stop distance from setting a to setting b: ev(b) - ev(a)."""
    return ev(b) - ev(a)


def simulate_exposure(image: Image, stop_offset: float) -> Image:
    """Linear-light exposure shift: scale samples by 2**stop_offset, clamp to [0, 1].

    A zero offset is the identity.  Positive offsets brighten (and may
    clip highlights); negative offsets darken.
    """
    if not math.isfinite(stop_offset):
        raise DomainError(f"stop_offset must be finite, got {stop_offset!r}")
    if stop_offset == 0.0:
        return image
    gain = 2.0 ** stop_offset
    luma = np.clip(image.luma * gain, 0.0, 1.0)
    rgb = np.clip(image.rgb * gain, 0.0, 1.0) if image.rgb is not None else None
    return Image(luma=luma, rgb=rgb, bit_depth_source=image.bit_depth_source)


class ExposureLabel(str, Enum):
    """Ladder steps, most underexposed (EEU) to most overexposed (EEO)."""

    EEU = "EEU"
    EU3 = "EU3"
    EU2 = "EU2"
    EU1 = "EU1"
    EX0 = "EX0"
    EO1 = "EO1"
    EO2 = "EO2"
    EO3 = "EO3"
    EEO = "EEO"


_LADDER_SHUTTERS = {
    ExposureLabel.EEU: 1.0 / 500.0,
    ExposureLabel.EU3: 1.0 / 250.0,
    ExposureLabel.EU2: 1.0 / 125.0,
    ExposureLabel.EU1: 1.0 / 60.0,
    ExposureLabel.EX0: 1.0 / 30.0,
    ExposureLabel.EO1: 1.0 / 15.0,
    ExposureLabel.EO2: 1.0 / 8.0,
    ExposureLabel.EO3: 1.0 / 4.0,
    ExposureLabel.EEO: 1.0 / 2.0,
}

EXPOSURE_TABLE: dict[ExposureLabel, ExposureTuple] = {
    label: ExposureTuple(aperture_n=2.0, shutter_s=shutter, iso=100.0)
    for label, shutter in _LADDER_SHUTTERS.items()
}

# Stop offset of each ladder step relative to the EX0 reference.
STOP_OFFSET: dict[ExposureLabel, int] = {
    ExposureLabel.EEU: -4,
    ExposureLabel.EU3: -3,
    ExposureLabel.EU2: -2,
    ExposureLabel.EU1: -1,
    ExposureLabel.EX0: 0,
    ExposureLabel.EO1: 1,
    ExposureLabel.EO2: 2,
    ExposureLabel.EO3: 3,
    ExposureLabel.EEO: 4,
}


def ladder_ev(label: ExposureLabel) -> float:
    """Real-valued EV of a ladder step."""
    return ev(EXPOSURE_TABLE[label])


def parse_shutter(text: str) -> float:
    """Parse a shutter time: decimal seconds or a '1/N'-style fraction."""
    raw = text.strip()
    try:
        if "/" in raw:
            num_text, den_text = raw.split("/", 1)
            num, den = float(num_text), float(den_text)
            if den == 0:
                raise DomainError(f"shutter fraction {text!r} divides by zero")
            value = num / den
        else:
            value = float(raw)
    except ValueError as exc:
        raise DomainError(f"cannot parse shutter time {text!r}") from exc
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"shutter time must be positive, got {text!r}")
    return value
