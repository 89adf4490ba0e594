"""Image container, binary anymap codec, luma conversion, and cropping.

Images are owned, immutable 2-D grids of normalized luminance samples in
[0, 1] (float64), optionally carrying the RGB planes they were derived
from.  The mandatory interchange format is the binary netpbm family:
``P5`` (grayscale) and ``P6`` (RGB), maxval 255, one byte per sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ParseError, UnsupportedFormat

# ITU-R BT.601 luma weights.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114

_WHITESPACE = b" \t\r\n\x0b\x0c"


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable raster: luma grid plus optional RGB planes.

    luma is row-major with shape (height, width); rgb, when present,
    has shape (height, width, 3).  All samples live in [0, 1].
    bit_depth_source records the sample depth of the decoded origin
    (8 for the mandatory path; synthetic images use 8 nominally).
    """

    luma: np.ndarray
    rgb: np.ndarray | None = None
    bit_depth_source: int = 8

    def __post_init__(self) -> None:
        luma = np.array(self.luma, dtype=np.float64, copy=True)
        if luma.ndim != 2 or luma.shape[0] < 1 or luma.shape[1] < 1:
            raise ValueError(f"luma must be a 2-D grid, got shape {luma.shape}")
        if not np.all(np.isfinite(luma)) or luma.min() < 0.0 or luma.max() > 1.0:
            raise ValueError("luma samples must be finite and within [0, 1]")
        luma.flags.writeable = False
        object.__setattr__(self, "luma", luma)

        if self.rgb is not None:
            rgb = np.array(self.rgb, dtype=np.float64, copy=True)
            if rgb.shape != (*luma.shape, 3):
                raise ValueError(
                    f"rgb shape {rgb.shape} does not match luma shape {luma.shape}"
                )
            if not np.all(np.isfinite(rgb)) or rgb.min() < 0.0 or rgb.max() > 1.0:
                raise ValueError("rgb samples must be finite and within [0, 1]")
            rgb.flags.writeable = False
            object.__setattr__(self, "rgb", rgb)

        if self.bit_depth_source != 8:
            raise ValueError("only 8-bit sources are supported")

    @property
    def width(self) -> int:
        return int(self.luma.shape[1])

    @property
    def height(self) -> int:
        return int(self.luma.shape[0])


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop window: offset (x0, y0), size (width, height)."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("crop offsets must be non-negative")
        if self.width < 1 or self.height < 1:
            raise ValueError("crop size must be at least 1x1")


def _tokenize_header(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, honouring comments.

    A ``#`` starts a comment running to end of line, allowed anywhere
    whitespace is.  Returns the tokens and the offset one byte past the
    single whitespace character that terminates the last token.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and (data[i : i + 1] in _WHITESPACE or data[i : i + 1] == b"#"):
            if data[i : i + 1] == b"#":
                while i < n and data[i] not in b"\n\r":
                    i += 1
            else:
                i += 1
        start = i
        while i < n and data[i : i + 1] not in _WHITESPACE and data[i : i + 1] != b"#":
            i += 1
        if i == start:
            raise ParseError("truncated anymap header")
        tokens.append(data[start:i])
        if len(tokens) == count:
            # Exactly one whitespace byte separates maxval from the payload.
            if i >= n or data[i : i + 1] not in _WHITESPACE:
                raise ParseError("missing whitespace after anymap header")
            i += 1
    return tokens, i


def decode_raster(data: bytes) -> Image:
    """Decode binary P5/P6 bytes into an Image.

    Samples are normalized to [0, 1] by dividing by the maxval (255 on
    the mandatory path).  For P6 the luma plane is derived with the
    BT.601 weights and the RGB planes are preserved.
    """
    if len(data) < 2:
        raise ParseError("payload too short for an anymap magic number")
    magic = data[0:2]
    if magic not in (b"P5", b"P6"):
        if magic in (b"P1", b"P2", b"P3", b"P4", b"P7"):
            raise UnsupportedFormat(f"anymap variant {magic.decode('ascii')} not supported")
        raise ParseError("not a binary anymap (bad magic number)")

    tokens, offset = _tokenize_header(data[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ParseError(f"non-numeric anymap header field: {exc}") from exc
    if width < 1 or height < 1:
        raise ParseError(f"invalid anymap dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"maxval {maxval} not supported (8-bit path requires 255)")

    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    payload = data[offset : offset + need]
    if len(payload) < need:
        raise ParseError(
            f"truncated anymap payload: expected {need} bytes, got {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0

    if channels == 1:
        return Image(luma=samples.reshape(height, width))
    rgb = samples.reshape(height, width, 3)
    luma = np.clip(rgb[:, :, 0] * _LUMA_R + rgb[:, :, 1] * _LUMA_G + rgb[:, :, 2] * _LUMA_B, 0.0, 1.0)
    return Image(luma=luma, rgb=rgb)


def encode_raster(image: Image) -> bytes:
    """Encode an Image back to binary anymap bytes (P6 if RGB is present).

    Samples are scaled by 255 and rounded to nearest (ties to even);
    decode(encode(img)) is bit-exact for images whose samples are
    exact multiples of 1/255, which covers everything decoded from the
    8-bit path.
    """
    if image.rgb is not None:
        magic, plane = b"P6", image.rgb
    else:
        magic, plane = b"P5", image.luma
    header = magic + b"\n%d %d\n255\n" % (image.width, image.height)
    samples = np.rint(plane * 255.0).astype(np.uint8)
    return header + samples.tobytes()


def to_luma(image: Image) -> Image:
    """Collapse RGB planes to BT.601 luma; grayscale input is returned unchanged."""
    if image.rgb is None:
        return image
    return Image(luma=image.luma, rgb=None, bit_depth_source=image.bit_depth_source)


def crop(image: Image, rect: CropRect) -> Image:
    """Extract the axis-aligned sub-image described by rect."""
    if rect.x0 + rect.width > image.width or rect.y0 + rect.height > image.height:
        raise BoundsError(
            f"crop {rect} exceeds image bounds {image.width}x{image.height}"
        )
    ys = slice(rect.y0, rect.y0 + rect.height)
    xs = slice(rect.x0, rect.x0 + rect.width)
    rgb = image.rgb[ys, xs, :] if image.rgb is not None else None
    return Image(luma=image.luma[ys, xs], rgb=rgb, bit_depth_source=image.bit_depth_source)
