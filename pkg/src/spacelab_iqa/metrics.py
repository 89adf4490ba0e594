"""Full-reference image quality metrics on luma grids.

Four metrics share one result shape:

* ``uqi_raw`` - the classic universal quality index evaluated globally:
  ``4*cov*mx*my / ((var_x+var_y) * (mx^2+my^2))``.  Faithful to the
  textbook formula, which means it is undefined whenever either input
  is constant (the correlation term degenerates to 0/0); notably the
  all-black reference always raises.
* ``uqi_stabilized`` - the windowed variant with additive stabilizer
  constants, defined for every input pair including constant images.
  Per window (uniform, stride 1, valid positions only)::

      s = ((2*mx*my + C1) / (mx^2 + my^2 + C1))
        * ((2*cov + C2) / (var_x + var_y + C2))

  with ``C1 = k1^2`` and ``C2 = k2^2`` on the unit sample range, and the
  score is the mean of ``s`` over all windows.  As ``k1, k2 -> 0`` this
  converges to the windowed raw index.
* ``ssim`` - single-scale structural similarity: 11x11 Gaussian window
  (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2, mean over valid windows.
* ``ms_ssim`` - the multi-scale extension: contrast-structure terms at
  every scale, luminance at the coarsest, exponent weights
  (0.0448, 0.2856, 0.3001, 0.2363, 0.1333), dyadic downsampling by
  2x2 block mean.

All statistics are population (biased) moments: divide by n, never
n - 1.  Scores of structurally anticorrelated pairs can be negative;
every stabilized score lies in [-1, 1], and identical inputs score
exactly 1.0.  Swapping the inputs never changes the value (every
expression used is symmetric under exchange).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import correlate1d

from .errors import DegenerateReference, EmptyInput, ShapeError
from .imaging import Image

_DEFAULT_K1 = 0.01
_DEFAULT_K2 = 0.03
_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_MS_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


class MetricId(str, Enum):
    UQI_RAW = "UQI_RAW"
    UQI_STABILIZED = "UQI_STABILIZED"
    SSIM = "SSIM"
    MS_SSIM = "MS_SSIM"


@dataclass(frozen=True)
class WindowStats:
    """Population statistics of one paired sample window."""

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov_xy: float


@dataclass(frozen=True)
class MetricScore:
    """A metric evaluation: which metric, its value, and how it was run."""

    metric_id: MetricId
    value: float
    params: Mapping[str, object] = field(default_factory=dict)
    n_windows: int = 1

    def __post_init__(self) -> None:
        if self.metric_id is not MetricId.UQI_RAW:
            # Stabilized scores are bounded; allow float-level slack only.
            if not (-1.0 - 1e-9 <= self.value <= 1.0 + 1e-9):
                raise ValueError(
                    f"{self.metric_id.value} score {self.value} outside [-1, 1]"
                )
        if self.n_windows < 1:
            raise ValueError("n_windows must be at least 1")


def _kahan_mean(values: Iterable[float], n: int) -> float:
    """Compensated left-to-right mean, stable regardless of chunking."""
    total = 0.0
    carry = 0.0
    for v in values:
        y = float(v) - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total / n


def window_stats(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> WindowStats:
    """Paired population statistics of two equal-length sample windows.

    Two-pass computation with compensated summation, so the reduction
    order is fixed and results do not depend on how callers batch work.
    """
    xs = np.asarray(x, dtype=np.float64).ravel()
    ys = np.asarray(y, dtype=np.float64).ravel()
    if xs.size == 0 or ys.size == 0:
        raise EmptyInput("window must contain at least one sample")
    if xs.size != ys.size:
        raise ShapeError(f"window lengths differ: {xs.size} vs {ys.size}")
    n = int(xs.size)
    mean_x = _kahan_mean(xs, n)
    mean_y = _kahan_mean(ys, n)
    dx = [float(v) - mean_x for v in xs]
    dy = [float(v) - mean_y for v in ys]
    var_x = _kahan_mean((d * d for d in dx), n)
    var_y = _kahan_mean((d * d for d in dy), n)
    cov_xy = _kahan_mean((a * b for a, b in zip(dx, dy)), n)
    return WindowStats(mean_x=mean_x, mean_y=mean_y, var_x=var_x, var_y=var_y, cov_xy=cov_xy)


def _check_pair(x: Image, y: Image) -> tuple[np.ndarray, np.ndarray]:
    if x.luma.shape != y.luma.shape:
        raise ShapeError(
            f"image dimensions differ: {x.width}x{x.height} vs {y.width}x{y.height}"
        )
    return x.luma, y.luma


def uqi_raw(x: Image, y: Image) -> MetricScore:
    """Global universal quality index, faithful to the undamped formula.

    Raises DegenerateReference when either input is constant or both
    means are zero; in those cases the formula's correlation content is
    0/0 and the result would carry no information.  The windowed
    stabilized variant handles such inputs instead.
    """
    xl, yl = _check_pair(x, y)
    if xl.max() == xl.min() or yl.max() == yl.min():
        raise DegenerateReference(
            "raw quality index undefined for constant inputs (zero variance); "
            "use uqi_stabilized"
        )
    mx = float(xl.mean())
    my = float(yl.mean())
    if mx * mx + my * my == 0.0:
        raise DegenerateReference("raw quality index undefined when both means are zero")
    dx = xl - mx
    dy = yl - my
    var_x = float((dx * dx).mean())
    var_y = float((dy * dy).mean())
    cov = float((dx * dy).mean())
    denom = (var_x + var_y) * (mx * mx + my * my)
    if denom == 0.0:
        raise DegenerateReference("raw quality index denominator vanished")
    value = 4.0 * cov * mx * my / denom
    return MetricScore(metric_id=MetricId.UQI_RAW, value=value, params={}, n_windows=1)


def uqi_stabilized(
    x: Image,
    y: Image,
    window: int = 8,
    k1: float = _DEFAULT_K1,
    k2: float = _DEFAULT_K2,
) -> MetricScore:
    """Mean stabilized quality index over sliding uniform windows.

    window is the square window edge (stride 1, valid positions only);
    both image dimensions must be >= window.  Defined for every input
    pair, constant images included.
    """
    if window < 1:
        raise ShapeError(f"window must be positive, got {window}")
    xl, yl = _check_pair(x, y)
    h, w = xl.shape
    if h < window or w < window:
        raise ShapeError(
            f"image {w}x{h} smaller than the {window}x{window} analysis window"
        )
    c1 = k1 * k1
    c2 = k2 * k2

    xv = sliding_window_view(xl, (window, window))
    yv = sliding_window_view(yl, (window, window))
    rows, cols = xv.shape[0], xv.shape[1]
    # Row-at-a-time keeps the deviation temporaries small while leaving
    # each window's reduction self-contained (no cross-window carries).
    row_means = np.empty(rows, dtype=np.float64)
    for i in range(rows):
        xr = xv[i]
        yr = yv[i]
        mx = xr.mean(axis=(1, 2))
        my = yr.mean(axis=(1, 2))
        dx = xr - mx[:, None, None]
        dy = yr - my[:, None, None]
        var_x = (dx * dx).mean(axis=(1, 2))
        var_y = (dy * dy).mean(axis=(1, 2))
        cov = (dx * dy).mean(axis=(1, 2))
        lum = (2.0 * mx * my + c1) / (mx * mx + my * my + c1)
        cs = (2.0 * cov + c2) / (var_x + var_y + c2)
        row_means[i] = (lum * cs).mean()
    value = float(row_means.mean())
    return MetricScore(
        metric_id=MetricId.UQI_STABILIZED,
        value=value,
        params={"window": window, "k1": k1, "k2": k2},
        n_windows=rows * cols,
    )


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return g / g.sum()


_SSIM_KERNEL = _gaussian_kernel(_SSIM_WINDOW, _SSIM_SIGMA)


def _gaussian_filter_valid(a: np.ndarray) -> np.ndarray:
    """Separable 11-tap Gaussian, valid positions only (no padding influence)."""
    half = _SSIM_WINDOW // 2
    t = correlate1d(a, _SSIM_KERNEL, axis=0, mode="constant")[half:-half, :]
    return correlate1d(t, _SSIM_KERNEL, axis=1, mode="constant")[:, half:-half]


def _ssim_maps(xl: np.ndarray, yl: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-window luminance and contrast-structure maps on valid positions."""
    c1 = 0.01 * 0.01
    c2 = 0.03 * 0.03
    mu_x = _gaussian_filter_valid(xl)
    mu_y = _gaussian_filter_valid(yl)
    # Biased second moments; subtraction may leave tiny negatives, which
    # the stabilizer constants absorb.
    var_x = _gaussian_filter_valid(xl * xl) - mu_x * mu_x
    var_y = _gaussian_filter_valid(yl * yl) - mu_y * mu_y
    cov = _gaussian_filter_valid(xl * yl) - mu_x * mu_y
    lum = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
    cs = (2.0 * cov + c2) / (var_x + var_y + c2)
    return lum, cs


def ssim(x: Image, y: Image) -> MetricScore:
    """Single-scale structural similarity over an 11x11 Gaussian window."""
    xl, yl = _check_pair(x, y)
    h, w = xl.shape
    if h < _SSIM_WINDOW or w < _SSIM_WINDOW:
        raise ShapeError(
            f"image {w}x{h} smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} analysis window"
        )
    lum, cs = _ssim_maps(xl, yl)
    value = float((lum * cs).mean())
    return MetricScore(
        metric_id=MetricId.SSIM,
        value=value,
        params={"window": _SSIM_WINDOW, "sigma": _SSIM_SIGMA},
        n_windows=int(lum.size),
    )


def _halve(a: np.ndarray) -> np.ndarray:
    """Dyadic downsample: 2x2 block mean, trailing odd row/column dropped."""
    h, w = a.shape
    a = a[: h - (h % 2), : w - (w % 2)]
    return (a[0::2, 0::2] + a[0::2, 1::2] + a[1::2, 0::2] + a[1::2, 1::2]) / 4.0


def ms_ssim(x: Image, y: Image, scales: int = 5) -> MetricScore:
    """Multi-scale structural similarity.

    Contrast-structure means are collected at every scale and the
    luminance mean at the coarsest, each raised to its exponent weight.
    Negative bases are clamped at 0 before exponentiation (fractional
    powers of negatives are undefined).  Requires
    min(width, height) >= 11 * 2**(scales-1).
    """
    if not 1 <= scales <= len(_MS_WEIGHTS):
        raise ShapeError(f"scales must be within 1..{len(_MS_WEIGHTS)}, got {scales}")
    xl, yl = _check_pair(x, y)
    h, w = xl.shape
    minimum = _SSIM_WINDOW * 2 ** (scales - 1)
    if min(h, w) < minimum:
        raise ShapeError(
            f"image {w}x{h} too small for {scales} scales: "
            f"min(width, height) must be >= {minimum}"
        )
    weights = _MS_WEIGHTS[:scales]
    if scales < len(_MS_WEIGHTS):
        total = sum(weights)
        weights = tuple(w_ / total for w_ in weights)

    value = 1.0
    n_windows = 0
    for level in range(scales):
        lum, cs = _ssim_maps(xl, yl)
        n_windows += int(cs.size)
        cs_mean = max(float(cs.mean()), 0.0)
        value *= cs_mean ** weights[level]
        if level == scales - 1:
            lum_mean = max(float(lum.mean()), 0.0)
            value *= lum_mean ** weights[level]
        else:
            xl = _halve(xl)
            yl = _halve(yl)
    return MetricScore(
        metric_id=MetricId.MS_SSIM,
        value=float(value),
        params={"scales": scales, "weights": weights},
        n_windows=n_windows,
    )
