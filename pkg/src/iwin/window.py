"""Window width/level computation and the linear display transform.

The display transform follows the standard linear value-of-interest
convention (the one clinical viewers implement), with round-half-up after
scaling, so outputs are directly comparable with those viewers. Auto
strategies compute WW/WL from an arbitrary pixel selection; restricting the
selection to a foreground mask is what removes background bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import MONOCHROME1, MONOCHROME2, RealImage
from .errors import DegenerateMask, DimensionMismatch, EmptySelection


@dataclass(frozen=True)
class WindowSettings:
    """A (level, width) pair in modality units. Width is floored at 1."""

    level: float
    width: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.level) and math.isfinite(self.width)):
            raise ValueError("window level/width must be finite")
        object.__setattr__(self, "level", float(self.level))
        object.__setattr__(self, "width", max(1.0, float(self.width)))


@dataclass(frozen=True)
class AutoWindowStrategy:
    """min_max | percentile(p_low, p_high) | mean_std(k)."""

    kind: str
    p_low: float = 0.0
    p_high: float = 100.0
    k: float = 2.0

    def __post_init__(self) -> None:
        if self.kind not in ("min_max", "percentile", "mean_std"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "percentile" and not (0 <= self.p_low < self.p_high <= 100):
            raise ValueError("percentile bounds must satisfy 0 <= low < high <= 100")
        if self.kind == "mean_std" and not self.k > 0:
            raise ValueError("mean_std k must be positive")

    @classmethod
    def min_max(cls) -> "AutoWindowStrategy":
        return cls("min_max")

    @classmethod
    def percentile(cls, p_low: float, p_high: float) -> "AutoWindowStrategy":
        return cls("percentile", p_low=p_low, p_high=p_high)

    @classmethod
    def mean_std(cls, k: float) -> "AutoWindowStrategy":
        return cls("mean_std", k=k)

    @classmethod
    def parse(cls, text: str) -> "AutoWindowStrategy":
        """Parse the CLI/HTTP grammar: minmax | percentile:LO,HI | meanstd:K."""
        name, _, args = text.strip().partition(":")
        try:
            if name == "minmax" and not args:
                return cls.min_max()
            if name == "percentile":
                lo, hi = (float(a) for a in args.split(","))
                return cls.percentile(lo, hi)
            if name == "meanstd":
                return cls.mean_std(float(args))
        except ValueError as e:
            raise ValueError(f"bad strategy {text!r}: {e}") from None
        raise ValueError(f"unknown strategy {text!r}")

    def key(self) -> str:
        """Canonical grammar form (used as a cache key)."""
        if self.kind == "min_max":
            return "minmax"
        if self.kind == "percentile":
            return f"percentile:{self.p_low:g},{self.p_high:g}"
        return f"meanstd:{self.k:g}"


DEFAULT_STRATEGY = AutoWindowStrategy.percentile(1, 99)


@dataclass(frozen=True)
class DisplayImage:
    """8-bit render, values 0..255."""

    samples: np.ndarray  # uint8 (height, width)

    def __post_init__(self) -> None:
        if self.samples.ndim != 2 or self.samples.dtype != np.uint8:
            raise ValueError("display samples must be a 2-D uint8 array")
        self.samples.setflags(write=False)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class BiasReport:
    """Windows computed with and without the foreground restriction."""

    ww_full: float
    wl_full: float
    ww_fg: float
    wl_fg: float
    width_ratio: float
    foreground_fraction: float


def _nearest_rank_index(p: float, n: int) -> int:
    """ceil(p/100 * n) - 1, clamped to [0, n-1]; p*n is formed first to keep
    integer-valued products exact."""
    idx = math.ceil((p * n) / 100) - 1
    return min(max(idx, 0), n - 1)


def auto_window(img: RealImage, mask=None, strategy: AutoWindowStrategy = DEFAULT_STRATEGY) -> WindowSettings:
    """Compute WW/WL from all pixels, or from mask-true pixels only.

    The result depends exclusively on the selected pixels, so any mutation of
    pixels outside the mask leaves it bit-identical. Raises EmptySelection
    when the mask selects nothing.
    """
    if mask is not None:
        if mask.bits.shape != img.values.shape:
            raise DimensionMismatch(
                f"mask {mask.bits.shape} does not match image {img.values.shape}"
            )
        selection = img.values[mask.bits]
        if selection.size == 0:
            raise EmptySelection("mask selects no pixels")
    else:
        selection = img.values.ravel()

    if strategy.kind == "min_max":
        lo = float(selection.min())
        hi = float(selection.max())
        return WindowSettings(level=(hi + lo) / 2, width=hi - lo)
    if strategy.kind == "percentile":
        ordered = np.sort(selection)
        n = ordered.size
        lo = float(ordered[_nearest_rank_index(strategy.p_low, n)])
        hi = float(ordered[_nearest_rank_index(strategy.p_high, n)])
        return WindowSettings(level=(hi + lo) / 2, width=hi - lo)
    mean = float(selection.mean())
    sigma = float(selection.std())  # population sigma
    return WindowSettings(level=mean, width=2 * strategy.k * sigma)


def build_lut(s: WindowSettings, out_min: int = 0, out_max: int = 255) -> Callable:
    """Monotone map from real values to integers in [out_min, out_max].

    Width 1 acts as a hard threshold at level - 0.5. Otherwise values at or
    below level - 0.5 - (width-1)/2 clamp to out_min, values strictly above
    level - 0.5 + (width-1)/2 clamp to out_max, and the linear ramp between is
    rounded half-up. The returned callable accepts scalars or arrays.
    """
    wl, ww = s.level, s.width
    span = out_max - out_min

    if ww == 1:
        def lut(x):
            arr = np.asarray(x, dtype=np.float64)
            out = np.where(arr <= wl - 0.5, out_min, out_max).astype(np.int64)
            return int(out[()]) if arr.ndim == 0 else out
        return lut

    low = wl - 0.5 - (ww - 1) / 2
    high = wl - 0.5 + (ww - 1) / 2

    def lut(x):
        arr = np.asarray(x, dtype=np.float64)
        ramp = np.floor(((arr - (wl - 0.5)) / (ww - 1) + 0.5) * span + out_min + 0.5)
        out = np.where(arr <= low, out_min, np.where(arr > high, out_max, ramp)).astype(np.int64)
        return int(out[()]) if arr.ndim == 0 else out

    return lut


def apply_window(
    img: RealImage,
    s: WindowSettings,
    photometric: str = MONOCHROME2,
    mask=None,
) -> DisplayImage:
    """Render the image through the window transform into 8-bit samples.

    MONOCHROME1 inverts the ramp (255 - y). When a mask is given, background
    pixels are forced to display value 0 regardless of photometric, which is
    what makes a suppressed render visually silent.
    """
    if photometric not in (MONOCHROME1, MONOCHROME2):
        raise ValueError(f"unsupported photometric {photometric!r}")
    if mask is not None and mask.bits.shape != img.values.shape:
        raise DimensionMismatch(
            f"mask {mask.bits.shape} does not match image {img.values.shape}"
        )
    y = build_lut(s)(img.values)
    if photometric == MONOCHROME1:
        y = 255 - y
    if mask is not None:
        y = np.where(mask.bits, y, 0)
    return DisplayImage(y.astype(np.uint8))


def window_bias(img: RealImage, mask, strategy: AutoWindowStrategy = AutoWindowStrategy.min_max()) -> BiasReport:
    """Quantify how much the background inflates the auto window.

    Raises EmptySelection for an empty mask and DegenerateMask for an
    all-true mask (no background to compare against).
    """
    if mask.bits.shape != img.values.shape:
        raise DimensionMismatch(
            f"mask {mask.bits.shape} does not match image {img.values.shape}"
        )
    fg_count = int(mask.bits.sum())
    if fg_count == 0:
        raise EmptySelection("mask selects no pixels")
    total = mask.bits.size
    if fg_count == total:
        raise DegenerateMask("mask covers the whole image")
    full = auto_window(img, None, strategy)
    fg = auto_window(img, mask, strategy)
    return BiasReport(
        ww_full=full.width,
        wl_full=full.level,
        ww_fg=fg.width,
        wl_fg=fg.level,
        width_ratio=full.width / fg.width,
        foreground_fraction=fg_count / total,
    )
