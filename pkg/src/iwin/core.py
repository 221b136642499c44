"""Core pixel containers, modality rescale, and histogram construction.

All containers are immutable after construction (their numpy buffers are
frozen), and every operation here is a pure function, so values can be shared
freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, EmptySelection

MONOCHROME1 = "MONOCHROME1"
MONOCHROME2 = "MONOCHROME2"

UNSIGNED = 0
SIGNED = 1


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StoredImage:
    """Raw integer pixels exactly as parsed from a file.

    ``values`` keeps the stored bit patterns untouched: sign extension and
    masking down to ``bits_stored`` happen later, in :func:`rescale_to_real`,
    so this stays a faithful byte-level record (stored values may carry
    overlay bits above ``high_bit``).
    """

    values: np.ndarray  # (height, width), uint8 or uint16
    bits_allocated: int
    bits_stored: int
    high_bit: int
    pixel_representation: int  # UNSIGNED or SIGNED
    photometric: str

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("stored image must be a 2-D array with positive dims")
        if self.bits_allocated not in (8, 16):
            raise ValueError("bits_allocated must be 8 or 16")
        expected = np.uint8 if self.bits_allocated == 8 else np.uint16
        if v.dtype != expected:
            raise ValueError(f"dtype {v.dtype} does not match bits_allocated {self.bits_allocated}")
        if not (1 <= self.bits_stored <= self.bits_allocated):
            raise ValueError("bits_stored out of range")
        if self.high_bit != self.bits_stored - 1:
            raise ValueError("high_bit must equal bits_stored - 1")
        if self.pixel_representation not in (UNSIGNED, SIGNED):
            raise ValueError("pixel_representation must be 0 (unsigned) or 1 (signed)")
        if self.photometric not in (MONOCHROME1, MONOCHROME2):
            raise ValueError(f"unsupported photometric {self.photometric!r}")
        _freeze(v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class RescaleTransform:
    """Linear map from stored integers to modality units: v = slope*s + intercept."""

    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise ValueError("rescale slope/intercept must be finite")
        if self.slope == 0:
            raise ValueError("rescale slope must be nonzero")


@dataclass(frozen=True)
class RealImage:
    """Real-valued pixels in modality units, with exact cached extrema.

    ``source_bits`` remembers the bit depth of the stored source (when known)
    so downstream histogram consumers can pick a matching default bin count.
    """

    values: np.ndarray  # (height, width), float64
    value_min: float
    value_max: float
    source_bits: Optional[int] = None

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("real image must be a 2-D array with positive dims")
        if v.dtype != np.float64:
            raise ValueError("real image values must be float64")
        if not np.isfinite(v).all():
            raise ValueError("real image values must all be finite")
        if self.value_min != float(v.min()) or self.value_max != float(v.max()):
            raise ValueError("cached extrema do not match values")
        _freeze(v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_values(cls, values: np.ndarray, source_bits: Optional[int] = None) -> "RealImage":
        arr = np.ascontiguousarray(values, dtype=np.float64)
        return cls(arr, float(arr.min()), float(arr.max()), source_bits)


@dataclass(frozen=True)
class Histogram:
    """Binned intensity counts over an explicit [range_min, range_max) range.

    A degenerate selection (min == max) is recorded as the range
    [min, min + 1] with all mass in bin 0.
    """

    range_min: float
    range_max: float
    counts: np.ndarray  # int64, length bin_count
    total: int = field(default=-1)

    def __post_init__(self) -> None:
        if self.counts.ndim != 1 or len(self.counts) < 1:
            raise ValueError("counts must be a nonempty 1-D array")
        if self.total == -1:
            object.__setattr__(self, "total", int(self.counts.sum()))
        elif self.total != int(self.counts.sum()):
            raise ValueError("total does not match sum of counts")
        if len(self.counts) > 1 and not self.range_min < self.range_max:
            raise ValueError("range_min must be below range_max")
        _freeze(self.counts)

    @property
    def bin_count(self) -> int:
        return len(self.counts)

    def bin_lower_edge(self, i: int) -> float:
        """Real value of the lower edge of bin ``i`` (``i`` may equal bin_count)."""
        return self.range_min + i * (self.range_max - self.range_min) / self.bin_count


def default_bin_count(source_bits: Optional[int]) -> int:
    """256 bins for 8-bit sources, 4096 otherwise (matches display vs stored precision)."""
    return 256 if source_bits == 8 else 4096


def rescale_to_real(img: StoredImage, t: RescaleTransform = RescaleTransform()) -> RealImage:
    """Apply the modality rescale to stored pixels.

    Stored bit patterns are masked down to ``bits_stored`` first (DICOM allows
    overlay bits above ``high_bit``), then sign-extended for signed
    representations, then mapped through ``slope*s + intercept``.
    """
    mask = (1 << (img.high_bit + 1)) - 1
    raw = img.values.astype(np.int64) & mask
    if img.pixel_representation == SIGNED:
        sign_bit = 1 << (img.bits_stored - 1)
        raw = np.where(raw >= sign_bit, raw - (1 << img.bits_stored), raw)
    values = t.slope * raw.astype(np.float64) + t.intercept
    return RealImage.from_values(values, source_bits=img.bits_allocated)


def histogram(img: RealImage, mask=None, bin_count: Optional[int] = None) -> Histogram:
    """Histogram of ``img`` over all pixels, or over mask-true pixels only.

    Pixel p lands in bin floor((p - min) / (max - min) * bin_count), clamped
    to the last bin; the range is the exact min/max of the included pixels.

    Raises EmptySelection if ``mask`` is present but selects nothing, and
    DimensionMismatch if it has the wrong shape.
    """
    if bin_count is None:
        bin_count = default_bin_count(img.source_bits)
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if mask is not None:
        if mask.bits.shape != img.values.shape:
            raise DimensionMismatch(
                f"mask {mask.bits.shape} does not match image {img.values.shape}"
            )
        selected = img.values[mask.bits]
        if selected.size == 0:
            raise EmptySelection("mask selects no pixels")
    else:
        selected = img.values.ravel()

    lo = float(selected.min())
    hi = float(selected.max())
    if lo == hi:
        counts = np.zeros(bin_count, dtype=np.int64)
        counts[0] = selected.size
        return Histogram(lo, lo + 1.0, counts)

    u = (selected - lo) / (hi - lo)
    idx = np.floor(u * bin_count).astype(np.int64)
    np.clip(idx, 0, bin_count - 1, out=idx)
    counts = np.bincount(idx, minlength=bin_count).astype(np.int64)
    return Histogram(lo, hi, counts)
