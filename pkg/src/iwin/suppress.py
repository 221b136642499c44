"""Foreground extraction via threshold + morphology, plus mask utilities.

The built-in segmenter is the classical pipeline: global threshold (Otsu by
default), morphological closing, hole filling, and largest-component
selection. Externally produced masks (e.g. from a learned segmenter) enter
through :func:`load_external_mask` and flow through the same downstream
machinery.

Border convention: dilation is clipped at the frame; erosion constrains only
in-bounds neighbors (out-of-bounds counts as foreground, as in scikit-image).
This is the unique convention under which erosion/dilation are exact duals
under in-frame complement and opening/closing are idempotent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from .core import Histogram, RealImage, default_bin_count, histogram
from .errors import ConstantImage, DimensionMismatch, EmptyMask
from .pgm import PgmImage

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class BinaryMask:
    """Per-pixel foreground decision; True = anatomy."""

    bits: np.ndarray  # bool (height, width)

    def __post_init__(self) -> None:
        if self.bits.ndim != 2 or self.bits.dtype != np.bool_:
            raise ValueError("mask bits must be a 2-D bool array")
        self.bits.setflags(write=False)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    @classmethod
    def from_array(cls, arr) -> "BinaryMask":
        return cls(np.ascontiguousarray(arr, dtype=bool))


@dataclass(frozen=True)
class StructuringElement:
    """Odd-sized symmetric footprint: square(side) or disk(radius)."""

    footprint: np.ndarray  # bool, odd square shape
    label: str

    def __post_init__(self) -> None:
        fp = self.footprint
        if fp.ndim != 2 or fp.shape[0] != fp.shape[1] or fp.shape[0] % 2 == 0:
            raise ValueError("footprint must be an odd square array")
        c = fp.shape[0] // 2
        if not fp[c, c]:
            raise ValueError("footprint must contain its center")
        if not np.array_equal(fp, fp[::-1, ::-1]):
            raise ValueError("footprint must be symmetric under 180-degree rotation")
        fp.setflags(write=False)

    @classmethod
    def square(cls, side: int) -> "StructuringElement":
        if side < 1 or side % 2 == 0:
            raise ValueError("square side must be odd and >= 1")
        return cls(np.ones((side, side), dtype=bool), f"square({side})")

    @classmethod
    def disk(cls, radius: float) -> "StructuringElement":
        if radius < 0:
            raise ValueError("disk radius must be >= 0")
        r = int(math.floor(radius))
        yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
        fp = (yy * yy + xx * xx) <= radius * radius
        return cls(fp, f"disk({radius:g})")


@dataclass(frozen=True)
class SuppressionParams:
    """Knobs of the built-in segmentation pipeline.

    ``threshold`` is "otsu" or a fixed real value; ``keep`` is "largest" or a
    minimum component area as a fraction of the image.
    """

    threshold: Union[str, float] = "otsu"
    close_element: StructuringElement = field(default_factory=lambda: StructuringElement.disk(2))
    fill_holes: bool = True
    keep: Union[str, float] = "largest"
    dilate_margin: Optional[StructuringElement] = None

    def __post_init__(self) -> None:
        if isinstance(self.threshold, str):
            if self.threshold != "otsu":
                raise ValueError(f"threshold must be 'otsu' or a number, got {self.threshold!r}")
        elif math.isnan(float(self.threshold)):
            raise ValueError("fixed threshold must not be NaN")
        if isinstance(self.keep, str):
            if self.keep != "largest":
                raise ValueError(f"keep must be 'largest' or a fraction, got {self.keep!r}")
        elif not 0 <= float(self.keep) <= 1:
            raise ValueError("keep fraction must lie in [0, 1]")


@dataclass(frozen=True)
class DiceScore:
    value: float
    a_count: int
    b_count: int
    intersection: int


def otsu_threshold(h: Histogram) -> int:
    """Bin index t maximizing between-class variance (classes <= t vs > t).

    Comparisons are exact integer arithmetic, so ties are broken by the
    smallest t deterministically. Foreground is then "strictly above
    h.bin_lower_edge(t + 1)". Raises ConstantImage when fewer than two bins
    are occupied.
    """
    counts = [int(c) for c in h.counts]
    if h.total < 2 or sum(1 for c in counts if c) < 2:
        raise ConstantImage("need at least two occupied bins")

    n_total = h.total
    s_total = sum(i * c for i, c in enumerate(counts))
    # between-class variance at t is (s0*w1 - s1*w0)^2 / (w0*w1 * n^2); the
    # n^2 is constant, so compare num/den fractions by cross-multiplication
    best_t, best_num, best_den = -1, -1, 1
    w0 = 0
    s0 = 0
    for t in range(len(counts) - 1):
        w0 += counts[t]
        s0 += t * counts[t]
        w1 = n_total - w0
        if w0 == 0 or w1 == 0:
            num, den = 0, 1
        else:
            a = s0 * w1 - (s_total - s0) * w0
            num, den = a * a, w0 * w1
        if best_t < 0 or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def _check_same_dims(a: BinaryMask, b: BinaryMask) -> None:
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatch(f"masks {a.bits.shape} vs {b.bits.shape}")


def dilate(m: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Union of structuring-element translates over true pixels, clipped."""
    return BinaryMask(ndimage.binary_dilation(m.bits, structure=se.footprint, border_value=0))


def erode(m: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Pixels whose in-bounds structuring-element neighborhood is fully true."""
    return BinaryMask(ndimage.binary_erosion(m.bits, structure=se.footprint, border_value=1))


def opening(m: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Erosion followed by dilation."""
    return dilate(erode(m, se), se)


def closing(m: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Dilation followed by erosion."""
    return erode(dilate(m, se), se)


def fill_holes(m: BinaryMask) -> BinaryMask:
    """Turn background regions with no 4-connected path to the border into foreground."""
    return BinaryMask(ndimage.binary_fill_holes(m.bits, structure=_FOUR_CONNECTED))


def largest_component(m: BinaryMask) -> BinaryMask:
    """Keep only the largest 8-connected component.

    Ties go to the component whose first pixel has the smallest row-major
    index. Raises EmptyMask when there is no foreground.
    """
    labels, n = ndimage.label(m.bits, structure=_EIGHT_CONNECTED)
    if n == 0:
        raise EmptyMask("no foreground pixel")
    counts = np.bincount(labels.ravel())[1:]
    best = int(counts.max())
    tied = [lab + 1 for lab, c in enumerate(counts) if c == best]
    if len(tied) > 1:
        flat = labels.ravel()
        tied.sort(key=lambda lab: int(np.flatnonzero(flat == lab)[0]))
    return BinaryMask(labels == tied[0])


def _keep_area_fraction(m: BinaryMask, fraction: float) -> BinaryMask:
    """Keep all 8-connected components covering at least ``fraction`` of the image."""
    labels, n = ndimage.label(m.bits, structure=_EIGHT_CONNECTED)
    if n == 0:
        raise EmptyMask("no foreground pixel")
    counts = np.bincount(labels.ravel())[1:]
    min_area = fraction * m.bits.size
    keep = np.flatnonzero(counts >= min_area) + 1
    if keep.size == 0:
        raise EmptyMask(f"no component reaches area fraction {fraction}")
    return BinaryMask(np.isin(labels, keep))


def suppress_background(
    img: RealImage,
    params: SuppressionParams = SuppressionParams(),
    bin_count: Optional[int] = None,
) -> BinaryMask:
    """Run the classical segmentation pipeline and return the foreground mask.

    threshold -> close -> fill holes -> keep rule -> optional dilated margin.
    The Otsu histogram uses 256 bins for 8-bit sources and 4096 otherwise.
    Raises ConstantImage (Otsu on a flat image) or EmptyMask (nothing above
    threshold, or keep rule leaves nothing).
    """
    if isinstance(params.threshold, str):
        h = histogram(img, None, bin_count or default_bin_count(img.source_bits))
        t = otsu_threshold(h)
        threshold_value = h.bin_lower_edge(t + 1)
    else:
        threshold_value = float(params.threshold)

    m = BinaryMask(img.values > threshold_value)
    if m.count == 0:
        raise EmptyMask(f"no pixel above threshold {threshold_value}")
    m = closing(m, params.close_element)
    if params.fill_holes:
        m = fill_holes(m)
    if isinstance(params.keep, str):
        m = largest_component(m)
    else:
        m = _keep_area_fraction(m, float(params.keep))
    if params.dilate_margin is not None:
        m = dilate(m, params.dilate_margin)
    return m


def load_external_mask(img_shape: tuple[int, int], pgm: PgmImage) -> BinaryMask:
    """Interpret a PGM as a mask: samples strictly above maxval/2 are foreground."""
    if (pgm.height, pgm.width) != tuple(img_shape):
        raise DimensionMismatch(
            f"mask {pgm.height}x{pgm.width} does not match image {img_shape[0]}x{img_shape[1]}"
        )
    return BinaryMask(pgm.samples > pgm.maxval / 2)


def mask_to_pgm_samples(m: BinaryMask) -> np.ndarray:
    """0/255 uint8 raster for writing a mask as PGM."""
    return np.where(m.bits, 255, 0).astype(np.uint8)


def dice(a: BinaryMask, b: BinaryMask) -> DiceScore:
    """Overlap score 2*|A and B| / (|A| + |B|); two empty masks score 1."""
    _check_same_dims(a, b)
    a_count = a.count
    b_count = b.count
    inter = int((a.bits & b.bits).sum())
    if a_count + b_count == 0:
        return DiceScore(1.0, 0, 0, 0)
    return DiceScore(2 * inter / (a_count + b_count), a_count, b_count, inter)


def apply_mask(img: RealImage, m: BinaryMask, background_value: Optional[float] = None) -> RealImage:
    """Keep foreground pixels, set background to a constant (default: image min)."""
    if m.bits.shape != img.values.shape:
        raise DimensionMismatch(
            f"mask {m.bits.shape} does not match image {img.values.shape}"
        )
    bg = img.value_min if background_value is None else float(background_value)
    return RealImage.from_values(
        np.where(m.bits, img.values, bg), source_bits=img.source_bits
    )
