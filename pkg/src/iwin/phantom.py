"""Deterministic synthetic MR-like phantom with exact ground truth.

A bright tissue disk (Gaussian intensities, optional linear shading) sits on
a Rayleigh-distributed background, the noise model of signal-free regions in
magnitude MR images. Pixels are drawn from numpy's PCG64 generator, seeded
explicitly, with a fixed draw order (full tissue field, then full background
field), so a given spec reproduces the same image on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import RealImage
from .suppress import BinaryMask


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 256
    height: int = 256
    disk_center: Optional[tuple[float, float]] = None  # (x, y); default frame center
    disk_radius: float = 80.0
    tissue_mean: float = 800.0
    tissue_sigma: float = 50.0
    gradient: Optional[tuple[float, float]] = None  # (per-pixel dx, dy) shading over the disk
    background_sigma: float = 30.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("phantom dimensions must be positive")
        if self.tissue_sigma < 0 or self.background_sigma < 0:
            raise ValueError("sigmas must be non-negative")
        cx, cy = self.center()
        r = self.disk_radius
        if not (r <= cx <= self.width - 1 - r and r <= cy <= self.height - 1 - r):
            raise ValueError("disk must lie fully inside the frame")

    def center(self) -> tuple[float, float]:
        if self.disk_center is not None:
            return self.disk_center
        return ((self.width - 1) / 2, (self.height - 1) / 2)


def generate(spec: PhantomSpec = PhantomSpec()) -> tuple[RealImage, BinaryMask]:
    """Render the phantom; returns (image, exact ground-truth disk mask)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    h, w = spec.height, spec.width
    cx, cy = spec.center()

    yy, xx = np.mgrid[0:h, 0:w]
    disk = (xx - cx) ** 2 + (yy - cy) ** 2 <= spec.disk_radius**2

    tissue = rng.normal(spec.tissue_mean, spec.tissue_sigma, size=(h, w))
    if spec.gradient is not None:
        gx, gy = spec.gradient
        tissue = tissue + gx * (xx - cx) + gy * (yy - cy)
    tissue = np.maximum(tissue, 0.0)
    background = rng.rayleigh(scale=spec.background_sigma, size=(h, w))

    values = np.where(disk, tissue, background)
    return RealImage.from_values(values, source_bits=16), BinaryMask(disk)


def to_stored_values(img: RealImage) -> np.ndarray:
    """Quantize phantom reals to uint16 (round half up, clipped) for PGM output."""
    q = np.floor(img.values + 0.5)
    return np.clip(q, 0, 65535).astype(np.uint16)
