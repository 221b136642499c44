"""Binary PGM (P5) reading and writing.

Only maxval 255 and 65535 are supported; 16-bit samples are big-endian on
disk per the PGM convention. Header tokens are whitespace-delimited and may
be interspersed with ``#`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MONOCHROME2, UNSIGNED, StoredImage
from .errors import BadHeader, BadMagic, Truncated


@dataclass(frozen=True)
class PgmImage:
    """Decoded PGM raster; ``samples`` is native-order uint8/uint16 (h, w)."""

    width: int
    height: int
    maxval: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples.setflags(write=False)


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited token at/after ``pos``, skipping # comments."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in b" \t\r\n\x0b\x0c":
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise Truncated("PGM header ended before all fields were read")
    start = pos
    while pos < n and data[pos : pos + 1] not in b" \t\r\n\x0b\x0c":
        pos += 1
    return data[start:pos], pos


def parse_pgm(data: bytes) -> PgmImage:
    """Decode binary P5 bytes. Raises BadMagic, BadHeader, or Truncated."""
    if data[:2] != b"P5":
        raise BadMagic("only binary PGM (P5) is supported")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_header_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise BadHeader(f"non-numeric PGM header field {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise BadHeader("PGM dimensions must be positive")
    if maxval not in (255, 65535):
        raise BadHeader(f"unsupported maxval {maxval} (expected 255 or 65535)")
    if pos >= len(data):
        raise Truncated("PGM ended before sample data")
    pos += 1  # exactly one whitespace byte separates maxval from samples

    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    nbytes = width * height * dtype.itemsize
    raw = data[pos : pos + nbytes]
    if len(raw) < nbytes:
        raise Truncated(f"PGM sample block is {len(raw)} bytes, expected {nbytes}")
    samples = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    samples = np.ascontiguousarray(samples.astype(samples.dtype.newbyteorder("=")))
    return PgmImage(width, height, maxval, samples)


def read_pgm(data: bytes) -> StoredImage:
    """Decode P5 bytes into an unsigned MONOCHROME2 StoredImage."""
    pgm = parse_pgm(data)
    bits = 8 if pgm.maxval == 255 else 16
    return StoredImage(
        values=pgm.samples.copy(),
        bits_allocated=bits,
        bits_stored=bits,
        high_bit=bits - 1,
        pixel_representation=UNSIGNED,
        photometric=MONOCHROME2,
    )


def write_pgm(img) -> bytes:
    """Encode an 8- or 16-bit image as binary P5.

    Accepts a StoredImage or a 2-D uint8/uint16 array; dtype picks the maxval.
    Round-trips exactly through :func:`read_pgm`.
    """
    arr = img.values if isinstance(img, StoredImage) else np.asarray(img)
    if arr.ndim != 2:
        raise ValueError("PGM images must be 2-D")
    if arr.dtype == np.uint8:
        maxval, payload = 255, arr.tobytes()
    elif arr.dtype == np.uint16:
        maxval, payload = 65535, arr.astype(">u2").tobytes()
    else:
        raise ValueError(f"cannot write dtype {arr.dtype} as PGM")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    return header + payload
