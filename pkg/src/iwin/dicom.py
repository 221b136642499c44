"""Minimal DICOM Part-10 reader for single-frame grayscale images.

Supported transfer syntaxes: implicit VR little endian (1.2.840.10008.1.2)
and explicit VR little endian (1.2.840.10008.1.2.1). Sequences with defined
length are skipped wholesale; undefined lengths, compressed syntaxes, and
multi-frame objects are rejected with typed errors. Every read is
bounds-checked, so arbitrary byte streams produce either a DicomRecord or a
FormatError subclass, never an unchecked exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import MONOCHROME1, MONOCHROME2, RescaleTransform, StoredImage
from .errors import (
    BadDecimalString,
    InconsistentDimensions,
    MissingTag,
    MultiFrameUnsupported,
    NotDicom,
    OutOfOrderTag,
    Truncated,
    UnsupportedFeature,
    UnsupportedTransferSyntax,
)
from .window import WindowSettings

IMPLICIT_LE = "1.2.840.10008.1.2"
EXPLICIT_LE = "1.2.840.10008.1.2.1"

UNDEFINED_LENGTH = 0xFFFFFFFF

# VRs that use the 2-byte-reserved + 4-byte-length form in explicit VR.
_LONG_VRS = {"OB", "OW", "OF", "SQ", "UT", "UN"}

TAG_TRANSFER_SYNTAX = (0x0002, 0x0010)
TAG_PHOTOMETRIC = (0x0028, 0x0004)
TAG_NUMBER_OF_FRAMES = (0x0028, 0x0008)
TAG_ROWS = (0x0028, 0x0010)
TAG_COLUMNS = (0x0028, 0x0011)
TAG_BITS_ALLOCATED = (0x0028, 0x0100)
TAG_BITS_STORED = (0x0028, 0x0101)
TAG_HIGH_BIT = (0x0028, 0x0102)
TAG_PIXEL_REPRESENTATION = (0x0028, 0x0103)
TAG_WINDOW_CENTER = (0x0028, 0x1050)
TAG_WINDOW_WIDTH = (0x0028, 0x1051)
TAG_RESCALE_INTERCEPT = (0x0028, 0x1052)
TAG_RESCALE_SLOPE = (0x0028, 0x1053)
TAG_PIXEL_DATA = (0x7FE0, 0x0010)

# Built-in dictionary for implicit-VR resolution; unknown tags are skipped.
_DICTIONARY = {
    TAG_PHOTOMETRIC: "CS",
    TAG_NUMBER_OF_FRAMES: "IS",
    TAG_ROWS: "US",
    TAG_COLUMNS: "US",
    TAG_BITS_ALLOCATED: "US",
    TAG_BITS_STORED: "US",
    TAG_HIGH_BIT: "US",
    TAG_PIXEL_REPRESENTATION: "US",
    TAG_WINDOW_CENTER: "DS",
    TAG_WINDOW_WIDTH: "DS",
    TAG_RESCALE_INTERCEPT: "DS",
    TAG_RESCALE_SLOPE: "DS",
    TAG_PIXEL_DATA: "OW",
}


@dataclass(frozen=True)
class DicomElement:
    group: int
    element: int
    vr: Optional[str]  # declared (explicit), inferred (implicit), or None
    value: bytes

    @property
    def tag(self) -> tuple[int, int]:
        return (self.group, self.element)


@dataclass
class ExtractedFields:
    """Raw values of the tags this pipeline consumes (strings still unparsed)."""

    rows: Optional[int] = None
    columns: Optional[int] = None
    bits_allocated: Optional[int] = None
    bits_stored: Optional[int] = None
    high_bit: Optional[int] = None
    pixel_representation: Optional[int] = None
    photometric_interpretation: Optional[str] = None
    number_of_frames: Optional[str] = None
    window_center: Optional[str] = None  # first value of a multi-valued DS
    window_width: Optional[str] = None
    rescale_intercept: Optional[str] = None
    rescale_slope: Optional[str] = None
    pixel_data: Optional[bytes] = None


@dataclass
class DicomRecord:
    transfer_syntax: str  # IMPLICIT_LE or EXPLICIT_LE
    elements: list[DicomElement] = field(default_factory=list)
    extracted: ExtractedFields = field(default_factory=ExtractedFields)


@dataclass
class ExtractedImage:
    """Result of extract_image: pixels, rescale, optional embedded window."""

    image: StoredImage
    rescale: RescaleTransform
    window: Optional[WindowSettings]
    warnings: list[str] = field(default_factory=list)


class _Cursor:
    """Bounds-checked little-endian reader over an immutable byte buffer."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def read(self, n: int) -> bytes:
        if n < 0 or self.remaining() < n:
            raise Truncated(f"needed {n} bytes at offset {self.pos}, have {self.remaining()}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return int.from_bytes(self.read(2), "little")

    def u32(self) -> int:
        return int.from_bytes(self.read(4), "little")

    def peek_u16(self) -> Optional[int]:
        if self.remaining() < 2:
            return None
        return int.from_bytes(self.data[self.pos : self.pos + 2], "little")


def _read_explicit_element(cur: _Cursor) -> DicomElement:
    group = cur.u16()
    element = cur.u16()
    vr_bytes = cur.read(2)
    vr = vr_bytes.decode("ascii", errors="replace")
    if not (vr.isalpha() and vr.isupper()):
        raise UnsupportedFeature(f"unrecognized VR bytes {vr_bytes!r} at tag {group:04X},{element:04X}")
    if vr in _LONG_VRS:
        cur.read(2)  # reserved
        length = cur.u32()
    else:
        length = cur.u16()
    if length == UNDEFINED_LENGTH:
        raise UnsupportedFeature(f"undefined length on tag {group:04X},{element:04X}")
    value = cur.read(length)
    return DicomElement(group, element, vr, value)


def _read_implicit_element(cur: _Cursor) -> DicomElement:
    group = cur.u16()
    element = cur.u16()
    length = cur.u32()
    if length == UNDEFINED_LENGTH:
        raise UnsupportedFeature(f"undefined length on tag {group:04X},{element:04X}")
    value = cur.read(length)
    return DicomElement(group, element, _DICTIONARY.get((group, element)), value)


def _ascii(value: bytes) -> str:
    return value.decode("latin-1").strip("\x00 ")


def _first_value(value: bytes) -> str:
    return _ascii(value.split(b"\\", 1)[0])


def _uint16_value(el: DicomElement) -> int:
    if len(el.value) != 2:
        raise UnsupportedFeature(
            f"tag {el.group:04X},{el.element:04X} has length {len(el.value)}, expected 2"
        )
    return int.from_bytes(el.value, "little")


def _record_element(rec: DicomRecord, el: DicomElement) -> None:
    ex = rec.extracted
    tag = el.tag
    if tag == TAG_ROWS:
        ex.rows = _uint16_value(el)
    elif tag == TAG_COLUMNS:
        ex.columns = _uint16_value(el)
    elif tag == TAG_BITS_ALLOCATED:
        ex.bits_allocated = _uint16_value(el)
    elif tag == TAG_BITS_STORED:
        ex.bits_stored = _uint16_value(el)
    elif tag == TAG_HIGH_BIT:
        ex.high_bit = _uint16_value(el)
    elif tag == TAG_PIXEL_REPRESENTATION:
        ex.pixel_representation = _uint16_value(el)
    elif tag == TAG_PHOTOMETRIC:
        ex.photometric_interpretation = _ascii(el.value)
    elif tag == TAG_NUMBER_OF_FRAMES:
        ex.number_of_frames = _ascii(el.value)
    elif tag == TAG_WINDOW_CENTER:
        ex.window_center = _first_value(el.value)
    elif tag == TAG_WINDOW_WIDTH:
        ex.window_width = _first_value(el.value)
    elif tag == TAG_RESCALE_INTERCEPT:
        ex.rescale_intercept = _first_value(el.value)
    elif tag == TAG_RESCALE_SLOPE:
        ex.rescale_slope = _first_value(el.value)
    elif tag == TAG_PIXEL_DATA:
        ex.pixel_data = el.value


def parse_dicom(data: bytes) -> DicomRecord:
    """Parse a Part-10 byte stream into a DicomRecord.

    Raises NotDicom, UnsupportedTransferSyntax, UnsupportedFeature,
    MissingTag, MultiFrameUnsupported, OutOfOrderTag, or Truncated.
    """
    if len(data) < 132 or data[128:132] != b"DICM":
        raise NotDicom("missing 128-byte preamble + DICM magic")
    cur = _Cursor(data, 132)

    # File meta group (0002) is always explicit VR little endian.
    meta: list[DicomElement] = []
    last_tag = (-1, -1)
    while cur.peek_u16() == 0x0002:
        el = _read_explicit_element(cur)
        if el.tag <= last_tag:
            raise OutOfOrderTag(f"tag {el.group:04X},{el.element:04X} not ascending")
        last_tag = el.tag
        meta.append(el)

    ts_uid = None
    for el in meta:
        if el.tag == TAG_TRANSFER_SYNTAX:
            ts_uid = _ascii(el.value)
    if ts_uid is None:
        raise UnsupportedTransferSyntax("transfer syntax UID absent from file meta")
    if ts_uid == IMPLICIT_LE:
        read_element = _read_implicit_element
    elif ts_uid == EXPLICIT_LE:
        read_element = _read_explicit_element
    else:
        raise UnsupportedTransferSyntax(ts_uid)

    rec = DicomRecord(transfer_syntax=ts_uid, elements=meta.copy())
    while cur.remaining() > 0:
        el = read_element(cur)
        if el.tag <= last_tag:
            raise OutOfOrderTag(f"tag {el.group:04X},{el.element:04X} not ascending")
        last_tag = el.tag
        rec.elements.append(el)
        if el.vr == "SQ":
            continue  # defined-length sequence: recorded, contents skipped
        _record_element(rec, el)

    ex = rec.extracted
    if ex.number_of_frames is not None:
        try:
            frames = int(ex.number_of_frames)
        except ValueError:
            raise BadDecimalString(f"NumberOfFrames {ex.number_of_frames!r}") from None
        if frames > 1:
            raise MultiFrameUnsupported(f"NumberOfFrames = {frames}")

    for tag_name, value in (
        ("Rows", ex.rows),
        ("Columns", ex.columns),
        ("BitsAllocated", ex.bits_allocated),
        ("PixelData", ex.pixel_data),
    ):
        if value is None:
            raise MissingTag(tag_name)
    return rec


def _parse_decimal(name: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise BadDecimalString(f"{name} {raw!r}") from None
    if not np.isfinite(value):
        raise BadDecimalString(f"{name} {raw!r} is not finite")
    return value


def extract_image(rec: DicomRecord) -> ExtractedImage:
    """Build a StoredImage + RescaleTransform (+ embedded window) from a record.

    The embedded window is kept only when both tags parse as finite decimals
    and the width is >= 1; a sub-1 width is dropped with a warning instead of
    an error. Raises InconsistentDimensions, UnsupportedFeature, or
    BadDecimalString.
    """
    ex = rec.extracted
    for tag_name, value in (("Rows", ex.rows), ("Columns", ex.columns),
                            ("BitsAllocated", ex.bits_allocated), ("PixelData", ex.pixel_data)):
        if value is None:
            raise MissingTag(tag_name)
    rows, columns = ex.rows, ex.columns
    if rows < 1 or columns < 1:
        raise InconsistentDimensions(f"Rows x Columns = {rows} x {columns}")

    bits_allocated = ex.bits_allocated
    if bits_allocated not in (8, 16):
        raise UnsupportedFeature(f"BitsAllocated {bits_allocated}")
    bits_stored = ex.bits_stored if ex.bits_stored is not None else bits_allocated
    if not 1 <= bits_stored <= bits_allocated:
        raise UnsupportedFeature(f"BitsStored {bits_stored} with BitsAllocated {bits_allocated}")
    high_bit = ex.high_bit if ex.high_bit is not None else bits_stored - 1
    if high_bit != bits_stored - 1:
        raise UnsupportedFeature(f"HighBit {high_bit} != BitsStored - 1")
    pixel_representation = ex.pixel_representation if ex.pixel_representation is not None else 0
    if pixel_representation not in (0, 1):
        raise UnsupportedFeature(f"PixelRepresentation {pixel_representation}")
    photometric = ex.photometric_interpretation or MONOCHROME2
    if photometric not in (MONOCHROME1, MONOCHROME2):
        raise UnsupportedFeature(f"PhotometricInterpretation {photometric!r}")

    bytes_per_sample = bits_allocated // 8
    needed = rows * columns * bytes_per_sample
    if len(ex.pixel_data) < needed:
        raise InconsistentDimensions(
            f"PixelData holds {len(ex.pixel_data)} bytes, need {needed}"
        )
    dtype = np.dtype("<u2") if bits_allocated == 16 else np.dtype("u1")
    values = np.frombuffer(ex.pixel_data[:needed], dtype=dtype).reshape(rows, columns)
    image = StoredImage(
        values=np.ascontiguousarray(values.astype(dtype.newbyteorder("="))),
        bits_allocated=bits_allocated,
        bits_stored=bits_stored,
        high_bit=high_bit,
        pixel_representation=pixel_representation,
        photometric=photometric,
    )

    slope = _parse_decimal("RescaleSlope", ex.rescale_slope) if ex.rescale_slope is not None else 1.0
    intercept = (
        _parse_decimal("RescaleIntercept", ex.rescale_intercept)
        if ex.rescale_intercept is not None
        else 0.0
    )
    if slope == 0:
        raise BadDecimalString("RescaleSlope must be nonzero")
    rescale = RescaleTransform(slope, intercept)

    warnings: list[str] = []
    window = None
    has_center, has_width = ex.window_center is not None, ex.window_width is not None
    if has_center != has_width:
        warnings.append("ignored unpaired WindowCenter/WindowWidth tag")
    elif has_center and has_width:
        center = _parse_decimal("WindowCenter", ex.window_center)
        width = _parse_decimal("WindowWidth", ex.window_width)
        if width >= 1:
            window = WindowSettings(level=center, width=width)
        else:
            warnings.append(f"ignored embedded window with width {width} < 1")

    return ExtractedImage(image=image, rescale=rescale, window=window, warnings=warnings)
