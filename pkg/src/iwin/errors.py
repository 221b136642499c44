"""Typed error taxonomy shared across the package.

Every failure mode raised by library code is a subclass of :class:`IwinError`,
so callers (CLI, HTTP service, fuzz harnesses) can rely on ``type(e).__name__``
as a stable, machine-readable error name.
"""


class IwinError(Exception):
    """Base class for all errors raised by this package."""


class EmptySelection(IwinError):
    """A mask-restricted operation found no pixels to operate on."""


class ConstantImage(IwinError):
    """Automatic thresholding needs at least two distinct intensity bins."""


class EmptyMask(IwinError):
    """A mask operation that requires foreground found none."""


class DimensionMismatch(IwinError):
    """Two rasters that must share dimensions do not."""


class DegenerateMask(IwinError):
    """A mask that must leave both classes nonempty covers everything."""


class FormatError(IwinError):
    """Base class for byte-level parsing failures (DICOM and PGM)."""


class NotDicom(FormatError):
    """Input lacks the 128-byte preamble + 'DICM' magic."""


class UnsupportedTransferSyntax(FormatError):
    """Transfer syntax is not implicit- or explicit-VR little endian."""


class UnsupportedFeature(FormatError):
    """Structurally valid DICOM using a feature outside the supported subset."""


class MissingTag(FormatError):
    """A required tag (Rows, Columns, BitsAllocated, PixelData) is absent."""


class MultiFrameUnsupported(FormatError):
    """NumberOfFrames > 1; only single-frame images are accepted."""


class Truncated(FormatError):
    """Byte stream ended in the middle of an element or sample block."""


class OutOfOrderTag(FormatError):
    """Top-level data elements are not strictly ascending by (group, element)."""


class InconsistentDimensions(FormatError):
    """Pixel data is too short for the declared Rows x Columns x depth."""


class BadDecimalString(FormatError):
    """A decimal/integer string tag could not be parsed as a finite number."""


class BadMagic(FormatError):
    """PGM input does not start with the binary 'P5' magic."""


class BadHeader(FormatError):
    """PGM header is malformed or uses an unsupported maxval."""
