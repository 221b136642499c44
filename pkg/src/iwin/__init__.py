"""Background-suppressed window width/level computation for grayscale images.

The pipeline: segment away the background, compute WW/WL from foreground
pixels only, and render through the standard linear display transform. See
the README for the CLI and HTTP service that wrap these functions.
"""

from .core import (
    MONOCHROME1,
    MONOCHROME2,
    SIGNED,
    UNSIGNED,
    Histogram,
    RealImage,
    RescaleTransform,
    StoredImage,
    default_bin_count,
    histogram,
    rescale_to_real,
)
from .dicom import DicomRecord, ExtractedImage, extract_image, parse_dicom
from .errors import (
    BadDecimalString,
    BadHeader,
    BadMagic,
    ConstantImage,
    DegenerateMask,
    DimensionMismatch,
    EmptyMask,
    EmptySelection,
    FormatError,
    InconsistentDimensions,
    IwinError,
    MissingTag,
    MultiFrameUnsupported,
    NotDicom,
    OutOfOrderTag,
    Truncated,
    UnsupportedFeature,
    UnsupportedTransferSyntax,
)
from .phantom import PhantomSpec, generate, to_stored_values
from .pgm import PgmImage, parse_pgm, read_pgm, write_pgm
from .suppress import (
    BinaryMask,
    DiceScore,
    StructuringElement,
    SuppressionParams,
    apply_mask,
    closing,
    dice,
    dilate,
    erode,
    fill_holes,
    largest_component,
    load_external_mask,
    mask_to_pgm_samples,
    opening,
    otsu_threshold,
    suppress_background,
)
from .window import (
    DEFAULT_STRATEGY,
    AutoWindowStrategy,
    BiasReport,
    DisplayImage,
    WindowSettings,
    apply_window,
    auto_window,
    build_lut,
    window_bias,
)

__version__ = "0.1.0"

__all__ = [
    "AutoWindowStrategy",
    "BadDecimalString",
    "BadHeader",
    "BadMagic",
    "BiasReport",
    "BinaryMask",
    "ConstantImage",
    "DEFAULT_STRATEGY",
    "DegenerateMask",
    "DiceScore",
    "DicomRecord",
    "DimensionMismatch",
    "DisplayImage",
    "EmptyMask",
    "EmptySelection",
    "ExtractedImage",
    "FormatError",
    "Histogram",
    "InconsistentDimensions",
    "IwinError",
    "MissingTag",
    "MONOCHROME1",
    "MONOCHROME2",
    "MultiFrameUnsupported",
    "NotDicom",
    "OutOfOrderTag",
    "PgmImage",
    "PhantomSpec",
    "RealImage",
    "RescaleTransform",
    "SIGNED",
    "StoredImage",
    "StructuringElement",
    "SuppressionParams",
    "Truncated",
    "UNSIGNED",
    "UnsupportedFeature",
    "UnsupportedTransferSyntax",
    "WindowSettings",
    "apply_mask",
    "apply_window",
    "auto_window",
    "build_lut",
    "closing",
    "default_bin_count",
    "dice",
    "dilate",
    "erode",
    "extract_image",
    "fill_holes",
    "generate",
    "histogram",
    "largest_component",
    "load_external_mask",
    "mask_to_pgm_samples",
    "opening",
    "otsu_threshold",
    "parse_dicom",
    "parse_pgm",
    "read_pgm",
    "rescale_to_real",
    "suppress_background",
    "to_stored_values",
    "window_bias",
    "write_pgm",
]
