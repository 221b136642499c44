"""Stored pixels vs real values: rescale, sign extension, and PGM round trips.

Scanner files store integers; display math wants modality units. This demo
walks the conversions, including the 12-bit-signed-with-overlay-bit case that
makes naive casts go wrong.

Run:  python demos/04_pixels_and_formats.py
"""

import numpy as np

from iwin import (
    MONOCHROME2,
    RescaleTransform,
    SIGNED,
    StoredImage,
    UNSIGNED,
    read_pgm,
    rescale_to_real,
    write_pgm,
)

# 1. Plain 8-bit PGM round trip: write(read(x)) is the identity, bit for bit.
arr = np.arange(12, dtype=np.uint8).reshape(3, 4)
pgm_bytes = write_pgm(arr)
print("PGM header + payload:", pgm_bytes[:14], f"... ({len(pgm_bytes)} bytes)")
back = read_pgm(pgm_bytes)
print("round trip identical:", np.array_equal(back.values, arr))

# 2. 16-bit PGMs are big-endian on disk by convention, native in memory.
wide = np.array([[256, 513]], dtype=np.uint16)
print("16-bit sample bytes on disk:", write_pgm(wide)[-4:])

# 3. Modality rescale: stored integers -> real units via slope/intercept.
stored = StoredImage(np.array([[0, 600, 1200]], dtype=np.uint16),
                     bits_allocated=16, bits_stored=16, high_bit=15,
                     pixel_representation=UNSIGNED, photometric=MONOCHROME2)
real = rescale_to_real(stored, RescaleTransform(slope=2, intercept=-1000))
print("stored [0, 600, 1200] -> real", real.values[0].tolist())

# 4. Signed 12-bit data inside 16-bit words: the high nibble may hold overlay
#    bits that must be masked off before sign extension. 0x8FFF has overlay
#    bit 15 set; its 12-bit payload 0xFFF is -1 in two's complement.
tricky = StoredImage(np.array([[0x8FFF, 0x0800, 0x07FF]], dtype=np.uint16),
                     bits_allocated=16, bits_stored=12, high_bit=11,
                     pixel_representation=SIGNED, photometric=MONOCHROME2)
decoded = rescale_to_real(tricky)
print("12-bit signed [0x8FFF, 0x0800, 0x07FF] ->", decoded.values[0].tolist())

# 5. DICOM ingestion shares this machinery; point the CLI at a scanner export:
#       iwin info --input your_export.dcm --json
#    Supported: implicit/explicit VR little endian, single frame, grayscale.
print("for DICOM files, try: iwin info --input <file.dcm> --json")
