"""Mask machinery close-up: morphology, hole filling, component selection, DICE.

Small, printable grids so each operation's effect is visible character by
character.

Run:  python demos/03_morphology_and_masks.py
"""

import numpy as np

from iwin import (
    BinaryMask,
    StructuringElement,
    closing,
    dice,
    dilate,
    erode,
    fill_holes,
    largest_component,
    opening,
)


def show(title: str, mask: BinaryMask) -> None:
    print(title)
    for row in mask.bits:
        print("   " + "".join("#" if v else "." for v in row))


# Start from a noisy blob: a square with a hole, plus salt speckles.
bits = np.zeros((11, 13), dtype=bool)
bits[2:9, 2:9] = True
bits[5, 5] = False          # interior hole
bits[1, 11] = True          # speckle
bits[9, 11] = True          # speckle
m = BinaryMask(bits)
show("input (blob + hole + speckles):", m)

se = StructuringElement.square(3)
show("\nerode, square(3)  [speckles gone, blob shrinks]:", erode(m, se))
show("\ndilate, square(3) [everything grows]:", dilate(m, se))
show("\nopening  [erode then dilate: speckles removed, blob size kept]:", opening(m, se))
show("\nclosing  [dilate then erode: hole closed, speckles kept]:", closing(m, se))
show("\nfill_holes [only enclosed background flips]:", fill_holes(m))
show("\nlargest_component [speckles dropped without shape change]:", largest_component(m))

# The usual cleanup recipe is closing + fill + largest component, which is
# exactly what suppress_background chains after thresholding.
cleaned = largest_component(fill_holes(closing(m, StructuringElement.disk(1))))
show("\ncleaned = largest_component(fill_holes(closing(m, disk(1)))):", cleaned)

reference = np.zeros((11, 13), dtype=bool)
reference[2:9, 2:9] = True
score = dice(cleaned, BinaryMask(reference))
print(f"\ndice(cleaned, ideal blob) = {score.value:.4f} "
      f"(|A|={score.a_count}, |B|={score.b_count}, overlap={score.intersection})")
