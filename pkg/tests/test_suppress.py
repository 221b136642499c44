from fractions import Fraction

import numpy as np
import pytest

from iwin import (
    BinaryMask,
    ConstantImage,
    DimensionMismatch,
    EmptyMask,
    Histogram,
    PgmImage,
    RealImage,
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
    opening,
    otsu_threshold,
    suppress_background,
)

from conftest import random_mask


def mask_of(rows) -> BinaryMask:
    return BinaryMask(np.array(rows, dtype=bool))


def hist_of(counts) -> Histogram:
    return Histogram(0.0, float(len(counts)), np.asarray(counts, dtype=np.int64))


# --- independent reference implementations -------------------------------

def ref_otsu(counts) -> int:
    """Exhaustive between-class-variance search in exact rational arithmetic."""
    n = sum(counts)
    best_t, best_f = None, None
    for t in range(len(counts)):
        w0 = sum(counts[: t + 1])
        w1 = n - w0
        if w0 == 0 or w1 == 0:
            f = Fraction(0)
        else:
            mu0 = Fraction(sum(i * c for i, c in enumerate(counts[: t + 1])), w0)
            mu1 = Fraction(sum(i * c for i, c in enumerate(counts[t + 1 :], start=t + 1)), w1)
            f = Fraction(w0, n) * Fraction(w1, n) * (mu0 - mu1) ** 2
        if best_f is None or f > best_f:
            best_t, best_f = t, f
    return best_t


def ref_dilate(bits: np.ndarray, fp: np.ndarray) -> np.ndarray:
    h, w = bits.shape
    r = fp.shape[0] // 2
    out = np.zeros_like(bits)
    for y in range(h):
        for x in range(w):
            hit = False
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    if not fp[dy + r, dx + r]:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and bits[yy, xx]:
                        hit = True
            out[y, x] = hit
    return out


def ref_erode(bits: np.ndarray, fp: np.ndarray) -> np.ndarray:
    """Out-of-bounds neighbors impose no constraint (pad-with-foreground)."""
    h, w = bits.shape
    r = fp.shape[0] // 2
    out = np.zeros_like(bits)
    for y in range(h):
        for x in range(w):
            ok = True
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    if not fp[dy + r, dx + r]:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and not bits[yy, xx]:
                        ok = False
            out[y, x] = ok
    return out


def ref_fill_holes(bits: np.ndarray) -> np.ndarray:
    """Flood the background from border background pixels, 4-connected."""
    h, w = bits.shape
    reached = np.zeros((h, w), dtype=bool)
    stack = [
        (y, x)
        for y in range(h)
        for x in range(w)
        if (y in (0, h - 1) or x in (0, w - 1)) and not bits[y, x]
    ]
    for y, x in stack:
        reached[y, x] = True
    while stack:
        y, x = stack.pop()
        for yy, xx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if 0 <= yy < h and 0 <= xx < w and not bits[yy, xx] and not reached[yy, xx]:
                reached[yy, xx] = True
                stack.append((yy, xx))
    return bits | ~reached


# --- Otsu ------------------------------------------------------------------

class TestOtsu:
    def test_equal_spikes_tie_breaks_low(self):
        counts = [0] * 256
        counts[50] = 100
        counts[200] = 100
        assert otsu_threshold(hist_of(counts)) == 50

    def test_two_extreme_pixels(self):
        counts = [0] * 256
        counts[0] = 1
        counts[255] = 1
        assert otsu_threshold(hist_of(counts)) == 0

    def test_constant_image_rejected(self):
        counts = [0] * 16
        counts[3] = 9
        with pytest.raises(ConstantImage):
            otsu_threshold(hist_of(counts))

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            bins = int(rng.integers(2, 128))
            counts = rng.integers(0, 50, size=bins)
            if (counts > 0).sum() < 2:
                counts[0] += 1
                counts[-1] += 1
            h = hist_of(counts.tolist())
            assert otsu_threshold(h) == ref_otsu([int(c) for c in counts])


# --- morphology -------------------------------------------------------------

class TestMorphology:
    def test_dilate_center_pixel(self):
        m = np.zeros((5, 5), dtype=bool)
        m[2, 2] = True
        out = dilate(BinaryMask(m), StructuringElement.square(3))
        expected = np.zeros((5, 5), dtype=bool)
        expected[1:4, 1:4] = True
        assert np.array_equal(out.bits, expected)

    def test_erode_inverts_block(self):
        block = np.zeros((5, 5), dtype=bool)
        block[1:4, 1:4] = True
        out = erode(BinaryMask(block), StructuringElement.square(3))
        expected = np.zeros((5, 5), dtype=bool)
        expected[2, 2] = True
        assert np.array_equal(out.bits, expected)

    def test_close_removes_interior_hole(self):
        # interior case: block with 1px margin never touching the frame
        m = np.zeros((9, 9), dtype=bool)
        m[2:7, 2:7] = True
        m[4, 4] = False
        out = closing(BinaryMask(m), StructuringElement.square(3))
        assert out.bits[4, 4]
        expected = m.copy()
        expected[4, 4] = True
        assert np.array_equal(out.bits, expected)

    def test_matches_reference_semantics(self):
        rng = np.random.default_rng(3)
        elements = [
            StructuringElement.square(1),
            StructuringElement.square(3),
            StructuringElement.square(5),
            StructuringElement.disk(1),
            StructuringElement.disk(2),
        ]
        for _ in range(25):
            m = random_mask(rng, (int(rng.integers(3, 12)), int(rng.integers(3, 12))))
            se = elements[rng.integers(len(elements))]
            assert np.array_equal(dilate(m, se).bits, ref_dilate(m.bits, se.footprint))
            assert np.array_equal(erode(m, se).bits, ref_erode(m.bits, se.footprint))

    def test_extensivity_and_idempotence(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            m = random_mask(rng, (16, 16))
            se = StructuringElement.disk(float(rng.integers(0, 4)))
            er, di = erode(m, se), dilate(m, se)
            assert not (er.bits & ~m.bits).any()  # erode(m) <= m
            assert not (m.bits & ~di.bits).any()  # m <= dilate(m)
            op, cl = opening(m, se), closing(m, se)
            assert np.array_equal(opening(op, se).bits, op.bits)
            assert np.array_equal(closing(cl, se).bits, cl.bits)

    def test_duality(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            m = random_mask(rng, (14, 14))
            se = StructuringElement.square(int(rng.integers(0, 3)) * 2 + 1)
            complement = BinaryMask(~m.bits)
            assert np.array_equal(dilate(m, se).bits, ~erode(complement, se).bits)

    def test_all_true_is_close_fixpoint(self):
        m = BinaryMask(np.ones((6, 6), dtype=bool))
        assert np.array_equal(closing(m, StructuringElement.disk(2)).bits, m.bits)

    def test_element_validation(self):
        with pytest.raises(ValueError):
            StructuringElement.square(4)
        with pytest.raises(ValueError):
            StructuringElement.square(-1)
        with pytest.raises(ValueError):
            StructuringElement.disk(-0.5)
        assert StructuringElement.disk(0).footprint.tolist() == [[True]]


# --- fill_holes --------------------------------------------------------------

class TestFillHoles:
    def test_donut_becomes_disk(self):
        yy, xx = np.mgrid[0:15, 0:15]
        d2 = (yy - 7) ** 2 + (xx - 7) ** 2
        ring = (d2 <= 36) & (d2 >= 9)
        filled = fill_holes(BinaryMask(ring))
        assert np.array_equal(filled.bits, d2 <= 36)

    def test_open_channel_untouched(self):
        m = np.ones((5, 5), dtype=bool)
        m[2, 2] = False
        m[2, 3] = False
        m[2, 4] = False  # channel to the border
        filled = fill_holes(BinaryMask(m))
        assert np.array_equal(filled.bits, m)

    def test_all_true_fixpoint(self):
        m = BinaryMask(np.ones((4, 4), dtype=bool))
        assert np.array_equal(fill_holes(m).bits, m.bits)

    def test_matches_flood_fill_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            m = random_mask(rng, (int(rng.integers(2, 16)), int(rng.integers(2, 16))))
            assert np.array_equal(fill_holes(m).bits, ref_fill_holes(m.bits))

    def test_extensive_and_idempotent(self):
        rng = np.random.default_rng(22)
        for _ in range(20):
            m = random_mask(rng, (12, 12))
            filled = fill_holes(m)
            assert not (m.bits & ~filled.bits).any()
            assert np.array_equal(fill_holes(filled).bits, filled.bits)


# --- components --------------------------------------------------------------

class TestLargestComponent:
    def test_strict_maximum(self):
        m = np.zeros((6, 10), dtype=bool)
        m[0, 0:5] = True  # 5 px
        m[4, 0:3] = True  # 3 px
        out = largest_component(BinaryMask(m))
        assert out.count == 5
        assert out.bits[0, 0:5].all()

    def test_tie_breaks_by_first_index(self):
        m = np.zeros((6, 16), dtype=bool)
        m[0:4, 7] = True  # first pixel index 7
        m[1:5, 14] = True  # first pixel index 30
        out = largest_component(BinaryMask(m))
        assert out.bits[0, 7]
        assert not out.bits[1, 14]

    def test_single_blob_identity(self):
        m = np.zeros((4, 4), dtype=bool)
        m[1:3, 1:3] = True
        assert np.array_equal(largest_component(BinaryMask(m)).bits, m)

    def test_empty_raises(self):
        with pytest.raises(EmptyMask):
            largest_component(BinaryMask(np.zeros((3, 3), dtype=bool)))

    def test_diagonal_is_connected(self):
        m = np.zeros((4, 4), dtype=bool)
        m[0, 0] = m[1, 1] = m[2, 2] = True  # one 8-connected component
        assert largest_component(BinaryMask(m)).count == 3


# --- pipeline ----------------------------------------------------------------

class TestSuppressBackground:
    def test_phantom_defaults(self, phantom_one, phantom_one_mask):
        _, truth = phantom_one
        assert dice(phantom_one_mask, truth).value >= 0.95

    def test_fixed_plus_infinity_empty(self, phantom_one):
        img, _ = phantom_one
        with pytest.raises(EmptyMask):
            suppress_background(img, SuppressionParams(threshold=float("inf")))

    def test_fixed_minus_infinity_all_true(self):
        rng = np.random.default_rng(4)
        img = RealImage.from_values(rng.uniform(0, 10, size=(9, 9)))
        mask = suppress_background(img, SuppressionParams(threshold=float("-inf")))
        assert mask.bits.all()

    def test_constant_image_propagates(self):
        img = RealImage.from_values(np.full((5, 5), 7.0))
        with pytest.raises(ConstantImage):
            suppress_background(img)

    def test_dims_preserved(self, phantom_one, phantom_one_mask):
        img, _ = phantom_one
        assert phantom_one_mask.bits.shape == img.values.shape

    def test_fixed_threshold_invariant_to_subthreshold_mutation(self):
        rng = np.random.default_rng(17)
        values = rng.uniform(0, 100, size=(20, 20))
        values[5:15, 5:15] += 500
        img = RealImage.from_values(values)
        params = SuppressionParams(threshold=200.0)
        mask1 = suppress_background(img, params)
        mutated = values.copy()
        below = values <= 200.0
        mutated[below] = rng.uniform(0, 200, size=int(below.sum()))
        mask2 = suppress_background(RealImage.from_values(mutated), params)
        assert np.array_equal(mask1.bits, mask2.bits)

    def test_keep_area_fraction(self):
        values = np.zeros((10, 10))
        values[0:4, 0:4] = 100.0  # 16 px
        values[7:9, 7:9] = 100.0  # 4 px
        img = RealImage.from_values(values)
        params = SuppressionParams(
            threshold=50.0,
            close_element=StructuringElement.disk(0),
            keep=0.10,  # 10 px bar: keeps the 16 px blob only
        )
        mask = suppress_background(img, params)
        assert mask.bits[0:4, 0:4].all()
        assert not mask.bits[7:9, 7:9].any()

    def test_dilate_margin_grows_mask(self, phantom_one):
        img, _ = phantom_one
        base = suppress_background(img)
        grown = suppress_background(
            img, SuppressionParams(dilate_margin=StructuringElement.disk(2))
        )
        assert grown.count > base.count
        assert not (base.bits & ~grown.bits).any()


# --- external masks, dice, apply_mask ----------------------------------------

class TestMaskIO:
    def test_binary_pgm_mask(self):
        samples = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        pgm = PgmImage(2, 2, 255, samples)
        mask = load_external_mask((2, 2), pgm)
        assert mask.bits.tolist() == [[False, True], [True, False]]

    def test_16bit_mask_same_semantics(self):
        samples = np.array([[0, 65535]], dtype=np.uint16)
        mask = load_external_mask((1, 2), PgmImage(2, 1, 65535, samples))
        assert mask.bits.tolist() == [[False, True]]

    def test_dimension_mismatch(self):
        pgm = PgmImage(64, 64, 255, np.zeros((64, 64), dtype=np.uint8))
        with pytest.raises(DimensionMismatch):
            load_external_mask((128, 128), pgm)


class TestDice:
    def test_identity(self):
        m = mask_of([[1, 0], [1, 1]])
        assert dice(m, m).value == 1.0

    def test_disjoint(self):
        a = mask_of([[1, 0], [0, 0]])
        b = mask_of([[0, 1], [0, 0]])
        assert dice(a, b).value == 0.0

    def test_hand_counted(self):
        a = mask_of([[1, 1, 1, 1, 0, 0], [0, 0, 0, 0, 0, 0]])  # |A| = 4
        b = mask_of([[0, 1, 1, 1, 1, 1], [1, 0, 0, 0, 0, 0]])  # |B| = 6, overlap 3
        score = dice(a, b)
        assert (score.a_count, score.b_count, score.intersection) == (4, 6, 3)
        assert score.value == 0.6

    def test_both_empty_scores_one(self):
        empty = mask_of([[0, 0]])
        assert dice(empty, empty).value == 1.0

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            a = random_mask(rng, (9, 9))
            b = random_mask(rng, (9, 9))
            ab, ba = dice(a, b), dice(b, a)
            assert ab.value == ba.value
            assert 0.0 <= ab.value <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dice(mask_of([[1]]), mask_of([[1, 0]]))


class TestApplyMask:
    def test_all_true_identity(self):
        img = RealImage.from_values(np.arange(6, dtype=np.float64).reshape(2, 3))
        out = apply_mask(img, BinaryMask(np.ones((2, 3), dtype=bool)))
        assert np.array_equal(out.values, img.values)

    def test_all_false_constant(self):
        img = RealImage.from_values(np.arange(6, dtype=np.float64).reshape(2, 3))
        out = apply_mask(img, BinaryMask(np.zeros((2, 3), dtype=bool)), background_value=-5.0)
        assert (out.values == -5.0).all()

    def test_checkerboard_pointwise(self):
        values = np.arange(16, dtype=np.float64).reshape(4, 4)
        img = RealImage.from_values(values)
        checker = (np.indices((4, 4)).sum(axis=0) % 2) == 0
        out = apply_mask(img, BinaryMask(checker), background_value=99.0)
        assert np.array_equal(out.values[checker], values[checker])
        assert (out.values[~checker] == 99.0).all()

    def test_default_background_is_min(self):
        img = RealImage.from_values(np.array([[10.0, 20.0], [30.0, 40.0]]))
        out = apply_mask(img, BinaryMask(np.array([[True, False], [False, False]])))
        assert out.values[0, 1] == 10.0
